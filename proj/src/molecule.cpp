// SPDX-License-Identifier: Apache-2.0

#include "molt/chem/molecule.hpp"

#include <algorithm>
#include <cmath>

#include "molt/common.hpp"

namespace molt::chem {

void Molecule::validate() const {
  if (atomic_numbers.size() != positions.size()) {
    throw DataError("molecule '" + id + "': " +
                    std::to_string(atomic_numbers.size()) +
                    " atomic numbers but " + std::to_string(positions.size()) +
                    " positions");
  }
  for (std::size_t i = 0; i < atomic_numbers.size(); ++i) {
    if (atomic_numbers[i] < 1) {
      throw DataError("molecule '" + id + "': atom " + std::to_string(i) +
                      " has non-positive atomic number");
    }
    for (double c : positions[i]) {
      if (!std::isfinite(c)) {
        throw DataError("molecule '" + id + "': atom " + std::to_string(i) +
                        " has a non-finite coordinate");
      }
    }
  }
}

double Molecule::distance(std::size_t i, std::size_t j) const {
  const double dx = positions[i][0] - positions[j][0];
  const double dy = positions[i][1] - positions[j][1];
  const double dz = positions[i][2] - positions[j][2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool Molecule::contains_element(int z) const {
  return std::find(atomic_numbers.begin(), atomic_numbers.end(), z) !=
         atomic_numbers.end();
}

}  // namespace molt::chem
