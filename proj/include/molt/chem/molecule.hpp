// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_CHEM_MOLECULE_HPP_
#define MOLT_CHEM_MOLECULE_HPP_

#include <array>
#include <string>
#include <vector>

namespace molt::chem {

using Vec3 = std::array<double, 3>;

// Atomic numbers plus Cartesian coordinates in Angstrom.
struct Molecule {
  std::string id;
  std::vector<int> atomic_numbers;
  std::vector<Vec3> positions;

  std::size_t size() const { return atomic_numbers.size(); }

  // Checks the structural invariants: matching lengths, Z >= 1, finite
  // coordinates. Throws DataError on violation.
  void validate() const;

  double distance(std::size_t i, std::size_t j) const;
  bool contains_element(int z) const;
};

}  // namespace molt::chem

#endif  // MOLT_CHEM_MOLECULE_HPP_
