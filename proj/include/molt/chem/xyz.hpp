// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_CHEM_XYZ_HPP_
#define MOLT_CHEM_XYZ_HPP_

#include <string>
#include <string_view>

#include "molt/chem/molecule.hpp"

namespace molt::chem {

// Parses standard XYZ text: atom count line, comment line, then one
// "Symbol x y z" line per atom. Throws DataError with a line number for
// count mismatches, unknown element symbols, and non-numeric coordinates.
Molecule parse_xyz(std::string_view text, std::string_view id = "");

// Serializes back to XYZ with 14 significant digits so that
// parse_xyz(write_xyz(m)) round-trips coordinates well below 1e-10 A.
std::string write_xyz(const Molecule& mol);

Molecule read_xyz_file(const std::string& path, std::string_view id = "");
void write_xyz_file(const Molecule& mol, const std::string& path);

}  // namespace molt::chem

#endif  // MOLT_CHEM_XYZ_HPP_
