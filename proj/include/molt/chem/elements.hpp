// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_CHEM_ELEMENTS_HPP_
#define MOLT_CHEM_ELEMENTS_HPP_

#include <optional>
#include <string>
#include <string_view>

namespace molt::chem {

// Symbol table covers Z = 1..86 (H through Rn); OE62 contains heavy
// elements up to iodine, so the lighter-only tables are not enough.
inline constexpr int kMaxElement = 86;

// Returns the atomic number for a (case-insensitive) element symbol,
// or nullopt for an unknown symbol.
std::optional<int> element_number(std::string_view symbol);

// Returns the canonical symbol for Z in [1, 86]; throws std::out_of_range
// otherwise.
const std::string& element_symbol(int atomic_number);

}  // namespace molt::chem

#endif  // MOLT_CHEM_ELEMENTS_HPP_
