// SPDX-License-Identifier: Apache-2.0

#include "molt/chem/elements.hpp"

#include <array>
#include <cctype>
#include <stdexcept>
#include <unordered_map>

namespace molt::chem {

namespace {

const std::array<std::string, kMaxElement + 1> kSymbols = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn"};

std::unordered_map<std::string, int> build_lookup() {
  std::unordered_map<std::string, int> m;
  for (int z = 1; z <= kMaxElement; ++z) m[kSymbols[z]] = z;
  return m;
}

const std::unordered_map<std::string, int>& lookup() {
  static const auto m = build_lookup();
  return m;
}

std::string normalize(std::string_view symbol) {
  std::string s;
  s.reserve(symbol.size());
  for (char c : symbol) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    for (std::size_t i = 1; i < s.size(); ++i) {
      s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    }
  }
  return s;
}

}  // namespace

std::optional<int> element_number(std::string_view symbol) {
  const auto it = lookup().find(normalize(symbol));
  if (it == lookup().end()) return std::nullopt;
  return it->second;
}

const std::string& element_symbol(int atomic_number) {
  if (atomic_number < 1 || atomic_number > kMaxElement) {
    throw std::out_of_range("element_symbol: Z=" +
                            std::to_string(atomic_number) +
                            " outside supported range 1..86");
  }
  return kSymbols[static_cast<std::size_t>(atomic_number)];
}

}  // namespace molt::chem
