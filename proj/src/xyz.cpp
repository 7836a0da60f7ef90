// SPDX-License-Identifier: Apache-2.0

#include "molt/chem/xyz.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "molt/chem/elements.hpp"
#include "molt/common.hpp"

namespace molt::chem {

namespace {

// Splits into lines, accepting LF and CRLF endings.
std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + token.size() && !token.empty();
}

bool is_blank(const std::string& line) {
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Molecule parse_xyz(std::string_view text, std::string_view id) {
  const auto lines = split_lines(text);
  if (lines.empty() || is_blank(lines[0])) {
    throw DataError("xyz line 1: missing atom count");
  }

  long declared = 0;
  {
    std::istringstream ss(lines[0]);
    if (!(ss >> declared) || declared < 0) {
      throw DataError("xyz line 1: invalid atom count '" + lines[0] + "'");
    }
    std::string rest;
    if (ss >> rest) {
      throw DataError("xyz line 1: trailing content after atom count");
    }
  }

  Molecule mol;
  mol.id = id;
  mol.atomic_numbers.reserve(static_cast<std::size_t>(declared));
  mol.positions.reserve(static_cast<std::size_t>(declared));

  // Line 2 is the comment; atom lines start at line 3.
  std::size_t line_no = 2;
  for (long i = 0; i < declared; ++i) {
    ++line_no;
    if (line_no > lines.size() || is_blank(lines[line_no - 1])) {
      throw DataError("xyz line " + std::to_string(line_no) + ": declared " +
                      std::to_string(declared) + " atoms, found " +
                      std::to_string(i));
    }
    std::istringstream ss(lines[line_no - 1]);
    std::string symbol, xs, ys, zs;
    if (!(ss >> symbol >> xs >> ys >> zs)) {
      throw DataError("xyz line " + std::to_string(line_no) +
                      ": expected 'Symbol x y z', got '" + lines[line_no - 1] +
                      "'");
    }
    const auto z = element_number(symbol);
    if (!z) {
      throw DataError("xyz line " + std::to_string(line_no) +
                      ": unknown element symbol '" + symbol + "'");
    }
    Vec3 pos;
    const std::string* coords[3] = {&xs, &ys, &zs};
    for (int k = 0; k < 3; ++k) {
      if (!parse_double(*coords[k], pos[k])) {
        throw DataError("xyz line " + std::to_string(line_no) +
                        ": non-numeric coordinate '" + *coords[k] + "'");
      }
    }
    mol.atomic_numbers.push_back(*z);
    mol.positions.push_back(pos);
  }

  // Anything non-blank past the declared atoms means the count was wrong.
  for (std::size_t extra = line_no; extra < lines.size(); ++extra) {
    if (!is_blank(lines[extra])) {
      throw DataError("xyz line " + std::to_string(extra + 1) + ": declared " +
                      std::to_string(declared) + " atoms, found more");
    }
  }

  mol.validate();
  return mol;
}

std::string write_xyz(const Molecule& mol) {
  mol.validate();
  std::string out = std::to_string(mol.size());
  out += '\n';
  out += mol.id;
  out += '\n';
  char buf[160];
  for (std::size_t i = 0; i < mol.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s %.14g %.14g %.14g\n",
                  element_symbol(mol.atomic_numbers[i]).c_str(),
                  mol.positions[i][0], mol.positions[i][1],
                  mol.positions[i][2]);
    out += buf;
  }
  return out;
}

Molecule read_xyz_file(const std::string& path, std::string_view id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open structure file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_xyz(ss.str(), id);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_xyz_file(const Molecule& mol, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write structure file '" + path + "'");
  out << write_xyz(mol);
}

}  // namespace molt::chem
