// SPDX-License-Identifier: Apache-2.0

#include "molt/chem/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "molt/chem/xyz.hpp"
#include "molt/common.hpp"
#include "molt/rng.hpp"

namespace molt::chem {

namespace {

const char* kAllowedUnits[] = {"eV", "kcal/mol", "dimensionless"};

bool unit_allowed(const std::string& unit) {
  for (const char* u : kAllowedUnits) {
    if (unit == u) return true;
  }
  return false;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<double> LabeledDataset::labels() const {
  std::vector<double> y;
  y.reserve(entries.size());
  for (const auto& e : entries) y.push_back(e.label);
  return y;
}

std::vector<Molecule> LabeledDataset::molecules() const {
  std::vector<Molecule> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.molecule);
  return out;
}

void LabeledDataset::validate() const {
  if (!unit_allowed(unit)) {
    throw DataError("dataset unit '" + unit +
                    "' not one of eV, kcal/mol, dimensionless");
  }
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    e.molecule.validate();
    if (!std::isfinite(e.label)) {
      throw DataError("dataset entry '" + e.molecule.id +
                      "' has a non-finite label");
    }
    if (!seen.insert(e.molecule.id).second) {
      throw DataError("duplicate dataset id '" + e.molecule.id + "'");
    }
  }
}

void SplitSpec::validate() const {
  for (double f : {train_fraction, val_fraction, test_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw ConfigError("split fraction " + fmt_double(f) +
                        " outside [0, 1]");
    }
  }
  const double sum = train_fraction + val_fraction + test_fraction;
  if (sum > 1.0 + 1e-12) {
    throw ConfigError("split fractions sum to " + fmt_double(sum) + " > 1");
  }
}

std::vector<std::pair<std::string, double>> read_labels_csv(
    const std::string& labels_file) {
  std::ifstream in(labels_file, std::ios::binary);
  if (!in) throw DataError("cannot open labels file '" + labels_file + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(labels_file + ": empty labels file");
  }
  if (strip_cr(line) != "id,label") {
    throw DataError(labels_file + ": expected header 'id,label', got '" +
                    strip_cr(line) + "'");
  }

  std::vector<std::pair<std::string, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError(labels_file + " line " + std::to_string(line_no) +
                      ": expected 'id,label'");
    }
    const std::string id = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    const char* begin = value.c_str();
    char* end = nullptr;
    const double label = std::strtod(begin, &end);
    if (value.empty() || end != begin + value.size() ||
        !std::isfinite(label)) {
      throw DataError(labels_file + " line " + std::to_string(line_no) +
                      ": unparseable label '" + value + "' for id '" + id +
                      "'");
    }
    rows.emplace_back(id, label);
  }
  return rows;
}

void write_labels_csv(const std::vector<std::pair<std::string, double>>& rows,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write labels file '" + path + "'");
  out << "id,label\n";
  for (const auto& [id, label] : rows) {
    out << id << ',' << fmt_double(label) << '\n';
  }
}

LabeledDataset load_dataset(const std::string& structure_dir,
                            const std::string& labels_file,
                            const std::string& unit) {
  if (!std::filesystem::is_directory(structure_dir)) {
    throw DataError("structure directory '" + structure_dir +
                    "' does not exist");
  }
  const auto rows = read_labels_csv(labels_file);

  LabeledDataset ds;
  ds.unit = unit;
  std::unordered_set<std::string> seen;
  for (const auto& [id, label] : rows) {
    if (!seen.insert(id).second) {
      throw DataError(labels_file + ": duplicate id '" + id + "'");
    }
    const auto path =
        (std::filesystem::path(structure_dir) / (id + ".xyz")).string();
    if (!std::filesystem::exists(path)) {
      throw DataError("no structure file for labeled id '" + id +
                      "' (expected " + path + ")");
    }
    LabeledEntry entry;
    entry.molecule = read_xyz_file(path, id);
    entry.label = label;
    ds.entries.push_back(std::move(entry));
  }
  ds.validate();
  return ds;
}

SplitResult split_dataset(const LabeledDataset& ds, const SplitSpec& spec) {
  spec.validate();
  if (ds.entries.empty()) throw DataError("cannot split an empty dataset");

  const std::size_t n = ds.entries.size();
  const double nd = static_cast<double>(n);
  auto floor_count = [nd](double f) {
    return static_cast<std::size_t>(std::floor(f * nd + 1e-9));
  };
  std::size_t n_train = floor_count(spec.train_fraction);
  const std::size_t n_val = floor_count(spec.val_fraction);
  const std::size_t n_test = floor_count(spec.test_fraction);
  const std::size_t requested = floor_count(
      spec.train_fraction + spec.val_fraction + spec.test_fraction);
  if (requested > n_train + n_val + n_test) {
    n_train += requested - (n_train + n_val + n_test);
  }

  // Canonical order by id so the assignment is independent of how the
  // dataset happened to be enumerated.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ds.entries[a].molecule.id < ds.entries[b].molecule.id;
  });
  SplitRng rng(spec.seed, "split");
  rng.shuffle(order);

  SplitResult result;
  result.train.unit = result.val.unit = result.test.unit = ds.unit;
  for (std::size_t i = 0; i < n_train + n_val + n_test && i < n; ++i) {
    LabeledDataset& target = (i < n_train)           ? result.train
                             : (i < n_train + n_val) ? result.val
                                                     : result.test;
    target.entries.push_back(ds.entries[order[i]]);
  }
  return result;
}

LabeledDataset filter_by_elements(const LabeledDataset& ds,
                                  const std::set<int>& forbidden,
                                  const std::set<int>& required) {
  LabeledDataset out;
  out.unit = ds.unit;
  for (const auto& e : ds.entries) {
    bool keep = true;
    for (int z : forbidden) {
      if (e.molecule.contains_element(z)) {
        keep = false;
        break;
      }
    }
    if (keep) {
      for (int z : required) {
        if (!e.molecule.contains_element(z)) {
          keep = false;
          break;
        }
      }
    }
    if (keep) out.entries.push_back(e);
  }
  return out;
}

std::uint64_t dataset_hash(const LabeledDataset& ds) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& e : ds.entries) {
    feed(e.molecule.id.data(), e.molecule.id.size());
    feed(&e.label, sizeof(e.label));
  }
  return h;
}

}  // namespace molt::chem
