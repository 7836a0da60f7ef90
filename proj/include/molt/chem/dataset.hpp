// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_CHEM_DATASET_HPP_
#define MOLT_CHEM_DATASET_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "molt/chem/molecule.hpp"

namespace molt::chem {

struct LabeledEntry {
  Molecule molecule;
  double label = 0.0;
};

// Molecules paired with scalar labels; all entries share one unit.
struct LabeledDataset {
  std::vector<LabeledEntry> entries;
  std::string unit;  // "eV", "kcal/mol", or "dimensionless"

  std::size_t size() const { return entries.size(); }
  std::vector<double> labels() const;
  std::vector<Molecule> molecules() const;

  // Unit whitelist, unique ids, finite labels. Throws DataError.
  void validate() const;
};

struct SplitSpec {
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;  // fractions in [0,1], sum <= 1 + 1e-12
};

struct SplitResult {
  LabeledDataset train;
  LabeledDataset val;
  LabeledDataset test;
};

// Loads <id>.xyz files from structure_dir for every row of the labels CSV
// (header "id,label"); result preserves CSV row order.
LabeledDataset load_dataset(const std::string& structure_dir,
                            const std::string& labels_file,
                            const std::string& unit);

// Reads just the "id,label" CSV (used for calibration against a second
// label source).
std::vector<std::pair<std::string, double>> read_labels_csv(
    const std::string& labels_file);

void write_labels_csv(const std::vector<std::pair<std::string, double>>& rows,
                      const std::string& path);

// Deterministic split: entries are canonically ordered by id, shuffled with
// the spec seed, and cut into train/val/test sizes floor(fraction * N); the
// flooring remainder (relative to the total requested mass) goes to train.
// Depends only on (entry ids, fractions, seed).
SplitResult split_dataset(const LabeledDataset& ds, const SplitSpec& spec);

// Keeps molecules containing no forbidden element and at least one atom of
// every required element; preserves order.
LabeledDataset filter_by_elements(const LabeledDataset& ds,
                                  const std::set<int>& forbidden,
                                  const std::set<int>& required);

// FNV-1a hash over ids and label bytes; recorded in checkpoint provenance.
std::uint64_t dataset_hash(const LabeledDataset& ds);

}  // namespace molt::chem

#endif  // MOLT_CHEM_DATASET_HPP_
