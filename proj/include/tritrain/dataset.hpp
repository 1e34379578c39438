// Copyright 2026 The tritrain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRITRAIN_DATASET_HPP_
#define TRITRAIN_DATASET_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tritrain {

using ClassIndex = std::uint32_t;

/// One sample. Labels are absent for pool examples; their ground truth lives
/// in the owning pool's hidden-label table.
struct Example {
  std::string id;
  std::vector<double> features;
  std::optional<ClassIndex> label;

  bool operator==(const Example&) const = default;
};

/// Ordered set of class names; a class index is a position in it.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  /// Classes named "0" .. "k-1".
  static Alphabet numbered(std::size_t k);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::string& name(ClassIndex c) const;
  std::optional<ClassIndex> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const Alphabet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassIndex> index_;
};

/// Examples that all carry a label from `alphabet`.
///
/// Construction validates the invariants (unique ids, one dimensionality,
/// labels present and in range) and throws DatasetError otherwise. The value
/// is immutable afterwards.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(Alphabet alphabet, std::vector<Example> examples);

  const Alphabet& alphabet() const { return alphabet_; }
  std::span<const Example> examples() const { return examples_; }
  const Example& operator[](std::size_t i) const { return examples_[i]; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  /// Feature dimensionality; 0 for an empty dataset.
  std::size_t dim() const { return dim_; }
  ClassIndex label(std::size_t i) const { return *examples_[i].label; }
  bool contains(std::string_view id) const;

  bool operator==(const LabeledDataset& other) const {
    return alphabet_ == other.alphabet_ && examples_ == other.examples_;
  }

 private:
  Alphabet alphabet_;
  std::vector<Example> examples_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
};

/// Examples withheld from training. Ground truth is kept aside so the
/// ground-truth strategies and evaluation can reveal it.
class UnlabeledPool {
 public:
  UnlabeledPool() = default;
  /// `examples` must not carry labels; `hidden_labels` must cover exactly
  /// their ids.
  UnlabeledPool(Alphabet alphabet, std::vector<Example> examples,
                std::unordered_map<std::string, ClassIndex> hidden_labels);

  const Alphabet& alphabet() const { return alphabet_; }
  std::span<const Example> examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  bool contains(std::string_view id) const;
  /// Position of `id` in pool order; throws DatasetError when absent.
  std::size_t position(std::string_view id) const;
  ClassIndex hidden_label(std::string_view id) const;

  /// The pool as a labeled set using the hidden labels (evaluation only).
  LabeledDataset reveal() const;

  bool operator==(const UnlabeledPool& other) const {
    return alphabet_ == other.alphabet_ && examples_ == other.examples_ &&
           hidden_ == other.hidden_;
  }

 private:
  Alphabet alphabet_;
  std::vector<Example> examples_;
  std::unordered_map<std::string, ClassIndex> hidden_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class SplitMode { DisjointThirds, Bootstrap };

std::string_view split_mode_name(SplitMode mode);
std::optional<SplitMode> parse_split_mode(std::string_view text);

enum class Provenance { GroundTruth, Predicted };

std::string_view provenance_name(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view text);

/// A pool example chosen for augmentation and the label it will train with.
struct Selection {
  std::string id;
  ClassIndex assigned_label = 0;
  Provenance provenance = Provenance::GroundTruth;

  bool operator==(const Selection&) const = default;
};

// --- ingestion -------------------------------------------------------------

/// Reads a labeled CSV. Ids come from an `id` column when present, otherwise
/// `row<N>` (1-based data row). Without `alphabet_override` the alphabet is
/// the sorted set of observed labels (numeric order when every label is an
/// integer).
LabeledDataset load_csv(const std::filesystem::path& path,
                        std::string_view label_column = "label",
                        const std::optional<Alphabet>& alphabet_override = {});

/// Reads a feature-only CSV (optional `id` column, no label column).
std::vector<Example> load_unlabeled_csv(const std::filesystem::path& path);

/// Writes `id,label,<f0..>` with round-trip exact reals.
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path);
std::string format_csv(const LabeledDataset& ds);

/// Writes `id,<f0..>`.
void write_unlabeled_csv(std::span<const Example> examples,
                         const std::filesystem::path& path);

// --- synthetic data ----------------------------------------------------------

/// Isotropic Gaussian blobs around k centers that are placed deterministically
/// from `seed` with pairwise distance >= separation.
class BlobGenerator {
 public:
  BlobGenerator(std::size_t k, std::size_t dim, double separation, double sigma,
                std::uint64_t seed);

  /// Draws n samples round-robin over classes. Different `stream` values give
  /// independent samples around the same centers; ids are `<prefix><index>`.
  LabeledDataset sample(std::size_t n, std::uint64_t stream,
                        std::string_view id_prefix) const;

  const std::vector<std::vector<double>>& centers() const { return centers_; }

 private:
  std::size_t k_;
  std::size_t dim_;
  double sigma_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> centers_;
};

LabeledDataset generate_blobs(std::size_t n, std::size_t k, std::size_t dim,
                              double separation, double sigma,
                              std::uint64_t seed);

// --- splitting ---------------------------------------------------------------

struct Holdout {
  LabeledDataset train;
  UnlabeledPool pool;
};

/// Moves floor(train_fraction * n) examples (per class when stratified) into
/// train and the rest into a pool with hidden labels. Both keep input order.
Holdout holdout_split(const LabeledDataset& ds, double train_fraction,
                      bool stratified, std::uint64_t seed);

using ThreeParts = std::array<LabeledDataset, 3>;

ThreeParts three_way_split(const LabeledDataset& base, SplitMode mode,
                           std::uint64_t seed);

struct Augmented {
  LabeledDataset train;
  UnlabeledPool pool;
};

/// Appends each selected pool example to train with its assigned label and
/// removes it from the pool.
Augmented apply_augmentation(const LabeledDataset& train,
                             const UnlabeledPool& pool,
                             std::span<const Selection> selections);

}  // namespace tritrain

#endif  // TRITRAIN_DATASET_HPP_
