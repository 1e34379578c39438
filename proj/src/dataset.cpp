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

#include "tritrain/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "csv.hpp"
#include "tritrain/common.hpp"

namespace tritrain {
namespace {

std::size_t fraction_count(double fraction, std::size_t n) {
  // The epsilon keeps 0.29 * 100 at 29 rather than 28.999...
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

std::vector<Example> select_rows(std::span<const Example> examples,
                                 const std::vector<std::size_t>& rows) {
  std::vector<Example> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(examples[r]);
  return out;
}

UnlabeledPool make_pool(const Alphabet& alphabet, std::vector<Example> labeled) {
  std::unordered_map<std::string, ClassIndex> hidden;
  for (Example& e : labeled) {
    hidden.emplace(e.id, *e.label);
    e.label.reset();
  }
  return UnlabeledPool(alphabet, std::move(labeled), std::move(hidden));
}

}  // namespace

// --- Alphabet ----------------------------------------------------------------

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw DatasetError("empty class name");
    if (!index_.emplace(names_[i], static_cast<ClassIndex>(i)).second) {
      throw DatasetError("duplicate class name '" + names_[i] + "'");
    }
  }
}

Alphabet Alphabet::numbered(std::size_t k) {
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t c = 0; c < k; ++c) names.push_back(std::to_string(c));
  return Alphabet(std::move(names));
}

const std::string& Alphabet::name(ClassIndex c) const {
  if (c >= names_.size()) {
    throw DatasetError("class index " + std::to_string(c) + " outside alphabet of size " +
                       std::to_string(names_.size()));
  }
  return names_[c];
}

std::optional<ClassIndex> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// --- LabeledDataset ----------------------------------------------------------

LabeledDataset::LabeledDataset(Alphabet alphabet, std::vector<Example> examples)
    : alphabet_(std::move(alphabet)), examples_(std::move(examples)) {
  if (alphabet_.empty()) throw DatasetError("labeled dataset needs a nonempty alphabet");
  index_.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& e = examples_[i];
    if (!index_.emplace(e.id, i).second) throw DatasetError("duplicate id '" + e.id + "'");
    if (!e.label) throw DatasetError("example '" + e.id + "' has no label");
    if (*e.label >= alphabet_.size()) {
      throw DatasetError("example '" + e.id + "' label " + std::to_string(*e.label) +
                         " outside alphabet of size " + std::to_string(alphabet_.size()));
    }
    if (i == 0) {
      dim_ = e.features.size();
    } else if (e.features.size() != dim_) {
      throw DatasetError("example '" + e.id + "' has " + std::to_string(e.features.size()) +
                         " features, expected " + std::to_string(dim_));
    }
    for (double f : e.features) {
      if (!std::isfinite(f)) throw DatasetError("example '" + e.id + "' has a non-finite feature");
    }
  }
}

bool LabeledDataset::contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

// --- UnlabeledPool -----------------------------------------------------------

UnlabeledPool::UnlabeledPool(Alphabet alphabet, std::vector<Example> examples,
                             std::unordered_map<std::string, ClassIndex> hidden_labels)
    : alphabet_(std::move(alphabet)),
      examples_(std::move(examples)),
      hidden_(std::move(hidden_labels)) {
  if (hidden_.size() != examples_.size()) {
    throw DatasetError("hidden labels must cover exactly the pool ids");
  }
  index_.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& e = examples_[i];
    if (e.label) throw DatasetError("pool example '" + e.id + "' carries a visible label");
    if (!index_.emplace(e.id, i).second) throw DatasetError("duplicate id '" + e.id + "'");
    auto it = hidden_.find(e.id);
    if (it == hidden_.end()) throw DatasetError("pool example '" + e.id + "' has no hidden label");
    if (it->second >= alphabet_.size()) throw DatasetError("hidden label outside alphabet");
    if (e.features.size() != examples_.front().features.size()) {
      throw DatasetError("pool example '" + e.id + "' has inconsistent dimensionality");
    }
  }
}

bool UnlabeledPool::contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

std::size_t UnlabeledPool::position(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw DatasetError("id '" + std::string(id) + "' not in pool");
  return it->second;
}

ClassIndex UnlabeledPool::hidden_label(std::string_view id) const {
  auto it = hidden_.find(std::string(id));
  if (it == hidden_.end()) throw DatasetError("id '" + std::string(id) + "' not in pool");
  return it->second;
}

LabeledDataset UnlabeledPool::reveal() const {
  std::vector<Example> out(examples_.begin(), examples_.end());
  for (Example& e : out) e.label = hidden_.at(e.id);
  return LabeledDataset(alphabet_, std::move(out));
}

// --- enums -------------------------------------------------------------------

std::string_view split_mode_name(SplitMode mode) {
  return mode == SplitMode::DisjointThirds ? "disjoint-thirds" : "bootstrap";
}

std::optional<SplitMode> parse_split_mode(std::string_view text) {
  if (text == "disjoint-thirds" || text == "thirds") return SplitMode::DisjointThirds;
  if (text == "bootstrap") return SplitMode::Bootstrap;
  return std::nullopt;
}

std::string_view provenance_name(Provenance p) {
  return p == Provenance::GroundTruth ? "GroundTruth" : "Predicted";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  if (text == "GroundTruth") return Provenance::GroundTruth;
  if (text == "Predicted") return Provenance::Predicted;
  return std::nullopt;
}

// --- CSV ---------------------------------------------------------------------

namespace {

bool all_integers(const std::set<std::string>& labels) {
  return std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
    std::uint64_t v;
    return parse_uint(s, v);
  });
}

std::vector<double> parse_features(const csv::Table::Row& row,
                                   const std::vector<int>& columns,
                                   const std::filesystem::path& path) {
  std::vector<double> out;
  out.reserve(columns.size());
  for (int c : columns) {
    double v;
    if (!parse_real(row.cells[c], v)) {
      throw DatasetError(path.string() + ": line " + std::to_string(row.line) +
                         ": non-numeric feature cell '" + row.cells[c] + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, std::string_view label_column,
                        const std::optional<Alphabet>& alphabet_override) {
  const csv::Table table = csv::parse(csv::read_file(path), path.string());
  const int label_col = table.column(label_column);
  if (label_col < 0) {
    throw DatasetError(path.string() + ": no column named '" + std::string(label_column) + "'");
  }
  const int id_col = table.column("id");
  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (c != label_col && c != id_col) feature_cols.push_back(c);
  }
  if (table.rows.empty()) throw DatasetError(path.string() + ": dataset is empty");

  std::set<std::string> observed;
  for (const auto& row : table.rows) {
    if (row.cells[label_col].empty()) {
      throw DatasetError(path.string() + ": line " + std::to_string(row.line) + ": missing label");
    }
    observed.insert(row.cells[label_col]);
  }
  Alphabet alphabet;
  if (alphabet_override) {
    alphabet = *alphabet_override;
  } else {
    std::vector<std::string> names(observed.begin(), observed.end());
    if (all_integers(observed)) {
      std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
        std::uint64_t x = 0, y = 0;
        parse_uint(a, x);
        parse_uint(b, y);
        return x < y;
      });
    }
    alphabet = Alphabet(std::move(names));
  }

  std::vector<Example> examples;
  examples.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Example e;
    e.id = id_col >= 0 ? row.cells[id_col] : "row" + std::to_string(r + 1);
    if (e.id.empty()) {
      throw DatasetError(path.string() + ": line " + std::to_string(row.line) + ": empty id");
    }
    e.features = parse_features(row, feature_cols, path);
    const auto label = alphabet.find(row.cells[label_col]);
    if (!label) {
      throw DatasetError(path.string() + ": line " + std::to_string(row.line) + ": label '" +
                         row.cells[label_col] + "' not in alphabet");
    }
    e.label = *label;
    examples.push_back(std::move(e));
  }
  return LabeledDataset(std::move(alphabet), std::move(examples));
}

std::vector<Example> load_unlabeled_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::parse(csv::read_file(path), path.string());
  const int id_col = table.column("id");
  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (c != id_col) feature_cols.push_back(c);
  }
  std::vector<Example> out;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Example e;
    e.id = id_col >= 0 ? row.cells[id_col] : "row" + std::to_string(r + 1);
    if (!seen.insert(e.id).second) throw DatasetError(path.string() + ": duplicate id '" + e.id + "'");
    e.features = parse_features(row, feature_cols, path);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

std::string feature_header(std::size_t dim) {
  std::string out;
  for (std::size_t j = 0; j < dim; ++j) out += ",f" + std::to_string(j);
  return out;
}

void append_features(std::string& out, const std::vector<double>& features) {
  for (double f : features) {
    out += ',';
    out += format_real(f);
  }
}

}  // namespace

std::string format_csv(const LabeledDataset& ds) {
  std::string out = "id,label" + feature_header(ds.dim()) + "\n";
  for (const Example& e : ds.examples()) {
    out += e.id;
    out += ',';
    out += ds.alphabet().name(*e.label);
    append_features(out, e.features);
    out += '\n';
  }
  return out;
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  csv::write_file_atomic(path, format_csv(ds));
}

void write_unlabeled_csv(std::span<const Example> examples, const std::filesystem::path& path) {
  const std::size_t dim = examples.empty() ? 0 : examples.front().features.size();
  std::string out = "id" + feature_header(dim) + "\n";
  for (const Example& e : examples) {
    out += e.id;
    append_features(out, e.features);
    out += '\n';
  }
  csv::write_file_atomic(path, out);
}

// --- blobs -------------------------------------------------------------------

BlobGenerator::BlobGenerator(std::size_t k, std::size_t dim, double separation, double sigma,
                             std::uint64_t seed)
    : k_(k), dim_(dim), sigma_(sigma), seed_(seed) {
  if (k < 1) throw DatasetError("k must be >= 1");
  if (dim < 1) throw DatasetError("dim must be >= 1");
  if (!(sigma > 0) || !std::isfinite(sigma)) throw DatasetError("sigma must be > 0");
  if (!(separation >= 0) || !std::isfinite(separation)) {
    throw DatasetError("separation must be >= 0");
  }

  // Rejection sampling in a cube whose side grows until k centers fit.
  std::mt19937_64 rng(derive_seed(seed, {0}));
  double radius = std::max(separation, 1.0) *
                  std::pow(static_cast<double>(k), 1.0 / static_cast<double>(dim));
  while (true) {
    centers_.clear();
    std::uniform_real_distribution<double> coord(-radius, radius);
    for (int attempt = 0; attempt < 1000 && centers_.size() < k; ++attempt) {
      std::vector<double> c(dim);
      for (double& x : c) x = coord(rng);
      const bool far = std::all_of(centers_.begin(), centers_.end(), [&](const auto& other) {
        double d2 = 0;
        for (std::size_t j = 0; j < dim; ++j) d2 += (c[j] - other[j]) * (c[j] - other[j]);
        return std::sqrt(d2) >= separation;
      });
      if (far) centers_.push_back(std::move(c));
    }
    if (centers_.size() == k) break;
    radius *= 1.5;
  }
}

LabeledDataset BlobGenerator::sample(std::size_t n, std::uint64_t stream,
                                     std::string_view id_prefix) const {
  if (n < k_) throw DatasetError("n must be >= k");
  std::mt19937_64 rng(derive_seed(seed_, {1, stream}));
  std::normal_distribution<double> noise(0.0, sigma_);
  std::vector<Example> examples;
  examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<ClassIndex>(i % k_);
    Example e;
    e.id = std::string(id_prefix) + std::to_string(i);
    e.features.resize(dim_);
    for (std::size_t j = 0; j < dim_; ++j) e.features[j] = centers_[c][j] + noise(rng);
    e.label = c;
    examples.push_back(std::move(e));
  }
  return LabeledDataset(Alphabet::numbered(k_), std::move(examples));
}

LabeledDataset generate_blobs(std::size_t n, std::size_t k, std::size_t dim, double separation,
                              double sigma, std::uint64_t seed) {
  if (n < k) throw DatasetError("n must be >= k (n=" + std::to_string(n) + ", k=" +
                                std::to_string(k) + ")");
  return BlobGenerator(k, dim, separation, sigma, seed).sample(n, 0, "s");
}

// --- splits ------------------------------------------------------------------

Holdout holdout_split(const LabeledDataset& ds, double train_fraction, bool stratified,
                      std::uint64_t seed) {
  if (ds.empty()) throw DatasetError("holdout_split: empty dataset");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw DatasetError("holdout_split: train_fraction must be in (0, 1]");
  }
  std::mt19937_64 rng(derive_seed(seed, {0}));
  std::vector<bool> to_train(ds.size(), false);
  auto take = [&](std::vector<std::size_t> rows) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const std::size_t count = fraction_count(train_fraction, rows.size());
    for (std::size_t i = 0; i < count; ++i) to_train[rows[i]] = true;
  };
  if (stratified) {
    std::vector<std::vector<std::size_t>> by_class(ds.alphabet().size());
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.label(i)].push_back(i);
    for (auto& rows : by_class) take(std::move(rows));
  } else {
    std::vector<std::size_t> rows(ds.size());
    std::iota(rows.begin(), rows.end(), 0);
    take(std::move(rows));
  }
  std::vector<Example> train, rest;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (to_train[i] ? train : rest).push_back(ds[i]);
  }
  return {LabeledDataset(ds.alphabet(), std::move(train)), make_pool(ds.alphabet(), std::move(rest))};
}

ThreeParts three_way_split(const LabeledDataset& base, SplitMode mode, std::uint64_t seed) {
  const std::size_t n = base.size();
  if (n < 3) throw DatasetError("three_way_split needs at least 3 examples, got " + std::to_string(n));
  std::mt19937_64 rng(derive_seed(seed, {1}));
  std::array<std::vector<std::size_t>, 3> rows;
  if (mode == SplitMode::DisjointThirds) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < 3; ++p) {
      const std::size_t size = n / 3 + (p < n % 3 ? 1 : 0);
      rows[p].assign(order.begin() + offset, order.begin() + offset + size);
      std::sort(rows[p].begin(), rows[p].end());
      offset += size;
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t p = 0; p < 3; ++p) {
      std::vector<bool> drawn(n, false);
      for (std::size_t d = 0; d < n; ++d) drawn[pick(rng)] = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (drawn[i]) rows[p].push_back(i);
      }
    }
  }
  ThreeParts parts;
  for (std::size_t p = 0; p < 3; ++p) {
    parts[p] = LabeledDataset(base.alphabet(), select_rows(base.examples(), rows[p]));
  }
  return parts;
}

Augmented apply_augmentation(const LabeledDataset& train, const UnlabeledPool& pool,
                             std::span<const Selection> selections) {
  std::unordered_set<std::string> chosen;
  chosen.reserve(selections.size());
  std::vector<Example> grown(train.examples().begin(), train.examples().end());
  grown.reserve(train.size() + selections.size());
  for (const Selection& s : selections) {
    if (!pool.contains(s.id)) throw DatasetError("selection id '" + s.id + "' not in pool");
    if (!chosen.insert(s.id).second) throw DatasetError("duplicate selection id '" + s.id + "'");
    Example e = pool.examples()[pool.position(s.id)];
    e.label = s.assigned_label;
    grown.push_back(std::move(e));
  }
  std::vector<Example> remaining;
  std::unordered_map<std::string, ClassIndex> hidden;
  for (const Example& e : pool.examples()) {
    if (chosen.contains(e.id)) continue;
    remaining.push_back(e);
    hidden.emplace(e.id, pool.hidden_label(e.id));
  }
  return {LabeledDataset(train.alphabet(), std::move(grown)),
          UnlabeledPool(pool.alphabet(), std::move(remaining), std::move(hidden))};
}

}  // namespace tritrain
