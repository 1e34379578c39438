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

#ifndef TRITRAIN_TESTS_SUPPORT_HPP_
#define TRITRAIN_TESTS_SUPPORT_HPP_

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "tritrain/dataset.hpp"
#include "tritrain/learner.hpp"

namespace tritrain::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline std::vector<std::string> make_ids(std::size_t n, const std::string& prefix = "p") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

/// Pool with zero-dimensional-ish features (one constant column).
inline UnlabeledPool make_pool(const std::vector<std::string>& ids,
                               const std::vector<ClassIndex>& hidden, std::size_t k) {
  std::vector<Example> ex;
  std::unordered_map<std::string, ClassIndex> labels;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ex.push_back({ids[i], {static_cast<double>(i)}, std::nullopt});
    labels[ids[i]] = hidden[i];
  }
  return UnlabeledPool(Alphabet::numbered(k), std::move(ex), std::move(labels));
}

inline PredictionSet make_predictions(const std::vector<std::string>& ids,
                                      const std::vector<ClassIndex>& labels,
                                      const std::string& tag = "m") {
  PredictionSet out(tag);
  for (std::size_t i = 0; i < ids.size(); ++i) out.add({ids[i], labels[i], 0.5});
  return out;
}

inline std::vector<ClassIndex> random_labels(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<ClassIndex> out(n);
  for (auto& l : out) l = static_cast<ClassIndex>(uniform(rng, k));
  return out;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "tritrain-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) std::abort();
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Nearest-center training accuracy, computed independently of the learner.
inline double nearest_center_accuracy(const LabeledDataset& ds) {
  const std::size_t k = ds.alphabet().size(), d = ds.dim();
  std::vector<std::vector<double>> mean(k, std::vector<double>(d, 0.0));
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const ClassIndex c = ds.label(i);
    ++count[c];
    for (std::size_t j = 0; j < d; ++j) mean[c][j] += ds[i].features[j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (double& v : mean[c]) v /= static_cast<double>(std::max<std::size_t>(count[c], 1));
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t c = 0; c < k; ++c) {
      double dist = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const double t = ds[i].features[j] - mean[c][j];
        dist += t * t;
      }
      if (dist < best_d) best_d = dist, best = c;
    }
    if (best == ds.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

}  // namespace tritrain::testing

#endif  // TRITRAIN_TESTS_SUPPORT_HPP_
