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

#ifndef TRITRAIN_EXPERIMENT_HPP_
#define TRITRAIN_EXPERIMENT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "tritrain/dataset.hpp"
#include "tritrain/learner.hpp"
#include "tritrain/strategy.hpp"

namespace tritrain {

/// Synthetic training + validation data from one set of blob centers.
struct BlobSource {
  std::size_t n = 1000;
  std::size_t k = 5;
  std::size_t dim = 2;
  double separation = 3.0;
  double sigma = 1.0;
  std::size_t n_validation = 1000;
  /// Unset: derived from the master seed.
  std::optional<std::uint64_t> seed;
};

struct FileSource {
  std::filesystem::path train_csv;
  std::filesystem::path validation_csv;
  std::string label_column = "label";
  /// Explicit class list for data whose observed labels undercover it.
  std::optional<std::vector<std::string>> classes;
};

struct LearnerSpec {
  enum class Kind { Builtin, External };
  Kind kind = Kind::Builtin;
  ExternalCommand external;
};

struct ExperimentConfig {
  std::variant<BlobSource, FileSource> data = BlobSource{};
  double train_fraction = 0.7;
  bool stratified = false;
  SplitMode split_mode = SplitMode::DisjointThirds;
  std::vector<StrategyKind> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::size_t iterations = 3;
  /// Split the augmented set each round; false re-splits the original train
  /// set every round (augmented examples still feed the combined model).
  bool carry_forward = true;
  LearnerSpec learner;
  TrainConfig train;
  std::uint64_t seed = 0;
  /// Every arm uses arm seed 0, so all arms start round 1 from one state.
  bool shared_arm_seeds = false;
  /// Run the three per-round fits on separate threads.
  bool parallel = true;

  /// Throws ConfigError.
  void validate() const;
};

struct ExperimentData {
  LabeledDataset full;
  LabeledDataset validation;
};

ExperimentData load_experiment_data(const ExperimentConfig& cfg);
std::unique_ptr<Learner> make_learner(const LearnerSpec& spec);

struct IterationRecord {
  /// "oracle", "baseline", "tritrain" or "random".
  std::string arm;
  std::optional<StrategyKind> strategy;
  std::size_t iteration = 0;
  std::size_t train_size = 0;
  std::size_t pool_size = 0;
  std::size_t selected_count = 0;
  double accuracy = 0;
  /// Fraction of Predicted selections whose label is not the hidden truth.
  double label_error_rate = 0;

  bool operator==(const IterationRecord&) const = default;
};

struct ArmLedger {
  StrategyKind strategy = StrategyKind::AnyTwoGroundTruth;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> iterations;
  IterationRecord random;

  bool operator==(const ArmLedger&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct RunLedger {
  IterationRecord oracle;
  IterationRecord baseline;
  std::vector<ArmLedger> arms;
  KeyValues config;
  KeyValues decisions;

  bool operator==(const RunLedger&) const = default;
};

// --- seed scheme ---------------------------------------------------------------

namespace seeds {
std::uint64_t data(std::uint64_t master);
std::uint64_t holdout(std::uint64_t master);
std::uint64_t oracle(std::uint64_t master);
std::uint64_t baseline(std::uint64_t master);
std::uint64_t arm(std::uint64_t master, std::size_t arm_index);
std::uint64_t round(std::uint64_t arm_seed, std::size_t iteration);
std::uint64_t split(std::uint64_t round_seed);
std::uint64_t model(std::uint64_t round_seed, std::size_t model_index);
std::uint64_t combined(std::uint64_t round_seed);
std::uint64_t random_draw(std::uint64_t arm_seed);
std::uint64_t random_fit(std::uint64_t arm_seed);
}  // namespace seeds

// --- steps -----------------------------------------------------------------------

TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed);

/// Fit on all of `full` and evaluate; the upper reference.
IterationRecord train_oracle(const Learner& learner, const LabeledDataset& full,
                             const TrainConfig& cfg, const LabeledDataset& eval_set);

/// Fit on the pre-augmentation train set; iteration 0.
IterationRecord train_baseline(const Learner& learner, const LabeledDataset& train,
                               const TrainConfig& cfg, const LabeledDataset& eval_set);

struct RoundOptions {
  SplitMode split_mode = SplitMode::DisjointThirds;
  TrainConfig train;
  bool parallel = true;
};

struct RoundPredictions {
  std::array<PredictionSet, 3> sets;
};

/// Fits one model per three-way part of `split_base` and predicts the pool
/// with each. Model m is seeded with seeds::model(round_seed, m).
RoundPredictions predict_pool(const Learner& learner, const LabeledDataset& split_base,
                              const UnlabeledPool& pool, const RoundOptions& opts,
                              std::uint64_t round_seed);

struct IterationOutcome {
  LabeledDataset train;
  UnlabeledPool pool;
  IterationRecord record;
  std::vector<Selection> selections;
  RoundPredictions predictions;
};

/// One active-learning round: split, fit three, predict the pool, select,
/// augment, fit a fresh combined model on the augmented set, evaluate.
/// `split_base` defaults to `train`. An empty selection is a recorded no-op.
IterationOutcome run_iteration(const Learner& learner, const LabeledDataset& train,
                               const UnlabeledPool& pool, StrategyKind strategy,
                               const RoundOptions& opts, const LabeledDataset& eval_set,
                               std::size_t iteration, std::uint64_t round_seed,
                               const LabeledDataset* split_base = nullptr);

/// Called after each round of each arm with the arm's current state.
struct ArmProgress {
  StrategyKind strategy;
  std::size_t iteration;
  const LabeledDataset& train;
  const UnlabeledPool& pool;
  std::span<const Selection> selections;
};
using ProgressHook = std::function<void(const ArmProgress&)>;

/// Oracle, baseline, `iterations` rounds per strategy arm on its own copy of
/// the holdout, and one random-sample control per arm sized to the arm's
/// final train set.
RunLedger run_experiment(const ExperimentConfig& cfg, const Learner* learner_override = nullptr,
                         const ProgressHook& on_progress = {});

/// Optionally reuses already loaded data.
RunLedger run_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                         const Learner& learner, const ProgressHook& on_progress = {});

}  // namespace tritrain

#endif  // TRITRAIN_EXPERIMENT_HPP_
