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

#include "tritrain/experiment.hpp"

#include <future>

#include "tritrain/common.hpp"
#include "tritrain/config.hpp"

namespace tritrain {

// Counter scheme: every seed is derive_seed(parent, {stream, ...}) with a
// fixed stream number per role.
namespace seeds {
std::uint64_t data(std::uint64_t master) { return derive_seed(master, {1}); }
std::uint64_t holdout(std::uint64_t master) { return derive_seed(master, {2}); }
std::uint64_t oracle(std::uint64_t master) { return derive_seed(master, {3}); }
std::uint64_t baseline(std::uint64_t master) { return derive_seed(master, {4}); }
std::uint64_t arm(std::uint64_t master, std::size_t arm_index) {
  return derive_seed(master, {5, arm_index});
}
std::uint64_t round(std::uint64_t arm_seed, std::size_t iteration) {
  return derive_seed(arm_seed, {6, iteration});
}
std::uint64_t split(std::uint64_t round_seed) { return derive_seed(round_seed, {7}); }
std::uint64_t model(std::uint64_t round_seed, std::size_t model_index) {
  return derive_seed(round_seed, {8, model_index});
}
std::uint64_t combined(std::uint64_t round_seed) { return derive_seed(round_seed, {9}); }
std::uint64_t random_draw(std::uint64_t arm_seed) { return derive_seed(arm_seed, {10}); }
std::uint64_t random_fit(std::uint64_t arm_seed) { return derive_seed(arm_seed, {11}); }
}  // namespace seeds

void ExperimentConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (strategies.empty()) throw ConfigError("at least one strategy is required");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must be in (0, 1)");
  }
  train.validate();
  if (const auto* blobs = std::get_if<BlobSource>(&data)) {
    if (blobs->k < 1) throw ConfigError("data.k must be >= 1");
    if (blobs->n < blobs->k) throw ConfigError("data.n must be >= data.k");
    if (blobs->n_validation < blobs->k) throw ConfigError("data.n_validation must be >= data.k");
    if (blobs->dim < 1) throw ConfigError("data.dim must be >= 1");
    if (!(blobs->sigma > 0)) throw ConfigError("data.sigma must be > 0");
    if (!(blobs->separation >= 0)) throw ConfigError("data.separation must be >= 0");
  } else {
    const auto& files = std::get<FileSource>(data);
    if (files.train_csv.empty()) throw ConfigError("data.train_csv is required for csv data");
    if (files.validation_csv.empty()) {
      throw ConfigError("data.validation_csv is required for csv data");
    }
  }
  if (learner.kind == LearnerSpec::Kind::External && trim(learner.external.command_line).empty()) {
    throw ConfigError("learner.command is required for an external learner");
  }
}

ExperimentData load_experiment_data(const ExperimentConfig& cfg) {
  if (const auto* blobs = std::get_if<BlobSource>(&cfg.data)) {
    const BlobGenerator gen(blobs->k, blobs->dim, blobs->separation, blobs->sigma,
                            blobs->seed.value_or(seeds::data(cfg.seed)));
    return {gen.sample(blobs->n, 0, "s"), gen.sample(blobs->n_validation, 1, "v")};
  }
  const auto& files = std::get<FileSource>(cfg.data);
  std::optional<Alphabet> alphabet;
  if (files.classes) alphabet = Alphabet(*files.classes);
  LabeledDataset full = load_csv(files.train_csv, files.label_column, alphabet);
  LabeledDataset validation = load_csv(files.validation_csv, files.label_column, full.alphabet());
  if (validation.dim() != full.dim()) {
    throw DatasetError("validation set has " + std::to_string(validation.dim()) +
                       " features, training set has " + std::to_string(full.dim()));
  }
  return {std::move(full), std::move(validation)};
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec) {
  if (spec.kind == LearnerSpec::Kind::External) return std::make_unique<ExternalLearner>(spec.external);
  return std::make_unique<SoftmaxLearner>();
}

TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

namespace {

IterationRecord fit_and_record(const Learner& learner, const LabeledDataset& train,
                               const TrainConfig& cfg, const LabeledDataset& eval_set,
                               std::string arm) {
  if (eval_set.empty()) throw LearnerError(arm + ": empty evaluation set");
  const auto model = learner.fit(train, cfg);
  IterationRecord record;
  record.arm = std::move(arm);
  record.train_size = train.size();
  record.accuracy = evaluate(*model, eval_set).accuracy;
  return record;
}

double predicted_error_rate(std::span<const Selection> selections, const UnlabeledPool& pool) {
  std::size_t predicted = 0, wrong = 0;
  for (const Selection& s : selections) {
    if (s.provenance != Provenance::Predicted) continue;
    ++predicted;
    if (s.assigned_label != pool.hidden_label(s.id)) ++wrong;
  }
  return predicted == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(predicted);
}

}  // namespace

IterationRecord train_oracle(const Learner& learner, const LabeledDataset& full,
                             const TrainConfig& cfg, const LabeledDataset& eval_set) {
  return fit_and_record(learner, full, cfg, eval_set, "oracle");
}

IterationRecord train_baseline(const Learner& learner, const LabeledDataset& train,
                               const TrainConfig& cfg, const LabeledDataset& eval_set) {
  IterationRecord record = fit_and_record(learner, train, cfg, eval_set, "baseline");
  record.iteration = 0;
  return record;
}

RoundPredictions predict_pool(const Learner& learner, const LabeledDataset& split_base,
                              const UnlabeledPool& pool, const RoundOptions& opts,
                              std::uint64_t round_seed) {
  const ThreeParts parts = three_way_split(split_base, opts.split_mode, seeds::split(round_seed));
  auto fit_one = [&](std::size_t m) {
    const auto model = learner.fit(parts[m], with_seed(opts.train, seeds::model(round_seed, m)));
    return model->predict(pool.examples(), "m" + std::to_string(m + 1));
  };
  RoundPredictions out;
  if (opts.parallel) {
    std::array<std::future<PredictionSet>, 3> futures;
    for (std::size_t m = 0; m < 3; ++m) futures[m] = std::async(std::launch::async, fit_one, m);
    for (std::size_t m = 0; m < 3; ++m) out.sets[m] = futures[m].get();
  } else {
    for (std::size_t m = 0; m < 3; ++m) out.sets[m] = fit_one(m);
  }
  return out;
}

IterationOutcome run_iteration(const Learner& learner, const LabeledDataset& train,
                               const UnlabeledPool& pool, StrategyKind strategy,
                               const RoundOptions& opts, const LabeledDataset& eval_set,
                               std::size_t iteration, std::uint64_t round_seed,
                               const LabeledDataset* split_base) {
  IterationOutcome out{train, pool, {}, {}, {}};
  if (!pool.empty()) {
    out.predictions = predict_pool(learner, split_base ? *split_base : train, pool, opts, round_seed);
    out.selections = select(strategy, out.predictions.sets[0], out.predictions.sets[1],
                            out.predictions.sets[2], pool);
  }
  if (!out.selections.empty()) {
    Augmented next = apply_augmentation(train, pool, out.selections);
    out.train = std::move(next.train);
    out.pool = std::move(next.pool);
  }
  IterationRecord& record = out.record;
  record = fit_and_record(learner, out.train,
                          with_seed(opts.train, seeds::combined(round_seed)), eval_set, "tritrain");
  record.strategy = strategy;
  record.iteration = iteration;
  record.pool_size = out.pool.size();
  record.selected_count = out.selections.size();
  record.label_error_rate = predicted_error_rate(out.selections, pool);
  return out;
}

RunLedger run_experiment(const ExperimentConfig& cfg, const Learner* learner_override,
                         const ProgressHook& on_progress) {
  cfg.validate();
  const ExperimentData data = load_experiment_data(cfg);
  std::unique_ptr<Learner> owned;
  if (!learner_override) owned = make_learner(cfg.learner);
  return run_experiment(cfg, data, learner_override ? *learner_override : *owned, on_progress);
}

RunLedger run_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                         const Learner& learner, const ProgressHook& on_progress) {
  cfg.validate();
  RunLedger ledger;
  ledger.config = describe(cfg);
  ledger.decisions = {
      {"split_mode", std::string(split_mode_name(cfg.split_mode))},
      {"holdout", cfg.stratified ? "stratified" : "unstratified"},
      {"argmax_tie_break", "lowest-class-index"},
      {"strategy1_reading", "superset: unanimous examples count as any-two agreement"},
      {"split_base", cfg.carry_forward ? "augmented-train (carry forward)" : "original-train"},
      {"combined_model", "fresh zero-initialized fit each iteration"},
      {"random_model_source", "train split plus uniform draws from the arm's initial pool"},
      {"arm_seeds", cfg.shared_arm_seeds ? "shared" : "per-arm"},
      {"epochs", std::to_string(cfg.train.epochs)},
  };

  try {
    ledger.oracle = train_oracle(learner, data.full, with_seed(cfg.train, seeds::oracle(cfg.seed)),
                                 data.validation);
  } catch (const Error& e) {
    throw Error(std::string("arm oracle: ") + e.what());
  }
  const Holdout holdout =
      holdout_split(data.full, cfg.train_fraction, cfg.stratified, seeds::holdout(cfg.seed));
  try {
    ledger.baseline = train_baseline(learner, holdout.train,
                                     with_seed(cfg.train, seeds::baseline(cfg.seed)), data.validation);
  } catch (const Error& e) {
    throw Error(std::string("arm baseline: ") + e.what());
  }
  ledger.baseline.pool_size = holdout.pool.size();

  const RoundOptions opts{cfg.split_mode, cfg.train, cfg.parallel};
  for (std::size_t a = 0; a < cfg.strategies.size(); ++a) {
    const StrategyKind strategy = cfg.strategies[a];
    ArmLedger arm;
    arm.strategy = strategy;
    arm.seed = seeds::arm(cfg.seed, cfg.shared_arm_seeds ? 0 : a);
    try {
      LabeledDataset train = holdout.train;
      UnlabeledPool pool = holdout.pool;
      for (std::size_t i = 1; i <= cfg.iterations; ++i) {
        IterationOutcome step =
            run_iteration(learner, train, pool, strategy, opts, data.validation, i,
                          seeds::round(arm.seed, i), cfg.carry_forward ? nullptr : &holdout.train);
        train = std::move(step.train);
        pool = std::move(step.pool);
        arm.iterations.push_back(step.record);
        if (on_progress) on_progress({strategy, i, train, pool, step.selections});
      }

      const std::size_t extra = train.size() - holdout.train.size();
      const auto draws = random_select(holdout.pool, extra, seeds::random_draw(arm.seed));
      const Augmented random_set = apply_augmentation(holdout.train, holdout.pool, draws);
      arm.random = fit_and_record(learner, random_set.train,
                                  with_seed(cfg.train, seeds::random_fit(arm.seed)),
                                  data.validation, "random");
      arm.random.strategy = strategy;
      arm.random.iteration = cfg.iterations;
      arm.random.pool_size = random_set.pool.size();
      arm.random.selected_count = draws.size();
    } catch (const Error& e) {
      throw Error("arm " + std::string(strategy_key(strategy)) + ": " + e.what());
    }
    ledger.arms.push_back(std::move(arm));
  }
  return ledger;
}

}  // namespace tritrain
