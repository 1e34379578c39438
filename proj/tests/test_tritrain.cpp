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

#include <doctest.h>

#include <atomic>
#include <set>

#include "support.hpp"
#include "tritrain/common.hpp"
#include "tritrain/experiment.hpp"
#include "tritrain/ledger.hpp"

namespace tritrain {
namespace {

using testing::Rng;

class ConstantModel final : public TrainedModel {
 public:
  explicit ConstantModel(ClassIndex label) : label_(label) {}
  PredictionSet predict(std::span<const Example> examples, std::string tag) const override {
    PredictionSet out(std::move(tag));
    for (const auto& e : examples) out.add({e.id, label_, 1.0});
    return out;
  }
  std::string serialize() const override { return std::to_string(label_); }

 private:
  ClassIndex label_;
};

// Fit number n predicts class n % 3 everywhere, so three consecutive fits
// never share a label.
class CountingLearner final : public Learner {
 public:
  std::string name() const override { return "counting"; }
  std::unique_ptr<TrainedModel> fit(const LabeledDataset&, const TrainConfig&) const override {
    return std::make_unique<ConstantModel>(static_cast<ClassIndex>(calls_++ % 3));
  }

 private:
  mutable std::atomic<std::size_t> calls_{0};
};

// Throws on training sets smaller than `limit`.
class FragileLearner final : public Learner {
 public:
  explicit FragileLearner(std::size_t limit) : limit_(limit) {}
  std::string name() const override { return "fragile"; }
  std::unique_ptr<TrainedModel> fit(const LabeledDataset& train, const TrainConfig& cfg) const override {
    if (train.size() < limit_) throw LearnerError("refusing a small training set");
    return SoftmaxLearner().fit(train, cfg);
  }

 private:
  std::size_t limit_;
};

ExperimentConfig small_config(std::uint64_t seed = 0) {
  ExperimentConfig cfg;
  BlobSource src;
  src.n = 300;
  src.k = 3;
  src.n_validation = 300;
  cfg.data = src;
  cfg.seed = seed;
  cfg.train.epochs = 10;
  return cfg;
}

std::set<std::string> ids_of(std::span<const Example> ex) {
  std::set<std::string> out;
  for (const auto& e : ex) out.insert(e.id);
  return out;
}

TEST_CASE("oracle on well separated blobs") {
  const BlobGenerator gen(3, 2, 10.0, 1.0, 7);
  const LabeledDataset full = gen.sample(600, 0, "s");
  const LabeledDataset val = gen.sample(600, 1, "v");
  REQUIRE(testing::nearest_center_accuracy(full) >= 0.99);
  const IterationRecord r = train_oracle(SoftmaxLearner(), full, TrainConfig{}, val);
  CHECK(r.accuracy >= 0.95);
  CHECK(r.train_size == 600);
  CHECK(r.arm == "oracle");
  CHECK_THROWS_AS(train_oracle(SoftmaxLearner(), full, TrainConfig{}, LabeledDataset(full.alphabet(), {})),
                  LearnerError);
}

TEST_CASE("baseline bookkeeping and determinism") {
  const LabeledDataset full = generate_blobs(200, 3, 2, 3.0, 1.0, 1);
  const Holdout h = holdout_split(full, 0.7, false, 3);
  const IterationRecord a = train_baseline(SoftmaxLearner(), h.train, TrainConfig{}, full);
  const IterationRecord b = train_baseline(SoftmaxLearner(), h.train, TrainConfig{}, full);
  CHECK(a.iteration == 0);
  CHECK(a.train_size == 140);
  CHECK(a.accuracy == b.accuracy);
}

TEST_CASE("identical splits force unanimity") {
  // Three copies of one point: every third trains the same model.
  const Alphabet alpha = Alphabet::numbered(3);
  const LabeledDataset train(alpha, {{"t0", {1.0, 2.0}, 2}, {"t1", {1.0, 2.0}, 2}, {"t2", {1.0, 2.0}, 2}});
  const LabeledDataset pool_ds = generate_blobs(12, 3, 2, 3.0, 1.0, 0);
  const Holdout h = holdout_split(pool_ds, 1.0, false, 0);
  std::vector<Example> pex;
  std::unordered_map<std::string, ClassIndex> hidden;
  for (std::size_t i = 0; i < pool_ds.size(); ++i) {
    pex.push_back({pool_ds[i].id, pool_ds[i].features, std::nullopt});
    hidden[pool_ds[i].id] = pool_ds.label(i);
  }
  const UnlabeledPool pool(alpha, pex, hidden);
  for (std::size_t epochs : {0u, 20u}) {
    RoundOptions opts;
    opts.train.epochs = epochs;
    const IterationOutcome out = run_iteration(SoftmaxLearner(), train, pool, StrategyKind::AllThreeGroundTruth,
                                               opts, pool_ds, 1, 42);
    CHECK(out.record.selected_count == pool.size());
    CHECK(out.pool.empty());
    CHECK(out.train.size() == 15);
    for (const auto& s : out.selections) CHECK(s.assigned_label == pool.hidden_label(s.id));
  }
  (void)h;
}

TEST_CASE("no agreement is a recorded no-op") {
  const LabeledDataset full = generate_blobs(60, 3, 2, 3.0, 1.0, 2);
  const Holdout h = holdout_split(full, 0.7, false, 0);
  RoundOptions opts;
  opts.parallel = false;
  for (StrategyKind s : kAllStrategies) {
    CountingLearner learner;
    const IterationOutcome out = run_iteration(learner, h.train, h.pool, s, opts, full, 1, 5);
    CHECK(out.record.selected_count == 0);
    CHECK(out.selections.empty());
    CHECK(out.train == h.train);
    CHECK(out.pool == h.pool);
    CHECK(out.record.train_size == h.train.size());
  }
}

TEST_CASE("predicted-label error rate matches a recount") {
  // Overlapping blobs make unanimous mistakes likely.
  const LabeledDataset full = generate_blobs(400, 4, 2, 1.0, 1.0, 3);
  const Holdout h = holdout_split(full, 0.5, false, 1);
  RoundOptions opts;
  opts.train.epochs = 5;
  const IterationOutcome out =
      run_iteration(SoftmaxLearner(), h.train, h.pool, StrategyKind::AllThreePredicted, opts, full, 1, 9);
  REQUIRE_FALSE(out.selections.empty());
  std::size_t wrong = 0;
  for (const auto& s : out.selections) {
    CHECK(s.provenance == Provenance::Predicted);
    CHECK(s.assigned_label == out.predictions.sets[0].find(s.id)->label);
    if (s.assigned_label != h.pool.hidden_label(s.id)) ++wrong;
  }
  CHECK(wrong > 0);
  CHECK(out.record.label_error_rate == static_cast<double>(wrong) / out.selections.size());
}

TEST_CASE("from identical state, strategy-2 selections are a subset of strategy-1") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LabeledDataset full = generate_blobs(300, 4, 2, 2.0, 1.0, seed);
    const Holdout h = holdout_split(full, 0.7, false, seed);
    RoundOptions opts;
    opts.train.epochs = 10;
    LabeledDataset train = h.train;
    UnlabeledPool pool = h.pool;
    for (std::size_t i = 1; i <= 3 && !pool.empty(); ++i) {
      const auto a = run_iteration(SoftmaxLearner(), train, pool, StrategyKind::AnyTwoGroundTruth, opts, full, i, seed + i);
      const auto b = run_iteration(SoftmaxLearner(), train, pool, StrategyKind::AllThreeGroundTruth, opts, full, i, seed + i);
      std::set<std::string> s1, s2;
      for (const auto& s : a.selections) s1.insert(s.id);
      for (const auto& s : b.selections) s2.insert(s.id);
      CHECK(std::includes(s1.begin(), s1.end(), s2.begin(), s2.end()));
      // Continue along the smaller arm so later pools stay nonempty.
      train = b.train;
      pool = b.pool;
    }
  }
}

TEST_CASE("coupled-state run: shared arm seeds give nested first-iteration selections") {
  ExperimentConfig cfg = small_config(4);
  cfg.shared_arm_seeds = true;
  std::map<StrategyKind, std::set<std::string>> first;
  run_experiment(cfg, nullptr, [&](const ArmProgress& p) {
    if (p.iteration != 1) return;
    for (const auto& s : p.selections) first[p.strategy].insert(s.id);
  });
  const auto& s1 = first[StrategyKind::AnyTwoGroundTruth];
  const auto& s2 = first[StrategyKind::AllThreeGroundTruth];
  const auto& s3 = first[StrategyKind::AllThreePredicted];
  CHECK_FALSE(s2.empty());
  CHECK(std::includes(s1.begin(), s1.end(), s2.begin(), s2.end()));
  CHECK(s2 == s3);
}

TEST_CASE("ledger cardinality and the random control") {
  ExperimentConfig cfg = small_config(1);
  cfg.strategies = {StrategyKind::AllThreeGroundTruth};
  const RunLedger ledger = run_experiment(cfg);
  REQUIRE(ledger.arms.size() == 1);
  CHECK(ledger.arms[0].iterations.size() == 3);
  const std::string csv = ledger_csv(ledger);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 1 + 1 + 3 + 1);
  CHECK(ledger.arms[0].random.train_size == ledger.arms[0].iterations.back().train_size);
  CHECK(ledger.oracle.train_size == 300);
  CHECK(ledger.baseline.train_size == 210);
}

TEST_CASE("bookkeeping holds across full runs") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (SplitMode mode : {SplitMode::DisjointThirds, SplitMode::Bootstrap}) {
      ExperimentConfig cfg = small_config(seed);
      cfg.split_mode = mode;
      std::map<StrategyKind, std::size_t> last_train;
      std::size_t total = 0;
      const RunLedger ledger = run_experiment(cfg, nullptr, [&](const ArmProgress& p) {
        const auto tids = ids_of(p.train.examples());
        for (const auto& e : p.pool.examples()) CHECK(tids.count(e.id) == 0);
        if (total == 0) total = p.train.size() + p.pool.size();
        CHECK(p.train.size() + p.pool.size() == total);
        if (p.strategy != StrategyKind::AllThreePredicted) {
          for (const auto& s : p.selections) CHECK(s.provenance == Provenance::GroundTruth);
        }
        last_train[p.strategy] = p.train.size();
      });
      CHECK(total == 300);
      for (const ArmLedger& arm : ledger.arms) {
        std::size_t prev = ledger.baseline.train_size;
        for (const IterationRecord& r : arm.iterations) {
          CHECK(r.train_size == prev + r.selected_count);
          CHECK(r.train_size + r.pool_size == 300);
          CHECK(r.train_size >= prev);
          CHECK(r.accuracy >= 0.0);
          CHECK(r.accuracy <= 1.0);
          if (arm.strategy != StrategyKind::AllThreePredicted) CHECK(r.label_error_rate == 0.0);
          prev = r.train_size;
        }
        CHECK(arm.random.train_size == prev);
        CHECK(arm.random.train_size == last_train[arm.strategy]);
        CHECK(arm.random.selected_count == prev - ledger.baseline.train_size);
      }
    }
  }
}

TEST_CASE("runs are deterministic and independent of thread scheduling") {
  ExperimentConfig cfg = small_config(9);
  const std::string a = ledger_json(run_experiment(cfg));
  const std::string b = ledger_json(run_experiment(cfg));
  CHECK(a == b);
  cfg.parallel = false;
  CHECK(ledger_json(run_experiment(cfg)) == a);
  cfg.seed = 10;
  CHECK(ledger_json(run_experiment(cfg)) != a);
}

TEST_CASE("original-train split base still grows the combined model") {
  ExperimentConfig cfg = small_config(2);
  cfg.carry_forward = false;
  const RunLedger ledger = run_experiment(cfg);
  for (const ArmLedger& arm : ledger.arms) {
    CHECK(arm.iterations.back().train_size >= ledger.baseline.train_size);
  }
  bool found = false;
  for (const auto& [k, v] : ledger.decisions) {
    if (k == "split_base") found = v == "original-train";
  }
  CHECK(found);
}

TEST_CASE("arm failures name the arm") {
  ExperimentConfig cfg = small_config(0);
  FragileLearner learner(150);
  CHECK_THROWS_WITH(run_experiment(cfg, &learner), doctest::Contains("arm any-two-ground-truth"));
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config();
  cfg.iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.strategies.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.train_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.train_fraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("file-backed data source") {
  testing::TempDir dir;
  const BlobGenerator gen(3, 2, 5.0, 1.0, 0);
  write_csv(gen.sample(90, 0, "s"), dir / "train.csv");
  write_csv(gen.sample(60, 1, "v"), dir / "val.csv");
  ExperimentConfig cfg;
  cfg.data = FileSource{dir / "train.csv", dir / "val.csv", "label", std::nullopt};
  cfg.train.epochs = 5;
  const RunLedger ledger = run_experiment(cfg);
  CHECK(ledger.oracle.train_size == 90);
  CHECK(ledger.baseline.train_size == 63);
}

TEST_CASE("wrapped external learner reproduces the in-process ledger") {
  ExperimentConfig cfg = small_config(3);
  cfg.train.epochs = 5;
  const std::string inproc = ledger_csv(run_experiment(cfg));
  cfg.learner.kind = LearnerSpec::Kind::External;
  cfg.learner.external.command_line = TRITRAIN_SOFTMAX_BIN;
  CHECK(ledger_csv(run_experiment(cfg)) == inproc);
}

}  // namespace
}  // namespace tritrain
