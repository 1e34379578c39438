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

#ifndef TRITRAIN_LEARNER_HPP_
#define TRITRAIN_LEARNER_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tritrain/dataset.hpp"

namespace tritrain {

struct TrainConfig {
  std::size_t epochs = 50;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Multinomial logistic regression parameters: a row-major k x dim weight
/// matrix and a bias per class.
class SoftmaxModel {
 public:
  SoftmaxModel() = default;
  /// Zero-initialized.
  SoftmaxModel(std::size_t classes, std::size_t dim);
  SoftmaxModel(std::size_t classes, std::size_t dim, std::vector<double> weights,
               std::vector<double> bias);

  std::size_t classes() const { return classes_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }
  std::span<const double> bias() const { return bias_; }
  std::span<double> bias() { return bias_; }
  double weight(std::size_t c, std::size_t j) const { return weights_[c * dim_ + j]; }

  /// W x + b.
  std::vector<double> logits(std::span<const double> x) const;

  /// Text form: header line then one line per class, reals round-trip exact.
  std::string serialize() const;
  static SoftmaxModel deserialize(std::string_view text);

  bool operator==(const SoftmaxModel&) const = default;

 private:
  std::size_t classes_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

struct PredictionEntry {
  std::string id;
  ClassIndex label = 0;
  double score = 0;

  bool operator==(const PredictionEntry&) const = default;
};

/// One model's labels over a set of examples, in input order.
class PredictionSet {
 public:
  PredictionSet() = default;
  explicit PredictionSet(std::string model_tag) : tag_(std::move(model_tag)) {}

  /// Throws LearnerError on a duplicate id or non-finite score.
  void add(PredictionEntry entry);

  const std::string& tag() const { return tag_; }
  std::span<const PredictionEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const PredictionEntry* find(std::string_view id) const;
  bool same_ids(const PredictionSet& other) const;

  /// Entries and ids compare; the tag does not.
  bool operator==(const PredictionSet& other) const { return entries_ == other.entries_; }

 private:
  std::string tag_;
  std::vector<PredictionEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// `id,label,score` with a header. Labels are written as class names.
std::string format_predictions(const PredictionSet& predictions, const Alphabet& alphabet);
PredictionSet parse_predictions(std::string_view text, const Alphabet& alphabet,
                                std::string tag);

struct Metrics {
  double accuracy = 0;
  std::size_t n_eval = 0;
  std::size_t correct = 0;
};

struct LossAndGradient {
  double loss = 0;
  std::vector<double> weight_grad;  // k x dim, row-major
  std::vector<double> bias_grad;    // k
};

/// Mean cross-entropy over `batch` plus (l2/2)||W||^2 (bias unpenalized), and
/// its exact gradient.
LossAndGradient loss_and_gradient(const SoftmaxModel& model, const LabeledDataset& batch,
                                  double l2);

/// Mini-batch gradient descent from zero weights for exactly `cfg.epochs`
/// passes; each pass visits a seeded shuffle. Throws LearnerError when a batch
/// loss turns non-finite.
SoftmaxModel fit_softmax(const LabeledDataset& train, const TrainConfig& cfg);

/// Softmax label per example, ties to the lowest class index; score is the
/// winning probability.
PredictionSet predict(const SoftmaxModel& model, std::span<const Example> examples,
                      std::string tag = {});

Metrics evaluate(const SoftmaxModel& model, const LabeledDataset& eval_set);

/// Accuracy of `predictions` against the labels of `eval_set`; every eval id
/// must be predicted.
Metrics score_predictions(const PredictionSet& predictions, const LabeledDataset& eval_set);

// --- learner boundary ----------------------------------------------------------

/// Result of a fit. Immutable; `predict` may be called from several threads.
class TrainedModel {
 public:
  virtual ~TrainedModel() = default;
  virtual PredictionSet predict(std::span<const Example> examples, std::string tag) const = 0;
  /// Bytes uploaded as the model artifact.
  virtual std::string serialize() const = 0;
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<TrainedModel> fit(const LabeledDataset& train,
                                            const TrainConfig& cfg) const = 0;
};

Metrics evaluate(const TrainedModel& model, const LabeledDataset& eval_set);

class SoftmaxLearner final : public Learner {
 public:
  std::string name() const override { return "softmax"; }
  std::unique_ptr<TrainedModel> fit(const LabeledDataset& train,
                                    const TrainConfig& cfg) const override;
};

struct ExternalCommand {
  /// Whitespace-separated program and leading arguments; the adapter appends
  /// `--train --pool --out --epochs --seed`.
  std::string command_line;
  std::chrono::milliseconds timeout = std::chrono::hours(1);
};

/// Runs the external learner once and parses its prediction file. The pool
/// ids are read back from `pool_file` and must be covered exactly.
PredictionSet external_fit_predict(const std::filesystem::path& train_file,
                                   const std::filesystem::path& pool_file,
                                   const TrainConfig& cfg, const ExternalCommand& command,
                                   const Alphabet& alphabet);

/// Learner backed by an external process. A fit only records the training
/// set; each `predict` writes both files into a fresh working directory and
/// invokes the command, so predictions are as deterministic as the command.
class ExternalLearner final : public Learner {
 public:
  explicit ExternalLearner(ExternalCommand command,
                           std::filesystem::path work_root = std::filesystem::temp_directory_path());

  std::string name() const override { return "external"; }
  std::unique_ptr<TrainedModel> fit(const LabeledDataset& train,
                                    const TrainConfig& cfg) const override;

 private:
  ExternalCommand command_;
  std::filesystem::path work_root_;
};

}  // namespace tritrain

#endif  // TRITRAIN_LEARNER_HPP_
