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

#include "tritrain/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "tritrain/common.hpp"

namespace tritrain {
namespace {

// Mean loss and gradient over the examples at `rows`.
LossAndGradient batch_loss(const SoftmaxModel& model, std::span<const Example> examples,
                           std::span<const std::size_t> rows, double l2) {
  const std::size_t k = model.classes();
  const std::size_t dim = model.dim();
  LossAndGradient out;
  out.weight_grad.assign(k * dim, 0.0);
  out.bias_grad.assign(k, 0.0);
  std::vector<double> prob(k);
  double total = 0;
  for (std::size_t r : rows) {
    const Example& e = examples[r];
    const std::vector<double> z = model.logits(e.features);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (std::size_t c = 0; c < k; ++c) {
      prob[c] = std::exp(z[c] - zmax);
      sum += prob[c];
    }
    const double lse = zmax + std::log(sum);
    const ClassIndex y = *e.label;
    total += lse - z[y];
    for (std::size_t c = 0; c < k; ++c) {
      const double g = prob[c] / sum - (c == y ? 1.0 : 0.0);
      out.bias_grad[c] += g;
      double* row = &out.weight_grad[c * dim];
      for (std::size_t j = 0; j < dim; ++j) row[j] += g * e.features[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  out.loss = total * inv;
  for (double& g : out.weight_grad) g *= inv;
  for (double& g : out.bias_grad) g *= inv;
  if (l2 != 0) {
    const auto w = model.weights();
    double norm2 = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      norm2 += w[i] * w[i];
      out.weight_grad[i] += l2 * w[i];
    }
    out.loss += 0.5 * l2 * norm2;
  }
  return out;
}

void check_shapes(const SoftmaxModel& model, std::span<const Example> examples) {
  for (const Example& e : examples) {
    if (e.features.size() != model.dim()) {
      throw LearnerError("example '" + e.id + "' has " + std::to_string(e.features.size()) +
                         " features, model expects " + std::to_string(model.dim()));
    }
    if (e.label && *e.label >= model.classes()) {
      throw LearnerError("example '" + e.id + "' label outside model alphabet");
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (!(l2 >= 0) || !std::isfinite(l2)) throw ConfigError("l2 must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

// --- SoftmaxModel --------------------------------------------------------------

SoftmaxModel::SoftmaxModel(std::size_t classes, std::size_t dim)
    : classes_(classes), dim_(dim), weights_(classes * dim, 0.0), bias_(classes, 0.0) {}

SoftmaxModel::SoftmaxModel(std::size_t classes, std::size_t dim, std::vector<double> weights,
                           std::vector<double> bias)
    : classes_(classes), dim_(dim), weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.size() != classes_ * dim_ || bias_.size() != classes_) {
    throw LearnerError("softmax parameter shapes do not match classes x dim");
  }
  for (double v : weights_) {
    if (!std::isfinite(v)) throw LearnerError("non-finite weight");
  }
  for (double v : bias_) {
    if (!std::isfinite(v)) throw LearnerError("non-finite bias");
  }
}

std::vector<double> SoftmaxModel::logits(std::span<const double> x) const {
  std::vector<double> z(bias_.begin(), bias_.end());
  for (std::size_t c = 0; c < classes_; ++c) {
    const double* row = &weights_[c * dim_];
    double acc = 0;
    for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * x[j];
    z[c] += acc;
  }
  return z;
}

std::string SoftmaxModel::serialize() const {
  std::string out = "softmax " + std::to_string(classes_) + " " + std::to_string(dim_) + "\n";
  for (std::size_t c = 0; c < classes_; ++c) {
    out += format_real(bias_[c]);
    for (std::size_t j = 0; j < dim_; ++j) {
      out += ' ';
      out += format_real(weights_[c * dim_ + j]);
    }
    out += '\n';
  }
  return out;
}

SoftmaxModel SoftmaxModel::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic;
  std::size_t classes = 0, dim = 0;
  if (!(in >> magic >> classes >> dim) || magic != "softmax") {
    throw LearnerError("not a serialized softmax model");
  }
  std::vector<double> weights(classes * dim), bias(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    std::string token;
    auto next = [&]() {
      double v;
      if (!(in >> token) || !parse_real(token, v)) throw LearnerError("truncated softmax model");
      return v;
    };
    bias[c] = next();
    for (std::size_t j = 0; j < dim; ++j) weights[c * dim + j] = next();
  }
  return SoftmaxModel(classes, dim, std::move(weights), std::move(bias));
}

// --- PredictionSet -------------------------------------------------------------

void PredictionSet::add(PredictionEntry entry) {
  if (!std::isfinite(entry.score)) throw LearnerError("non-finite score for '" + entry.id + "'");
  if (!index_.emplace(entry.id, entries_.size()).second) {
    throw LearnerError("duplicate prediction id '" + entry.id + "'");
  }
  entries_.push_back(std::move(entry));
}

const PredictionEntry* PredictionSet::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

bool PredictionSet::same_ids(const PredictionSet& other) const {
  if (size() != other.size()) return false;
  return std::all_of(entries_.begin(), entries_.end(),
                     [&](const PredictionEntry& e) { return other.find(e.id) != nullptr; });
}

std::string format_predictions(const PredictionSet& predictions, const Alphabet& alphabet) {
  std::string out = "id,label,score\n";
  for (const PredictionEntry& e : predictions.entries()) {
    out += e.id;
    out += ',';
    out += alphabet.name(e.label);
    out += ',';
    out += format_real(e.score);
    out += '\n';
  }
  return out;
}

PredictionSet parse_predictions(std::string_view text, const Alphabet& alphabet, std::string tag) {
  PredictionSet out(std::move(tag));
  bool header = true;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    auto fail = [&](const std::string& why) {
      throw LearnerError("prediction file line " + std::to_string(line_no) + ": " + why);
    };
    if (cells.size() != 3) fail("expected 3 cells");
    if (header) {
      if (trim(cells[0]) != "id" || trim(cells[1]) != "label" || trim(cells[2]) != "score") {
        fail("header must be id,label,score");
      }
      header = false;
      continue;
    }
    const auto label = alphabet.find(trim(cells[1]));
    if (!label) fail("unknown label '" + std::string(trim(cells[1])) + "'");
    double score;
    if (!parse_real(cells[2], score) || score < 0 || score > 1) fail("score must be a real in [0,1]");
    const std::string id(trim(cells[0]));
    if (id.empty()) fail("empty id");
    if (out.find(id)) fail("duplicate id '" + id + "'");
    out.add({id, *label, score});
  }
  if (header) throw LearnerError("prediction file is empty");
  return out;
}

// --- training ------------------------------------------------------------------

LossAndGradient loss_and_gradient(const SoftmaxModel& model, const LabeledDataset& batch,
                                  double l2) {
  if (batch.empty()) throw LearnerError("loss_and_gradient: empty batch");
  if (batch.alphabet().size() != model.classes()) {
    throw LearnerError("loss_and_gradient: batch alphabet does not match model classes");
  }
  check_shapes(model, batch.examples());
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), 0);
  return batch_loss(model, batch.examples(), rows, l2);
}

SoftmaxModel fit_softmax(const LabeledDataset& train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw LearnerError("fit_softmax: empty training set");
  SoftmaxModel model(train.alphabet().size(), train.dim());
  std::mt19937_64 rng(derive_seed(cfg.seed, {2}));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      const LossAndGradient lg = batch_loss(
          model, train.examples(), std::span<const std::size_t>(order).subspan(start, end - start),
          cfg.l2);
      if (!std::isfinite(lg.loss)) {
        throw LearnerError("fit_softmax: loss diverged at epoch " + std::to_string(epoch));
      }
      auto w = model.weights();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.learning_rate * lg.weight_grad[i];
      auto b = model.bias();
      for (std::size_t c = 0; c < b.size(); ++c) b[c] -= cfg.learning_rate * lg.bias_grad[c];
    }
  }
  for (double v : model.weights()) {
    if (!std::isfinite(v)) throw LearnerError("fit_softmax: parameters diverged");
  }
  return model;
}

PredictionSet predict(const SoftmaxModel& model, std::span<const Example> examples,
                      std::string tag) {
  for (const Example& e : examples) {
    if (e.features.size() != model.dim()) {
      throw LearnerError("predict: example '" + e.id + "' has " +
                         std::to_string(e.features.size()) + " features, model expects " +
                         std::to_string(model.dim()));
    }
  }
  PredictionSet out(std::move(tag));
  for (const Example& e : examples) {
    const std::vector<double> z = model.logits(e.features);
    // max_element returns the first maximum, which is the lowest class index.
    const auto best = static_cast<ClassIndex>(std::max_element(z.begin(), z.end()) - z.begin());
    double sum = 0;
    for (double v : z) sum += std::exp(v - z[best]);
    out.add({e.id, best, 1.0 / sum});
  }
  return out;
}

Metrics score_predictions(const PredictionSet& predictions, const LabeledDataset& eval_set) {
  if (eval_set.empty()) throw LearnerError("evaluate: empty evaluation set");
  Metrics m;
  m.n_eval = eval_set.size();
  for (const Example& e : eval_set.examples()) {
    const PredictionEntry* p = predictions.find(e.id);
    if (!p) throw LearnerError("evaluate: no prediction for '" + e.id + "'");
    if (p->label == *e.label) ++m.correct;
  }
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.n_eval);
  return m;
}

Metrics evaluate(const SoftmaxModel& model, const LabeledDataset& eval_set) {
  if (eval_set.empty()) throw LearnerError("evaluate: empty evaluation set");
  return score_predictions(predict(model, eval_set.examples()), eval_set);
}

Metrics evaluate(const TrainedModel& model, const LabeledDataset& eval_set) {
  if (eval_set.empty()) throw LearnerError("evaluate: empty evaluation set");
  return score_predictions(model.predict(eval_set.examples(), "eval"), eval_set);
}

// --- SoftmaxLearner ------------------------------------------------------------

namespace {

class TrainedSoftmax final : public TrainedModel {
 public:
  explicit TrainedSoftmax(SoftmaxModel model) : model_(std::move(model)) {}

  PredictionSet predict(std::span<const Example> examples, std::string tag) const override {
    return tritrain::predict(model_, examples, std::move(tag));
  }
  std::string serialize() const override { return model_.serialize(); }

 private:
  SoftmaxModel model_;
};

}  // namespace

std::unique_ptr<TrainedModel> SoftmaxLearner::fit(const LabeledDataset& train,
                                                  const TrainConfig& cfg) const {
  return std::make_unique<TrainedSoftmax>(fit_softmax(train, cfg));
}

}  // namespace tritrain
