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

#include "tritrain/coord/worker.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <thread>

#include "tritrain/common.hpp"
#include "tritrain/experiment.hpp"

namespace tritrain::coord {

void validate_specs(std::span<const WorkerSpec> specs) {
  if (specs.size() != 3) throw ConfigError("the protocol needs exactly three workers");
  std::set<std::size_t> indices;
  std::size_t aggregators = 0;
  for (const WorkerSpec& s : specs) {
    if (s.index > 2) throw ConfigError("worker index must be 0..2");
    if (s.split_index > 2) throw ConfigError("split index must be 0..2");
    if (!indices.insert(s.index).second) {
      throw ConfigError("duplicate worker index " + std::to_string(s.index));
    }
    if (s.is_aggregator) ++aggregators;
    if (s.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(s.poll_interval > 0)) throw ConfigError("poll interval must be > 0");
    if (!(s.timeout > 0)) throw ConfigError("timeout must be > 0");
  }
  if (aggregators != 1) throw ConfigError("exactly one worker must aggregate");
}

WorkerData make_worker_data(const RunConfig& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  ExperimentData data = load_experiment_data(e);
  Holdout holdout = holdout_split(data.full, e.train_fraction, e.stratified, seeds::holdout(e.seed));
  const StrategyKind strategy = cfg.coordination_strategy();
  std::size_t arm_index = 0;
  if (!e.shared_arm_seeds) {
    const auto it = std::find(e.strategies.begin(), e.strategies.end(), strategy);
    arm_index = it == e.strategies.end() ? e.strategies.size()
                                         : static_cast<std::size_t>(it - e.strategies.begin());
  }
  WorkerData out;
  out.labeled = std::move(holdout.train);
  out.pool = std::move(holdout.pool);
  out.eval = std::move(data.validation);
  out.split_mode = e.split_mode;
  out.seed = seeds::arm(e.seed, arm_index);
  out.train = e.train;
  return out;
}

std::array<WorkerSpec, 3> make_worker_specs(const RunConfig& cfg, bool simulation) {
  std::array<WorkerSpec, 3> specs;
  for (std::size_t w = 0; w < 3; ++w) {
    WorkerSpec& s = specs[w];
    s.index = w;
    s.split_index = w;
    s.is_aggregator = w == cfg.coordination.aggregator;
    s.strategy = cfg.coordination_strategy();
    s.iterations = cfg.experiment.iterations;
    s.poll_interval = simulation ? cfg.coordination.sim_poll_interval : cfg.coordination.poll_interval;
    s.timeout = cfg.coordination.timeout;
  }
  return specs;
}

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::InitTrainingStatus: return "init-training-status";
    case Phase::InitAggregateStatus: return "init-aggregate-status";
    case Phase::BeginIteration: return "begin-iteration";
    case Phase::Train: return "train";
    case Phase::UploadModel: return "upload-model";
    case Phase::UploadPredictions: return "upload-predictions";
    case Phase::UploadAccuracy: return "upload-accuracy";
    case Phase::MarkFinished: return "mark-finished";
    case Phase::PollPeers: return "poll-peers";
    case Phase::MarkAggregating: return "mark-aggregating";
    case Phase::DownloadPredictions: return "download-predictions";
    case Phase::UploadAggregate: return "upload-aggregate";
    case Phase::MarkAggregateFinished: return "mark-aggregate-finished";
    case Phase::PollAggregate: return "poll-aggregate";
    case Phase::DownloadAggregate: return "download-aggregate";
    case Phase::Done: return "done";
    case Phase::Failed: return "failed";
  }
  return "unknown";
}

std::string_view event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Put: return "put";
    case EventKind::Get: return "get";
    case EventKind::Upload: return "upload";
    case EventKind::Download: return "download";
    case EventKind::Train: return "train";
    case EventKind::AggregateDecision: return "aggregate-decision";
    case EventKind::Augment: return "augment";
    case EventKind::Timeout: return "timeout";
    case EventKind::Error: return "error";
  }
  return "unknown";
}

Worker::Worker(WorkerSpec spec, WorkerData data, const Learner& learner, Datastore& datastore,
               Blobstore& blobstore, WorkerObserver* observer)
    : spec_(spec),
      data_(std::move(data)),
      learner_(learner),
      datastore_(datastore),
      blobstore_(blobstore),
      observer_(observer) {
  if (data_.labeled.size() < 3) throw ConfigError("worker needs at least 3 labeled examples");
}

void Worker::emit(EventKind kind, std::string key, std::string detail) {
  WorkerEvent event{spec_.index, iteration_, kind, std::move(key), std::move(detail)};
  if (observer_) observer_->on_event(event);
  events_.push_back(std::move(event));
}

void Worker::put_status(const std::string& key, StatusEntity entity) {
  datastore_.put(key, entity);
  emit(EventKind::Put, key,
       entity.status + "|" + std::to_string(entity.last_iteration) + "|" +
           (entity.finished ? "true" : "false"));
}

std::optional<StatusEntity> Worker::get_status(const std::string& key) {
  auto entity = datastore_.get(key);
  emit(EventKind::Get, key,
       entity ? entity->status + "|" + std::to_string(entity->last_iteration) + "|" +
                    (entity->finished ? "true" : "false")
              : std::string("absent"));
  return entity;
}

void Worker::upload(const std::string& name, const std::string& bytes) {
  blobstore_.upload(name, bytes);
  emit(EventKind::Upload, name, std::to_string(bytes.size()) + " bytes");
}

bool Worker::wait_expired(double now) {
  if (!wait_started_) wait_started_ = now;
  return now - *wait_started_ >= spec_.timeout;
}

void Worker::fail(FailureKind kind, const std::string& message) {
  failure_ = kind;
  failure_message_ = message;
  phase_ = Phase::Failed;
  emit(kind == FailureKind::Timeout ? EventKind::Timeout : EventKind::Error, "", message);
}

void Worker::augment(std::vector<Selection> selections) {
  Augmented next = apply_augmentation(data_.labeled, data_.pool, selections);
  data_.labeled = std::move(next.train);
  data_.pool = std::move(next.pool);
  emit(EventKind::Augment, "", std::to_string(selections.size()) + " selections, train " +
                                   std::to_string(data_.labeled.size()) + ", pool " +
                                   std::to_string(data_.pool.size()));
  applied_.push_back(std::move(selections));
  pending_.clear();
  model_.reset();
  if (iteration_ >= spec_.iterations) {
    phase_ = Phase::Done;
  } else {
    ++iteration_;
    phase_ = Phase::BeginIteration;
  }
}

StepCost Worker::train() {
  const std::uint64_t round = seeds::round(data_.seed, iteration_);
  const ThreeParts parts = three_way_split(data_.labeled, data_.split_mode, seeds::split(round));
  const LabeledDataset& split = parts[spec_.split_index];
  model_ = learner_.fit(split, with_seed(data_.train, seeds::model(round, spec_.split_index)));
  const PredictionSet predictions =
      model_->predict(data_.pool.examples(), "w" + std::to_string(spec_.index));
  predictions_text_ = format_predictions(predictions, data_.pool.alphabet());
  const Metrics metrics = evaluate(*model_, data_.eval ? *data_.eval : split);
  accuracy_text_ = format_real(metrics.accuracy) + "\n";
  emit(EventKind::Train, "", "split " + std::to_string(split.size()) + ", accuracy " +
                                 format_real(metrics.accuracy));
  phase_ = Phase::UploadModel;
  return StepCost::Compute;
}

StepCost Worker::poll_peers(double now) {
  bool ready = true;
  for (std::size_t peer = 0; peer < 3; ++peer) {
    if (peer == spec_.index) continue;
    const auto status = get_status(training_status_key(peer));
    const bool peer_ready =
        status && status->finished &&
        (!spec_.guard_peer_status ||
         status->last_iteration == static_cast<std::int64_t>(iteration_));
    ready = ready && peer_ready;
  }
  if (ready) {
    wait_started_.reset();
    emit(EventKind::AggregateDecision, "", "peers reported finished");
    phase_ = Phase::MarkAggregating;
    return StepCost::Store;
  }
  if (wait_expired(now)) {
    fail(FailureKind::Timeout, "timed out waiting for peers at iteration " + std::to_string(iteration_));
    return StepCost::None;
  }
  return StepCost::Wait;
}

StepCost Worker::download_predictions() {
  std::array<PredictionSet, 3> sets;
  for (std::size_t w = 0; w < 3; ++w) {
    const std::string name = predictions_blob(w, iteration_);
    const auto text = blobstore_.download(name);
    emit(EventKind::Download, name, text ? "ok" : "missing");
    if (!text) {
      fail(FailureKind::Protocol, "prediction blob " + name + " missing at aggregation");
      return StepCost::None;
    }
    sets[w] = parse_predictions(*text, data_.pool.alphabet(), "w" + std::to_string(w));
  }
  pending_ = select(spec_.strategy, sets[0], sets[1], sets[2], data_.pool);
  phase_ = Phase::UploadAggregate;
  return StepCost::Store;
}

StepCost Worker::poll_aggregate(double now) {
  const auto status = get_status(std::string(kAggregateStatusKey));
  if (status && status->finished &&
      (!spec_.guard_aggregate_status ||
       status->last_iteration == static_cast<std::int64_t>(iteration_))) {
    wait_started_.reset();
    phase_ = Phase::DownloadAggregate;
    return StepCost::Store;
  }
  if (wait_expired(now)) {
    fail(FailureKind::Timeout,
         "timed out waiting for aggregation at iteration " + std::to_string(iteration_));
    return StepCost::None;
  }
  return StepCost::Wait;
}

StepCost Worker::download_aggregate() {
  const std::string name = aggregate_blob(iteration_);
  const auto text = blobstore_.download(name);
  emit(EventKind::Download, name, text ? "ok" : "missing");
  if (!text) {
    fail(FailureKind::Store, "aggregated blob " + name + " missing despite Finished status");
    return StepCost::None;
  }
  augment(parse_selections(*text, data_.pool.alphabet()));
  return StepCost::Store;
}

StepCost Worker::step(double now) {
  try {
    switch (phase_) {
      case Phase::InitTrainingStatus:
        put_status(training_status_key(spec_.index), {status_at_iteration(0), 0, true});
        phase_ = spec_.is_aggregator ? Phase::InitAggregateStatus : Phase::BeginIteration;
        iteration_ = 1;
        return StepCost::Startup;
      case Phase::InitAggregateStatus:
        put_status(std::string(kAggregateStatusKey), {std::string(kStatusWaiting), 0, true});
        phase_ = Phase::BeginIteration;
        return StepCost::Store;
      case Phase::BeginIteration:
        put_status(training_status_key(spec_.index),
                   {status_at_iteration(iteration_), static_cast<std::int64_t>(iteration_) - 1, false});
        phase_ = Phase::Train;
        return StepCost::Store;
      case Phase::Train:
        return train();
      case Phase::UploadModel:
        upload(model_blob(spec_.index, iteration_), model_->serialize());
        phase_ = Phase::UploadPredictions;
        return StepCost::Store;
      case Phase::UploadPredictions:
        upload(predictions_blob(spec_.index, iteration_), predictions_text_);
        phase_ = Phase::UploadAccuracy;
        return StepCost::Store;
      case Phase::UploadAccuracy:
        upload(accuracy_blob(spec_.index, iteration_), accuracy_text_);
        phase_ = Phase::MarkFinished;
        return StepCost::Store;
      case Phase::MarkFinished:
        put_status(training_status_key(spec_.index),
                   {std::string(kStatusFinished), static_cast<std::int64_t>(iteration_), true});
        phase_ = spec_.is_aggregator ? Phase::PollPeers : Phase::PollAggregate;
        return StepCost::Store;
      case Phase::PollPeers:
        return poll_peers(now);
      case Phase::MarkAggregating:
        put_status(std::string(kAggregateStatusKey),
                   {std::string(kStatusAggregating), static_cast<std::int64_t>(iteration_) - 1, false});
        phase_ = Phase::DownloadPredictions;
        return StepCost::Store;
      case Phase::DownloadPredictions:
        return download_predictions();
      case Phase::UploadAggregate:
        upload(aggregate_blob(iteration_), format_selections(pending_, data_.pool.alphabet()));
        phase_ = Phase::MarkAggregateFinished;
        return StepCost::Store;
      case Phase::MarkAggregateFinished:
        put_status(std::string(kAggregateStatusKey),
                   {std::string(kStatusWaiting), static_cast<std::int64_t>(iteration_), true});
        augment(std::move(pending_));
        return StepCost::Store;
      case Phase::PollAggregate:
        return poll_aggregate(now);
      case Phase::DownloadAggregate:
        return download_aggregate();
      case Phase::Done:
      case Phase::Failed:
        return StepCost::None;
    }
  } catch (const StoreError& e) {
    fail(FailureKind::Store, e.what());
  } catch (const Error& e) {
    fail(FailureKind::Protocol, e.what());
  }
  return StepCost::None;
}

void run_worker(Worker& worker) {
  const auto start = std::chrono::steady_clock::now();
  const auto poll = std::chrono::duration<double>(worker.spec().poll_interval);
  while (!worker.finished()) {
    const double now = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (worker.step(now) == StepCost::Wait) std::this_thread::sleep_for(poll);
  }
  switch (worker.failure()) {
    case FailureKind::None:
      return;
    case FailureKind::Timeout:
      throw TimeoutError(worker.failure_message());
    case FailureKind::Store:
      throw StoreError(worker.failure_message());
    case FailureKind::Protocol:
      throw Error(worker.failure_message());
  }
}

}  // namespace tritrain::coord
