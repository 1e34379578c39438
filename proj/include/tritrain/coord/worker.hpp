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

#ifndef TRITRAIN_COORD_WORKER_HPP_
#define TRITRAIN_COORD_WORKER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tritrain/config.hpp"
#include "tritrain/coord/store.hpp"
#include "tritrain/dataset.hpp"
#include "tritrain/learner.hpp"
#include "tritrain/strategy.hpp"

namespace tritrain::coord {

struct WorkerSpec {
  std::size_t index = 0;
  bool is_aggregator = false;
  std::size_t split_index = 0;
  StrategyKind strategy = StrategyKind::AnyTwoGroundTruth;
  std::size_t iterations = 3;
  /// Seconds between polls; virtual in simulation.
  double poll_interval = 30.0;
  /// Budget for one wait loop, seconds.
  double timeout = 3600.0;
  /// Aggregator: peers must report LastIteration == i, not just Finished.
  /// Disabling it reproduces the literal protocol and its stale-status hazard.
  bool guard_peer_status = true;
  /// Follower: aggregate_status must report LastIteration == i.
  bool guard_aggregate_status = true;
};

/// Throws ConfigError unless the specs cover indices 0..2 once each with
/// exactly one aggregator.
void validate_specs(std::span<const WorkerSpec> specs);

/// What every worker starts from. All three workers receive the same value.
struct WorkerData {
  LabeledDataset labeled;
  UnlabeledPool pool;
  std::optional<LabeledDataset> eval;
  SplitMode split_mode = SplitMode::DisjointThirds;
  /// Round r uses seeds::round(seed, r), as an experiment arm does.
  std::uint64_t seed = 0;
  TrainConfig train;
};

/// Worker data and specs for a configuration: the holdout split of its
/// data, with the aggregator at `coordination.aggregator`.
WorkerData make_worker_data(const RunConfig& cfg);
std::array<WorkerSpec, 3> make_worker_specs(const RunConfig& cfg, bool simulation);

enum class Phase {
  InitTrainingStatus,
  InitAggregateStatus,
  BeginIteration,
  Train,
  UploadModel,
  UploadPredictions,
  UploadAccuracy,
  MarkFinished,
  PollPeers,
  MarkAggregating,
  DownloadPredictions,
  UploadAggregate,
  MarkAggregateFinished,
  PollAggregate,
  DownloadAggregate,
  Done,
  Failed,
};

std::string_view phase_name(Phase phase);

enum class EventKind { Put, Get, Upload, Download, Train, AggregateDecision, Augment, Timeout, Error };

std::string_view event_kind_name(EventKind kind);

struct WorkerEvent {
  std::size_t worker = 0;
  std::size_t iteration = 0;
  EventKind kind = EventKind::Put;
  std::string key;
  std::string detail;
};

class WorkerObserver {
 public:
  virtual ~WorkerObserver() = default;
  virtual void on_event(const WorkerEvent& event) = 0;
};

/// How long the step just taken occupies the worker.
enum class StepCost { Startup, Store, Compute, Wait, None };

enum class FailureKind { None, Timeout, Protocol, Store };

/// One worker of the three-worker protocol as a resumable state machine.
/// Each `step` performs at most one datastore/blobstore operation or one
/// training run, so a scheduler can interleave workers at store-operation
/// granularity. `now` is the caller's clock in seconds and only drives wait
/// budgets.
///
/// Per iteration i: status "at iteration: i" (LastIteration i-1, not
/// finished); fit on this worker's third of the labeled set; upload model,
/// predictions and accuracy; status Finished (LastIteration i). The
/// aggregator then polls both peers, marks aggregate_status Aggregating,
/// downloads the three prediction files, applies the strategy, uploads the
/// selections and marks aggregate_status Finished (LastIteration i). A
/// follower polls aggregate_status and downloads the selections. Both end by
/// moving the selections from the pool into the labeled set.
class Worker {
 public:
  Worker(WorkerSpec spec, WorkerData data, const Learner& learner, Datastore& datastore,
         Blobstore& blobstore, WorkerObserver* observer = nullptr);

  StepCost step(double now);

  const WorkerSpec& spec() const { return spec_; }
  Phase phase() const { return phase_; }
  std::size_t iteration() const { return iteration_; }
  bool finished() const { return phase_ == Phase::Done || phase_ == Phase::Failed; }
  FailureKind failure() const { return failure_; }
  const std::string& failure_message() const { return failure_message_; }

  const LabeledDataset& labeled() const { return data_.labeled; }
  const UnlabeledPool& pool() const { return data_.pool; }
  /// Selections applied in each completed iteration.
  const std::vector<std::vector<Selection>>& applied() const { return applied_; }
  const std::vector<WorkerEvent>& events() const { return events_; }

 private:
  void emit(EventKind kind, std::string key, std::string detail = {});
  void put_status(const std::string& key, StatusEntity entity);
  std::optional<StatusEntity> get_status(const std::string& key);
  void upload(const std::string& name, const std::string& bytes);
  bool wait_expired(double now);
  void fail(FailureKind kind, const std::string& message);
  void augment(std::vector<Selection> selections);

  StepCost train();
  StepCost poll_peers(double now);
  StepCost download_predictions();
  StepCost poll_aggregate(double now);
  StepCost download_aggregate();

  WorkerSpec spec_;
  WorkerData data_;
  const Learner& learner_;
  Datastore& datastore_;
  Blobstore& blobstore_;
  WorkerObserver* observer_;

  Phase phase_ = Phase::InitTrainingStatus;
  std::size_t iteration_ = 0;
  std::unique_ptr<TrainedModel> model_;
  std::string predictions_text_;
  std::string accuracy_text_;
  std::vector<Selection> pending_;
  std::optional<double> wait_started_;
  FailureKind failure_ = FailureKind::None;
  std::string failure_message_;
  std::vector<std::vector<Selection>> applied_;
  std::vector<WorkerEvent> events_;
};

/// Drives a worker to completion in real time, sleeping `poll_interval`
/// between polls. Throws TimeoutError on a wait budget overrun, StoreError on
/// store failures and Error on protocol violations.
void run_worker(Worker& worker);

}  // namespace tritrain::coord

#endif  // TRITRAIN_COORD_WORKER_HPP_
