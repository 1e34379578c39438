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

#ifndef TRITRAIN_COORD_SIMULATE_HPP_
#define TRITRAIN_COORD_SIMULATE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tritrain/coord/store.hpp"
#include "tritrain/coord/worker.hpp"

namespace tritrain::coord {

/// Stops one worker for good just before it would upload its predictions
/// for `iteration`.
struct FaultPlan {
  std::optional<std::size_t> kill_worker;
  std::size_t kill_iteration = 1;
};

/// Virtual durations, seconds, drawn uniformly per step from the scheduler
/// RNG.
struct StepDurations {
  double startup_min = 0, startup_max = 120;
  double store_min = 0.1, store_max = 2;
  double compute_min = 5, compute_max = 150;
};

struct SimulationOptions {
  std::uint64_t scheduler_seed = 0;
  FaultPlan fault;
  StepDurations durations;
  /// Virtual time after which a run still in progress is flagged as a
  /// deadlock. 0 picks timeout * (iterations + 2).
  double max_virtual_time = 0;
};

enum class FlagKind {
  Deadlock,
  Timeout,
  PrematureAggregation,
  PrematureRead,
  DuplicateAggregation,
  WorkerError,
};

std::string_view flag_kind_name(FlagKind kind);

struct TraceFlag {
  FlagKind kind;
  std::size_t worker = 0;
  std::size_t iteration = 0;
  std::string detail;
};

struct TraceEvent {
  std::size_t seq = 0;
  double time = 0;
  WorkerEvent event;
};

struct WorkerOutcome {
  bool completed = false;
  bool killed = false;
  LabeledDataset labeled;
  UnlabeledPool pool;
  std::vector<std::vector<Selection>> applied;
  std::string failure;
};

struct Trace {
  std::uint64_t scheduler_seed = 0;
  std::vector<TraceEvent> events;
  std::vector<TraceFlag> flags;
  std::array<WorkerOutcome, 3> workers;
  double end_time = 0;

  bool flagged() const { return !flags.empty(); }
  std::size_t count_flags(FlagKind kind) const;
  /// Uploads of aggregated-results blobs.
  std::size_t aggregation_uploads() const;
  /// Puts of aggregate_status with Finished=true after initialization.
  std::size_t aggregate_finished_transitions() const;
  /// All workers completed with identical labeled sets and pools.
  bool converged() const;

  /// Tab-separated text: one line per event, then flags and outcomes.
  std::string format() const;
};

/// Runs the three workers as cooperatively scheduled state machines over
/// in-memory stores and a virtual clock. Among workers ready at the current
/// virtual time one is picked by the scheduler RNG; when none is ready the
/// clock jumps to the next ready time. The same inputs and seed produce the
/// same trace.
///
/// A monitor flags aggregation decided before all three prediction blobs
/// exist, a second aggregated blob for an iteration, and downloads of an
/// aggregated blob before aggregate_status reports Finished for that
/// iteration.
Trace simulate(const std::array<WorkerSpec, 3>& specs, const WorkerData& data,
               const Learner& learner, const SimulationOptions& options);

}  // namespace tritrain::coord

#endif  // TRITRAIN_COORD_SIMULATE_HPP_
