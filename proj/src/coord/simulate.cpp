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

#include "tritrain/coord/simulate.hpp"

#include <memory>
#include <random>

#include "tritrain/common.hpp"

namespace tritrain::coord {
namespace {

class Monitor final : public WorkerObserver {
 public:
  Monitor(Trace& trace, MemoryDatastore& datastore, MemoryBlobstore& blobstore, const double& now)
      : trace_(trace), datastore_(datastore), blobstore_(blobstore), now_(now) {}

  void on_event(const WorkerEvent& event) override {
    trace_.events.push_back({trace_.events.size(), now_, event});
    const std::size_t i = event.iteration;
    switch (event.kind) {
      case EventKind::AggregateDecision:
        for (std::size_t w = 0; w < 3; ++w) {
          if (!blobstore_.exists(predictions_blob(w, i))) {
            flag(FlagKind::PrematureAggregation, event,
                 "aggregation decided before " + predictions_blob(w, i) + " exists");
            break;
          }
        }
        break;
      case EventKind::Upload:
        if (event.key == aggregate_blob(i) && ++aggregate_uploads_[i] > 1) {
          flag(FlagKind::DuplicateAggregation, event, "second aggregated blob");
        }
        break;
      case EventKind::Download:
        if (event.key == aggregate_blob(i)) {
          const auto status = datastore_.get(std::string(kAggregateStatusKey));
          if (!status || !status->finished ||
              status->last_iteration != static_cast<std::int64_t>(i)) {
            flag(FlagKind::PrematureRead, event, "aggregated blob read before aggregate_status is Finished");
          }
        }
        break;
      case EventKind::Timeout:
        flag(FlagKind::Timeout, event, event.detail);
        break;
      case EventKind::Error:
        flag(FlagKind::WorkerError, event, event.detail);
        break;
      default:
        break;
    }
  }

 private:
  void flag(FlagKind kind, const WorkerEvent& event, std::string detail) {
    trace_.flags.push_back({kind, event.worker, event.iteration, std::move(detail)});
  }

  Trace& trace_;
  MemoryDatastore& datastore_;
  MemoryBlobstore& blobstore_;
  const double& now_;
  std::map<std::size_t, std::size_t> aggregate_uploads_;
};

double draw(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::string_view flag_kind_name(FlagKind kind) {
  switch (kind) {
    case FlagKind::Deadlock: return "deadlock";
    case FlagKind::Timeout: return "timeout";
    case FlagKind::PrematureAggregation: return "premature-aggregation";
    case FlagKind::PrematureRead: return "premature-read";
    case FlagKind::DuplicateAggregation: return "duplicate-aggregation";
    case FlagKind::WorkerError: return "worker-error";
  }
  return "unknown";
}

std::size_t Trace::count_flags(FlagKind kind) const {
  std::size_t n = 0;
  for (const TraceFlag& f : flags) n += f.kind == kind;
  return n;
}

std::size_t Trace::aggregation_uploads() const {
  std::size_t n = 0;
  for (const TraceEvent& e : events) {
    n += e.event.kind == EventKind::Upload && e.event.key.starts_with("agg/");
  }
  return n;
}

std::size_t Trace::aggregate_finished_transitions() const {
  std::size_t n = 0;
  for (const TraceEvent& e : events) {
    if (e.event.kind != EventKind::Put || e.event.key != kAggregateStatusKey) continue;
    // detail is "status|last_iteration|finished"
    const auto parts = split(e.event.detail, '|');
    if (parts.size() == 3 && parts[2] == "true" && parts[1] != "0") ++n;
  }
  return n;
}

bool Trace::converged() const {
  for (const WorkerOutcome& w : workers) {
    if (!w.completed) return false;
  }
  return workers[0].labeled == workers[1].labeled && workers[0].labeled == workers[2].labeled &&
         workers[0].pool == workers[1].pool && workers[0].pool == workers[2].pool;
}

std::string Trace::format() const {
  std::string out = "# scheduler_seed " + std::to_string(scheduler_seed) + "\n";
  out += "# seq\ttime\tworker\titeration\tkind\tkey\tdetail\n";
  for (const TraceEvent& e : events) {
    out += std::to_string(e.seq) + '\t' + format_real(e.time) + "\tw" +
           std::to_string(e.event.worker) + '\t' + std::to_string(e.event.iteration) + '\t' +
           std::string(event_kind_name(e.event.kind)) + '\t' + e.event.key + '\t' + e.event.detail +
           '\n';
  }
  for (const TraceFlag& f : flags) {
    out += "FLAG\t" + std::string(flag_kind_name(f.kind)) + "\tw" + std::to_string(f.worker) +
           '\t' + std::to_string(f.iteration) + '\t' + f.detail + '\n';
  }
  for (std::size_t w = 0; w < workers.size(); ++w) {
    const WorkerOutcome& o = workers[w];
    out += "OUTCOME\tw" + std::to_string(w) + '\t' +
           (o.completed ? "completed" : o.killed ? "killed" : "failed") + "\ttrain " +
           std::to_string(o.labeled.size()) + "\tpool " + std::to_string(o.pool.size()) +
           (o.failure.empty() ? "" : "\t" + o.failure) + '\n';
  }
  out += "END\t" + format_real(end_time) + '\t' + (flagged() ? "flagged" : "clean") + '\n';
  return out;
}

Trace simulate(const std::array<WorkerSpec, 3>& specs, const WorkerData& data,
               const Learner& learner, const SimulationOptions& options) {
  validate_specs(specs);
  Trace trace;
  trace.scheduler_seed = options.scheduler_seed;
  MemoryDatastore datastore;
  MemoryBlobstore blobstore;
  double now = 0;
  Monitor monitor(trace, datastore, blobstore, now);

  std::vector<std::unique_ptr<Worker>> workers;
  for (const WorkerSpec& spec : specs) {
    workers.push_back(std::make_unique<Worker>(spec, data, learner, datastore, blobstore, &monitor));
  }
  double budget = options.max_virtual_time;
  if (budget <= 0) {
    double longest = 0;
    for (const WorkerSpec& s : specs) {
      longest = std::max(longest, s.timeout * static_cast<double>(s.iterations + 2));
    }
    budget = longest;
  }

  std::mt19937_64 rng(derive_seed(options.scheduler_seed, {13}));
  const StepDurations& d = options.durations;
  std::array<double, 3> ready_at{0, 0, 0};
  std::array<bool, 3> killed{false, false, false};
  auto alive = [&](std::size_t w) { return !killed[w] && !workers[w]->finished(); };

  while (true) {
    std::vector<std::size_t> ready;
    double next = -1;
    for (std::size_t w = 0; w < 3; ++w) {
      if (!alive(w)) continue;
      if (ready_at[w] <= now) {
        ready.push_back(w);
      } else if (next < 0 || ready_at[w] < next) {
        next = ready_at[w];
      }
    }
    if (ready.empty()) {
      if (next < 0) break;
      now = next;
      continue;
    }
    if (now > budget) {
      trace.flags.push_back({FlagKind::Deadlock, 0, 0,
                             "virtual time " + format_real(now) + " exceeded budget " +
                                 format_real(budget)});
      break;
    }
    const std::size_t w =
        ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)];
    Worker& worker = *workers[w];
    if (options.fault.kill_worker == worker.spec().index &&
        worker.phase() == Phase::UploadPredictions &&
        worker.iteration() == options.fault.kill_iteration) {
      killed[w] = true;
      continue;
    }
    switch (worker.step(now)) {
      case StepCost::Startup:
        ready_at[w] = now + draw(rng, d.startup_min, d.startup_max);
        break;
      case StepCost::Store:
        ready_at[w] = now + draw(rng, d.store_min, d.store_max);
        break;
      case StepCost::Compute:
        ready_at[w] = now + draw(rng, d.compute_min, d.compute_max);
        break;
      case StepCost::Wait:
        ready_at[w] = now + worker.spec().poll_interval;
        break;
      case StepCost::None:
        break;
    }
  }
  trace.end_time = now;
  for (std::size_t w = 0; w < 3; ++w) {
    WorkerOutcome& o = trace.workers[specs[w].index];
    o.completed = workers[w]->phase() == Phase::Done;
    o.killed = killed[w];
    o.labeled = workers[w]->labeled();
    o.pool = workers[w]->pool();
    o.applied = workers[w]->applied();
    o.failure = killed[w] ? "killed by fault plan" : workers[w]->failure_message();
  }
  return trace;
}

}  // namespace tritrain::coord
