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

#include "cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "tritrain/common.hpp"
#include "tritrain/config.hpp"
#include "tritrain/coord/simulate.hpp"
#include "tritrain/coord/worker.hpp"
#include "tritrain/dataset.hpp"
#include "tritrain/experiment.hpp"
#include "tritrain/ledger.hpp"

namespace tritrain::cli {
namespace {

namespace fs = std::filesystem;

/// Shared experiment options for run/simulate/worker.
struct ConfigOptions {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::string strategies;
  std::string split_mode;
  std::optional<double> poll_interval;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key = value config file");
    app.add_option("--set", sets, "override, key=value (repeatable)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--iterations", iterations, "active-learning iterations");
    app.add_option("--strategies", strategies, "comma list of strategies (1,2,3 or names)");
    app.add_option("--split-mode", split_mode, "disjoint-thirds | bootstrap");
    app.add_option("--poll-interval", poll_interval, "poll interval, seconds");
  }

  /// Config file first, then overrides; overrides win.
  RunConfig build(bool simulation) const {
    ConfigBuilder builder;
    if (!config_file.empty()) builder.load_file(config_file);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      builder.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) builder.set("seed", std::to_string(*seed));
    if (iterations) builder.set("iterations", std::to_string(*iterations));
    if (!strategies.empty()) builder.set("strategies", strategies);
    if (!split_mode.empty()) builder.set("split_mode", split_mode);
    if (poll_interval) {
      builder.set(simulation ? "coord.sim_poll_interval" : "coord.poll_interval",
                  format_real(*poll_interval));
    }
    return builder.build();
  }
};

fs::path default_out() {
  if (const char* env = std::getenv("TRITRAIN_OUT"); env && *env) return env;
  return "tritrain-out";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string decisions_text(const KeyValues& decisions) {
  std::string out;
  for (const auto& [k, v] : decisions) out += k + "=" + v + "\n";
  return out;
}

// --- gen-data ------------------------------------------------------------------

struct GenDataArgs {
  std::size_t n = 600, k = 3, dim = 2;
  double sep = 10, sigma = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n_val;
  std::string out;
};

int cmd_gen_data(const GenDataArgs& a) {
  if (a.k < 1) throw ConfigError("--k must be >= 1");
  if (a.n < a.k) {
    throw ConfigError("--n must be >= --k (n=" + std::to_string(a.n) + ", k=" + std::to_string(a.k) + ")");
  }
  const std::size_t n_val = a.n_val.value_or(a.n);
  if (n_val < a.k) throw ConfigError("--n-val must be >= --k");
  if (a.dim < 1) throw ConfigError("--dim must be >= 1");
  if (!(a.sigma > 0)) throw ConfigError("--sigma must be > 0");
  if (!(a.sep >= 0)) throw ConfigError("--sep must be >= 0");
  const fs::path out = a.out.empty() ? default_out() : fs::path(a.out);
  ensure_dir(out);
  const BlobGenerator gen(a.k, a.dim, a.sep, a.sigma, a.seed);
  const LabeledDataset train = gen.sample(a.n, 0, "s");
  const LabeledDataset validation = gen.sample(n_val, 1, "v");
  write_csv(train, out / "train.csv");
  write_csv(validation, out / "validation.csv");
  std::cout << "wrote " << (out / "train.csv").string() << " (" << train.size() << " rows) and "
            << (out / "validation.csv").string() << " (" << validation.size() << " rows), k="
            << a.k << " dim=" << a.dim << "\n";
  return kOk;
}

// --- run -------------------------------------------------------------------------

int cmd_run(const ConfigOptions& opts, const std::string& out_arg) {
  const RunConfig cfg = opts.build(false);
  const fs::path out = out_arg.empty() ? default_out() : fs::path(out_arg);
  ensure_dir(out);
  RunLedger ledger = run_experiment(cfg.experiment);
  ledger.decisions.emplace_back("poll_interval", format_real(cfg.coordination.poll_interval));
  ledger.decisions.emplace_back("config_precedence", "defaults < config file < command-line overrides");
  write_text(out / "ledger.csv", ledger_csv(ledger));
  write_text(out / "ledger.json", ledger_json(ledger));
  write_text(out / "decisions.txt", decisions_text(ledger.decisions));
  std::cout << "oracle accuracy " << format_real(ledger.oracle.accuracy) << ", baseline "
            << format_real(ledger.baseline.accuracy) << "\n";
  for (const ArmLedger& arm : ledger.arms) {
    std::cout << "strategy " << strategy_number(arm.strategy) << " (" << strategy_key(arm.strategy)
              << "): final accuracy " << format_real(arm.iterations.back().accuracy)
              << ", train size " << arm.iterations.back().train_size << ", random "
              << format_real(arm.random.accuracy) << "\n";
  }
  std::cout << "ledger written to " << (out / "ledger.csv").string() << "\n";
  return kOk;
}

// --- simulate ----------------------------------------------------------------------

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (std::string_view part : split(text, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto dots = part.find("..");
    std::uint64_t lo, hi;
    if (dots == std::string_view::npos) {
      if (!parse_uint(part, lo)) throw ConfigError("bad seed '" + std::string(part) + "'");
      out.push_back(lo);
      continue;
    }
    if (!parse_uint(part.substr(0, dots), lo) || !parse_uint(part.substr(dots + 2), hi) || hi < lo) {
      throw ConfigError("bad seed range '" + std::string(part) + "'");
    }
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("--seeds is empty");
  return out;
}

int cmd_simulate(const ConfigOptions& opts, const std::string& out_arg, const std::string& seeds_arg,
                 const std::string& fault, bool unsafe) {
  const RunConfig cfg = opts.build(true);
  const std::vector<std::uint64_t> seed_list = parse_seed_list(seeds_arg);
  auto specs = coord::make_worker_specs(cfg, true);
  coord::SimulationOptions sim;
  if (fault == "kill-aggregator") {
    sim.fault.kill_worker = cfg.coordination.aggregator;
  } else if (fault == "kill-follower") {
    sim.fault.kill_worker = (cfg.coordination.aggregator + 1) % 3;
  } else if (fault != "none") {
    throw ConfigError("unknown fault '" + fault + "' (none, kill-aggregator, kill-follower)");
  }
  if (unsafe) {
    for (auto& s : specs) s.guard_peer_status = false;
  }
  const fs::path out = out_arg.empty() ? default_out() : fs::path(out_arg);
  ensure_dir(out);

  const coord::WorkerData data = coord::make_worker_data(cfg);
  const auto learner = make_learner(cfg.experiment.learner);
  std::size_t flagged = 0;
  std::string summary = "seed\tstatus\taggregations\tflags\n";
  for (std::uint64_t seed : seed_list) {
    sim.scheduler_seed = seed;
    const coord::Trace trace = coord::simulate(specs, data, *learner, sim);
    write_text(out / ("trace_" + std::to_string(seed) + ".txt"), trace.format());
    std::string flags;
    for (const auto& f : trace.flags) {
      flags += (flags.empty() ? "" : ",") + std::string(coord::flag_kind_name(f.kind));
    }
    summary += std::to_string(seed) + '\t' + (trace.flagged() ? "flagged" : "clean") + '\t' +
               std::to_string(trace.aggregation_uploads()) + '\t' + flags + '\n';
    if (trace.flagged()) ++flagged;
  }
  KeyValues decisions = describe(cfg.experiment);
  for (auto& kv : describe(cfg.coordination)) decisions.push_back(std::move(kv));
  decisions.emplace_back("peer_status_check", unsafe ? "finished-only (literal)" : "finished and last_iteration == i");
  decisions.emplace_back("fault", fault);
  write_text(out / "simulate_summary.tsv", summary);
  write_text(out / "decisions.txt", decisions_text(decisions));
  std::cout << seed_list.size() << " simulations, " << flagged << " flagged; traces in " << out.string()
            << "\n";
  return flagged == 0 ? kOk : kSimulationFlagged;
}

// --- worker --------------------------------------------------------------------------

int cmd_worker(const ConfigOptions& opts, std::size_t index, const std::string& shared_arg) {
  const RunConfig cfg = opts.build(false);
  if (index > 2) throw ConfigError("--index must be 0, 1 or 2");
  const fs::path shared(shared_arg);
  std::error_code ec;
  if (!fs::is_directory(shared, ec)) {
    std::cerr << "tritrain worker: shared directory " << shared.string() << " does not exist\n";
    return kRuntimeError;
  }
  fs::create_directories(shared / "workers", ec);
  const fs::path lock = shared / "workers" / ("w" + std::to_string(index) + ".lock");
  const int fd = ::open(lock.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      std::cerr << "tritrain worker: index " << index << " already claimed in " << shared.string() << "\n";
      return kUsageError;
    }
    std::cerr << "tritrain worker: cannot claim " << lock.string() << "\n";
    return kRuntimeError;
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);

  const auto specs = coord::make_worker_specs(cfg, false);
  const auto learner = make_learner(cfg.experiment.learner);
  coord::DirectoryDatastore datastore(shared);
  coord::DirectoryBlobstore blobstore(shared);
  coord::Worker worker(specs[index], coord::make_worker_data(cfg), *learner, datastore, blobstore);

  auto write_outputs = [&]() {
    const fs::path final_dir = shared / "final";
    fs::create_directories(final_dir, ec);
    write_csv(worker.labeled(), final_dir / ("w" + std::to_string(index) + "_train.csv"));
    write_unlabeled_csv(worker.pool().examples(), final_dir / ("w" + std::to_string(index) + "_pool.csv"));
    std::string trace;
    for (const auto& e : worker.events()) {
      trace += std::to_string(e.iteration) + '\t' + std::string(coord::event_kind_name(e.kind)) + '\t' +
               e.key + '\t' + e.detail + '\n';
    }
    write_text(final_dir / ("w" + std::to_string(index) + "_trace.txt"), trace);
  };
  try {
    coord::run_worker(worker);
  } catch (...) {
    write_outputs();
    throw;
  }
  write_outputs();
  std::cout << "worker " << index << " finished " << worker.applied().size()
            << " iterations, train size " << worker.labeled().size() << "\n";
  return kOk;
}

// --- report ---------------------------------------------------------------------------

int cmd_report(const std::string& ledger_path, const std::string& out_arg) {
  std::ifstream in(ledger_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read ledger " + ledger_path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const ParsedLedger ledger = parse_ledger(text);
  const fs::path out = out_arg.empty() ? fs::path(ledger_path).parent_path() : fs::path(out_arg);
  ensure_dir(out.empty() ? fs::path(".") : out);
  write_text(out / "report.md", report_markdown(ledger));
  for (const auto& [name, csv] : report_series(ledger)) write_text(out / name, csv);
  std::cout << "report written to " << (out / "report.md").string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Tri-training active learning engine and coordination protocol", "tritrain"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write blob train/validation CSVs");
  gen_cmd->add_option("--n", gen.n, "training rows");
  gen_cmd->add_option("--k", gen.k, "classes");
  gen_cmd->add_option("--dim", gen.dim, "features");
  gen_cmd->add_option("--sep", gen.sep, "minimum distance between class centers");
  gen_cmd->add_option("--sigma", gen.sigma, "noise standard deviation");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--n-val", gen.n_val, "validation rows (default: --n)");
  gen_cmd->add_option("--out", gen.out, "output directory (default $TRITRAIN_OUT)");

  ConfigOptions run_opts;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "Run the oracle/baseline/strategy/random experiment");
  run_opts.attach(*run_cmd);
  run_cmd->add_option("--out", run_out, "output directory (default $TRITRAIN_OUT)");

  ConfigOptions sim_opts;
  std::string sim_out, sim_seeds = "0", sim_fault = "none";
  bool sim_unsafe = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the three-worker protocol");
  sim_opts.attach(*sim_cmd);
  sim_cmd->add_option("--out", sim_out, "output directory (default $TRITRAIN_OUT)");
  sim_cmd->add_option("--seeds", sim_seeds, "scheduler seeds, e.g. 0..99 or 1,5,7");
  sim_cmd->add_option("--fault", sim_fault, "none | kill-aggregator | kill-follower");
  sim_cmd->add_flag("--unsafe-status-check", sim_unsafe,
                    "aggregator checks only the Finished flag of its peers");

  ConfigOptions worker_opts;
  std::size_t worker_index = 0;
  std::string shared_dir;
  auto* worker_cmd = app.add_subcommand("worker", "Run one protocol worker over a shared directory");
  worker_opts.attach(*worker_cmd);
  worker_cmd->add_option("--index", worker_index, "worker index 0..2")->required();
  worker_cmd->add_option("--shared-dir", shared_dir, "directory shared by the three workers")->required();

  std::string ledger_path, report_out;
  auto* report_cmd = app.add_subcommand("report", "Render a ledger as tables and plot series");
  report_cmd->add_option("--ledger", ledger_path, "ledger.csv or ledger.json")->required();
  report_cmd->add_option("--out", report_out, "output directory (default: ledger's directory)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "tritrain: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen);
    if (*run_cmd) return cmd_run(run_opts, run_out);
    if (*sim_cmd) return cmd_simulate(sim_opts, sim_out, sim_seeds, sim_fault, sim_unsafe);
    if (*worker_cmd) return cmd_worker(worker_opts, worker_index, shared_dir);
    if (*report_cmd) return cmd_report(ledger_path, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "tritrain: " << e.what() << "\n";
    return kUsageError;
  } catch (const TimeoutError& e) {
    std::cerr << "tritrain: coordination timeout: " << e.what() << "\n";
    return kCoordinationTimeout;
  } catch (const std::exception& e) {
    std::cerr << "tritrain: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace tritrain::cli
