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

#include "tritrain/config.hpp"

#include <cmath>

#include "csv.hpp"
#include "tritrain/common.hpp"

namespace tritrain {
namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) +
                    ": expected " + std::string(want));
}

std::size_t as_count(std::string_view key, std::string_view value) {
  std::uint64_t v;
  if (!parse_uint(value, v)) bad_value(key, value, "a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t as_u64(std::string_view key, std::string_view value) {
  std::uint64_t v;
  if (!parse_uint(value, v)) bad_value(key, value, "a non-negative integer");
  return v;
}

double as_real(std::string_view key, std::string_view value) {
  double v;
  if (!parse_real(value, v)) bad_value(key, value, "a finite real");
  return v;
}

bool as_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

std::vector<StrategyKind> as_strategies(std::string_view key, std::string_view value) {
  std::vector<StrategyKind> out;
  for (std::string_view part : split(value, ',')) {
    if (trim(part).empty()) continue;
    const auto kind = parse_strategy(part);
    if (!kind) {
      throw ConfigError("unknown strategy '" + std::string(trim(part)) + "' in " +
                        std::string(key));
    }
    out.push_back(*kind);
  }
  if (out.empty()) bad_value(key, value, "a nonempty strategy list");
  return out;
}

std::string join_strategies(const std::vector<StrategyKind>& kinds) {
  std::string out;
  for (StrategyKind k : kinds) {
    if (!out.empty()) out += ',';
    out += strategy_key(k);
  }
  return out;
}

}  // namespace

StrategyKind RunConfig::coordination_strategy() const {
  if (coordination.strategy) return *coordination.strategy;
  return experiment.strategies.front();
}

ConfigBuilder::ConfigBuilder() = default;

void ConfigBuilder::set(std::string_view key_in, std::string_view value_in) {
  const std::string key(trim(key_in));
  const std::string_view value = trim(value_in);
  ExperimentConfig& e = config_.experiment;
  CoordinationSettings& c = config_.coordination;

  if (key == "seed") {
    e.seed = as_u64(key, value);
  } else if (key == "data.source") {
    if (value == "blobs") {
      use_csv_ = false;
    } else if (value == "csv") {
      use_csv_ = true;
    } else {
      bad_value(key, value, "blobs or csv");
    }
  } else if (key == "data.n") {
    blobs_.n = as_count(key, value);
  } else if (key == "data.k") {
    blobs_.k = as_count(key, value);
  } else if (key == "data.dim") {
    blobs_.dim = as_count(key, value);
  } else if (key == "data.separation") {
    blobs_.separation = as_real(key, value);
  } else if (key == "data.sigma") {
    blobs_.sigma = as_real(key, value);
  } else if (key == "data.n_validation") {
    blobs_.n_validation = as_count(key, value);
  } else if (key == "data.seed") {
    blobs_.seed = as_u64(key, value);
  } else if (key == "data.train_csv") {
    files_.train_csv = std::string(value);
  } else if (key == "data.validation_csv") {
    files_.validation_csv = std::string(value);
  } else if (key == "data.label_column") {
    files_.label_column = std::string(value);
  } else if (key == "data.classes") {
    std::vector<std::string> names;
    for (std::string_view part : split(value, ',')) names.emplace_back(trim(part));
    files_.classes = std::move(names);
  } else if (key == "train_fraction") {
    e.train_fraction = as_real(key, value);
  } else if (key == "stratified") {
    e.stratified = as_bool(key, value);
  } else if (key == "split_mode") {
    const auto mode = parse_split_mode(value);
    if (!mode) bad_value(key, value, "disjoint-thirds or bootstrap");
    e.split_mode = *mode;
  } else if (key == "strategies") {
    e.strategies = as_strategies(key, value);
  } else if (key == "iterations") {
    e.iterations = as_count(key, value);
  } else if (key == "carry_forward") {
    e.carry_forward = as_bool(key, value);
  } else if (key == "shared_arm_seeds") {
    e.shared_arm_seeds = as_bool(key, value);
  } else if (key == "parallel") {
    e.parallel = as_bool(key, value);
  } else if (key == "train.epochs") {
    e.train.epochs = as_count(key, value);
  } else if (key == "train.learning_rate") {
    e.train.learning_rate = as_real(key, value);
  } else if (key == "train.l2") {
    e.train.l2 = as_real(key, value);
  } else if (key == "train.batch_size") {
    e.train.batch_size = as_count(key, value);
  } else if (key == "learner") {
    if (value == "builtin") {
      e.learner.kind = LearnerSpec::Kind::Builtin;
    } else if (value == "external") {
      e.learner.kind = LearnerSpec::Kind::External;
    } else {
      bad_value(key, value, "builtin or external");
    }
  } else if (key == "learner.command") {
    e.learner.external.command_line = std::string(value);
  } else if (key == "learner.timeout") {
    const double seconds = as_real(key, value);
    if (!(seconds > 0)) bad_value(key, value, "a positive number of seconds");
    e.learner.external.timeout =
        std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(seconds * 1000)));
  } else if (key == "coord.poll_interval") {
    c.poll_interval = as_real(key, value);
    if (!(c.poll_interval > 0)) bad_value(key, value, "a positive number of seconds");
  } else if (key == "coord.sim_poll_interval") {
    c.sim_poll_interval = as_real(key, value);
    if (!(c.sim_poll_interval > 0)) bad_value(key, value, "a positive number of seconds");
  } else if (key == "coord.timeout") {
    c.timeout = as_real(key, value);
    if (!(c.timeout > 0)) bad_value(key, value, "a positive number of seconds");
  } else if (key == "coord.strategy") {
    const auto kind = parse_strategy(value);
    if (!kind) throw ConfigError("unknown strategy '" + std::string(value) + "' in coord.strategy");
    c.strategy = *kind;
  } else if (key == "coord.aggregator") {
    c.aggregator = as_count(key, value);
    if (c.aggregator > 2) bad_value(key, value, "a worker index in 0..2");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void ConfigBuilder::load_text(std::string_view text) {
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void ConfigBuilder::load_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const DatasetError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  load_text(text);
}

RunConfig ConfigBuilder::build() const {
  RunConfig out = config_;
  if (use_csv_) {
    out.experiment.data = files_;
  } else {
    out.experiment.data = blobs_;
  }
  out.experiment.validate();
  return out;
}

KeyValues describe(const ExperimentConfig& cfg) {
  KeyValues kv;
  kv.emplace_back("seed", std::to_string(cfg.seed));
  if (const auto* blobs = std::get_if<BlobSource>(&cfg.data)) {
    kv.emplace_back("data.source", "blobs");
    kv.emplace_back("data.n", std::to_string(blobs->n));
    kv.emplace_back("data.k", std::to_string(blobs->k));
    kv.emplace_back("data.dim", std::to_string(blobs->dim));
    kv.emplace_back("data.separation", format_real(blobs->separation));
    kv.emplace_back("data.sigma", format_real(blobs->sigma));
    kv.emplace_back("data.n_validation", std::to_string(blobs->n_validation));
    kv.emplace_back("data.seed", blobs->seed ? std::to_string(*blobs->seed) : "derived");
  } else {
    const auto& files = std::get<FileSource>(cfg.data);
    kv.emplace_back("data.source", "csv");
    kv.emplace_back("data.train_csv", files.train_csv.string());
    kv.emplace_back("data.validation_csv", files.validation_csv.string());
    kv.emplace_back("data.label_column", files.label_column);
    if (files.classes) {
      std::string joined;
      for (const auto& n : *files.classes) joined += (joined.empty() ? "" : ",") + n;
      kv.emplace_back("data.classes", joined);
    }
  }
  kv.emplace_back("train_fraction", format_real(cfg.train_fraction));
  kv.emplace_back("stratified", cfg.stratified ? "true" : "false");
  kv.emplace_back("split_mode", std::string(split_mode_name(cfg.split_mode)));
  kv.emplace_back("strategies", join_strategies(cfg.strategies));
  kv.emplace_back("iterations", std::to_string(cfg.iterations));
  kv.emplace_back("carry_forward", cfg.carry_forward ? "true" : "false");
  kv.emplace_back("shared_arm_seeds", cfg.shared_arm_seeds ? "true" : "false");
  kv.emplace_back("train.epochs", std::to_string(cfg.train.epochs));
  kv.emplace_back("train.learning_rate", format_real(cfg.train.learning_rate));
  kv.emplace_back("train.l2", format_real(cfg.train.l2));
  kv.emplace_back("train.batch_size", std::to_string(cfg.train.batch_size));
  if (cfg.learner.kind == LearnerSpec::Kind::External) {
    kv.emplace_back("learner", "external");
    kv.emplace_back("learner.command", cfg.learner.external.command_line);
    kv.emplace_back("learner.timeout",
                    format_real(static_cast<double>(cfg.learner.external.timeout.count()) / 1000.0));
  } else {
    kv.emplace_back("learner", "builtin");
  }
  return kv;
}

KeyValues describe(const CoordinationSettings& s) {
  KeyValues kv;
  kv.emplace_back("coord.poll_interval", format_real(s.poll_interval));
  kv.emplace_back("coord.sim_poll_interval", format_real(s.sim_poll_interval));
  kv.emplace_back("coord.timeout", format_real(s.timeout));
  if (s.strategy) kv.emplace_back("coord.strategy", std::string(strategy_key(*s.strategy)));
  kv.emplace_back("coord.aggregator", std::to_string(s.aggregator));
  return kv;
}

}  // namespace tritrain
