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

#ifndef TRITRAIN_CONFIG_HPP_
#define TRITRAIN_CONFIG_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tritrain/experiment.hpp"

namespace tritrain {

struct CoordinationSettings {
  /// Wall-clock poll interval for worker processes, seconds.
  double poll_interval = 1.0;
  /// Virtual poll interval in simulation, seconds.
  double sim_poll_interval = 30.0;
  /// Budget for any single wait loop, seconds (virtual in simulation).
  double timeout = 3600.0;
  /// Unset: the first configured strategy.
  std::optional<StrategyKind> strategy;
  std::size_t aggregator = 0;
};

struct RunConfig {
  ExperimentConfig experiment;
  CoordinationSettings coordination;

  StrategyKind coordination_strategy() const;
};

/// Collects `key = value` settings from config files and overrides, then
/// validates them together. Later settings win, so apply the file first and
/// command-line overrides after it.
///
/// Schema (defaults in parentheses):
///   seed (0)                     master seed
///   data.source (blobs)          blobs | csv
///   data.n data.k data.dim data.separation data.sigma data.n_validation
///   data.seed                    blob seed; defaults to a master-derived one
///   data.train_csv data.validation_csv data.label_column (label)
///   data.classes                 comma list overriding the inferred alphabet
///   train_fraction (0.7)  stratified (false)  split_mode (disjoint-thirds)
///   strategies (1,2,3)  iterations (3)  carry_forward (true)
///   shared_arm_seeds (false)  parallel (true)
///   train.epochs (20) train.learning_rate (0.1) train.l2 (0.0001)
///   train.batch_size (16)
///   learner (builtin)            builtin | external
///   learner.command  learner.timeout (3600, seconds)
///   coord.poll_interval (1)  coord.sim_poll_interval (30)  coord.timeout (3600)
///   coord.strategy  coord.aggregator (0)
/// `#` starts a comment. Unknown keys and ill-typed values are ConfigErrors.
class ConfigBuilder {
 public:
  ConfigBuilder();

  void set(std::string_view key, std::string_view value);
  void load_text(std::string_view text);
  void load_file(const std::filesystem::path& path);

  /// Validated configuration; throws ConfigError.
  RunConfig build() const;

 private:
  RunConfig config_;
  BlobSource blobs_;
  FileSource files_;
  bool use_csv_ = false;
};

/// Canonical `key=value` echo of a configuration, in schema order.
KeyValues describe(const ExperimentConfig& cfg);
KeyValues describe(const CoordinationSettings& settings);

}  // namespace tritrain

#endif  // TRITRAIN_CONFIG_HPP_
