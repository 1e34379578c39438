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

#include <json.hpp>

#include "support.hpp"
#include "tritrain/common.hpp"
#include "tritrain/config.hpp"
#include "tritrain/experiment.hpp"
#include "tritrain/ledger.hpp"

namespace tritrain {
namespace {

RunLedger two_strategy_ledger() {
  ExperimentConfig cfg;
  BlobSource src;
  src.n = 150;
  src.k = 3;
  src.n_validation = 90;
  cfg.data = src;
  cfg.train.epochs = 5;
  cfg.strategies = {StrategyKind::AnyTwoGroundTruth, StrategyKind::AllThreePredicted};
  return run_experiment(cfg);
}

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) ++n, pos += needle.size();
  return n;
}

TEST_CASE("ledger CSV layout") {
  const RunLedger ledger = two_strategy_ledger();
  const std::string csv = ledger_csv(ledger);
  CHECK(csv.rfind(std::string(kLedgerCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 1 + 1 + 2 * 3 + 2);
  CHECK(count_lines_with(csv, "\nrandom,") == 2);
  CHECK(count_lines_with(csv, "\ntritrain,all-three-predicted,") == 3);
}

TEST_CASE("ledger JSON carries config, decisions and exact reals") {
  const RunLedger ledger = two_strategy_ledger();
  const auto j = nlohmann::json::parse(ledger_json(ledger));
  CHECK(j.at("schema") == "tritrain.ledger/1");
  CHECK(j.at("decisions").at("argmax_tie_break") == "lowest-class-index");
  CHECK(j.at("decisions").contains("strategy1_reading"));
  CHECK(j.at("decisions").contains("split_mode"));
  const ParsedLedger parsed = parse_ledger(ledger_json(ledger));
  const ParsedLedger from_csv = parse_ledger(ledger_csv(ledger));
  REQUIRE(parsed.rows.size() == from_csv.rows.size());
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    CHECK(parsed.rows[i].arm == from_csv.rows[i].arm);
    CHECK(parsed.rows[i].accuracy == from_csv.rows[i].accuracy);
    CHECK(parsed.rows[i].train_size == from_csv.rows[i].train_size);
  }
  CHECK(parsed.rows[0].accuracy == format_real(ledger.oracle.accuracy));
  CHECK_FALSE(parsed.decisions.empty());
}

TEST_CASE("report tables and series mirror the ledger") {
  const RunLedger ledger = two_strategy_ledger();
  const ParsedLedger parsed = parse_ledger(ledger_csv(ledger));
  const std::string md = report_markdown(parsed);
  CHECK(count_lines_with(md, "| Oracle") == 2);
  CHECK(count_lines_with(md, "| Baseline") == 2);
  CHECK(count_lines_with(md, "| Random model") == 2);
  CHECK(count_lines_with(md, "| Iteration ") == 6);
  for (const ArmLedger& arm : ledger.arms) {
    for (const IterationRecord& r : arm.iterations) CHECK(md.find(format_real(r.accuracy)) != std::string::npos);
  }
  const auto series = report_series(parsed);
  REQUIRE(series.size() == 2);
  for (const auto& [name, text] : series) {
    CHECK(name.rfind("series_", 0) == 0);
    CHECK(count_lines_with(text, "\nstrategy,") == 3);
    CHECK(count_lines_with(text, "\noracle,") == 1);
    CHECK(count_lines_with(text, "\nbaseline,") == 1);
    CHECK(count_lines_with(text, "\nrandom,") == 1);
  }
  CHECK(series[0].second.find("\noracle,0," + std::to_string(ledger.oracle.train_size) + "," +
                              format_real(ledger.oracle.accuracy) + "\n") != std::string::npos);
}

TEST_CASE("malformed ledgers are rejected") {
  CHECK_THROWS_AS(parse_ledger(""), ConfigError);
  CHECK_THROWS_AS(parse_ledger(std::string(kLedgerCsvHeader) + "\n"), ConfigError);
  CHECK_THROWS_AS(parse_ledger("garbage\n"), ConfigError);
  CHECK_THROWS_AS(parse_ledger(std::string(kLedgerCsvHeader) + "\noracle,,x,1,0,0.5,0\n"), ConfigError);
  CHECK_THROWS_AS(parse_ledger("{\"schema\": 1"), ConfigError);
  CHECK_THROWS_AS(parse_ledger("{\"schema\": \"other\"}"), ConfigError);
}

// --- config -------------------------------------------------------------------------

TEST_CASE("config file keys, comments and overrides") {
  ConfigBuilder b;
  b.load_text(
      "# experiment\n"
      "seed = 12\n"
      "iterations = 4   # trailing comment\n"
      "strategies = 2, 3\n"
      "split_mode = bootstrap\n"
      "data.n = 500\n"
      "train.epochs = 7\n"
      "coord.poll_interval = 0.25\n"
      "\n");
  b.set("seed", "13");
  const RunConfig cfg = b.build();
  CHECK(cfg.experiment.seed == 13);
  CHECK(cfg.experiment.iterations == 4);
  CHECK(cfg.experiment.strategies ==
        std::vector<StrategyKind>{StrategyKind::AllThreeGroundTruth, StrategyKind::AllThreePredicted});
  CHECK(cfg.experiment.split_mode == SplitMode::Bootstrap);
  CHECK(std::get<BlobSource>(cfg.experiment.data).n == 500);
  CHECK(cfg.experiment.train.epochs == 7);
  CHECK(cfg.coordination.poll_interval == 0.25);
  CHECK(cfg.coordination_strategy() == StrategyKind::AllThreeGroundTruth);
}

TEST_CASE("config defaults") {
  const RunConfig cfg = ConfigBuilder().build();
  CHECK(cfg.experiment.iterations == 3);
  CHECK(cfg.experiment.train_fraction == 0.7);
  CHECK(cfg.experiment.split_mode == SplitMode::DisjointThirds);
  CHECK(cfg.experiment.strategies.size() == 3);
  CHECK(cfg.coordination.poll_interval == 1.0);
  CHECK(cfg.coordination.sim_poll_interval == 30.0);
  CHECK(cfg.coordination.aggregator == 0);
}

TEST_CASE("config errors") {
  auto bad = [](const std::string& text) {
    ConfigBuilder b;
    b.load_text(text);
    return b.build();
  };
  CHECK_THROWS_AS(bad("strategies = majority\n"), ConfigError);
  CHECK_THROWS_AS(bad("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(bad("iterations = many\n"), ConfigError);
  CHECK_THROWS_AS(bad("iterations = 0\n"), ConfigError);
  CHECK_THROWS_AS(bad("train_fraction = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(bad("just a line\n"), ConfigError);
  CHECK_THROWS_AS(bad("split_mode = halves\n"), ConfigError);
  CHECK_THROWS_AS(bad("coord.aggregator = 3\n"), ConfigError);
  CHECK_THROWS_AS(bad("learner = external\n"), ConfigError);
  CHECK_THROWS_AS(bad("data.sigma = -1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigBuilder().load_file("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("describe echoes the configuration") {
  const RunConfig cfg = ConfigBuilder().build();
  const KeyValues kv = describe(cfg.experiment);
  bool has_epochs = false, has_split = false;
  for (const auto& [k, v] : kv) {
    has_epochs |= k == "train.epochs";
    has_split |= k == "split_mode";
  }
  CHECK(has_epochs);
  CHECK(has_split);
  const KeyValues coord = describe(cfg.coordination);
  bool has_poll = false;
  for (const auto& [k, v] : coord) has_poll |= k == "coord.poll_interval";
  CHECK(has_poll);
}

}  // namespace
}  // namespace tritrain
