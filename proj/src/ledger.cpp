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

#include "tritrain/ledger.hpp"

#include <json.hpp>
#include <map>

#include "tritrain/common.hpp"

namespace tritrain {
namespace {

using nlohmann::ordered_json;

std::string strategy_text(const IterationRecord& r) {
  return r.strategy ? std::string(strategy_key(*r.strategy)) : std::string();
}

void append_row(std::string& out, const IterationRecord& r) {
  out += r.arm + ',' + strategy_text(r) + ',' + std::to_string(r.iteration) + ',' +
         std::to_string(r.train_size) + ',' + std::to_string(r.selected_count) + ',' +
         format_real(r.accuracy) + ',' + format_real(r.label_error_rate) + '\n';
}

ordered_json record_json(const IterationRecord& r) {
  return {{"arm", r.arm},
          {"strategy", strategy_text(r)},
          {"iteration", r.iteration},
          {"train_size", r.train_size},
          {"pool_size", r.pool_size},
          {"selected_count", r.selected_count},
          {"accuracy", format_real(r.accuracy)},
          {"label_error_rate", format_real(r.label_error_rate)}};
}

ordered_json kv_json(const KeyValues& kv) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : kv) out[k] = v;
  return out;
}

[[noreturn]] void malformed(const std::string& why) { throw ConfigError("malformed ledger: " + why); }

std::size_t count_cell(std::string_view text, const char* what) {
  std::uint64_t v;
  if (!parse_uint(text, v)) malformed(std::string("bad ") + what + " '" + std::string(text) + "'");
  return static_cast<std::size_t>(v);
}

std::string real_cell(std::string_view text, const char* what) {
  double v;
  if (!parse_real(text, v) || v < 0 || v > 1) {
    malformed(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return std::string(trim(text));
}

LedgerRow row_from_json(const ordered_json& j) {
  try {
    LedgerRow row;
    row.arm = j.at("arm").get<std::string>();
    row.strategy = j.at("strategy").get<std::string>();
    row.iteration = j.at("iteration").get<std::size_t>();
    row.train_size = j.at("train_size").get<std::size_t>();
    row.selected_count = j.at("selected_count").get<std::size_t>();
    row.accuracy = real_cell(j.at("accuracy").get<std::string>(), "accuracy");
    row.label_error_rate = real_cell(j.at("label_error_rate").get<std::string>(), "label_error_rate");
    return row;
  } catch (const nlohmann::json::exception& e) {
    malformed(e.what());
  }
}

ParsedLedger parse_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    malformed(e.what());
  }
  ParsedLedger out;
  try {
    for (const auto& [k, v] : j.at("decisions").items()) out.decisions.emplace_back(k, v.get<std::string>());
    out.rows.push_back(row_from_json(j.at("oracle")));
    out.rows.push_back(row_from_json(j.at("baseline")));
    for (const auto& arm : j.at("arms")) {
      for (const auto& r : arm.at("iterations")) out.rows.push_back(row_from_json(r));
      out.rows.push_back(row_from_json(arm.at("random")));
    }
  } catch (const nlohmann::json::exception& e) {
    malformed(e.what());
  }
  return out;
}

ParsedLedger parse_csv(std::string_view text) {
  ParsedLedger out;
  bool header = true;
  for (std::string_view line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    if (header) {
      if (trim(line) != kLedgerCsvHeader) malformed("unexpected header");
      header = false;
      continue;
    }
    const auto cells = split(trim(line), ',');
    if (cells.size() != 7) malformed("row with " + std::to_string(cells.size()) + " cells");
    LedgerRow row;
    row.arm = std::string(trim(cells[0]));
    row.strategy = std::string(trim(cells[1]));
    row.iteration = count_cell(cells[2], "iteration");
    row.train_size = count_cell(cells[3], "train_size");
    row.selected_count = count_cell(cells[4], "selected_count");
    row.accuracy = real_cell(cells[5], "accuracy");
    row.label_error_rate = real_cell(cells[6], "label_error_rate");
    out.rows.push_back(std::move(row));
  }
  if (header) malformed("missing header");
  return out;
}

struct StrategySeries {
  std::vector<const LedgerRow*> rounds;
  const LedgerRow* random = nullptr;
};

struct ReportView {
  const LedgerRow* oracle = nullptr;
  const LedgerRow* baseline = nullptr;
  std::vector<std::string> order;
  std::map<std::string, StrategySeries> series;
};

ReportView view_of(const ParsedLedger& ledger) {
  ReportView view;
  for (const LedgerRow& row : ledger.rows) {
    if (row.arm == "oracle") {
      view.oracle = &row;
    } else if (row.arm == "baseline") {
      view.baseline = &row;
    } else if (row.arm == "tritrain" || row.arm == "random") {
      if (row.strategy.empty()) malformed(row.arm + " row without a strategy");
      if (!view.series.contains(row.strategy)) view.order.push_back(row.strategy);
      auto& s = view.series[row.strategy];
      if (row.arm == "tritrain") {
        s.rounds.push_back(&row);
      } else {
        s.random = &row;
      }
    } else {
      malformed("unknown arm '" + row.arm + "'");
    }
  }
  if (!view.oracle || !view.baseline) malformed("oracle and baseline rows are required");
  if (view.series.empty()) malformed("no strategy rows");
  for (const auto& [name, s] : view.series) {
    if (!s.random) malformed("strategy '" + name + "' has no random row");
    if (s.rounds.empty()) malformed("strategy '" + name + "' has no iteration rows");
  }
  return view;
}

std::string strategy_title(const std::string& key) {
  const auto kind = parse_strategy(key);
  if (!kind) return key;
  switch (*kind) {
    case StrategyKind::AnyTwoGroundTruth:
      return "Strategy 1: any 2 agree, ground-truth labels";
    case StrategyKind::AllThreeGroundTruth:
      return "Strategy 2: all 3 agree, ground-truth labels";
    case StrategyKind::AllThreePredicted:
      return "Strategy 3: all 3 agree, predicted labels";
  }
  return key;
}

}  // namespace

std::string ledger_csv(const RunLedger& ledger) {
  std::string out(kLedgerCsvHeader);
  out += '\n';
  append_row(out, ledger.oracle);
  append_row(out, ledger.baseline);
  for (const ArmLedger& arm : ledger.arms) {
    for (const IterationRecord& r : arm.iterations) append_row(out, r);
    append_row(out, arm.random);
  }
  return out;
}

std::string ledger_json(const RunLedger& ledger) {
  ordered_json j;
  j["schema"] = "tritrain.ledger/1";
  j["config"] = kv_json(ledger.config);
  j["decisions"] = kv_json(ledger.decisions);
  j["oracle"] = record_json(ledger.oracle);
  j["baseline"] = record_json(ledger.baseline);
  j["arms"] = ordered_json::array();
  for (const ArmLedger& arm : ledger.arms) {
    ordered_json a;
    a["strategy"] = strategy_key(arm.strategy);
    a["strategy_number"] = strategy_number(arm.strategy);
    a["seed"] = std::to_string(arm.seed);
    a["iterations"] = ordered_json::array();
    for (const IterationRecord& r : arm.iterations) a["iterations"].push_back(record_json(r));
    a["random"] = record_json(arm.random);
    j["arms"].push_back(std::move(a));
  }
  return j.dump(2) + "\n";
}

ParsedLedger parse_ledger(std::string_view text) {
  const std::string_view body = trim(text);
  if (body.empty()) malformed("empty ledger");
  ParsedLedger out = body.front() == '{' ? parse_json(body) : parse_csv(body);
  if (out.rows.empty()) malformed("ledger has no records");
  view_of(out);
  return out;
}

std::string report_markdown(const ParsedLedger& ledger) {
  const ReportView view = view_of(ledger);
  std::string out = "# Tri-training run report\n";
  auto row = [&](const std::string& model, const LedgerRow& r) {
    out += "| " + model + " | " + std::to_string(r.iteration) + " | " +
           std::to_string(r.train_size) + " | " + std::to_string(r.selected_count) + " | " +
           r.accuracy + " | " + r.label_error_rate + " |\n";
  };
  for (const std::string& key : view.order) {
    const StrategySeries& s = view.series.at(key);
    out += "\n## " + strategy_title(key) + "\n\n";
    out += "| model | iteration | train_size | selected | accuracy | label_error_rate |\n";
    out += "|---|---|---|---|---|---|\n";
    row("Oracle (100% data)", *view.oracle);
    row("Baseline (train split)", *view.baseline);
    for (const LedgerRow* r : s.rounds) row("Iteration " + std::to_string(r->iteration), *r);
    row("Random model (same size as final iteration)", *s.random);
  }
  if (!ledger.decisions.empty()) {
    out += "\n## Decisions\n\n";
    for (const auto& [k, v] : ledger.decisions) out += "- " + k + ": " + v + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> report_series(const ParsedLedger& ledger) {
  const ReportView view = view_of(ledger);
  std::vector<std::pair<std::string, std::string>> files;
  for (const std::string& key : view.order) {
    const StrategySeries& s = view.series.at(key);
    std::string csv = "series,iteration,train_size,accuracy\n";
    auto line = [&](const char* series, const LedgerRow& r) {
      csv += std::string(series) + ',' + std::to_string(r.iteration) + ',' +
             std::to_string(r.train_size) + ',' + r.accuracy + '\n';
    };
    line("oracle", *view.oracle);
    line("baseline", *view.baseline);
    for (const LedgerRow* r : s.rounds) line("strategy", *r);
    line("random", *s.random);
    files.emplace_back("series_" + key + ".csv", std::move(csv));
  }
  return files;
}

}  // namespace tritrain
