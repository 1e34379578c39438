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

#ifndef TRITRAIN_LEDGER_HPP_
#define TRITRAIN_LEDGER_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "tritrain/experiment.hpp"

namespace tritrain {

inline constexpr std::string_view kLedgerCsvHeader =
    "arm,strategy,iteration,train_size,selected_count,accuracy,label_error_rate";

/// Flat CSV: oracle, baseline, then per arm its rounds followed by its random
/// control. `strategy` is empty for oracle and baseline.
std::string ledger_csv(const RunLedger& ledger);

/// Structured form:
///   {"schema": "tritrain.ledger/1", "config": {...}, "decisions": {...},
///    "oracle": record, "baseline": record,
///    "arms": [{"strategy", "strategy_number", "seed", "iterations": [record],
///              "random": record}]}
/// where a record is {"arm", "strategy", "iteration", "train_size",
/// "pool_size", "selected_count", "accuracy", "label_error_rate"} and the
/// reals are written as round-trip exact decimal strings.
std::string ledger_json(const RunLedger& ledger);

/// One ledger CSV row, with reals kept as their original text.
struct LedgerRow {
  std::string arm;
  std::string strategy;
  std::size_t iteration = 0;
  std::size_t train_size = 0;
  std::size_t selected_count = 0;
  std::string accuracy;
  std::string label_error_rate;
};

struct ParsedLedger {
  std::vector<LedgerRow> rows;
  KeyValues decisions;
};

/// Reads either ledger form. Throws ConfigError when malformed or empty.
ParsedLedger parse_ledger(std::string_view text);

/// Markdown report: one table per strategy with oracle, baseline, each
/// round and the random control (the legend layout of the result plots).
std::string report_markdown(const ParsedLedger& ledger);

/// Per-strategy plot series `series,iteration,train_size,accuracy`.
std::vector<std::pair<std::string, std::string>> report_series(const ParsedLedger& ledger);

}  // namespace tritrain

#endif  // TRITRAIN_LEDGER_HPP_
