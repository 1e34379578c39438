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

#include "tritrain/strategy.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "tritrain/common.hpp"

namespace tritrain {

std::string_view strategy_key(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::AnyTwoGroundTruth:
      return "any-two-ground-truth";
    case StrategyKind::AllThreeGroundTruth:
      return "all-three-ground-truth";
    case StrategyKind::AllThreePredicted:
      return "all-three-predicted";
  }
  return "unknown";
}

int strategy_number(StrategyKind kind) { return static_cast<int>(kind) + 1; }

std::optional<StrategyKind> parse_strategy(std::string_view text) {
  text = trim(text);
  for (StrategyKind kind : kAllStrategies) {
    const std::string n = std::to_string(strategy_number(kind));
    if (text == strategy_key(kind) || text == n || text == "s" + n) return kind;
  }
  return std::nullopt;
}

AgreementLevel agreement(ClassIndex a, ClassIndex b, ClassIndex c) {
  using Kind = AgreementLevel::Kind;
  if (a == b && b == c) return {Kind::Unanimous, a};
  if (a == b || a == c) return {Kind::Pair, a};
  if (b == c) return {Kind::Pair, b};
  return {Kind::None, 0};
}

std::map<std::string, AgreementLevel> agreement_table(const PredictionSet& p1,
                                                      const PredictionSet& p2,
                                                      const PredictionSet& p3) {
  if (!p1.same_ids(p2) || !p1.same_ids(p3)) {
    throw StrategyError("agreement_table: prediction sets cover different ids");
  }
  std::map<std::string, AgreementLevel> table;
  for (const PredictionEntry& e : p1.entries()) {
    table.emplace(e.id, agreement(e.label, p2.find(e.id)->label, p3.find(e.id)->label));
  }
  return table;
}

std::vector<Selection> select(StrategyKind strategy, const PredictionSet& p1,
                              const PredictionSet& p2, const PredictionSet& p3,
                              const UnlabeledPool& pool) {
  const auto table = agreement_table(p1, p2, p3);
  if (table.size() != pool.size()) {
    throw StrategyError("select: predictions cover " + std::to_string(table.size()) +
                        " ids, pool has " + std::to_string(pool.size()));
  }
  using Kind = AgreementLevel::Kind;
  std::vector<Selection> out;
  for (const Example& e : pool.examples()) {
    auto it = table.find(e.id);
    if (it == table.end()) throw StrategyError("select: no predictions for pool id '" + e.id + "'");
    const AgreementLevel level = it->second;
    switch (strategy) {
      case StrategyKind::AnyTwoGroundTruth:
        if (level.kind != Kind::None) {
          out.push_back({e.id, pool.hidden_label(e.id), Provenance::GroundTruth});
        }
        break;
      case StrategyKind::AllThreeGroundTruth:
        if (level.kind == Kind::Unanimous) {
          out.push_back({e.id, pool.hidden_label(e.id), Provenance::GroundTruth});
        }
        break;
      case StrategyKind::AllThreePredicted:
        if (level.kind == Kind::Unanimous) {
          out.push_back({e.id, level.label, Provenance::Predicted});
        }
        break;
    }
  }
  return out;
}

std::vector<Selection> random_select(const UnlabeledPool& pool, std::size_t count,
                                     std::uint64_t seed) {
  if (count > pool.size()) {
    throw StrategyError("random_select: count " + std::to_string(count) + " exceeds pool size " +
                        std::to_string(pool.size()));
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, {3}));
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  std::vector<Selection> out;
  out.reserve(count);
  for (std::size_t r : order) {
    const Example& e = pool.examples()[r];
    out.push_back({e.id, pool.hidden_label(e.id), Provenance::GroundTruth});
  }
  return out;
}

std::string format_selections(std::span<const Selection> selections, const Alphabet& alphabet) {
  std::string out = "id,label,provenance\n";
  for (const Selection& s : selections) {
    out += s.id;
    out += ',';
    out += alphabet.name(s.assigned_label);
    out += ',';
    out += provenance_name(s.provenance);
    out += '\n';
  }
  return out;
}

std::vector<Selection> parse_selections(std::string_view text, const Alphabet& alphabet) {
  std::vector<Selection> out;
  bool header = true;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    auto fail = [&](const std::string& why) {
      throw StrategyError("selection file line " + std::to_string(line_no) + ": " + why);
    };
    if (cells.size() != 3) fail("expected 3 cells");
    if (header) {
      if (trim(cells[0]) != "id" || trim(cells[1]) != "label" || trim(cells[2]) != "provenance") {
        fail("header must be id,label,provenance");
      }
      header = false;
      continue;
    }
    const auto label = alphabet.find(trim(cells[1]));
    if (!label) fail("unknown label '" + std::string(trim(cells[1])) + "'");
    const auto provenance = parse_provenance(trim(cells[2]));
    if (!provenance) fail("unknown provenance '" + std::string(trim(cells[2])) + "'");
    out.push_back({std::string(trim(cells[0])), *label, *provenance});
  }
  if (header) throw StrategyError("selection file is empty");
  return out;
}

}  // namespace tritrain
