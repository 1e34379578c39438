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

#ifndef TRITRAIN_STRATEGY_HPP_
#define TRITRAIN_STRATEGY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tritrain/dataset.hpp"
#include "tritrain/learner.hpp"

namespace tritrain {

/// Polling rules, numbered 1..3 in this order throughout reports.
enum class StrategyKind {
  AnyTwoGroundTruth,    // 1: any two models agree, label from ground truth
  AllThreeGroundTruth,  // 2: all three agree, label from ground truth
  AllThreePredicted,    // 3: all three agree, label is the shared prediction
};

inline constexpr StrategyKind kAllStrategies[] = {StrategyKind::AnyTwoGroundTruth,
                                                  StrategyKind::AllThreeGroundTruth,
                                                  StrategyKind::AllThreePredicted};

/// Canonical key, e.g. "any-two-ground-truth".
std::string_view strategy_key(StrategyKind kind);
int strategy_number(StrategyKind kind);
/// Accepts the canonical key, "1".."3" or "s1".."s3".
std::optional<StrategyKind> parse_strategy(std::string_view text);

struct AgreementLevel {
  enum class Kind { None, Pair, Unanimous };
  Kind kind = Kind::None;
  /// Agreed label; meaningful unless kind is None.
  ClassIndex label = 0;

  bool operator==(const AgreementLevel&) const = default;
};

/// Agreement of three labels. Unanimous when all equal; otherwise at most
/// one pair can agree.
AgreementLevel agreement(ClassIndex a, ClassIndex b, ClassIndex c);

/// Per-id agreement. Throws StrategyError unless the three sets cover the
/// same ids.
std::map<std::string, AgreementLevel> agreement_table(const PredictionSet& p1,
                                                      const PredictionSet& p2,
                                                      const PredictionSet& p3);

/// Applies `strategy` over the pool. Unanimous examples count as "any two
/// agree". Output follows pool order. Never looks at features.
std::vector<Selection> select(StrategyKind strategy, const PredictionSet& p1,
                              const PredictionSet& p2, const PredictionSet& p3,
                              const UnlabeledPool& pool);

/// `count` pool examples drawn uniformly without replacement, ground-truth
/// labelled, in pool order.
std::vector<Selection> random_select(const UnlabeledPool& pool, std::size_t count,
                                     std::uint64_t seed);

/// Aggregated-results file: `id,label,provenance` with a header row.
std::string format_selections(std::span<const Selection> selections, const Alphabet& alphabet);
std::vector<Selection> parse_selections(std::string_view text, const Alphabet& alphabet);

}  // namespace tritrain

#endif  // TRITRAIN_STRATEGY_HPP_
