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

#ifndef TRITRAIN_COORD_STATUS_HPP_
#define TRITRAIN_COORD_STATUS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace tritrain::coord {

/// Datastore entity shared by training_status_w<idx> and aggregate_status.
struct StatusEntity {
  std::string status;
  std::int64_t last_iteration = 0;
  bool finished = false;

  bool operator==(const StatusEntity&) const = default;
};

/// Three `Key=Value` lines: Status, LastIteration, Finished (true|false).
std::string serialize_status(const StatusEntity& entity);
/// Throws StoreError on anything but exactly those three keys.
StatusEntity parse_status(std::string_view text);

inline constexpr std::string_view kAggregateStatusKey = "aggregate_status";
std::string training_status_key(std::size_t worker);

std::string model_blob(std::size_t worker, std::size_t iteration);
std::string predictions_blob(std::size_t worker, std::size_t iteration);
std::string accuracy_blob(std::size_t worker, std::size_t iteration);
std::string aggregate_blob(std::size_t iteration);

// Status texts written by the protocol.
inline constexpr std::string_view kStatusFinished = "Finished";
inline constexpr std::string_view kStatusAggregating = "Aggregating";
inline constexpr std::string_view kStatusWaiting = "Waiting for splits to complete";
std::string status_at_iteration(std::size_t iteration);

}  // namespace tritrain::coord

#endif  // TRITRAIN_COORD_STATUS_HPP_
