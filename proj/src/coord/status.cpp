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

#include "tritrain/coord/status.hpp"

#include "tritrain/common.hpp"

namespace tritrain::coord {

std::string serialize_status(const StatusEntity& entity) {
  return "Status=" + entity.status + "\nLastIteration=" + std::to_string(entity.last_iteration) +
         "\nFinished=" + (entity.finished ? "true" : "false") + "\n";
}

StatusEntity parse_status(std::string_view text) {
  StatusEntity out;
  bool have_status = false, have_last = false, have_finished = false;
  for (std::string_view line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw StoreError("status entity line without '='");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = line.substr(eq + 1);
    if (key == "Status" && !have_status) {
      out.status = std::string(trim(value));
      have_status = true;
    } else if (key == "LastIteration" && !have_last) {
      std::string_view v = trim(value);
      bool negative = !v.empty() && v.front() == '-';
      if (negative) v.remove_prefix(1);
      std::uint64_t n;
      if (!parse_uint(v, n)) throw StoreError("status entity: bad LastIteration");
      out.last_iteration = negative ? -static_cast<std::int64_t>(n) : static_cast<std::int64_t>(n);
      have_last = true;
    } else if (key == "Finished" && !have_finished) {
      const std::string_view v = trim(value);
      if (v != "true" && v != "false") throw StoreError("status entity: bad Finished");
      out.finished = v == "true";
      have_finished = true;
    } else {
      throw StoreError("status entity: unexpected key '" + std::string(key) + "'");
    }
  }
  if (!have_status || !have_last || !have_finished) {
    throw StoreError("status entity: missing field");
  }
  return out;
}

std::string training_status_key(std::size_t worker) {
  return "training_status_w" + std::to_string(worker);
}

std::string model_blob(std::size_t worker, std::size_t iteration) {
  return "w" + std::to_string(worker) + "/iter" + std::to_string(iteration) + "/model.bin";
}

std::string predictions_blob(std::size_t worker, std::size_t iteration) {
  return "w" + std::to_string(worker) + "/iter" + std::to_string(iteration) + "/predictions.csv";
}

std::string accuracy_blob(std::size_t worker, std::size_t iteration) {
  return "w" + std::to_string(worker) + "/iter" + std::to_string(iteration) + "/accuracy.txt";
}

std::string aggregate_blob(std::size_t iteration) {
  return "agg/iter" + std::to_string(iteration) + "/selected.csv";
}

std::string status_at_iteration(std::size_t iteration) {
  return "at iteration: " + std::to_string(iteration);
}

}  // namespace tritrain::coord
