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

#ifndef TRITRAIN_TOOLS_CLI_HPP_
#define TRITRAIN_TOOLS_CLI_HPP_

#include <string>
#include <vector>

namespace tritrain::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kSimulationFlagged = 3;
inline constexpr int kCoordinationTimeout = 4;

/// Entry point of the `tritrain` tool; `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace tritrain::cli

#endif  // TRITRAIN_TOOLS_CLI_HPP_
