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

#ifndef TRITRAIN_COMMON_HPP_
#define TRITRAIN_COMMON_HPP_

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tritrain {

/// Base of every error raised by the library. Callers that only care about
/// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class LearnerError : public Error {
 public:
  using Error::Error;
};

class StrategyError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A datastore or blobstore operation failed (I/O, missing object that must
/// exist, unparsable entity).
class StoreError : public Error {
 public:
  using Error::Error;
};

/// A coordination wait exceeded its budget.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent seed from `seed` and a counter path, e.g.
/// `derive_seed(master, {kArmStream, arm_index})`. Pure function.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

/// Parses a finite real; the whole string must be consumed.
bool parse_real(std::string_view text, double& out);

bool parse_uint(std::string_view text, std::uint64_t& out);

std::string_view trim(std::string_view text);

/// Splits on `sep` without any quoting rules.
std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace tritrain

#endif  // TRITRAIN_COMMON_HPP_
