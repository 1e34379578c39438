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

#ifndef TRITRAIN_SRC_CSV_HPP_
#define TRITRAIN_SRC_CSV_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tritrain::csv {

struct Table {
  std::vector<std::string> header;
  // Rows have the header's width; `line` is the 1-based file line.
  struct Row {
    std::size_t line;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;

  /// Column index of `name`, or -1.
  int column(std::string_view name) const;
};

/// Parses comma-separated text with a header row. Blank lines are skipped;
/// cells are whitespace-trimmed; ragged rows are rejected. `what` names the
/// source in error messages. Throws DatasetError.
Table parse(std::string_view text, std::string_view what);

std::string read_file(const std::filesystem::path& path);

/// Writes `contents` to a temp file next to `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace tritrain::csv

#endif  // TRITRAIN_SRC_CSV_HPP_
