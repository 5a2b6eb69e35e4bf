// Copyright 2026 The fluxgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic text output: numbers in 17-digit scientific notation, CSV with
// a header row and LF endings, JSON with sorted keys.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fluxgate {

/// "%.16e"; non-finite values become "nan", "inf" or "-inf".
std::string format_number(double value);

/// Serializes with sorted keys, two-space indentation, numbers via
/// `format_number` and non-finite numbers as null.
std::string to_json_text(const nlohmann::json& value);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fluxgate
