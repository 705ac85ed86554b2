// Copyright 2026 The hydrotwin Authors
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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hydrotwin {

/// One `name = value` entry of a config file.
struct KeyValueEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Flat `name = value` dialect shared by loop configs, sampling plans,
/// threshold files and scenario specs. `#` starts a comment; blank lines are
/// ignored; keys may repeat (scenario `event` lines rely on this).
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile read(const std::filesystem::path& path);

  const std::vector<KeyValueEntry>& entries() const { return entries_; }

  /// Last entry with this key, if any.
  const KeyValueEntry* find(std::string_view key) const;
  std::vector<const KeyValueEntry*> find_all(std::string_view key) const;

  std::optional<double> number(std::string_view key) const;
  std::optional<std::vector<double>> numbers(std::string_view key) const;

 private:
  std::vector<KeyValueEntry> entries_;
};

double parse_number(std::string_view text, std::size_t line);
std::vector<double> parse_number_list(std::string_view text, std::size_t line);

/// Shortest decimal form that parses back to the same double.
std::string format_exact(double value);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hydrotwin
