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

// Shared plumbing for the line-oriented model files:
//   hydrotwin-model v1 <kind>
//   <key> <value>...
// Bodies are whitespace-tokenized; readers consume keys in a fixed order.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hydrotwin/errors.hpp"
#include "hydrotwin/keyvalue.hpp"

namespace hydrotwin::detail {

inline constexpr std::string_view kModelMagic = "hydrotwin-model";
inline constexpr std::string_view kModelVersion = "v1";

inline std::string model_header(std::string_view kind) {
  return std::string(kModelMagic) + " " + std::string(kModelVersion) + " " +
         std::string(kind) + "\n";
}

class ModelReader {
 public:
  ModelReader(std::string_view text, std::string_view kind) {
    const auto eol = text.find('\n');
    std::string_view first = text.substr(0, eol);
    if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
    const auto header = tokenize(first);
    if (header.size() != 3 || header[0] != kModelMagic) {
      throw FormatError("not a hydrotwin model file");
    }
    if (header[1] != kModelVersion) {
      throw FormatError("unsupported model version '" + header[1] + "'");
    }
    if (header[2] != kind) {
      throw FormatError("expected a '" + std::string(kind) + "' model, found '" +
                        header[2] + "'");
    }
    tokens_ = tokenize(eol == std::string_view::npos ? std::string_view{}
                                                     : text.substr(eol + 1));
  }

  void expect(std::string_view key) {
    const auto& t = next();
    if (t != key) {
      throw FormatError("expected '" + std::string(key) + "', found '" + t + "'");
    }
  }

  double number() {
    const auto& t = next();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
      throw FormatError("bad number '" + t + "'");
    }
    return v;
  }

  long long integer() {
    const auto& t = next();
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
      throw FormatError("bad integer '" + t + "'");
    }
    return v;
  }

  std::size_t count(std::size_t limit = 100'000'000) {
    const auto v = integer();
    if (v < 0 || static_cast<unsigned long long>(v) > limit) {
      throw FormatError("count out of range");
    }
    return static_cast<std::size_t>(v);
  }

  void finish() const {
    if (pos_ != tokens_.size()) throw FormatError("trailing data in model file");
  }

 private:
  const std::string& next() {
    if (pos_ >= tokens_.size()) throw FormatError("truncated model file");
    return tokens_[pos_++];
  }

  static std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      std::size_t j = i;
      while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j > i) out.emplace_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  }

  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace hydrotwin::detail
