// Copyright 2026 The schwinger-lab Authors
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

#pragma once

// Plain-text result tables.  Numbers are printed with a fixed format so that
// identical inputs give identical bytes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "schwinger/errors.hpp"

namespace schwinger {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string fmt(double v, int digits = 12) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& comment(const std::string& line) {
    comments_.push_back(line);
    return *this;
  }

  template <typename... Cells>
  CsvTable& row(const Cells&... cells) {
    std::vector<std::string> r{cell(cells)...};
    if (r.size() != header_.size())
      throw validation_error("InvalidTable", "row has " + std::to_string(r.size()) + " cells, header has " +
                                                 std::to_string(header_.size()));
    rows_.push_back(std::move(r));
    return *this;
  }

  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::string s;
    for (const auto& c : comments_) s += "# " + c + "\n";
    s += join(header_);
    for (const auto& r : rows_) s += join(r);
    return s;
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("OutputError", "cannot open " + path + " for writing");
    out << str();
    if (!out) throw validation_error("OutputError", "failed writing " + path);
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <typename I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

  static std::string join(const std::vector<std::string>& r) {
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    return s + "\n";
  }

  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace schwinger
