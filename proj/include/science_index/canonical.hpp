//------------------------------------------------------------------------------
//
//   Copyright 2026 The science-index Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "science_index/error.hpp"

namespace science_index {

/// Byte-stable compact JSON emitter. Fields appear in the order they are
/// written and doubles use 17 significant digits, so equal values always
/// serialize to equal bytes.
class CanonicalWriter {
 public:
  CanonicalWriter& begin_object() {
    separate();
    out_ += '{';
    first_ = true;
    return *this;
  }

  CanonicalWriter& end_object() {
    out_ += '}';
    first_ = false;
    return *this;
  }

  CanonicalWriter& begin_array() {
    separate();
    out_ += '[';
    first_ = true;
    return *this;
  }

  CanonicalWriter& end_array() {
    out_ += ']';
    first_ = false;
    return *this;
  }

  CanonicalWriter& key(std::string_view name) {
    separate();
    append_string(name);
    out_ += ':';
    after_key_ = true;
    return *this;
  }

  CanonicalWriter& value(double v) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "cannot serialize a non-finite number");
    }
    separate();
    out_ += format_double(v);
    return *this;
  }

  CanonicalWriter& value(std::uint64_t v) {
    separate();
    out_ += std::to_string(v);
    return *this;
  }

  CanonicalWriter& value(std::int64_t v) {
    separate();
    out_ += std::to_string(v);
    return *this;
  }

  CanonicalWriter& value(bool v) {
    separate();
    out_ += v ? "true" : "false";
    return *this;
  }

  CanonicalWriter& value(std::string_view v) {
    separate();
    append_string(v);
    return *this;
  }

  CanonicalWriter& value(const char* v) { return value(std::string_view(v)); }

  /// Splices an already-canonical fragment verbatim.
  CanonicalWriter& raw(std::string_view fragment) {
    separate();
    out_ += fragment;
    return *this;
  }

  CanonicalWriter& values(std::span<const double> vs) {
    begin_array();
    for (double v : vs) value(v);
    return end_array();
  }

  const std::string& str() const& { return out_; }
  std::string str() && { return std::move(out_); }

  static std::string format_double(double v) {
    if (v == 0.0) return "0";  // folds -0 into 0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

 private:
  void separate() {
    if (after_key_) {
      after_key_ = false;
      first_ = false;
      return;
    }
    if (!first_ && !out_.empty()) out_ += ',';
    first_ = false;
  }

  void append_string(std::string_view s) { out_ += nlohmann::json(std::string(s)).dump(); }

  std::string out_;
  bool first_ = true;
  bool after_key_ = false;
};

/// Parses canonical text, mapping parser failures to MalformedModel-style
/// errors with the supplied context.
inline nlohmann::json parse_canonical(std::string_view text, std::string_view context,
                                      ErrorCode code = ErrorCode::MalformedModel) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(code, std::string(context) + ": " + e.what());
  }
}

/// Reads a non-negative integer. nlohmann's get<uint64_t> silently wraps
/// negative numbers, so the sign is checked explicitly.
inline std::uint64_t json_count(const nlohmann::json& j, std::string_view field,
                                ErrorCode code = ErrorCode::InvalidArgument) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw Error(code, "'" + std::string(field) + "' must be a non-negative integer, got " + j.dump());
  }
  return j.get<std::uint64_t>();
}

}  // namespace science_index
