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

#include <stdexcept>
#include <string>
#include <string_view>

namespace science_index {

enum class ErrorCode {
  InsufficientData,
  SingularSystem,
  DimensionMismatch,
  NoObservations,
  NoSharers,
  Unreachable,
  InvalidArgument,
  EmptyIdentifier,
  UnknownRequest,
  BrokenChain,
  ReplayMismatch,
  MalformedModel,
  NotFound,
  RateLimited,
  NetworkFailure,
  FixtureMissing,
  FileNotFound,
  SchemaMismatch,
  RowParseError,
  EmptyInput,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoObservations: return "NoObservations";
    case ErrorCode::NoSharers: return "NoSharers";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyIdentifier: return "EmptyIdentifier";
    case ErrorCode::UnknownRequest: return "UnknownRequest";
    case ErrorCode::BrokenChain: return "BrokenChain";
    case ErrorCode::ReplayMismatch: return "ReplayMismatch";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::NetworkFailure: return "NetworkFailure";
    case ErrorCode::FixtureMissing: return "FixtureMissing";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::RowParseError: return "RowParseError";
    case ErrorCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

/// "InsufficientData" -> "insufficient data", for diagnostics.
inline std::string describe(ErrorCode code) {
  std::string out;
  for (char c : to_string(code)) {
    if (c >= 'A' && c <= 'Z') {
      if (!out.empty()) out += ' ';
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      out += c;
    }
  }
  return out;
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// what() without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace science_index
