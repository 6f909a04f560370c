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

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace science_index {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::map<std::string, std::string>;

/// GET-only transport. `std::nullopt` means the request never produced a
/// response (connection refused, timeout, TLS failure).
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual std::optional<HttpResponse> get(const std::string& base_url, const std::string& path,
                                          const HttpHeaders& headers) = 0;
};

/// Process-wide count of requests that actually went out on the network.
/// Only real socket transports bump it; the test suite asserts it stays 0.
inline std::atomic<std::uint64_t>& live_network_requests() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

}  // namespace science_index
