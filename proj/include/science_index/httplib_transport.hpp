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

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "science_index/http_transport.hpp"

namespace science_index {

/// cpp-httplib backed transport (http:// and https://).
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}

  std::optional<HttpResponse> get(const std::string& base_url, const std::string& path,
                                  const HttpHeaders& headers) override {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    httplib::Headers h(headers.begin(), headers.end());
    live_network_requests().fetch_add(1);
    auto res = client.Get(path, h);
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
  }

 private:
  std::chrono::seconds timeout_;
};

inline std::shared_ptr<HttpTransport> make_network_transport(std::chrono::seconds timeout) {
  return std::make_shared<HttplibTransport>(timeout);
}

}  // namespace science_index
