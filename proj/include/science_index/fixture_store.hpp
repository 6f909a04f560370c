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

#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "science_index/error.hpp"

namespace science_index {

struct StoredResponse {
  std::string body;
  std::int64_t fetched_at = 0;  // unix seconds
};

/// Raw API responses on disk, one file per (endpoint, id), listed in an
/// `index.json` manifest. Writes go to a temp file and are renamed into
/// place so readers never observe a partial file.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& directory() const { return dir_; }

  static std::string file_name(std::string_view endpoint, std::string_view id) {
    std::string out(endpoint);
    out += "__";
    static constexpr char kHex[] = "0123456789ABCDEF";
    for (unsigned char c : id) {
      if (std::isalnum(c) || c == '-' || c == '.') {
        out += static_cast<char>(c);
      } else {
        out += '%';
        out += kHex[c >> 4];
        out += kHex[c & 0xf];
      }
    }
    return out + ".json";
  }

  std::optional<StoredResponse> load(std::string_view endpoint, std::string_view id) const {
    std::lock_guard lock(mutex_);
    const auto index = read_index();
    const std::string key = std::string(endpoint) + "/" + std::string(id);
    const auto it = index.find(key);
    if (it == index.end()) return std::nullopt;
    std::ifstream in(dir_ / it->at("file").get<std::string>(), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream body;
    body << in.rdbuf();
    return StoredResponse{body.str(), it->value("fetched_at", std::int64_t{0})};
  }

  void store(std::string_view endpoint, std::string_view id, const StoredResponse& response) {
    std::lock_guard lock(mutex_);
    std::filesystem::create_directories(dir_);
    const std::string name = file_name(endpoint, id);
    write_then_rename(dir_ / name, response.body);
    auto index = read_index();
    index[std::string(endpoint) + "/" + std::string(id)] = {{"file", name}, {"fetched_at", response.fetched_at}};
    const nlohmann::json manifest{{"entries", index}};
    write_then_rename(dir_ / "index.json", manifest.dump(2) + "\n");
  }

 private:
  nlohmann::json read_index() const {
    std::ifstream in(dir_ / "index.json");
    if (!in) return nlohmann::json::object();
    try {
      return nlohmann::json::parse(in).at("entries");
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::FixtureMissing, "unreadable fixture index in " + dir_.string() + ": " + e.what());
    }
  }

  static void write_then_rename(const std::filesystem::path& target, std::string_view bytes) {
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw Error(ErrorCode::NetworkFailure, "cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

}  // namespace science_index
