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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "science_index/bibliometrics.hpp"
#include "science_index/canonical.hpp"
#include "science_index/error.hpp"
#include "science_index/fixture_store.hpp"
#include "science_index/http_transport.hpp"
#include "science_index/rate_limiter.hpp"

namespace science_index {

enum class FetchMode { Live, FixtureOnly, LiveWithRecord };

inline FetchMode fetch_mode_from_string(std::string_view name) {
  if (name == "live") return FetchMode::Live;
  if (name == "fixture") return FetchMode::FixtureOnly;
  if (name == "record") return FetchMode::LiveWithRecord;
  throw Error(ErrorCode::InvalidArgument, "unknown fetch mode '" + std::string(name) + "'");
}

struct FetchPolicy {
  double rate_limit = 1.0;  // requests per second, per endpoint
  std::chrono::seconds timeout{30};
  int retries = 3;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::seconds cache_ttl{24 * 3600};
  std::filesystem::path cache_dir = "fixtures";
  FetchMode mode = FetchMode::FixtureOnly;

  std::string semantic_scholar_base = "https://api.semanticscholar.org";
  std::string datacite_base = "https://api.datacite.org";
  std::string api_key_env = "SEMANTIC_SCHOLAR_API_KEY";
  std::set<std::string> counted_resource_types{"Dataset"};
  /// researcher_id -> DataCite query; unmapped ids are queried verbatim.
  std::map<std::string, std::string> datacite_queries;
};

enum class ProfileSource { SemanticScholar, Fixture };

struct RemoteAuthorProfile {
  std::string researcher_id;
  std::vector<PaperRecord> papers;
  std::int64_t fetched_at = 0;  // unix seconds
  ProfileSource source = ProfileSource::SemanticScholar;

  bool operator==(const RemoteAuthorProfile&) const = default;
};

inline constexpr std::string_view kSemanticScholarEndpoint = "semantic_scholar";
inline constexpr std::string_view kDataCiteEndpoint = "datacite";

inline std::string to_canonical(const RemoteAuthorProfile& p) {
  CanonicalWriter w;
  w.begin_object();
  w.key("researcher_id").value(p.researcher_id);
  w.key("fetched_at").value(std::int64_t{p.fetched_at});
  w.key("source").value(p.source == ProfileSource::Fixture ? "fixture" : "semantic_scholar");
  w.key("papers").begin_array();
  for (const auto& paper : p.papers) {
    w.begin_object();
    w.key("paper_id").value(paper.paper_id);
    w.key("year");
    if (paper.year) {
      w.value(std::int64_t{*paper.year});
    } else {
      w.raw("null");
    }
    w.key("citation_count").value(std::uint64_t{paper.citation_count});
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return std::move(w).str();
}

inline RemoteAuthorProfile profile_from_canonical(std::string_view text) {
  const auto j = parse_canonical(text, "author profile", ErrorCode::NetworkFailure);
  try {
    RemoteAuthorProfile p;
    p.researcher_id = j.at("researcher_id").get<std::string>();
    p.fetched_at = j.at("fetched_at").get<std::int64_t>();
    p.source = j.at("source").get<std::string>() == "fixture" ? ProfileSource::Fixture : ProfileSource::SemanticScholar;
    for (const auto& item : j.at("papers")) {
      PaperRecord paper;
      paper.paper_id = item.at("paper_id").get<std::string>();
      if (!item.at("year").is_null()) paper.year = item.at("year").get<int>();
      paper.citation_count = json_count(item.at("citation_count"), "citation_count", ErrorCode::NetworkFailure);
      p.papers.push_back(std::move(paper));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::NetworkFailure, std::string("author profile: ") + e.what());
  }
}

/// Semantic Scholar author response -> paper list.
inline std::vector<PaperRecord> parse_semantic_scholar_author(std::string_view body) {
  const auto j = parse_canonical(body, "semantic scholar response", ErrorCode::NetworkFailure);
  try {
    std::vector<PaperRecord> papers;
    for (const auto& item : j.at("papers")) {
      PaperRecord paper;
      paper.paper_id = item.value("paperId", std::string{});
      if (item.contains("year") && !item.at("year").is_null()) paper.year = item.at("year").get<int>();
      if (item.contains("citationCount") && !item.at("citationCount").is_null()) {
        paper.citation_count = json_count(item.at("citationCount"), "citationCount", ErrorCode::NetworkFailure);
      }
      validate(paper);
      papers.push_back(std::move(paper));
    }
    return papers;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::NetworkFailure, std::string("semantic scholar response: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::NetworkFailure, std::string("semantic scholar response: ") + e.what());
  }
}

/// Number of DataCite records whose resourceTypeGeneral is counted.
inline Count count_datacite_datasets(std::string_view body, const std::set<std::string>& counted_types) {
  const auto j = parse_canonical(body, "datacite response", ErrorCode::NetworkFailure);
  try {
    Count n = 0;
    for (const auto& record : j.at("data")) {
      const auto& type = record.at("attributes").at("types").at("resourceTypeGeneral");
      if (type.is_string() && counted_types.contains(type.get<std::string>())) ++n;
    }
    return n;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::NetworkFailure, std::string("datacite response: ") + e.what());
  }
}

inline std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    }
  }
  return out;
}

/// Reads a `researcher_id<TAB>datacite query` mapping file (header optional).
inline std::map<std::string, std::string> load_datacite_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open mapping file " + path.string());
  std::map<std::string, std::string> mapping;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    std::string id = line.substr(0, tab);
    std::string query = line.substr(tab + 1);
    if (first && id == "researcher_id") {
      first = false;
      continue;
    }
    first = false;
    mapping[std::move(id)] = std::move(query);
  }
  return mapping;
}

/// Cached, rate-limited client for the Semantic Scholar and DataCite APIs.
/// In FixtureOnly mode the transport is never touched.
template <typename Clock = SteadyClock>
class BasicScholarlyClient {
 public:
  BasicScholarlyClient(FetchPolicy policy, std::shared_ptr<HttpTransport> transport, Clock clock = {})
      : policy_(std::move(policy)),
        transport_(std::move(transport)),
        store_(policy_.cache_dir),
        clock_(clock),
        s2_limiter_(policy_.rate_limit, clock),
        datacite_limiter_(policy_.rate_limit, clock) {
    if (policy_.retries < 0) throw Error(ErrorCode::InvalidArgument, "retries must be >= 0");
    if (policy_.mode != FetchMode::FixtureOnly && !transport_) {
      throw Error(ErrorCode::InvalidArgument, "live fetch modes need a transport");
    }
  }

  const FetchPolicy& policy() const { return policy_; }

  /// Transport calls made by this client (live or fake).
  std::uint64_t network_requests() const {
    std::lock_guard lock(mutex_);
    return network_requests_;
  }

  RemoteAuthorProfile fetch_author(const std::string& researcher_id) {
    require_id(researcher_id);
    const auto raw = fetch_raw(kSemanticScholarEndpoint, researcher_id, s2_limiter_, policy_.semantic_scholar_base,
                               "/graph/v1/author/" + url_encode(researcher_id) +
                                   "?fields=papers.paperId,papers.year,papers.citationCount");
    RemoteAuthorProfile profile;
    profile.researcher_id = researcher_id;
    profile.papers = parse_semantic_scholar_author(raw.response.body);
    profile.fetched_at = raw.response.fetched_at;
    profile.source = raw.from_fixture ? ProfileSource::Fixture : ProfileSource::SemanticScholar;
    return profile;
  }

  Count fetch_share_count(const std::string& researcher_id) {
    require_id(researcher_id);
    const auto mapped = policy_.datacite_queries.find(researcher_id);
    const std::string& query = mapped == policy_.datacite_queries.end() ? researcher_id : mapped->second;
    const auto raw = fetch_raw(kDataCiteEndpoint, researcher_id, datacite_limiter_, policy_.datacite_base,
                               "/dois?query=" + url_encode(query) + "&page%5Bsize%5D=1000");
    return count_datacite_datasets(raw.response.body, policy_.counted_resource_types);
  }

  /// Author profile plus share count, reduced to model inputs.
  CareerStats fetch_career_stats(const std::string& researcher_id) {
    AuthorRecord author;
    author.author_id = researcher_id;
    author.papers = fetch_author(researcher_id).papers;
    author.data_share_count = fetch_share_count(researcher_id);
    return derive_career_stats(author);
  }

 private:
  struct RawResult {
    StoredResponse response;
    bool from_fixture = false;
  };

  struct MemoryEntry {
    StoredResponse response;
    typename Clock::time_point at;
  };

  static void require_id(const std::string& id) {
    if (id.empty()) throw Error(ErrorCode::EmptyIdentifier, "researcher id is empty");
  }

  static std::int64_t unix_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

  RawResult fetch_raw(std::string_view endpoint, const std::string& id, BasicRateLimiter<Clock>& limiter,
                      const std::string& base, const std::string& path) {
    const std::string key = std::string(endpoint) + "/" + id;

    if (policy_.mode == FetchMode::FixtureOnly) {
      auto stored = store_.load(endpoint, id);
      if (!stored) {
        throw Error(ErrorCode::FixtureMissing, "no fixture for " + key + " in " + store_.directory().string());
      }
      return {std::move(*stored), true};
    }

    {
      std::lock_guard lock(mutex_);
      const auto it = memory_.find(key);
      if (it != memory_.end() && clock_.now() - it->second.at < policy_.cache_ttl) {
        return {it->second.response, false};
      }
    }
    if (policy_.mode == FetchMode::LiveWithRecord) {
      if (auto stored = store_.load(endpoint, id); stored && unix_now() - stored->fetched_at < policy_.cache_ttl.count()) {
        remember(key, *stored);
        return {std::move(*stored), true};
      }
    }

    StoredResponse fresh{request_with_retries(key, limiter, base, path), unix_now()};
    remember(key, fresh);
    if (policy_.mode == FetchMode::LiveWithRecord) store_.store(endpoint, id, fresh);
    return {std::move(fresh), false};
  }

  void remember(const std::string& key, const StoredResponse& response) {
    std::lock_guard lock(mutex_);
    memory_[key] = MemoryEntry{response, clock_.now()};
  }

  std::string request_with_retries(const std::string& key, BasicRateLimiter<Clock>& limiter, const std::string& base,
                                   const std::string& path) {
    HttpHeaders headers{{"Accept", "application/json"}};
    if (!policy_.api_key_env.empty()) {
      if (const char* api_key = std::getenv(policy_.api_key_env.c_str()); api_key && *api_key) {
        headers["x-api-key"] = api_key;
      }
    }

    bool last_was_throttle = false;
    std::string last_problem = "no attempt made";
    for (int attempt = 0; attempt <= policy_.retries; ++attempt) {
      if (attempt > 0) clock_.sleep_until(clock_.now() + policy_.backoff_base * (1 << (attempt - 1)));
      limiter.acquire();
      {
        std::lock_guard lock(mutex_);
        ++network_requests_;
      }
      const auto response = transport_->get(base, path, headers);
      if (!response) {
        last_was_throttle = false;
        last_problem = "no response";
        continue;
      }
      if (response->status == 200) return response->body;
      if (response->status == 404) throw Error(ErrorCode::NotFound, key + " not found");
      if (response->status == 429 || response->status >= 500) {
        last_was_throttle = response->status == 429;
        last_problem = "HTTP " + std::to_string(response->status);
        continue;
      }
      throw Error(ErrorCode::NetworkFailure, key + ": HTTP " + std::to_string(response->status));
    }
    throw Error(last_was_throttle ? ErrorCode::RateLimited : ErrorCode::NetworkFailure,
                key + ": " + last_problem + " after " + std::to_string(policy_.retries + 1) + " attempts");
  }

  FetchPolicy policy_;
  std::shared_ptr<HttpTransport> transport_;
  FixtureStore store_;
  Clock clock_;
  BasicRateLimiter<Clock> s2_limiter_;
  BasicRateLimiter<Clock> datacite_limiter_;
  mutable std::mutex mutex_;
  std::map<std::string, MemoryEntry> memory_;
  std::uint64_t network_requests_ = 0;
};

using ScholarlyClient = BasicScholarlyClient<SteadyClock>;

}  // namespace science_index
