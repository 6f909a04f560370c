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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "science_index/canonical.hpp"
#include "science_index/error.hpp"

namespace science_index {

using Count = std::uint64_t;

inline constexpr int kMinPaperYear = 1000;
inline constexpr int kMaxPaperYear = 3000;

struct PaperRecord {
  std::string paper_id;
  std::optional<int> year;
  Count citation_count = 0;

  bool operator==(const PaperRecord&) const = default;
};

struct AuthorRecord {
  std::string author_id;
  std::vector<PaperRecord> papers;
  Count data_share_count = 0;

  bool operator==(const AuthorRecord&) const = default;
};

/// Career summary the model consumes. `author_id` is carried so that
/// share counts can be joined and records written back out.
struct CareerStats {
  std::string author_id;
  Count career_length = 0;
  Count publication_count = 0;
  Count citation_count = 0;
  Count h_index = 0;
  Count data_share_count = 0;

  bool operator==(const CareerStats&) const = default;
};

inline void validate(const PaperRecord& paper) {
  if (paper.year && (*paper.year < kMinPaperYear || *paper.year > kMaxPaperYear)) {
    throw Error(ErrorCode::InvalidArgument,
                "paper '" + paper.paper_id + "' has year " + std::to_string(*paper.year) +
                    " outside [1000, 3000]");
  }
}

inline void validate(const AuthorRecord& author) {
  if (author.author_id.empty()) {
    throw Error(ErrorCode::EmptyIdentifier, "author record without author_id");
  }
  for (const auto& paper : author.papers) validate(paper);
}

/// Largest h such that at least h of the citation counts are >= h.
inline Count compute_h_index(std::span<const Count> citations) {
  std::vector<Count> sorted(citations.begin(), citations.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>{});
  Count h = 0;
  while (h < sorted.size() && sorted[h] >= h + 1) ++h;
  return h;
}

/// Span in years between the oldest and newest dated paper. Undated papers
/// are ignored; fewer than two dated papers gives 0.
inline Count compute_career_length(std::span<const PaperRecord> papers) {
  std::optional<int> oldest;
  std::optional<int> newest;
  for (const auto& paper : papers) {
    if (!paper.year) continue;
    oldest = oldest ? std::min(*oldest, *paper.year) : *paper.year;
    newest = newest ? std::max(*newest, *paper.year) : *paper.year;
  }
  if (!oldest) return 0;
  return static_cast<Count>(*newest - *oldest);
}

inline CareerStats derive_career_stats(const AuthorRecord& author) {
  std::vector<Count> citations;
  citations.reserve(author.papers.size());
  for (const auto& paper : author.papers) citations.push_back(paper.citation_count);

  CareerStats stats;
  stats.author_id = author.author_id;
  stats.career_length = compute_career_length(author.papers);
  stats.publication_count = author.papers.size();
  stats.citation_count = std::accumulate(citations.begin(), citations.end(), Count{0});
  stats.h_index = compute_h_index(citations);
  stats.data_share_count = author.data_share_count;
  return stats;
}

inline void write_canonical(CanonicalWriter& w, const CareerStats& s) {
  w.begin_object();
  w.key("author_id").value(s.author_id);
  w.key("career_length").value(std::uint64_t{s.career_length});
  w.key("publication_count").value(std::uint64_t{s.publication_count});
  w.key("citation_count").value(std::uint64_t{s.citation_count});
  w.key("h_index").value(std::uint64_t{s.h_index});
  w.key("data_share_count").value(std::uint64_t{s.data_share_count});
  w.end_object();
}

inline CareerStats career_stats_from_json(const nlohmann::json& j) {
  CareerStats s;
  s.author_id = j.at("author_id").get<std::string>();
  s.career_length = json_count(j.at("career_length"), "career_length");
  s.publication_count = json_count(j.at("publication_count"), "publication_count");
  s.citation_count = json_count(j.at("citation_count"), "citation_count");
  s.h_index = json_count(j.at("h_index"), "h_index");
  s.data_share_count = json_count(j.at("data_share_count"), "data_share_count");
  return s;
}

}  // namespace science_index
