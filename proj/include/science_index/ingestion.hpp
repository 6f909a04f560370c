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
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "science_index/bibliometrics.hpp"
#include "science_index/error.hpp"

namespace science_index {

enum class DatasetFormat { PrejoinedStats, AuthorsPlusPapers };

inline DatasetFormat dataset_format_from_string(std::string_view name) {
  if (name == "prejoined") return DatasetFormat::PrejoinedStats;
  if (name == "authors-papers") return DatasetFormat::AuthorsPlusPapers;
  throw Error(ErrorCode::InvalidArgument, "unknown dataset format '" + std::string(name) + "'");
}

struct DatasetManifest {
  std::filesystem::path authors_path;
  std::optional<std::filesystem::path> papers_path;
  std::optional<std::filesystem::path> share_map_path;
  DatasetFormat format = DatasetFormat::PrejoinedStats;
  std::uint64_t row_count = 0;  // filled in as rows are read
};

inline constexpr std::array<std::string_view, 6> kPrejoinedColumns{
    "author_id", "career_length", "publication_count", "citation_count", "h_index", "data_share_count"};

struct ParseIssue {
  std::uint64_t line = 0;
  std::string message;
};

using DatasetRow = std::variant<CareerStats, AuthorRecord>;

using ShareMap = std::unordered_map<std::string, Count>;

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

inline std::optional<Count> parse_count(std::string_view text) {
  Count value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline PaperRecord paper_from_json(const nlohmann::json& j) {
  PaperRecord paper;
  paper.paper_id = j.value("paper_id", std::string{});
  if (j.contains("year") && !j.at("year").is_null()) paper.year = j.at("year").get<int>();
  if (j.contains("citation_count")) paper.citation_count = json_count(j.at("citation_count"), "citation_count");
  validate(paper);
  return paper;
}

}  // namespace detail

/// Reads `author_id<TAB>data_share_count` rows. Duplicate ids: last one
/// wins and a warning naming both lines is appended to `warnings`.
inline ShareMap load_share_map(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open share map " + path.string());
  ShareMap map;
  std::unordered_map<std::string, std::uint64_t> seen_at;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "author_id") continue;
    const auto count = fields.size() >= 2 ? detail::parse_count(fields[1]) : std::nullopt;
    if (!count || fields[0].empty()) {
      if (warnings) warnings->push_back(path.string() + ":" + std::to_string(line_no) + ": malformed share row skipped");
      continue;
    }
    std::string id(fields[0]);
    if (const auto prev = seen_at.find(id); prev != seen_at.end() && warnings) {
      warnings->push_back(path.string() + ":" + std::to_string(line_no) + ": duplicate id '" + id +
                          "' overrides line " + std::to_string(prev->second));
    }
    seen_at[id] = line_no;
    map[std::move(id)] = *count;
  }
  return map;
}

/// Sets the share count from `share_map`, 0 when the id is absent.
inline CareerStats attach_share_count(CareerStats stats, const ShareMap& share_map) {
  const auto it = share_map.find(stats.author_id);
  stats.data_share_count = it == share_map.end() ? 0 : it->second;
  return stats;
}

inline std::vector<CareerStats> join_share_counts(std::vector<CareerStats> authors, const ShareMap& share_map) {
  for (auto& stats : authors) stats = attach_share_count(std::move(stats), share_map);
  return authors;
}

/// Streaming reader over a dataset. Prejoined TSV and self-contained author
/// lines are read one record at a time; a separate papers file is grouped
/// by author in memory before streaming starts.
class DatasetReader {
 public:
  static constexpr std::size_t kMaxStoredIssues = 1000;

  explicit DatasetReader(DatasetManifest manifest, bool strict = false)
      : manifest_(std::move(manifest)), strict_(strict), in_(manifest_.authors_path) {
    if (!in_) throw Error(ErrorCode::FileNotFound, "cannot open " + manifest_.authors_path.string());
    if (manifest_.share_map_path) share_map_ = load_share_map(*manifest_.share_map_path, &warnings_);
    if (manifest_.format == DatasetFormat::PrejoinedStats) {
      read_header();
    } else if (manifest_.papers_path) {
      load_papers(*manifest_.papers_path);
    }
  }

  const DatasetManifest& manifest() const { return manifest_; }
  std::span<const ParseIssue> issues() const { return issues_; }
  std::uint64_t issue_count() const { return issue_count_; }
  std::span<const std::string> warnings() const { return warnings_; }

  std::optional<DatasetRow> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      detail::strip_cr(line);
      if (line.empty()) continue;
      std::optional<DatasetRow> row = manifest_.format == DatasetFormat::PrejoinedStats
                                          ? parse_prejoined(line)
                                          : parse_author(line);
      if (row) {
        ++manifest_.row_count;
        return row;
      }
    }
    return std::nullopt;
  }

  /// Next record reduced to CareerStats, with the manifest's share map
  /// (if any) applied.
  std::optional<CareerStats> next_stats() {
    auto row = next();
    if (!row) return std::nullopt;
    CareerStats stats = std::holds_alternative<CareerStats>(*row) ? std::get<CareerStats>(std::move(*row))
                                                                   : derive_career_stats(std::get<AuthorRecord>(*row));
    if (share_map_) stats = attach_share_count(std::move(stats), *share_map_);
    return stats;
  }

 private:
  void report(std::string message) {
    if (strict_) {
      throw Error(ErrorCode::RowParseError,
                  manifest_.authors_path.string() + ":" + std::to_string(line_no_) + ": " + message);
    }
    ++issue_count_;
    if (issues_.size() < kMaxStoredIssues) issues_.push_back({line_no_, std::move(message)});
  }

  void read_header() {
    std::string line;
    if (!std::getline(in_, line)) {
      throw Error(ErrorCode::SchemaMismatch, manifest_.authors_path.string() + " is empty (header required)");
    }
    ++line_no_;
    detail::strip_cr(line);
    const auto fields = detail::split_tabs(line);
    for (std::size_t c = 0; c < kPrejoinedColumns.size(); ++c) {
      const auto it = std::find(fields.begin(), fields.end(), kPrejoinedColumns[c]);
      if (it == fields.end()) {
        throw Error(ErrorCode::SchemaMismatch,
                    manifest_.authors_path.string() + ": missing column '" + std::string(kPrejoinedColumns[c]) + "'");
      }
      column_index_[c] = static_cast<std::size_t>(it - fields.begin());
    }
    width_ = fields.size();
  }

  std::optional<DatasetRow> parse_prejoined(const std::string& line) {
    const auto fields = detail::split_tabs(line);
    if (fields.size() != width_) {
      report("expected " + std::to_string(width_) + " fields, got " + std::to_string(fields.size()));
      return std::nullopt;
    }
    CareerStats stats;
    stats.author_id = std::string(fields[column_index_[0]]);
    if (stats.author_id.empty()) {
      report("empty author_id");
      return std::nullopt;
    }
    Count* targets[] = {&stats.career_length, &stats.publication_count, &stats.citation_count, &stats.h_index,
                        &stats.data_share_count};
    for (std::size_t c = 1; c < kPrejoinedColumns.size(); ++c) {
      const auto value = detail::parse_count(fields[column_index_[c]]);
      if (!value) {
        report("column '" + std::string(kPrejoinedColumns[c]) + "' is not a non-negative integer");
        return std::nullopt;
      }
      *targets[c - 1] = *value;
    }
    return stats;
  }

  std::optional<DatasetRow> parse_author(const std::string& line) {
    try {
      const auto j = nlohmann::json::parse(line);
      AuthorRecord author;
      author.author_id = j.at("author_id").get<std::string>();
      if (j.contains("data_share_count")) {
        author.data_share_count = json_count(j.at("data_share_count"), "data_share_count");
      }
      if (j.contains("papers")) {
        for (const auto& p : j.at("papers")) author.papers.push_back(detail::paper_from_json(p));
      }
      if (auto it = papers_by_author_.find(author.author_id); it != papers_by_author_.end()) {
        author.papers.insert(author.papers.end(), it->second.begin(), it->second.end());
      }
      validate(author);
      return author;
    } catch (const nlohmann::json::exception& e) {
      report(std::string("bad author record: ") + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::RowParseError) throw;
      report(e.what());
    }
    return std::nullopt;
  }

  void load_papers(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
    std::string line;
    std::uint64_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      detail::strip_cr(line);
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        papers_by_author_[j.at("author_id").get<std::string>()].push_back(detail::paper_from_json(j));
      } catch (const std::exception& e) {
        if (strict_) throw Error(ErrorCode::RowParseError, path.string() + ":" + std::to_string(n) + ": " + e.what());
        ++issue_count_;
        if (issues_.size() < kMaxStoredIssues) issues_.push_back({n, path.string() + ": " + e.what()});
      }
    }
  }

  DatasetManifest manifest_;
  bool strict_;
  std::ifstream in_;
  std::uint64_t line_no_ = 0;
  std::array<std::size_t, kPrejoinedColumns.size()> column_index_{};
  std::size_t width_ = 0;
  std::optional<ShareMap> share_map_;
  std::unordered_map<std::string, std::vector<PaperRecord>> papers_by_author_;
  std::vector<ParseIssue> issues_;
  std::uint64_t issue_count_ = 0;
  std::vector<std::string> warnings_;
};

inline DatasetReader load_dataset(DatasetManifest manifest, bool strict = false) {
  return DatasetReader(std::move(manifest), strict);
}

/// Drains a reader into memory.
inline std::vector<CareerStats> read_all_stats(DatasetReader& reader) {
  std::vector<CareerStats> out;
  while (auto stats = reader.next_stats()) out.push_back(std::move(*stats));
  return out;
}

inline void write_prejoined_header(std::ostream& out) {
  for (std::size_t c = 0; c < kPrejoinedColumns.size(); ++c) out << (c ? "\t" : "") << kPrejoinedColumns[c];
  out << '\n';
}

inline void write_prejoined_row(std::ostream& out, const CareerStats& s) {
  out << s.author_id << '\t' << s.career_length << '\t' << s.publication_count << '\t' << s.citation_count << '\t'
      << s.h_index << '\t' << s.data_share_count << '\n';
}

inline void write_prejoined(std::ostream& out, std::span<const CareerStats> rows) {
  write_prejoined_header(out);
  for (const auto& s : rows) write_prejoined_row(out, s);
}

}  // namespace science_index
