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

#include <sys/resource.h>

#include <fstream>
#include <functional>
#include <sstream>

#include <gtest/gtest.h>

#include "science_index/ingestion.hpp"
#include "test_support.hpp"

using namespace science_index;
using science_index::testing::TempDir;

namespace {

const std::filesystem::path kDir = std::filesystem::path(SCIENCE_INDEX_FIXTURES) / "ingest";

Error error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an Error";
  return Error(ErrorCode::InvalidArgument, "none");
}

std::vector<CareerStats> load_all(DatasetManifest m, bool strict = false) {
  auto reader = load_dataset(std::move(m), strict);
  return read_all_stats(reader);
}

DatasetManifest prejoined(const std::filesystem::path& path) {
  DatasetManifest m;
  m.authors_path = path;
  return m;
}

long peak_rss_kib() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

}  // namespace

TEST(Prejoined, ThreeRowsLoadVerbatim) {
  auto reader = load_dataset(prejoined(kDir / "prejoined_3.tsv"));
  const auto rows = read_all_stats(reader);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (CareerStats{"A1", 20, 50, 1000, 12, 3}));
  EXPECT_EQ(rows[1], (CareerStats{"A2", 5, 8, 40, 3, 0}));
  EXPECT_EQ(rows[2], (CareerStats{"A3", 33, 210, 15400, 48, 11}));
  EXPECT_EQ(reader.manifest().row_count, 3u);
  EXPECT_EQ(reader.issue_count(), 0u);
}

TEST(Prejoined, ColumnOrderFollowsHeader) {
  TempDir dir;
  std::ofstream(dir / "shuffled.tsv") << "h_index\tauthor_id\tdata_share_count\tcitation_count\tcareer_length\t"
                                         "publication_count\n12\tA1\t3\t1000\t20\t50\n";
  EXPECT_EQ(load_all(prejoined(dir / "shuffled.tsv")), (std::vector<CareerStats>{{"A1", 20, 50, 1000, 12, 3}}));
}

TEST(Prejoined, WrongHeaderNamesMissingColumn) {
  const Error e = error_of([] { load_dataset(prejoined(kDir / "wrong_header.tsv")); });
  EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  EXPECT_NE(std::string(e.what()).find("'citation_count'"), std::string::npos) << e.what();

  TempDir dir;
  std::ofstream(dir / "empty.tsv");
  EXPECT_EQ(error_of([&] { load_dataset(prejoined(dir / "empty.tsv")); }).code(), ErrorCode::SchemaMismatch);
}

TEST(Prejoined, MissingFile) {
  EXPECT_EQ(error_of([] { load_dataset(prejoined(kDir / "nope.tsv")); }).code(), ErrorCode::FileNotFound);
}

TEST(Prejoined, LenientSkipsAndReportsLines) {
  auto reader = load_dataset(prejoined(kDir / "dirty.tsv"));
  const auto rows = read_all_stats(reader);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].author_id, "A1");
  EXPECT_EQ(rows[1].author_id, "A4");
  ASSERT_EQ(reader.issues().size(), 3u);
  EXPECT_EQ(reader.issues()[0].line, 3u);
  EXPECT_NE(reader.issues()[0].message.find("publication_count"), std::string::npos);
  EXPECT_EQ(reader.issues()[1].line, 4u);
  EXPECT_EQ(reader.issues()[2].line, 5u);
}

TEST(Prejoined, StrictFailsOnFirstBadRow) {
  const Error e = error_of([] { load_all(prejoined(kDir / "dirty.tsv"), true); });
  EXPECT_EQ(e.code(), ErrorCode::RowParseError);
  EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
}

TEST(Prejoined, RejectsNegativeAndOverflow) {
  TempDir dir;
  std::ofstream out(dir / "bad.tsv");
  write_prejoined_header(out);
  out << "X\t-1\t1\t1\t1\t1\nY\t1\t99999999999999999999999\t1\t1\t1\nZ\t1\t+2\t1\t1\t1\n";
  out.close();
  auto reader = load_dataset(prejoined(dir / "bad.tsv"));
  EXPECT_TRUE(read_all_stats(reader).empty());
  EXPECT_EQ(reader.issue_count(), 3u);
}

TEST(Prejoined, WriteThenReloadIsIdentity) {
  PopulationSpec spec;
  spec.size = 500;
  spec.mean_share_count = 2.0;
  const auto pop = generate_population(spec);
  TempDir dir;
  {
    std::ofstream out(dir / "pop.tsv");
    write_prejoined(out, pop);
  }
  EXPECT_EQ(load_all(prejoined(dir / "pop.tsv")), pop);
}

TEST(Prejoined, CrlfTolerated) {
  TempDir dir;
  std::ofstream(dir / "crlf.tsv", std::ios::binary)
      << "author_id\tcareer_length\tpublication_count\tcitation_count\th_index\tdata_share_count\r\nA\t1\t2\t3\t1\t0\r\n";
  EXPECT_EQ(load_all(prejoined(dir / "crlf.tsv"), true), (std::vector<CareerStats>{{"A", 1, 2, 3, 1, 0}}));
}

TEST(AuthorsPlusPapers, JoinsAndDerives) {
  DatasetManifest m{kDir / "authors.ndjson", kDir / "papers.ndjson", std::nullopt, DatasetFormat::AuthorsPlusPapers};
  auto reader = load_dataset(m);
  const auto first = reader.next();
  ASSERT_TRUE(first && std::holds_alternative<AuthorRecord>(*first));
  EXPECT_EQ(std::get<AuthorRecord>(*first).papers.size(), 3u);

  const auto rows = load_all(m);
  ASSERT_EQ(rows.size(), 2u);
  // Papers in 2001, 2005 and 2011.
  EXPECT_EQ(rows[0], (CareerStats{"A", 10, 3, 44, 2, 2}));
  EXPECT_EQ(rows[1], (CareerStats{"B", 0, 2, 5, 1, 0}));
}

TEST(AuthorsPlusPapers, BadLinesReported) {
  TempDir dir;
  std::ofstream(dir / "a.ndjson") << "{\"author_id\":\"A\"}\nnot json\n{\"papers\":[]}\n"
                                     "{\"author_id\":\"C\",\"papers\":[{\"paper_id\":\"c\",\"citation_count\":-3}]}\n";
  DatasetManifest m{dir / "a.ndjson", std::nullopt, std::nullopt, DatasetFormat::AuthorsPlusPapers};
  auto reader = load_dataset(m);
  EXPECT_EQ(read_all_stats(reader).size(), 1u);
  EXPECT_EQ(reader.issue_count(), 3u);
  EXPECT_EQ(error_of([&] { load_all(m, true); }).code(), ErrorCode::RowParseError);
}

TEST(ShareMap, JoinSemantics) {
  const std::vector<CareerStats> authors{{"A", 1, 1, 1, 1, 9}, {"B", 1, 1, 1, 1, 9}};
  const auto none = join_share_counts(authors, {});
  EXPECT_EQ(none[0].data_share_count, 0u);
  EXPECT_EQ(none[1].data_share_count, 0u);
  const auto some = join_share_counts(authors, {{"A", 7}});
  EXPECT_EQ(some[0].data_share_count, 7u);
  EXPECT_EQ(some[1].data_share_count, 0u);
  EXPECT_EQ(some[0].author_id, "A");
}

TEST(ShareMap, DuplicateKeysLastWinsWithWarning) {
  std::vector<std::string> warnings;
  const auto map = load_share_map(kDir / "shares.tsv", &warnings);
  EXPECT_EQ(map.size(), 2u);
  EXPECT_EQ(map.at("A3"), 4u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("duplicate id 'A3'"), std::string::npos) << warnings[0];
}

TEST(ShareMap, AppliedThroughManifest) {
  DatasetManifest m = prejoined(kDir / "prejoined_3.tsv");
  m.share_map_path = kDir / "shares.tsv";
  auto reader = load_dataset(m);
  const auto rows = read_all_stats(reader);
  EXPECT_EQ(rows[0].data_share_count, 7u);
  EXPECT_EQ(rows[1].data_share_count, 0u);
  EXPECT_EQ(rows[2].data_share_count, 4u);
  EXPECT_EQ(reader.warnings().size(), 1u);
}

TEST(Streaming, MillionRowsInBoundedMemory) {
#if defined(__SANITIZE_ADDRESS__)
  GTEST_SKIP() << "AddressSanitizer quarantines freed memory, so peak RSS is not meaningful";
#endif
  TempDir dir;
  const auto path = dir / "big.tsv";
  constexpr std::uint64_t kRows = 1'000'000;
  {
    std::ofstream out(path);
    write_prejoined_header(out);
    for (std::uint64_t i = 0; i < kRows; ++i) {
      write_prejoined_row(out, CareerStats{"author" + std::to_string(i), i % 41, i % 301, i % 20011, i % 97, i % 13});
    }
  }
  const auto file_kib = static_cast<long>(std::filesystem::file_size(path) / 1024);
  const long before = peak_rss_kib();

  auto reader = load_dataset(prejoined(path), true);
  std::uint64_t n = 0, checksum = 0;
  while (auto s = reader.next_stats()) {
    ++n;
    checksum += s->citation_count;
  }
  const long growth = peak_rss_kib() - before;
  EXPECT_EQ(n, kRows);
  std::uint64_t expected = 0;
  for (std::uint64_t i = 0; i < kRows; ++i) expected += i % 20011;
  EXPECT_EQ(checksum, expected);
  // The file is tens of MiB; the reader must not hold it.
  EXPECT_GT(file_kib, 25 * 1024);
  EXPECT_LT(growth, 4 * 1024) << "peak RSS grew by " << growth << " KiB";
}
