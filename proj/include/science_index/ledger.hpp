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

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "science_index/bibliometrics.hpp"
#include "science_index/canonical.hpp"
#include "science_index/error.hpp"
#include "science_index/regression.hpp"
#include "science_index/scoring.hpp"
#include "science_index/sha256.hpp"

namespace science_index {

struct ScoreRequest {
  std::uint64_t request_id = 0;
  std::string researcher_id;
  std::uint64_t submitted_at = 0;  // seq of the request entry

  bool operator==(const ScoreRequest&) const = default;
};

struct OracleFulfillment {
  std::uint64_t request_id = 0;
  CareerStats stats;
};

enum class EntryKind : std::uint8_t { Genesis = 0, Request = 1, Fulfill = 2 };

constexpr std::string_view to_string(EntryKind kind) noexcept {
  switch (kind) {
    case EntryKind::Genesis: return "genesis";
    case EntryKind::Request: return "request";
    case EntryKind::Fulfill: return "fulfill";
  }
  return "?";
}

inline std::optional<EntryKind> entry_kind_from_string(std::string_view name) {
  if (name == "genesis") return EntryKind::Genesis;
  if (name == "request") return EntryKind::Request;
  if (name == "fulfill") return EntryKind::Fulfill;
  return std::nullopt;
}

struct LedgerEntry {
  std::uint64_t seq = 0;
  EntryKind kind = EntryKind::Genesis;
  std::string payload;
  Digest prev_digest{};
  Digest digest{};

  bool operator==(const LedgerEntry&) const = default;
};

/// Protocol knobs recorded in the genesis entry so replays honour them.
struct LedgerConfig {
  ScoreMode score_mode = ScoreMode::ShareBonus;
  double share_weight = 0.0;
  /// Score under the pre-update model (sensitivity analysis only).
  bool score_before_update = false;
  /// A researcher contributes at most one observation; later fulfilments
  /// only score. Duplicate pending submissions collapse into one request.
  bool dedupe_researchers = false;

  bool operator==(const LedgerConfig&) const = default;
};

struct LedgerState {
  std::vector<LedgerEntry> entries;
  LedgerConfig config;
  ModelState model;
  std::map<std::uint64_t, ScoreRequest> pending;
  std::map<std::uint64_t, ScoreBreakdown> emitted_scores;
  std::set<std::string> observed_researchers;
  std::uint64_t next_request_id = 1;

  const Digest& head() const { return entries.back().digest; }
};

/// Chain verification failure, carrying the first offending seq.
class BrokenChainError : public Error {
 public:
  BrokenChainError(std::uint64_t seq, const std::string& what)
      : Error(ErrorCode::BrokenChain, "at seq " + std::to_string(seq) + ": " + what), seq_(seq) {}
  std::uint64_t seq() const noexcept { return seq_; }

 private:
  std::uint64_t seq_;
};

inline Digest entry_digest(std::uint64_t seq, EntryKind kind, std::string_view payload, const Digest& prev) {
  Sha256 h;
  h.update_u64(seq);
  const std::uint8_t k = static_cast<std::uint8_t>(kind);
  h.update(std::span<const std::uint8_t>(&k, 1));
  h.update_u64(payload.size());
  h.update(payload);
  h.update(prev);
  return h.finish();
}

namespace detail {

inline void append_entry(LedgerState& state, EntryKind kind, std::string payload) {
  LedgerEntry e;
  e.seq = state.entries.empty() ? 0 : state.entries.back().seq + 1;
  e.kind = kind;
  e.prev_digest = state.entries.empty() ? Digest{} : state.entries.back().digest;
  e.payload = std::move(payload);
  e.digest = entry_digest(e.seq, e.kind, e.payload, e.prev_digest);
  state.entries.push_back(std::move(e));
}

inline void write_canonical(CanonicalWriter& w, const LedgerConfig& c) {
  w.begin_object();
  w.key("score_mode").value(to_string(c.score_mode));
  w.key("share_weight").value(c.share_weight);
  w.key("score_before_update").value(c.score_before_update);
  w.key("dedupe_researchers").value(c.dedupe_researchers);
  w.end_object();
}

inline LedgerConfig config_from_json(const nlohmann::json& j) {
  LedgerConfig c;
  c.score_mode = score_mode_from_string(j.at("score_mode").get<std::string>());
  c.share_weight = j.at("share_weight").get<double>();
  c.score_before_update = j.at("score_before_update").get<bool>();
  c.dedupe_researchers = j.at("dedupe_researchers").get<bool>();
  return c;
}

}  // namespace detail

inline LedgerState genesis(const ModelState& model, const LedgerConfig& config = {}) {
  validate(model);
  if (config.score_mode == ScoreMode::ShareBonus && model.config.feature_set != FeatureSet::Base) {
    throw Error(ErrorCode::MalformedModel, "share-bonus ledgers need a base-feature model");
  }
  if (!(config.share_weight >= 0.0) || !std::isfinite(config.share_weight)) {
    throw Error(ErrorCode::InvalidArgument, "share_weight must be finite and >= 0");
  }
  LedgerState state;
  state.config = config;
  state.model = model;
  CanonicalWriter w;
  w.begin_object();
  w.key("config");
  detail::write_canonical(w, config);
  w.key("model");
  write_canonical(w, model);
  w.end_object();
  detail::append_entry(state, EntryKind::Genesis, std::move(w).str());
  return state;
}

inline std::pair<LedgerState, ScoreRequest> submit_request(LedgerState state, const std::string& researcher_id) {
  if (researcher_id.empty()) throw Error(ErrorCode::EmptyIdentifier, "researcher_id is empty");
  if (state.config.dedupe_researchers) {
    for (const auto& [id, req] : state.pending) {
      if (req.researcher_id == researcher_id) return {std::move(state), req};
    }
  }
  ScoreRequest req;
  req.request_id = state.next_request_id++;
  req.researcher_id = researcher_id;
  req.submitted_at = state.entries.back().seq + 1;

  CanonicalWriter w;
  w.begin_object();
  w.key("request_id").value(std::uint64_t{req.request_id});
  w.key("researcher_id").value(req.researcher_id);
  w.key("submitted_at").value(std::uint64_t{req.submitted_at});
  w.end_object();
  detail::append_entry(state, EntryKind::Request, std::move(w).str());
  state.pending.emplace(req.request_id, req);
  return {std::move(state), req};
}

inline std::pair<LedgerState, ScoreBreakdown> apply_fulfillment(LedgerState state, const OracleFulfillment& f) {
  const auto it = state.pending.find(f.request_id);
  if (it == state.pending.end()) {
    throw Error(ErrorCode::UnknownRequest, "no pending request " + std::to_string(f.request_id));
  }
  const ScoreRequest req = it->second;
  const LedgerConfig& cfg = state.config;
  const bool observe = !cfg.dedupe_researchers || !state.observed_researchers.contains(req.researcher_id);

  auto score_now = [&] { return score(f.stats, state.model, cfg.score_mode, cfg.share_weight); };
  ScoreBreakdown result;
  if (cfg.score_before_update) result = score_now();
  if (observe) {
    state.model = update_online(state.model, FeatureVector::from_stats(f.stats, state.model.config.feature_set));
    state.observed_researchers.insert(req.researcher_id);
  }
  if (!cfg.score_before_update) result = score_now();

  CanonicalWriter w;
  w.begin_object();
  w.key("request_id").value(std::uint64_t{f.request_id});
  w.key("researcher_id").value(req.researcher_id);
  w.key("stats");
  write_canonical(w, f.stats);
  w.key("observed").value(observe);
  w.key("score");
  write_canonical(w, result);
  w.end_object();
  detail::append_entry(state, EntryKind::Fulfill, std::move(w).str());

  state.pending.erase(it);
  state.emitted_scores.emplace(f.request_id, result);
  return {std::move(state), result};
}

/// Checks seq numbering and the digest chain; returns the head digest.
inline Digest verify_chain(std::span<const LedgerEntry> entries) {
  if (entries.empty()) throw BrokenChainError(0, "log is empty");
  Digest prev{};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.seq != i) throw BrokenChainError(i, "sequence number " + std::to_string(e.seq) + " out of order");
    if ((i == 0) != (e.kind == EntryKind::Genesis)) throw BrokenChainError(i, "genesis must be exactly the first entry");
    if (e.prev_digest != prev) throw BrokenChainError(i, "prev_digest does not match predecessor");
    if (entry_digest(e.seq, e.kind, e.payload, e.prev_digest) != e.digest) {
      throw BrokenChainError(i, "digest mismatch");
    }
    prev = e.digest;
  }
  return prev;
}

/// Rebuilds the state by re-executing every transaction; each regenerated
/// entry must match the logged one byte for byte.
inline LedgerState replay(std::span<const LedgerEntry> entries) {
  verify_chain(entries);

  auto mismatch = [](std::uint64_t seq, const std::string& what) {
    return Error(ErrorCode::ReplayMismatch, "at seq " + std::to_string(seq) + ": " + what);
  };

  LedgerState state;
  try {
    const auto g = parse_canonical(entries[0].payload, "genesis payload");
    state = genesis(model_from_json(g.at("model")), detail::config_from_json(g.at("config")));
  } catch (const nlohmann::json::exception& e) {
    throw mismatch(0, e.what());
  }
  if (state.entries.back() != entries[0]) throw mismatch(0, "genesis does not re-serialize identically");

  for (std::size_t i = 1; i < entries.size(); ++i) {
    const auto& logged = entries[i];
    try {
      const auto j = parse_canonical(logged.payload, "entry payload", ErrorCode::ReplayMismatch);
      if (logged.kind == EntryKind::Request) {
        state = submit_request(std::move(state), j.at("researcher_id").get<std::string>()).first;
      } else {
        OracleFulfillment f{j.at("request_id").get<std::uint64_t>(), career_stats_from_json(j.at("stats"))};
        state = apply_fulfillment(std::move(state), f).first;
      }
    } catch (const nlohmann::json::exception& e) {
      throw mismatch(logged.seq, e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ReplayMismatch) throw;
      throw mismatch(logged.seq, e.what());
    }
    if (state.entries.size() != i + 1 || state.entries.back() != logged) {
      throw mismatch(logged.seq, "re-executed entry differs from the log");
    }
  }
  return state;
}

/// Confirms from the log alone that every observing fulfilment was scored
/// with the model version produced by its own update (or, for
/// score-before-update ledgers, the version preceding it).
inline bool check_update_before_score(std::span<const LedgerEntry> entries) {
  if (entries.empty() || entries[0].kind != EntryKind::Genesis) return false;
  const auto g = parse_canonical(entries[0].payload, "genesis payload");
  std::uint64_t version = g.at("model").at("version").get<std::uint64_t>();
  const bool before = g.at("config").at("score_before_update").get<bool>();
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].kind != EntryKind::Fulfill) continue;
    const auto j = parse_canonical(entries[i].payload, "fulfill payload");
    const bool observed = j.at("observed").get<bool>();
    const std::uint64_t pre = version;
    if (observed) ++version;
    const std::uint64_t expected = before ? pre : version;
    if (j.at("score").at("model_version").get<std::uint64_t>() != expected) return false;
  }
  return true;
}

/// Canonical summary of the whole state; equal strings mean equal states.
inline std::string to_canonical(const LedgerState& state) {
  CanonicalWriter w;
  w.begin_object();
  w.key("length").value(std::uint64_t{state.entries.size()});
  w.key("head").value(to_hex(state.head()));
  w.key("config");
  detail::write_canonical(w, state.config);
  w.key("model");
  write_canonical(w, state.model);
  w.key("next_request_id").value(std::uint64_t{state.next_request_id});
  w.key("pending").begin_array();
  for (const auto& [id, req] : state.pending) {
    w.begin_object();
    w.key("request_id").value(std::uint64_t{id});
    w.key("researcher_id").value(req.researcher_id);
    w.key("submitted_at").value(std::uint64_t{req.submitted_at});
    w.end_object();
  }
  w.end_array();
  w.key("emitted").begin_array();
  for (const auto& [id, s] : state.emitted_scores) {
    w.begin_object().key("request_id").value(std::uint64_t{id}).key("score");
    write_canonical(w, s);
    w.end_object();
  }
  w.end_array();
  w.key("observed").begin_array();
  for (const auto& r : state.observed_researchers) w.value(r);
  w.end_array();
  w.end_object();
  return std::move(w).str();
}

// Log persistence: one record per line, payload spliced verbatim last.

inline std::string entry_to_line(const LedgerEntry& e) {
  CanonicalWriter w;
  w.begin_object();
  w.key("seq").value(std::uint64_t{e.seq});
  w.key("kind").value(to_string(e.kind));
  w.key("prev").value(to_hex(e.prev_digest));
  w.key("digest").value(to_hex(e.digest));
  w.key("payload").raw(e.payload);
  w.end_object();
  return std::move(w).str();
}

inline LedgerEntry entry_from_line(std::string_view line, std::uint64_t line_index) {
  static constexpr std::string_view kPayloadKey = "\"payload\":";
  const auto pos = line.find(kPayloadKey);
  if (pos == std::string_view::npos || line.empty() || line.back() != '}') {
    throw BrokenChainError(line_index, "record is not a ledger entry");
  }
  try {
    const auto j = nlohmann::json::parse(line);
    LedgerEntry e;
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto kind = entry_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw BrokenChainError(line_index, "unknown entry kind");
    e.kind = *kind;
    e.prev_digest = digest_from_hex(j.at("prev").get<std::string>());
    e.digest = digest_from_hex(j.at("digest").get<std::string>());
    const auto start = pos + kPayloadKey.size();
    e.payload = std::string(line.substr(start, line.size() - 1 - start));
    if (entry_to_line(e) != line) throw BrokenChainError(line_index, "record is not in canonical form");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw BrokenChainError(line_index, std::string("unparseable record: ") + ex.what());
  } catch (const BrokenChainError&) {
    throw;
  } catch (const Error& ex) {
    throw BrokenChainError(line_index, ex.what());
  }
}

inline void write_log(std::ostream& out, std::span<const LedgerEntry> entries) {
  for (const auto& e : entries) out << entry_to_line(e) << '\n';
}

inline std::vector<LedgerEntry> read_log(std::istream& in) {
  std::vector<LedgerEntry> entries;
  std::string line;
  std::uint64_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    entries.push_back(entry_from_line(line, index++));
  }
  return entries;
}

/// Source of career statistics for pending requests (the oracle side).
using OracleFetch = std::function<CareerStats(const std::string& researcher_id)>;

/// Single-writer front end over the pure ledger functions. Readers take
/// immutable snapshots; writers are serialized by an internal mutex.
class Ledger {
 public:
  explicit Ledger(LedgerState initial)
      : state_(std::make_shared<const LedgerState>(std::move(initial))) {}

  std::shared_ptr<const LedgerState> snapshot() const {
    std::lock_guard lock(mutex_);
    return state_;
  }

  ScoreRequest submit(const std::string& researcher_id) {
    std::lock_guard lock(mutex_);
    auto [next, req] = submit_request(*state_, researcher_id);
    state_ = std::make_shared<const LedgerState>(std::move(next));
    return req;
  }

  ScoreBreakdown fulfill(const OracleFulfillment& f) {
    std::lock_guard lock(mutex_);
    auto [next, result] = apply_fulfillment(*state_, f);
    state_ = std::make_shared<const LedgerState>(std::move(next));
    return result;
  }

  /// Fetches outside the lock, then applies under it.
  ScoreBreakdown fulfill_with(std::uint64_t request_id, const OracleFetch& oracle) {
    std::string researcher;
    {
      std::lock_guard lock(mutex_);
      const auto it = state_->pending.find(request_id);
      if (it == state_->pending.end()) {
        throw Error(ErrorCode::UnknownRequest, "no pending request " + std::to_string(request_id));
      }
      researcher = it->second.researcher_id;
    }
    CareerStats stats = oracle(researcher);
    return fulfill(OracleFulfillment{request_id, std::move(stats)});
  }

  /// Full round trip: request, oracle fetch, update, score.
  std::pair<ScoreRequest, ScoreBreakdown> submit_and_fulfill(const std::string& researcher_id,
                                                             const OracleFetch& oracle) {
    const ScoreRequest req = submit(researcher_id);
    return {req, fulfill_with(req.request_id, oracle)};
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const LedgerState> state_;
};

}  // namespace science_index
