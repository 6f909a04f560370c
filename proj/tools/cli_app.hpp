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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "science_index/science_index.hpp"
#include "science_index/httplib_transport.hpp"

namespace science_index::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIntegrity = 2;

struct ModelSource {
  std::string model_path;
  std::string preset;
  double delta_mean = 0.0;
  double delta_std = 1.0;
};

struct FetchOptions {
  std::string mode = "fixture";
  std::string cache_dir = "fixtures";
  double rate_limit = 1.0;
  int timeout = 30;
  int retries = 3;
  std::string datacite_map;
  std::string s2_base;
  std::string datacite_base;
};

struct Options {
  bool json = false;
  ModelSource model;
  FetchOptions fetch;

  // train
  std::string authors;
  std::string papers;
  std::string shares;
  std::string format = "prejoined";
  std::string feature_set = "base";
  double ridge = 1e-9;
  bool strict = false;
  bool freeze_delta = false;
  std::string out;

  // score
  std::optional<Count> career;
  std::optional<Count> paper_count;
  std::optional<Count> citations;
  std::optional<Count> h_index;
  Count share_count = 0;
  std::string researcher;
  std::string score_mode;
  double share_weight = 0.0;

  // ledger
  std::string ledger;
  bool async = false;
  bool drain = false;
  bool score_before_update = false;
  bool dedupe = false;

  // evaluation / calibration
  std::string population;
  std::string synthetic;
  std::string scores;
  std::size_t bins = 20;
  std::optional<double> target;
  std::string config;
  std::string out_dir;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
}

inline std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

inline ModelState load_model(const ModelSource& src) {
  if (!src.preset.empty()) {
    if (src.preset != "paper") throw Error(ErrorCode::InvalidArgument, "unknown preset '" + src.preset + "'");
    return paper_preset(src.delta_mean, src.delta_std);
  }
  if (src.model_path.empty()) throw Error(ErrorCode::InvalidArgument, "either --model or --preset is required");
  ModelState model = model_from_canonical(read_file(src.model_path));
  validate(model);
  return model;
}

inline FetchPolicy make_policy(const FetchOptions& f) {
  FetchPolicy p;
  p.mode = fetch_mode_from_string(f.mode);
  p.cache_dir = f.cache_dir;
  p.rate_limit = f.rate_limit;
  p.timeout = std::chrono::seconds(f.timeout);
  p.retries = f.retries;
  if (!f.s2_base.empty()) p.semantic_scholar_base = f.s2_base;
  if (!f.datacite_base.empty()) p.datacite_base = f.datacite_base;
  if (!f.datacite_map.empty()) p.datacite_queries = load_datacite_mapping(f.datacite_map);
  return p;
}

inline std::unique_ptr<ScholarlyClient> make_client(const FetchOptions& f) {
  const FetchPolicy policy = make_policy(f);
  std::shared_ptr<HttpTransport> transport;
  if (policy.mode != FetchMode::FixtureOnly) transport = make_network_transport(policy.timeout);
  return std::make_unique<ScholarlyClient>(policy, transport);
}

inline ScoreMode resolve_mode(const std::string& requested, const ModelState& model) {
  if (!requested.empty()) return score_mode_from_string(requested);
  return model.config.feature_set == FeatureSet::Base ? ScoreMode::ShareBonus : ScoreMode::Literal;
}

inline std::string score_json(const ScoreBreakdown& s) {
  CanonicalWriter w;
  w.begin_object();
  w.key("beta_raw").value(s.beta_raw);
  w.key("beta_scaled").value(s.beta_scaled);
  w.key("delta").value(s.delta);
  w.key("epsilon").value(s.epsilon);
  w.key("phi").raw(fmt(phi_for_display(s.phi), 4));
  w.key("model_version").value(std::uint64_t{s.model_version});
  w.end_object();
  return std::move(w).str();
}

inline void print_score(std::ostream& out, const ScoreBreakdown& s, bool json) {
  if (json) {
    out << score_json(s) << '\n';
    return;
  }
  out << "beta (raw)      " << fmt(s.beta_raw) << '\n'
      << "beta (scaled)   " << fmt(s.beta_scaled) << '\n'
      << "delta           " << fmt(s.delta) << '\n'
      << "epsilon         " << fmt(s.epsilon) << '\n'
      << "SCIENCE-index   " << fmt(phi_for_display(s.phi), 4) << '\n'
      << "model version   " << s.model_version << '\n';
}

inline std::vector<CareerStats> load_population(const Options& o) {
  if (!o.population.empty()) {
    DatasetManifest m;
    m.authors_path = o.population;
    m.format = DatasetFormat::PrejoinedStats;
    auto reader = load_dataset(m, o.strict);
    return read_all_stats(reader);
  }
  if (!o.synthetic.empty()) {
    const auto j = parse_canonical(read_file(o.synthetic), o.synthetic, ErrorCode::InvalidArgument);
    return generate_population(population_spec_from_json(j));
  }
  throw Error(ErrorCode::InvalidArgument, "either --population or --synthetic is required");
}

/// Model from --model/--preset, or a base fit on the population itself.
inline ModelState model_for_population(const Options& o, std::span<const CareerStats> population) {
  if (!o.model.preset.empty() || !o.model.model_path.empty()) return load_model(o.model);
  std::vector<FeatureVector> rows;
  for (const auto& s : population) rows.push_back(FeatureVector::from_stats(s, FeatureSet::Base));
  return fit_batch(ModelConfig{FeatureSet::Base, o.ridge}, rows);
}

// Subcommands ---------------------------------------------------------------

inline int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  DatasetManifest manifest;
  manifest.authors_path = o.authors;
  if (!o.papers.empty()) manifest.papers_path = o.papers;
  if (!o.shares.empty()) manifest.share_map_path = o.shares;
  manifest.format = dataset_format_from_string(o.format);
  const ModelConfig config{feature_set_from_string(o.feature_set), o.ridge};

  auto reader = load_dataset(manifest, o.strict);
  std::vector<FeatureVector> rows;
  while (auto stats = reader.next_stats()) rows.push_back(FeatureVector::from_stats(*stats, config.feature_set));
  for (const auto& issue : reader.issues()) err << "warning: line " << issue.line << ": " << issue.message << '\n';
  for (const auto& warning : reader.warnings()) err << "warning: " << warning << '\n';

  ModelState model = fit_batch(config, rows);
  model.policy.pin_delta_stats = o.freeze_delta;
  write_file(o.out, to_canonical(model) + "\n");

  const auto [mean, std] = delta_statistics(model);
  if (o.json) {
    CanonicalWriter w;
    w.begin_object();
    w.key("rows").value(std::uint64_t{rows.size()});
    w.key("weights").values(model.weights);
    w.key("delta_mean").value(mean);
    w.key("delta_std").value(std);
    w.end_object();
    out << std::move(w).str() << '\n';
  } else {
    out << "trained on " << rows.size() << " rows (" << to_string(config.feature_set) << " features)\n";
    const char* names[] = {"intercept", "career_length", "paper_count", "citation_count", "share_count^2"};
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      out << "  w" << i << " " << std::left << std::setw(15) << names[i] << std::setprecision(10)
          << model.weights[i] << '\n';
    }
    out << "  delta mean " << fmt(mean) << ", std " << fmt(std) << '\n';
    out << "model written to " << o.out << '\n';
  }
  return kExitOk;
}

inline int cmd_score(const Options& o, std::ostream& out, std::ostream&) {
  const ModelState model = load_model(o.model);
  CareerStats stats;
  if (!o.researcher.empty()) {
    stats = make_client(o.fetch)->fetch_career_stats(o.researcher);
  } else {
    if (!o.career || !o.paper_count || !o.citations || !o.h_index) {
      throw Error(ErrorCode::InvalidArgument,
                  "give --researcher, or all of --career, --papers, --citations and --h-index");
    }
    stats.author_id = "cli";
    stats.career_length = *o.career;
    stats.publication_count = *o.paper_count;
    stats.citation_count = *o.citations;
    stats.h_index = *o.h_index;
    stats.data_share_count = o.share_count;
  }
  print_score(out, score(stats, model, resolve_mode(o.score_mode, model), o.share_weight), o.json);
  return kExitOk;
}

inline std::vector<LedgerEntry> read_ledger_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open ledger " + path);
  return read_log(in);
}

inline int cmd_submit(const Options& o, std::ostream& out, std::ostream&) {
  if (o.ledger.empty()) throw Error(ErrorCode::InvalidArgument, "--ledger is required");
  LedgerState state;
  std::size_t persisted = 0;
  if (std::filesystem::exists(o.ledger) && std::filesystem::file_size(o.ledger) > 0) {
    const auto entries = read_ledger_file(o.ledger);
    state = replay(entries);
    persisted = entries.size();
  } else {
    const ModelState model = load_model(o.model);
    LedgerConfig cfg;
    cfg.score_mode = resolve_mode(o.score_mode, model);
    cfg.share_weight = o.share_weight;
    cfg.score_before_update = o.score_before_update;
    cfg.dedupe_researchers = o.dedupe;
    state = genesis(model, cfg);
  }

  Ledger ledger(std::move(state));
  std::unique_ptr<ScholarlyClient> client;
  auto oracle = [&](const std::string& id) {
    if (!client) client = make_client(o.fetch);
    return client->fetch_career_stats(id);
  };

  std::vector<std::pair<ScoreRequest, ScoreBreakdown>> results;
  std::optional<ScoreRequest> queued;
  if (!o.researcher.empty()) {
    if (o.async) {
      queued = ledger.submit(o.researcher);
    } else {
      results.push_back(ledger.submit_and_fulfill(o.researcher, oracle));
    }
  }
  if (o.drain) {
    const auto before = ledger.snapshot();  // keeps the pending set alive while fulfilling
    for (const auto& [id, req] : before->pending) results.emplace_back(req, ledger.fulfill_with(id, oracle));
  }

  const auto final_state = ledger.snapshot();
  {
    std::ofstream file(o.ledger, std::ios::binary | std::ios::app);
    write_log(file, std::span(final_state->entries).subspan(persisted));
    if (!file) throw Error(ErrorCode::FileNotFound, "cannot append to ledger " + o.ledger);
  }

  if (queued) {
    if (o.json) {
      out << "{\"request_id\":" << queued->request_id << ",\"pending\":" << final_state->pending.size() << "}\n";
    } else {
      out << "request " << queued->request_id << " queued for " << queued->researcher_id << " ("
          << final_state->pending.size() << " pending)\n";
    }
  }
  for (const auto& [req, s] : results) {
    if (!o.json) out << "request " << req.request_id << " (" << req.researcher_id << ")\n";
    print_score(out, s, o.json);
  }
  if (!o.json) out << "ledger head " << to_hex(final_state->head()) << " (" << final_state->entries.size()
                   << " entries)\n";
  return kExitOk;
}

inline int cmd_replay(const Options& o, std::ostream& out, std::ostream&) {
  const auto entries = read_ledger_file(o.ledger);
  const LedgerState state = replay(entries);
  if (o.json) {
    CanonicalWriter w;
    w.begin_object();
    w.key("entries").value(std::uint64_t{state.entries.size()});
    w.key("digest").value(to_hex(state.head()));
    w.key("model_version").value(std::uint64_t{state.model.version});
    w.key("pending").value(std::uint64_t{state.pending.size()});
    w.key("scores").value(std::uint64_t{state.emitted_scores.size()});
    w.end_object();
    out << std::move(w).str() << '\n';
  } else {
    out << "replayed " << state.entries.size() << " entries; model version " << state.model.version << ", "
        << state.pending.size() << " pending, " << state.emitted_scores.size() << " scores\n";
    out << "final digest " << to_hex(state.head()) << '\n';
  }
  return kExitOk;
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream&) {
  const auto entries = read_ledger_file(o.ledger);
  const Digest head = verify_chain(entries);
  if (o.json) {
    out << "{\"entries\":" << entries.size() << ",\"digest\":\"" << to_hex(head) << "\",\"valid\":true}\n";
  } else {
    out << "chain valid: " << entries.size() << " entries\nfinal digest " << to_hex(head) << '\n';
  }
  return kExitOk;
}

inline int cmd_calibrate(const Options& o, std::ostream& out, std::ostream&) {
  const auto population = load_population(o);
  const ModelState model = model_for_population(o, population);
  const double target = o.target.value_or(0.27);
  const double weight = calibrate_share_weight(model, population, target);
  const auto check = run_share_shift_experiment(population, model, weight);
  if (o.json) {
    CanonicalWriter w;
    w.begin_object();
    w.key("share_weight").value(weight);
    w.key("target_shift").value(target);
    w.key("mean_shift").value(check.mean_shift);
    w.end_object();
    out << std::move(w).str() << '\n';
  } else {
    out << "share weight " << std::setprecision(10) << weight << " gives mean shift " << fmt(check.mean_shift, 4)
        << " (target " << fmt(target, 4) << ")\n";
  }
  return kExitOk;
}

inline int cmd_eval_density(const Options& o, std::ostream& out, std::ostream&) {
  std::vector<double> values;
  if (!o.scores.empty()) {
    std::ifstream in(o.scores);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + o.scores);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        values.push_back(std::stod(line));
      } catch (const std::exception&) {
        throw Error(ErrorCode::RowParseError, o.scores + ": '" + line + "' is not a number");
      }
    }
  } else {
    const auto population = load_population(o);
    const ModelState model = model_for_population(o, population);
    const ScoreMode mode = resolve_mode(o.score_mode, model);
    for (const auto& s : population) values.push_back(score(s, model, mode, o.share_weight).phi);
  }
  const auto density = export_density(values, o.bins, "science-index");
  if (o.out.empty()) {
    write_density_csv(out, density);
  } else {
    std::ostringstream csv;
    write_density_csv(csv, density);
    write_file(o.out, csv.str());
    out << "wrote " << o.bins << " bins over " << values.size() << " values to " << o.out << '\n';
  }
  return kExitOk;
}

inline int cmd_eval_share_shift(const Options& o, std::ostream& out, std::ostream&) {
  const auto population = load_population(o);
  const ModelState model = model_for_population(o, population);
  const double weight = o.target ? calibrate_share_weight(model, population, *o.target) : o.share_weight;
  const auto result = run_share_shift_experiment(population, model, weight);

  if (!o.out_dir.empty()) {
    std::vector<double> before;
    std::vector<double> after;
    for (const auto& s : population) {
      CareerStats zeroed = s;
      zeroed.data_share_count = 0;
      before.push_back(score(zeroed, model, ScoreMode::ShareBonus, weight).phi);
      after.push_back(score(s, model, ScoreMode::ShareBonus, weight).phi);
    }
    for (const auto& [name, vals] : {std::pair{"base", &before}, std::pair{"with_shares", &after}}) {
      std::ostringstream csv;
      write_density_csv(csv, export_density(*vals, o.bins, name));
      write_file(std::filesystem::path(o.out_dir) / (std::string(name) + "_density.csv"), csv.str());
    }
  }

  double mean_shares = 0.0;
  for (const auto& s : population) mean_shares += static_cast<double>(s.data_share_count);
  mean_shares /= static_cast<double>(population.size());
  if (o.json) {
    CanonicalWriter w;
    w.begin_object();
    w.key("authors").value(std::uint64_t{population.size()});
    w.key("mean_share_count").value(mean_shares);
    w.key("share_weight").value(weight);
    w.key("mean_shift").value(result.mean_shift);
    w.end_object();
    out << std::move(w).str() << '\n';
  } else {
    out << population.size() << " authors, mean share count " << fmt(mean_shares, 2) << '\n'
        << "share weight " << std::setprecision(10) << weight << '\n'
        << "mean SCIENCE-index shift " << fmt(result.mean_shift, 4) << '\n';
  }
  return kExitOk;
}

inline int cmd_eval_north_south(const Options& o, std::ostream& out, std::ostream&) {
  PopulationSpec north;
  north.id_prefix = "north";
  PopulationSpec south = north;
  south.id_prefix = "south";
  south.resource_scale = 0.7;
  south.seed = 2;
  ModelConfig config;
  std::size_t bins = o.bins;
  if (!o.config.empty()) {
    const auto j = parse_canonical(read_file(o.config), o.config, ErrorCode::InvalidArgument);
    if (j.contains("north")) north = population_spec_from_json(j.at("north"), north);
    if (j.contains("south")) south = population_spec_from_json(j.at("south"), south);
    if (j.contains("model")) {
      config.feature_set = feature_set_from_string(j.at("model").value("feature_set", std::string("base")));
      config.ridge_lambda = j.at("model").value("ridge_lambda", config.ridge_lambda);
    }
    if (j.contains("bins")) bins = json_count(j.at("bins"), "bins", ErrorCode::InvalidArgument);
  }
  const auto report = run_north_south_experiment(north, south, config, bins);

  if (!o.out_dir.empty()) {
    const std::filesystem::path dir(o.out_dir);
    for (const auto* d : {&report.north.h_density, &report.south.h_density, &report.north.phi_density,
                          &report.south.phi_density}) {
      std::string name = d->label;
      std::replace(name.begin(), name.end(), ' ', '_');
      std::ostringstream csv;
      write_density_csv(csv, *d);
      write_file(dir / (name + ".csv"), csv.str());
    }
  }
  if (o.json) {
    out << to_canonical(report) << '\n';
  } else {
    out << "group   mean h-index   mean SCIENCE-index\n"
        << "north   " << std::setw(12) << fmt(report.north.mean_h, 3) << "   " << fmt(report.north.mean_phi, 4) << '\n'
        << "south   " << std::setw(12) << fmt(report.south.mean_h, 3) << "   " << fmt(report.south.mean_phi, 4) << '\n'
        << "h gap " << fmt(report.h_gap, 3) << ", SCIENCE-index gap " << fmt(report.phi_gap, 4) << ", ratio "
        << fmt(report.gap_ratio, 4) << '\n';
  }
  return kExitOk;
}

}  // namespace detail

inline void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model.model_path, "Model file written by `train`");
  cmd->add_option("--preset", o.model.preset, "Built-in model (\"paper\": published coefficients)");
  cmd->add_option("--delta-mean", o.model.delta_mean, "Pinned delta mean for --preset");
  cmd->add_option("--delta-std", o.model.delta_std, "Pinned delta std for --preset");
}

inline void add_fetch_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--fetch-mode", o.fetch.mode, "fixture | live | record")->check(CLI::IsMember({"fixture", "live", "record"}));
  cmd->add_option("--cache-dir", o.fetch.cache_dir, "Fixture / cache directory");
  cmd->add_option("--rate-limit", o.fetch.rate_limit, "Requests per second per API");
  cmd->add_option("--timeout", o.fetch.timeout, "Request timeout (seconds)");
  cmd->add_option("--retries", o.fetch.retries, "Retries with exponential backoff");
  cmd->add_option("--datacite-map", o.fetch.datacite_map, "TSV: researcher_id -> DataCite query");
  cmd->add_option("--s2-base", o.fetch.s2_base, "Semantic Scholar base URL");
  cmd->add_option("--datacite-base", o.fetch.datacite_base, "DataCite base URL");
}

inline void add_population_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--population", o.population, "Prejoined TSV of career statistics");
  cmd->add_option("--synthetic", o.synthetic, "JSON population spec for a synthetic cohort");
  cmd->add_option("--ridge", o.ridge, "Ridge penalty when fitting on the population");
  add_model_options(cmd, o);
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"SCIENCE-index: regression-based researcher scoring with a simulated oracle ledger"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_flag("--json", o.json, "Structured output");

  auto* train = app.add_subcommand("train", "Fit the regression on a dataset");
  train->add_option("--authors", o.authors, "Authors file (prejoined TSV or author NDJSON)")->required();
  train->add_option("--papers", o.papers, "Paper NDJSON for the authors-papers format");
  train->add_option("--shares", o.shares, "Share-count TSV to join");
  train->add_option("--format", o.format, "prejoined | authors-papers")->check(CLI::IsMember({"prejoined", "authors-papers"}));
  train->add_option("--feature-set", o.feature_set, "base | augmented")->check(CLI::IsMember({"base", "augmented"}));
  train->add_option("--ridge", o.ridge, "Ridge penalty on non-intercept weights");
  train->add_flag("--strict", o.strict, "Fail on the first malformed row");
  train->add_flag("--freeze-delta", o.freeze_delta, "Pin delta statistics under later online updates");
  train->add_option("--out", o.out, "Model output path")->required();

  auto* score_cmd = app.add_subcommand("score", "Score one researcher");
  add_model_options(score_cmd, o);
  add_fetch_options(score_cmd, o);
  score_cmd->add_option("--career", o.career, "Career length in years");
  score_cmd->add_option("--papers", o.paper_count, "Publication count");
  score_cmd->add_option("--citations", o.citations, "Citation count");
  score_cmd->add_option("--h-index", o.h_index, "Observed h-index");
  score_cmd->add_option("--shares", o.share_count, "Data share count");
  score_cmd->add_option("--researcher", o.researcher, "Fetch statistics for this Semantic Scholar id");
  score_cmd->add_option("--mode", o.score_mode, "literal | share-bonus");
  score_cmd->add_option("--share-weight", o.share_weight, "Weight on share count^2 in share-bonus mode");

  auto* submit = app.add_subcommand("submit", "Request, fetch, update and score through the ledger");
  submit->add_option("--ledger", o.ledger, "Ledger log path")->required();
  submit->add_option("--researcher", o.researcher, "Semantic Scholar id");
  submit->add_flag("--async", o.async, "Only record the request; fulfil later with --drain");
  submit->add_flag("--drain", o.drain, "Fulfil every pending request");
  submit->add_option("--mode", o.score_mode, "Genesis: literal | share-bonus");
  submit->add_option("--share-weight", o.share_weight, "Genesis: share-bonus weight");
  submit->add_flag("--score-before-update", o.score_before_update, "Genesis: score under the pre-update model");
  submit->add_flag("--dedupe", o.dedupe, "Genesis: one observation per researcher");
  add_model_options(submit, o);
  add_fetch_options(submit, o);

  auto* replay_cmd = app.add_subcommand("replay", "Re-execute a ledger log and print its final digest");
  replay_cmd->add_option("--ledger", o.ledger, "Ledger log path")->required();
  auto* verify = app.add_subcommand("verify", "Check a ledger log's digest chain");
  verify->add_option("--ledger", o.ledger, "Ledger log path")->required();

  auto* calibrate = app.add_subcommand("calibrate", "Find the share weight giving a target mean shift");
  add_population_options(calibrate, o);
  calibrate->add_option("--target", o.target, "Target mean SCIENCE-index shift (default 0.27)");

  auto* density = app.add_subcommand("eval-density", "Histogram of scores as CSV");
  density->add_option("--scores", o.scores, "One score per line");
  add_population_options(density, o);
  density->add_option("--mode", o.score_mode, "literal | share-bonus");
  density->add_option("--share-weight", o.share_weight, "Share-bonus weight");
  density->add_option("--bins", o.bins, "Number of bins (>= 2)");
  density->add_option("--out", o.out, "CSV output path (stdout when absent)");

  auto* shift = app.add_subcommand("eval-share-shift", "Mean SCIENCE-index shift from data sharing");
  add_population_options(shift, o);
  shift->add_option("--share-weight", o.share_weight, "Share-bonus weight");
  shift->add_option("--target", o.target, "Calibrate the weight to this mean shift instead");
  shift->add_option("--bins", o.bins, "Bins for density CSVs");
  shift->add_option("--out-dir", o.out_dir, "Write before/after density CSVs here");

  auto* ns = app.add_subcommand("eval-north-south", "Resource-disparity convergence experiment");
  ns->add_option("--spec", o.config, "JSON experiment spec");
  ns->add_option("--bins", o.bins, "Bins for density CSVs");
  ns->add_option("--out-dir", o.out_dir, "Write density CSVs here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*train) return detail::cmd_train(o, out, err);
    if (*score_cmd) return detail::cmd_score(o, out, err);
    if (*submit) return detail::cmd_submit(o, out, err);
    if (*replay_cmd) return detail::cmd_replay(o, out, err);
    if (*verify) return detail::cmd_verify(o, out, err);
    if (*calibrate) return detail::cmd_calibrate(o, out, err);
    if (*density) return detail::cmd_eval_density(o, out, err);
    if (*shift) return detail::cmd_eval_share_shift(o, out, err);
    if (*ns) return detail::cmd_eval_north_south(o, out, err);
  } catch (const BrokenChainError& e) {
    err << "integrity violation " << e.message() << '\n';
    return kExitIntegrity;
  } catch (const Error& e) {
    err << "error: " << describe(e.code()) << ": " << e.message() << '\n';
    return e.code() == ErrorCode::ReplayMismatch ? kExitIntegrity : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace science_index::cli
