// Copyright 2026 The Tagscope Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tagscope/cli.hpp"
#include "tagscope/corpus.hpp"
#include "tagscope/drift.hpp"
#include "tagscope/error.hpp"
#include "tagscope/report_io.hpp"
#include "tagscope/social.hpp"
#include "tagscope/spatial.hpp"
#include "tagscope/stats.hpp"
#include "tagscope/synthetic.hpp"
#include "tagscope/temporal.hpp"

namespace tagscope {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Options {
  std::string input;
  std::string format;
  std::string friends;
  std::string locations;
  std::string out = "tagscope_out";
  std::uint64_t seed = 1;
  bool strict = false;
  std::size_t threads = 0;

  // synth
  std::size_t users = SyntheticSpec{}.user_count;
  std::size_t hashtags = SyntheticSpec{}.hashtag_count;
  std::size_t posts = SyntheticSpec{}.post_count;
  std::size_t drifted = SyntheticSpec{}.drifted_count;
  double homophily = SyntheticSpec{}.homophily;
  double drift_owner_share = SyntheticSpec{}.drift_owner_share;

  // stats
  std::size_t stats_top = 20;

  // temporal
  int first_year = 2012;
  std::size_t top_k = 1000;
  std::size_t k_min = 2;
  std::size_t k_max = 10;
  std::size_t restarts = 10;

  // spatial
  std::size_t categories = 10;

  // drift
  std::vector<int> years = {2012, 2013, 2014, 2015};
  std::size_t drift_top_k = 1000;
  std::string arch = "skipgram";
  std::size_t dim = 300;
  std::size_t window = 0;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr = 0.025;
  std::size_t min_count = 5;
  bool entropy_bits = false;

  // social
  std::size_t walk_times = 80;
  std::size_t walk_length = 120;
  std::size_t walk_dim = 512;
  std::size_t context_radius = 10;
  std::size_t walk_negatives = 5;
  std::size_t walk_epochs = 1;
};

void add_options(CLI::App& app, Options& o) {
  app.add_option("--input", o.input, "Post corpus (.jsonl or .csv)");
  app.add_option("--format", o.format, "Corpus format, overrides the file extension")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  app.add_option("--friends", o.friends, "Friendship CSV (user_a,user_b)");
  app.add_option("--locations", o.locations, "Location category CSV (location,category)");
  app.add_option("--out", o.out, "Output directory (synth: corpus file path)");
  app.add_option("--seed", o.seed, "Base seed for every stochastic step");
  app.add_flag("--strict", o.strict, "Single-threaded, bitwise reproducible run");
  app.add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");

  app.add_option("--users", o.users, "synth: number of users");
  app.add_option("--hashtags", o.hashtags, "synth: number of distinct hashtags");
  app.add_option("--posts", o.posts, "synth: community and background posts");
  app.add_option("--drifted", o.drifted, "synth: planted drifting hashtags");
  app.add_option("--homophily", o.homophily, "synth: share of friend pairs inside a community")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--drift-owner-share", o.drift_owner_share, "synth: owner share of drifted posts")
      ->check(CLI::Range(0.0, 1.0));

  app.add_option("--stats-top", o.stats_top, "stats: rows in the top hashtag table");

  app.add_option("--first-year", o.first_year, "temporal: first year of the 16-quarter window");
  app.add_option("--top-k", o.top_k, "temporal: hashtags to cluster");
  app.add_option("--k-min", o.k_min, "temporal: smallest k")->check(CLI::Range(2, 10));
  app.add_option("--k-max", o.k_max, "temporal: largest k")->check(CLI::Range(2, 10));
  app.add_option("--restarts", o.restarts, "temporal: k-means restarts per k");

  app.add_option("--categories", o.categories, "spatial: categories to report (0 = all)");

  app.add_option("--years", o.years, "drift: consecutive years to embed")->delimiter(',');
  app.add_option("--drift-top-k", o.drift_top_k, "drift: hashtags to track");
  app.add_option("--arch", o.arch, "drift: skipgram or cbow")->check(CLI::IsMember({"skipgram", "cbow"}));
  app.add_option("--dim", o.dim, "drift: embedding dimension");
  app.add_option("--window", o.window, "drift: context radius (0 = whole post)");
  app.add_option("--negatives", o.negatives, "drift: negative samples");
  app.add_option("--epochs", o.epochs, "drift: training epochs");
  app.add_option("--lr", o.lr, "drift: initial learning rate");
  app.add_option("--min-count", o.min_count, "drift: minimum token frequency");
  app.add_flag("--entropy-bits", o.entropy_bits, "drift: report entropy in bits instead of nats");

  app.add_option("--walk-times", o.walk_times, "social: walks per user");
  app.add_option("--walk-length", o.walk_length, "social: steps per walk");
  app.add_option("--walk-dim", o.walk_dim, "social: profile dimension");
  app.add_option("--context-radius", o.context_radius, "social: CBOW context radius");
  app.add_option("--walk-negatives", o.walk_negatives, "social: negative samples");
  app.add_option("--walk-epochs", o.walk_epochs, "social: training epochs over the walks");
}

ordered_json echo(const Options& o) {
  return {{"input", o.input},
          {"format", o.format},
          {"friends", o.friends},
          {"locations", o.locations},
          {"out", o.out},
          {"seed", o.seed},
          {"strict", o.strict},
          {"threads", o.threads},
          {"users", o.users},
          {"hashtags", o.hashtags},
          {"posts", o.posts},
          {"drifted", o.drifted},
          {"homophily", o.homophily},
          {"drift_owner_share", o.drift_owner_share},
          {"stats_top", o.stats_top},
          {"first_year", o.first_year},
          {"top_k", o.top_k},
          {"k_min", o.k_min},
          {"k_max", o.k_max},
          {"restarts", o.restarts},
          {"categories", o.categories},
          {"years", o.years},
          {"drift_top_k", o.drift_top_k},
          {"arch", o.arch},
          {"dim", o.dim},
          {"window", o.window},
          {"negatives", o.negatives},
          {"epochs", o.epochs},
          {"lr", o.lr},
          {"min_count", o.min_count},
          {"entropy_bits", o.entropy_bits},
          {"walk_times", o.walk_times},
          {"walk_length", o.walk_length},
          {"walk_dim", o.walk_dim},
          {"context_radius", o.context_radius},
          {"walk_negatives", o.walk_negatives},
          {"walk_epochs", o.walk_epochs}};
}

std::size_t worker_threads(const Options& o) {
  if (o.strict) return 1;
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

SyntheticSpec synthetic_spec(const Options& o) {
  SyntheticSpec spec;
  spec.seed = o.seed;
  spec.user_count = o.users;
  spec.hashtag_count = o.hashtags;
  spec.post_count = o.posts;
  spec.drifted_count = o.drifted;
  spec.homophily = o.homophily;
  spec.drift_owner_share = o.drift_owner_share;
  return spec;
}

temporal::TemporalConfig temporal_config(const Options& o) {
  temporal::TemporalConfig c;
  c.range = {{o.first_year, 1}, {o.first_year + 3, 4}};
  c.top_k = o.top_k;
  c.k_min = o.k_min;
  c.k_max = o.k_max;
  c.select.seed = o.seed;
  c.select.restarts = o.restarts;
  c.select.threads = worker_threads(o);
  return c;
}

drift::DriftConfig drift_config(const Options& o) {
  drift::DriftConfig c;
  c.years = o.years;
  c.top_k = o.drift_top_k;
  c.train.mode = o.arch == "cbow" ? Architecture::cbow : Architecture::skipgram;
  c.train.dimension = o.dim;
  if (o.window > 0) c.train.window = o.window;
  c.train.negatives = o.negatives;
  c.train.epochs = o.epochs;
  c.train.initial_lr = o.lr;
  c.train.min_count = o.min_count;
  c.train.seed = o.seed;
  c.train.strict = o.strict;
  c.train.threads = worker_threads(o);
  c.log_base = o.entropy_bits ? drift::LogBase::bits : drift::LogBase::nats;
  return c;
}

social::WalkConfig walk_config(const Options& o) {
  social::WalkConfig c;
  c.walk_times = o.walk_times;
  c.walk_length = o.walk_length;
  c.dimension = o.walk_dim;
  c.context_radius = o.context_radius;
  c.negatives = o.walk_negatives;
  c.epochs = o.walk_epochs;
  c.seed = o.seed;
  c.strict = o.strict;
  c.threads = worker_threads(o);
  return c;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(std::string("missing ") + what + " (pass --" + what + ")");
  if (!fs::is_regular_file(path)) throw Error(std::string(what) + " file not found: " + path);
}

Corpus load_inputs(const Options& o, std::ostream& err) {
  require_file(o.input, "input");
  const Format format = o.format.empty() ? format_from_path(o.input) : parse_format(o.format);
  std::vector<std::string> warnings;
  Corpus corpus = load_corpus(o.input, format, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  if (!o.friends.empty()) {
    require_file(o.friends, "friends");
    load_friendships(o.friends, corpus);
  }
  if (!o.locations.empty()) {
    require_file(o.locations, "locations");
    load_location_categories(o.locations, corpus);
  }
  return corpus;
}

struct Artifacts {
  std::vector<fs::path> files;
  ordered_json seeds = ordered_json::object();

  void add(const std::vector<fs::path>& more) { files.insert(files.end(), more.begin(), more.end()); }
};

void run_stats(const Corpus& corpus, const Options& o, const fs::path& dir, Artifacts& art, std::ostream& out) {
  const auto summary = stats::report_stats(corpus, o.stats_top);
  out << "posts " << summary.posts << ", users " << summary.users << ", hashtags " << summary.hashtags
      << ", friendships " << summary.friendships << '\n';
  if (!summary.hashtags_per_post.empty()) {
    out << "posts without hashtags: " << io::format_number(summary.hashtags_per_post[0]) << '\n';
  }
  for (const auto& t : summary.top) out << "  " << std::left << std::setw(24) << t.hashtag << ' ' << t.shares << '\n';
  art.add(io::write_stats(summary, dir));
}

void run_temporal(const Corpus& corpus, const Options& o, const fs::path& dir, Artifacts& art, std::ostream& out) {
  const auto config = temporal_config(o);
  const auto report = temporal::analyze_temporal(corpus, config);
  const auto sizes = report.clusters.cluster_sizes();
  out << "temporal: " << report.profiles.size() << " hashtags, k = " << report.clusters.k
      << ", silhouette " << io::format_number(report.clusters.silhouette) << '\n';
  for (std::size_t c = 0; c < report.clusters.k; ++c) {
    out << "  cluster " << c << ": " << temporal::to_string(report.clusters.labels[c]) << " (" << sizes[c] << ")\n";
  }
  art.seeds["temporal"] = config.select.seed;
  art.add(io::write_temporal(report, dir));
}

void run_spatial(const Corpus& corpus, const Options& o, const fs::path& dir, Artifacts& art, std::ostream& out) {
  const auto stats = spatial::category_propensity(corpus, o.categories);
  out << "spatial: " << stats.size() << " categories\n";
  for (const auto& s : stats) {
    out << "  " << std::left << std::setw(16) << s.category << " visits " << s.visits << ", delta "
        << io::format_number(s.delta) << '\n';
  }
  art.add(io::write_spatial(stats, dir));
}

void run_drift(const Corpus& corpus, const Options& o, const fs::path& dir, Artifacts& art, std::ostream& out) {
  const auto config = drift_config(o);
  const auto report = drift::drift_analysis(corpus, config);
  out << "drift: " << report.hashtags.size() << " hashtags over " << report.years.size() << " years\n";
  if (report.entropy_correlation) {
    out << "  entropy vs displacement r = " << io::format_number(*report.entropy_correlation) << '\n';
  }
  if (report.frequency_correlation) {
    out << "  frequency vs displacement r = " << io::format_number(*report.frequency_correlation) << '\n';
  }
  const std::size_t shown = std::min<std::size_t>(10, report.hashtags.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& h = report.hashtags[i];
    if (!h.overall) break;
    out << "  " << std::left << std::setw(24) << h.hashtag << ' ' << io::format_number(*h.overall) << '\n';
  }
  art.seeds["drift"] = config.train.seed;
  art.add(io::write_drift(report, dir));
}

void run_social(const Corpus& corpus, const Options& o, const fs::path& dir, Artifacts& art, std::ostream& out) {
  const auto config = walk_config(o);
  const auto report = social::friendship_eval(corpus, config);
  out << "social: AUC profile " << io::format_number(report.auc.profile) << ", jaccard "
      << io::format_number(report.auc.jaccard) << ", common " << io::format_number(report.auc.common)
      << ", preferential " << io::format_number(report.auc.preferential) << '\n';
  if (report.zero_common_auc) {
    out << "  no common hashtag: AUC " << io::format_number(*report.zero_common_auc) << " ("
        << report.zero_common_friends << " friend / " << report.zero_common_strangers << " stranger pairs)\n";
  }
  art.seeds["social"] = config.seed;
  art.add(io::write_social(report, config, dir));
}

void write_manifest(const fs::path& path, const std::string& command, const Options& o, const Artifacts& art,
                    double wall_seconds) {
  ordered_json doc;
  doc["tool"] = "tagscope";
  doc["version"] = kVersion;
  doc["command"] = command;
  doc["config"] = echo(o);
  doc["seeds"] = art.seeds;
  ordered_json files = ordered_json::array();
  for (const auto& f : art.files) files.push_back(f.filename().string());
  doc["artifacts"] = files;
  doc["wall_seconds"] = wall_seconds;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

int dispatch(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  Artifacts art;
  art.seeds["base"] = o.seed;

  if (command == "synth") {
    const fs::path corpus_path = o.out;
    if (corpus_path.filename().empty()) throw Error("synth --out must name a corpus file");
    const Format format = o.format.empty() ? format_from_path(corpus_path) : parse_format(o.format);
    if (corpus_path.has_parent_path()) fs::create_directories(corpus_path.parent_path());
    const auto spec = synthetic_spec(o);
    const auto synth = generate_synthetic(spec);
    fs::path stem = corpus_path;
    stem.replace_extension();
    const fs::path friends = stem.string() + ".friends.csv";
    const fs::path locations = stem.string() + ".locations.csv";
    save_corpus(synth.corpus, corpus_path, format);
    save_friendships(synth.corpus, friends);
    save_location_categories(synth.corpus, locations);
    art.seeds["synth"] = spec.seed;
    art.files = {corpus_path, friends, locations};
    out << "wrote " << synth.corpus.posts.size() << " posts by " << synth.corpus.users.size() << " users to "
        << corpus_path.string() << '\n';
    write_manifest(stem.string() + ".manifest.json", command, o, art, elapsed());
    return 0;
  }

  Corpus corpus;
  if (command == "all" && o.input.empty()) {
    out << "no --input given; using the bundled synthetic corpus (seed " << o.seed << ")\n";
    corpus = generate_synthetic(synthetic_spec(o)).corpus;
    art.seeds["synth"] = o.seed;
  } else {
    corpus = load_inputs(o, err);
  }

  const fs::path dir = o.out;
  fs::create_directories(dir);
  if (command == "stats") run_stats(corpus, o, dir, art, out);
  if (command == "temporal") run_temporal(corpus, o, dir, art, out);
  if (command == "spatial") run_spatial(corpus, o, dir, art, out);
  if (command == "drift") run_drift(corpus, o, dir, art, out);
  if (command == "social") {
    if (corpus.friendships.empty()) throw Error("social needs friendships (pass --friends)");
    run_social(corpus, o, dir, art, out);
  }
  if (command == "all") {
    run_stats(corpus, o, dir, art, out);
    run_temporal(corpus, o, dir, art, out);
    if (corpus.location_categories.empty()) {
      err << "note: no location categories, skipping spatial\n";
    } else {
      run_spatial(corpus, o, dir, art, out);
    }
    run_drift(corpus, o, dir, art, out);
    if (corpus.friendships.empty()) {
      err << "note: no friendships, skipping social\n";
    } else {
      run_social(corpus, o, dir, art, out);
    }
  }
  write_manifest(dir / "manifest.json", command, o, art, elapsed());
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hashtag analytics: temporal patterns, location categories, semantic drift, friendship prediction",
               "tagscope"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Flat key = value file; command-line flags override it");
  app.require_subcommand(1, 1);
  Options options;
  add_options(app, options);
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"synth", "Generate a synthetic corpus with planted structure"},
      {"stats", "Descriptive statistics"},
      {"temporal", "Cluster quarterly popularity series"},
      {"spatial", "Hashtag use per location category"},
      {"drift", "Yearly embeddings and semantic displacement"},
      {"social", "Friendship prediction from hashtag profiles"},
      {"all", "Every analysis in one run"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::stringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code;
  }

  try {
    if (options.k_min > options.k_max) throw Error("--k-min must not exceed --k-max");
    return dispatch(app.get_subcommands().front()->get_name(), options, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tagscope
