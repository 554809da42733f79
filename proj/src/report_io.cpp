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

#include "tagscope/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "csv.hpp"
#include "tagscope/error.hpp"

namespace tagscope::io {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::ofstream open(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// JSON numbers go through format_number too, so dumps stay byte-stable.
ordered_json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return ordered_json::parse(format_number(value));
}

ordered_json optional_number(const std::optional<double>& value) { return value ? number(*value) : ordered_json(nullptr); }

void write_json(const fs::path& path, const ordered_json& doc) {
  auto out = open(path);
  out << doc.dump(2) << '\n';
}

std::string quarter_label(const QuarterBucket& q) { return std::to_string(q.year) + "Q" + std::to_string(q.quarter); }

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::vector<fs::path> write_stats(const stats::CorpusSummary& s, const fs::path& dir) {
  ordered_json doc;
  doc["posts"] = s.posts;
  doc["users"] = s.users;
  doc["hashtags"] = s.hashtags;
  doc["hashtag_instances"] = s.hashtag_instances;
  doc["friendships"] = s.friendships;
  doc["located_posts"] = s.located_posts;
  auto& hist = doc["hashtags_per_post"] = ordered_json::array();
  for (double p : s.hashtags_per_post) hist.push_back(number(p));
  for (const auto* bins : {&s.share_counts, &s.user_counts}) {
    auto& arr = doc[bins == &s.share_counts ? "share_count_bins" : "user_count_bins"] = ordered_json::array();
    for (const auto& b : *bins) {
      arr.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}, {"proportion", number(b.proportion)}});
    }
  }
  auto& top = doc["top_hashtags"] = ordered_json::array();
  for (const auto& t : s.top) top.push_back({{"hashtag", t.hashtag}, {"shares", t.shares}, {"users", t.users}});
  const fs::path json_path = dir / "stats.json";
  write_json(json_path, doc);

  const fs::path adoption_path = dir / "adoption.csv";
  auto out = open(adoption_path);
  out << "quarter,posts,tagged_post_share,users,tagged_user_share\n";
  for (const auto& p : s.adoption) {
    out << quarter_label(p.quarter) << ',' << p.posts << ',' << format_number(p.tagged_posts) << ',' << p.users << ','
        << format_number(p.tagged_users) << '\n';
  }
  return {json_path, adoption_path};
}

std::vector<fs::path> write_temporal(const temporal::TemporalReport& report, const fs::path& dir) {
  const auto& clusters = report.clusters;
  const fs::path csv_path = dir / "temporal_profiles.csv";
  {
    auto out = open(csv_path);
    out << "hashtag";
    for (std::size_t i = 0; i < temporal::kSeriesLength; ++i) out << ",q" << i;
    for (std::size_t i = 0; i < temporal::kFeatureCount; ++i) out << ",f" << i;
    out << ",cluster,label\n";
    for (std::size_t i = 0; i < report.profiles.size(); ++i) {
      const auto& p = report.profiles[i];
      out << detail::csv_escape(p.hashtag);
      for (double v : p.series) out << ',' << format_number(v);
      for (double v : p.features) out << ',' << format_number(v);
      const std::size_t c = clusters.assignment[i];
      out << ',' << c << ',' << temporal::to_string(clusters.labels.at(c)) << '\n';
    }
  }

  ordered_json doc;
  doc["k"] = clusters.k;
  doc["silhouette"] = number(clusters.silhouette);
  auto& cands = doc["candidates"] = ordered_json::array();
  for (const auto& [k, score] : clusters.candidates) cands.push_back({{"k", k}, {"silhouette", number(score)}});
  auto& arr = doc["clusters"] = ordered_json::array();
  const auto sizes = clusters.cluster_sizes();
  for (std::size_t c = 0; c < clusters.k; ++c) {
    std::vector<double> mean(temporal::kSeriesLength, 0.0);
    for (std::size_t i = 0; i < report.profiles.size(); ++i) {
      if (clusters.assignment[i] != c) continue;
      for (std::size_t q = 0; q < mean.size(); ++q) mean[q] += report.profiles[i].series[q];
    }
    ordered_json series = ordered_json::array();
    for (double v : mean) series.push_back(number(sizes[c] ? v / static_cast<double>(sizes[c]) : 0.0));
    arr.push_back({{"cluster", c},
                   {"label", std::string(temporal::to_string(clusters.labels.at(c)))},
                   {"size", sizes[c]},
                   {"mean_series", series}});
  }
  const fs::path json_path = dir / "temporal_clusters.json";
  write_json(json_path, doc);
  return {csv_path, json_path};
}

std::vector<fs::path> write_spatial(const std::vector<spatial::CategoryStats>& stats, const fs::path& dir) {
  const fs::path path = dir / "spatial_categories.csv";
  auto out = open(path);
  out << "category,visits,hashtags,visit_share,hashtag_share,delta\n";
  for (const auto& s : stats) {
    out << detail::csv_escape(s.category) << ',' << s.visits << ',' << s.hashtags << ',' << format_number(s.visit_share)
        << ',' << format_number(s.hashtag_share) << ',' << format_number(s.delta) << '\n';
  }
  return {path};
}

std::vector<fs::path> write_drift(const drift::DisplacementReport& report, const fs::path& dir) {
  const auto& years = report.years;
  const fs::path table_path = dir / "drift_displacement.csv";
  {
    auto out = open(table_path);
    out << "hashtag,shares,overall";
    for (std::size_t p = 0; p + 1 < years.size(); ++p) out << ",disp_" << years[p] << '_' << years[p + 1];
    for (int y : years) out << ",entropy_" << y;
    out << '\n';
    const auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& row : report.hashtags) {
      out << detail::csv_escape(row.hashtag) << ',' << row.shares << ',' << cell(row.overall);
      for (const auto& d : row.displacements) out << ',' << cell(d);
      for (const auto& e : row.entropy) out << ',' << cell(e);
      out << '\n';
    }
  }
  const fs::path scatter_path = dir / "drift_scatter.csv";
  {
    auto out = open(scatter_path);
    out << "hashtag,year,displacement,entropy,frequency\n";
    for (const auto& p : report.points) {
      out << detail::csv_escape(p.hashtag) << ',' << p.year << ',' << format_number(p.displacement) << ','
          << format_number(p.entropy) << ',' << format_number(p.frequency) << '\n';
    }
  }
  ordered_json doc;
  doc["years"] = years;
  doc["hashtags"] = report.hashtags.size();
  doc["points"] = report.points.size();
  doc["entropy_displacement_correlation"] = optional_number(report.entropy_correlation);
  doc["frequency_displacement_correlation"] = optional_number(report.frequency_correlation);
  auto& residuals = doc["orthogonality_residuals"] = ordered_json::array();
  for (double r : report.orthogonality_residuals) residuals.push_back(number(r));
  doc["aligned_vocabulary"] = report.aligned_vocabulary;
  std::size_t above = 0, with_overall = 0;
  for (const auto& row : report.hashtags) {
    if (!row.overall) continue;
    ++with_overall;
    if (*row.overall > 0.4) ++above;
  }
  doc["share_overall_above_0_4"] = number(with_overall ? static_cast<double>(above) / static_cast<double>(with_overall) : 0.0);
  const fs::path summary_path = dir / "drift_summary.json";
  write_json(summary_path, doc);
  return {table_path, scatter_path, summary_path};
}

std::vector<fs::path> write_social(const social::PredictionReport& report, const social::WalkConfig& config,
                                   const fs::path& dir) {
  const fs::path pairs_path = dir / "social_pairs.csv";
  {
    auto out = open(pairs_path);
    out << "user_a,user_b,distance,label,common,jaccard,preferential\n";
    for (const auto& p : report.pairs) {
      out << detail::csv_escape(p.users.first) << ',' << detail::csv_escape(p.users.second) << ','
          << format_number(p.distance) << ',' << (p.friends ? "friend" : "stranger") << ','
          << format_number(p.baseline.common) << ',' << format_number(p.baseline.jaccard) << ','
          << format_number(p.baseline.preferential) << '\n';
    }
  }
  ordered_json doc;
  doc["auc"] = {{"profile", number(report.auc.profile)},
                {"jaccard", number(report.auc.jaccard)},
                {"common", number(report.auc.common)},
                {"preferential", number(report.auc.preferential)}};
  doc["zero_common_auc"] = optional_number(report.zero_common_auc);
  doc["zero_common_friend_pairs"] = report.zero_common_friends;
  doc["zero_common_stranger_pairs"] = report.zero_common_strangers;
  doc["pairs"] = report.pairs.size();
  doc["skipped_friend_pairs"] = report.skipped_friend_pairs.size();
  doc["excluded_users"] = report.excluded_users.size();
  doc["hyperparameters"] = {{"walk_times", config.walk_times},   {"walk_length", config.walk_length},
                            {"dimension", config.dimension},     {"context_radius", config.context_radius},
                            {"negatives", config.negatives},     {"epochs", config.epochs},
                            {"initial_lr", number(config.initial_lr)}, {"seed", config.seed}};
  const fs::path summary_path = dir / "social_summary.json";
  write_json(summary_path, doc);
  return {pairs_path, summary_path};
}

}  // namespace tagscope::io
