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

#include "tagscope/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <Eigen/SVD>

#include "tagscope/error.hpp"
#include "tagscope/random.hpp"

namespace tagscope::drift {

AlignmentMap procrustes_align(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw Error("procrustes: source and target shapes differ");
  }
  if (source.rows() == 0 || source.cols() == 0) throw Error("procrustes: empty matrices");

  const Eigen::MatrixXd cross = target * source.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw Error("procrustes: SVD did not converge");

  AlignmentMap map;
  map.rotation = svd.matrixU() * svd.matrixV().transpose();
  const Eigen::MatrixXd gram = map.rotation * map.rotation.transpose();
  map.orthogonality_residual =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (map.orthogonality_residual >= 1e-8) {
    throw Error("procrustes: alignment not orthogonal (residual " + std::to_string(map.orthogonality_residual) + ")");
  }
  return map;
}

double single_displacement(std::span<const double> aligned_source, std::span<const double> target) {
  return cosine_distance(aligned_source, target);
}

double overall_displacement(std::span<const double> per_pair) {
  if (per_pair.empty()) throw Error("overall displacement: hashtag absent from every consecutive year pair");
  double sum = 0.0;
  for (double d : per_pair) sum += d;
  return sum / static_cast<double>(per_pair.size());
}

double entropy_from_counts(std::span<const double> counts, LogBase base) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) throw Error("entropy: no shares");
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log(p);
  }
  if (base == LogBase::bits) h /= std::numbers::ln2;
  return std::max(0.0, h);
}

double hashtag_entropy(const Corpus& corpus, std::string_view hashtag, std::int64_t begin, std::int64_t end,
                       LogBase base) {
  std::map<std::string, double> per_user;
  for (const auto& post : corpus.posts) {
    if (post.time < begin || post.time >= end) continue;
    if (std::find(post.hashtags.begin(), post.hashtags.end(), hashtag) != post.hashtags.end()) {
      per_user[post.user] += 1.0;
    }
  }
  if (per_user.empty()) throw Error("entropy: '" + std::string(hashtag) + "' is not shared in the period");
  std::vector<double> counts;
  for (const auto& [user, c] : per_user) counts.push_back(c);
  return entropy_from_counts(counts, base);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson: length mismatch");
  if (x.size() < 3) throw Error("pearson: need at least 3 observations");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<Sentence> hashtag_sentences(const Corpus& corpus, std::int64_t begin, std::int64_t end) {
  std::vector<Sentence> out;
  for (const auto& post : corpus.posts) {
    if (post.time >= begin && post.time < end && !post.hashtags.empty()) out.push_back(post.hashtags);
  }
  return out;
}

Eigen::MatrixXd embedding_matrix(const EmbeddingTable& table, std::span<const std::string> tokens) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(table.dimension()), static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    const auto v = table.vector(tokens[j]);
    for (std::size_t i = 0; i < v.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i];
    }
  }
  return m;
}

std::vector<std::string> shared_vocabulary(const Vocabulary& a, const Vocabulary& b) {
  std::vector<std::pair<std::string, std::uint64_t>> shared;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (const auto j = b.find(a.token(i))) shared.emplace_back(a.token(i), a.frequency(i) + b.frequency(*j));
  }
  std::sort(shared.begin(), shared.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  std::vector<std::string> out;
  out.reserve(shared.size());
  for (auto& [token, f] : shared) out.push_back(std::move(token));
  return out;
}

DisplacementReport drift_analysis(const Corpus& corpus, const DriftConfig& config) {
  const auto& years = config.years;
  if (years.size() < 2) throw Error("drift analysis needs at least two years");
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] != years[i - 1] + 1) throw Error("drift analysis years must be consecutive and ascending");
  }

  DisplacementReport report;
  report.years = years;

  std::vector<EmbeddingTable> tables;
  std::vector<std::unordered_map<std::string, std::size_t>> yearly_counts;
  for (int year : years) {
    const auto begin = year_start(year);
    const auto end = year_start(year + 1);
    const auto sentences = hashtag_sentences(corpus, begin, end);
    if (sentences.empty()) throw Error("drift analysis: year " + std::to_string(year) + " has no hashtags");
    TrainConfig train = config.train;
    if (config.seed_mode == SeedMode::per_year) {
      train.seed = derive_seed({config.train.seed, static_cast<std::uint64_t>(year)});
    }
    tables.push_back(tagscope::train(sentences, train).table);
    yearly_counts.push_back(hashtag_share_counts(corpus, std::make_pair(begin, end)));
  }

  std::unordered_map<std::string, std::size_t> totals;
  for (const auto& counts : yearly_counts) {
    for (const auto& [tag, c] : counts) totals[tag] += c;
  }
  const auto top = top_k_hashtags(totals, config.top_k);

  std::vector<HashtagDrift> rows(top.size());
  for (std::size_t h = 0; h < top.size(); ++h) {
    rows[h].hashtag = top[h];
    rows[h].shares = totals[top[h]];
    rows[h].displacements.assign(years.size() - 1, std::nullopt);
    rows[h].entropy.assign(years.size(), std::nullopt);
    for (std::size_t y = 0; y < years.size(); ++y) {
      const auto it = yearly_counts[y].find(top[h]);
      rows[h].yearly_shares.push_back(it == yearly_counts[y].end() ? 0 : it->second);
    }
  }

  // Per-year entropies in one pass over the posts.
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t h = 0; h < top.size(); ++h) row_of[top[h]] = h;
  std::vector<std::vector<std::map<std::string, double>>> user_counts(
      years.size(), std::vector<std::map<std::string, double>>(top.size()));
  for (const auto& post : corpus.posts) {
    const int year = year_of(post.time);
    if (year < years.front() || year > years.back()) continue;
    for (const auto& tag : post.hashtags) {
      const auto it = row_of.find(tag);
      if (it != row_of.end()) user_counts[static_cast<std::size_t>(year - years.front())][it->second][post.user] += 1.0;
    }
  }
  for (std::size_t y = 0; y < years.size(); ++y) {
    for (std::size_t h = 0; h < top.size(); ++h) {
      const auto& by_user = user_counts[y][h];
      if (by_user.empty()) continue;
      std::vector<double> counts;
      for (const auto& [user, c] : by_user) counts.push_back(c);
      rows[h].entropy[y] = entropy_from_counts(counts, config.log_base);
    }
  }

  for (std::size_t p = 0; p + 1 < years.size(); ++p) {
    const auto& source = tables[p];
    const auto& target = tables[p + 1];
    const auto vocab = shared_vocabulary(source.vocab(), target.vocab());
    if (vocab.empty()) {
      throw Error("drift analysis: years " + std::to_string(years[p]) + " and " + std::to_string(years[p + 1]) +
                  " share no hashtags");
    }
    const auto map = procrustes_align(embedding_matrix(source, vocab), embedding_matrix(target, vocab));
    report.orthogonality_residuals.push_back(map.orthogonality_residual);
    report.aligned_vocabulary.push_back(vocab.size());

    for (std::size_t h = 0; h < top.size(); ++h) {
      const auto s = source.vocab().find(top[h]);
      const auto t = target.vocab().find(top[h]);
      if (!s || !t) continue;
      const auto sv = source.row(*s);
      const auto tv = target.row(*t);
      Eigen::VectorXd src(static_cast<Eigen::Index>(sv.size()));
      std::vector<double> tgt(tv.begin(), tv.end());
      for (std::size_t i = 0; i < sv.size(); ++i) src(static_cast<Eigen::Index>(i)) = sv[i];
      const Eigen::VectorXd aligned = map.rotation * src;
      rows[h].displacements[p] = single_displacement({aligned.data(), static_cast<std::size_t>(aligned.size())}, tgt);

      const std::size_t at = config.entropy_year == EntropyYear::earlier ? p : p + 1;
      if (rows[h].entropy[at]) {
        report.points.push_back({top[h], years[at], *rows[h].displacements[p], *rows[h].entropy[at],
                                 static_cast<double>(rows[h].yearly_shares[at])});
      }
    }
  }

  for (auto& row : rows) {
    std::vector<double> present;
    for (const auto& d : row.displacements) {
      if (d) present.push_back(*d);
    }
    if (!present.empty()) row.overall = overall_displacement(present);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const HashtagDrift& a, const HashtagDrift& b) {
    if (a.overall.has_value() != b.overall.has_value()) return a.overall.has_value();
    return a.overall && *a.overall > *b.overall;
  });
  report.hashtags = std::move(rows);

  std::vector<double> disp, ent, freq;
  for (const auto& pt : report.points) {
    disp.push_back(pt.displacement);
    ent.push_back(pt.entropy);
    freq.push_back(pt.frequency);
  }
  const auto safe_pearson = [](const std::vector<double>& x, const std::vector<double>& y) -> std::optional<double> {
    try {
      return pearson(x, y);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  report.entropy_correlation = safe_pearson(ent, disp);
  report.frequency_correlation = safe_pearson(freq, disp);
  return report;
}

}  // namespace tagscope::drift
