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

#include "tagscope/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tagscope/error.hpp"
#include "tagscope/random.hpp"

namespace tagscope::temporal {

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) {
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Ties go to `current` when it is among the nearest, else to the lowest index.
std::size_t nearest(const Point& p, const std::vector<Point>& centroids,
                    std::size_t current = std::numeric_limits<std::size_t>::max()) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d || (d == best_d && c == current)) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double total_sse(std::span<const Point> points, const std::vector<std::size_t>& assignment,
                 const std::vector<Point>& centroids) {
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sse += squared_distance(points[i], centroids[assignment[i]]);
  return sse;
}

std::vector<Point> seed_plus_plus(std::span<const Point> points, std::size_t k, Rng& rng) {
  std::vector<Point> centroids;
  centroids.push_back(points[rng.below(points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centroids[0]);
  while (centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = rng.below(points.size());
    } else {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        cumulative += d2[i];
        if (target < cumulative) break;
      }
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
  }
  return centroids;
}

// Reseeds every empty cluster with the point farthest from its own centroid
// (taken from a cluster that keeps at least one member). Returns repairs made.
std::size_t repair_empty(std::span<const Point> points, std::vector<std::size_t>& assignment,
                         std::vector<Point>& centroids) {
  std::size_t repairs = 0;
  std::vector<std::size_t> sizes(centroids.size(), 0);
  for (std::size_t a : assignment) ++sizes[a];
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[assignment[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) throw std::logic_error("k-means repair: no donor cluster");
    --sizes[assignment[far]];
    assignment[far] = c;
    sizes[c] = 1;
    centroids[c] = points[far];
    ++repairs;
  }
  return repairs;
}

std::vector<Point> cluster_means(std::span<const Point> points, const std::vector<std::size_t>& assignment,
                                 std::size_t k) {
  const std::size_t dim = points[0].size();
  std::vector<Point> means(k, Point(dim, 0.0));
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++sizes[assignment[i]];
    for (std::size_t d = 0; d < dim; ++d) means[assignment[i]][d] += points[i][d];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (auto& x : means[c]) x /= static_cast<double>(sizes[c]);
  }
  return means;
}

}  // namespace

FeatureVector extract_features(std::span<const double> series) {
  if (series.size() != kSeriesLength) {
    throw Error("extract_features: expected a 16-bucket series, got " + std::to_string(series.size()));
  }
  std::array<std::size_t, kSeriesLength> order{};
  std::iota(order.begin(), order.end(), 0);

  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return series[a] > series[b]; });
  const std::array<double, 3> large = {series[order[0]], series[order[1]], series[order[2]]};
  const std::array<double, 3> large_idx = {double(order[0]), double(order[1]), double(order[2])};

  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return series[a] < series[b]; });
  const std::array<double, 3> small = {series[order[0]], series[order[1]], series[order[2]]};
  const std::array<double, 3> small_idx = {double(order[0]), double(order[1]), double(order[2])};

  return {population_std(series),
          large[0], large[1], large[2], mean_of(large), population_std(large), population_std(large_idx),
          small[0], small[1], small[2], mean_of(small), population_std(small), population_std(small_idx)};
}

std::vector<Point> standardize(std::span<const Point> points) {
  std::vector<Point> out(points.begin(), points.end());
  if (points.empty()) return out;
  const std::size_t dim = points[0].size();
  const double n = static_cast<double>(points.size());
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[d];
    mean /= n;
    double var = 0.0;
    for (const auto& p : points) var += (p[d] - mean) * (p[d] - mean);
    const double sd = std::sqrt(var / n);
    for (auto& p : out) p[d] = sd > 0.0 ? (p[d] - mean) / sd : 0.0;
  }
  return out;
}

std::vector<Point> to_points(std::span<const TemporalProfile> profiles) {
  std::vector<Point> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.emplace_back(p.features.begin(), p.features.end());
  return out;
}

KMeansResult kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed, std::size_t max_iterations) {
  if (points.empty()) throw Error("kmeans: no points");
  if (k < 1) throw Error("kmeans: k must be >= 1");
  if (k > points.size()) throw Error("kmeans: k exceeds the number of points");

  Rng rng(seed);
  KMeansResult result;
  auto centroids = seed_plus_plus(points, k, rng);
  std::vector<std::size_t> assignment(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) assignment[i] = nearest(points[i], centroids);
  result.repairs += repair_empty(points, assignment, centroids);
  result.sse_history.push_back(total_sse(points, assignment, centroids));

  for (std::size_t it = 0; it < max_iterations; ++it) {
    centroids = cluster_means(points, assignment, k);
    std::vector<std::size_t> next(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) next[i] = nearest(points[i], centroids, assignment[i]);
    const std::size_t repaired = repair_empty(points, next, centroids);
    result.repairs += repaired;
    const double sse = total_sse(points, next, centroids);
    const double previous = result.sse_history.back();
    if (sse > previous + 1e-9 * std::max(1.0, previous)) {
      throw std::logic_error("kmeans: SSE increased between iterations");
    }
    result.sse_history.push_back(sse);
    result.iterations = it + 1;
    if (next == assignment && repaired == 0) {
      result.converged = true;
      break;
    }
    assignment = std::move(next);
  }
  result.centroids = cluster_means(points, assignment, k);
  result.sse = total_sse(points, assignment, result.centroids);
  result.assignment = std::move(assignment);
  return result;
}

KMeansResult kmeans_restarts(std::span<const Point> points, std::size_t k, std::uint64_t seed, std::size_t restarts,
                             std::size_t max_iterations) {
  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    auto run = kmeans(points, k, derive_seed({seed, k, r}), max_iterations);
    if (!have || run.sse < best.sse) {
      best = std::move(run);
      have = true;
    }
  }
  return best;
}

double silhouette(std::span<const Point> points, std::span<const std::size_t> assignment) {
  if (points.size() != assignment.size()) throw Error("silhouette: assignment size mismatch");
  const std::size_t k = assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t a : assignment) ++sizes[a];
  if (std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }) < 2) {
    throw Error("silhouette: needs at least two non-empty clusters");
  }

  double total = 0.0;
  std::vector<double> dist_sum(k);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t own = assignment[i];
    if (sizes[own] == 1) continue;
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) dist_sum[assignment[j]] += std::sqrt(squared_distance(points[i], points[j]));
    }
    const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(points.size());
}

std::string_view to_string(PatternLabel label) {
  switch (label) {
    case PatternLabel::stable: return "Stable";
    case PatternLabel::rising: return "Rising";
    case PatternLabel::periodic: return "Periodic";
    case PatternLabel::meteor: return "Meteor";
  }
  return "Stable";
}

std::vector<std::size_t> ClusterResult::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t a : assignment) ++sizes[a];
  return sizes;
}

ClusterResult select_k(std::span<const Point> points, std::size_t k_min, std::size_t k_max, const SelectConfig& config) {
  if (k_min < 2 || k_max > 10 || k_min > k_max) throw Error("select_k: k range must lie within [2, 10]");

  struct Candidate {
    KMeansResult run;
    double score = 0.0;
  };
  const auto evaluate = [&](std::size_t k) {
    Candidate c;
    c.run = kmeans_restarts(points, k, config.seed, config.restarts, config.max_iterations);
    c.score = silhouette(points, c.run.assignment);
    return c;
  };

  std::vector<Candidate> candidates;
  if (config.threads > 1) {
    std::vector<std::future<Candidate>> futures;
    for (std::size_t k = k_min; k <= k_max; ++k) futures.push_back(std::async(std::launch::async, evaluate, k));
    for (auto& f : futures) candidates.push_back(f.get());
  } else {
    for (std::size_t k = k_min; k <= k_max; ++k) candidates.push_back(evaluate(k));
  }

  std::size_t best = 0;
  ClusterResult result;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    result.candidates.emplace_back(k_min + i, candidates[i].score);
    if (candidates[i].score > candidates[best].score) best = i;
  }
  result.k = k_min + best;
  result.assignment = std::move(candidates[best].run.assignment);
  result.centroids = std::move(candidates[best].run.centroids);
  result.sse = candidates[best].run.sse;
  result.silhouette = candidates[best].score;
  return result;
}

double linear_slope(std::span<const double> series) {
  const double n = static_cast<double>(series.size());
  const double tm = (n - 1.0) / 2.0;
  const double ym = mean_of(series);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    num += (static_cast<double>(t) - tm) * (series[t] - ym);
    den += (static_cast<double>(t) - tm) * (static_cast<double>(t) - tm);
  }
  return den > 0.0 ? num / den : 0.0;
}

double seasonal_autocorrelation(std::span<const double> series, std::size_t lag) {
  if (series.size() <= lag + 2) return 0.0;
  const double slope = linear_slope(series);
  const double ym = mean_of(series);
  const double tm = (static_cast<double>(series.size()) - 1.0) / 2.0;
  std::vector<double> resid(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) resid[t] = series[t] - (ym + slope * (static_cast<double>(t) - tm));

  // Pearson correlation between the residuals and their lagged copy.
  const std::size_t m = series.size() - lag;
  const std::span<const double> head(resid.data(), m);
  const std::span<const double> tail(resid.data() + lag, m);
  const double hm = mean_of(head), tmn = mean_of(tail);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (head[i] - hm) * (tail[i] - tmn);
    sxx += (head[i] - hm) * (head[i] - hm);
    syy += (tail[i] - tmn) * (tail[i] - tmn);
  }
  if (sxx <= 1e-300 || syy <= 1e-300) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

PatternLabel decide(double max_mass, double autocorrelation, double slope, const LabelThresholds& t) {
  if (max_mass > t.meteor_mass) return PatternLabel::meteor;
  if (autocorrelation > t.periodic_autocorrelation) return PatternLabel::periodic;
  if (slope > t.rising_slope) return PatternLabel::rising;
  return PatternLabel::stable;
}

}  // namespace

PatternLabel classify_series(std::span<const double> series, const LabelThresholds& thresholds) {
  const double max_mass = series.empty() ? 0.0 : *std::max_element(series.begin(), series.end());
  return decide(max_mass, seasonal_autocorrelation(series), linear_slope(series), thresholds);
}

void label_clusters(ClusterResult& result, std::span<const TemporalProfile> profiles, const LabelThresholds& thresholds) {
  if (profiles.size() != result.assignment.size()) throw Error("label_clusters: profile count mismatch");
  std::vector<double> mass(result.k, 0.0), acf(result.k, 0.0), slope(result.k, 0.0);
  std::vector<std::size_t> sizes(result.k, 0);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& s = profiles[i].series;
    const std::size_t c = result.assignment[i];
    mass[c] += *std::max_element(s.begin(), s.end());
    acf[c] += seasonal_autocorrelation(s);
    slope[c] += linear_slope(s);
    ++sizes[c];
  }
  result.labels.assign(result.k, PatternLabel::stable);
  for (std::size_t c = 0; c < result.k; ++c) {
    if (sizes[c] == 0) continue;
    const double n = static_cast<double>(sizes[c]);
    result.labels[c] = decide(mass[c] / n, acf[c] / n, slope[c] / n, thresholds);
  }
}

TemporalReport analyze_temporal(const Corpus& corpus, const TemporalConfig& config) {
  if (config.range.size() != static_cast<int>(kSeriesLength)) {
    throw Error("temporal analysis needs a 16-quarter range");
  }
  const auto series = bucket_share_series(corpus, config.range);
  const auto window = std::make_pair(config.range.first.start(),
                                     QuarterBucket::from_ordinal(config.range.last.ordinal() + 1).start());
  const auto top = top_k_hashtags(hashtag_share_counts(corpus, window), config.top_k);

  TemporalReport report;
  for (const auto& tag : top) {
    TemporalProfile profile;
    profile.hashtag = tag;
    profile.series = series.at(tag);
    profile.features = extract_features(profile.series);
    report.profiles.push_back(std::move(profile));
  }
  if (report.profiles.size() < 3) throw Error("temporal analysis needs at least 3 hashtags in range");

  const auto points = standardize(to_points(report.profiles));
  const std::size_t k_max = std::min(config.k_max, points.size() - 1);
  report.clusters = select_k(points, std::min(config.k_min, k_max), k_max, config.select);
  label_clusters(report.clusters, report.profiles, config.thresholds);
  return report;
}

}  // namespace tagscope::temporal
