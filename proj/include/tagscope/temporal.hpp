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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tagscope/corpus.hpp"

namespace tagscope::temporal {

inline constexpr std::size_t kSeriesLength = 16;
inline constexpr std::size_t kFeatureCount = 13;

using FeatureVector = std::array<double, kFeatureCount>;
using Point = std::vector<double>;

/// A hashtag's quarterly share proportions and the features derived from them.
struct TemporalProfile {
  std::string hashtag;
  std::vector<double> series;
  FeatureVector features{};
};

/// Feature layout, in order:
///   0      population std of the series
///   1..3   three largest values, descending
///   4      mean of the largest three
///   5      std of the largest three
///   6      std of the largest three's indices
///   7..9   three smallest values, ascending
///   10     mean of the smallest three
///   11     std of the smallest three
///   12     std of the smallest three's indices
/// Ties between equal values go to the lower index. Throws Error unless the
/// series has 16 entries.
FeatureVector extract_features(std::span<const double> series);

/// Z-scores every coordinate across points; constant coordinates become 0.
std::vector<Point> standardize(std::span<const Point> points);

std::vector<Point> to_points(std::span<const TemporalProfile> profiles);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<Point> centroids;
  double sse = 0.0;
  /// SSE after each assignment step, first entry right after seeding.
  std::vector<double> sse_history;
  std::size_t iterations = 0;
  /// Empty clusters reseeded with the point farthest from its centroid.
  std::size_t repairs = 0;
  bool converged = false;
};

/// Lloyd's algorithm from k-means++ seeding; stops at an assignment fixed
/// point or after `max_iterations`. Throws Error for k < 1, k > |points| or
/// empty input.
KMeansResult kmeans(std::span<const Point> points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations = 300);

/// Best-SSE run out of `restarts` seeded k-means runs.
KMeansResult kmeans_restarts(std::span<const Point> points, std::size_t k, std::uint64_t seed,
                             std::size_t restarts, std::size_t max_iterations = 300);

/// Mean silhouette with Euclidean distances; members of singleton clusters
/// score 0. Throws Error when fewer than two clusters are non-empty.
double silhouette(std::span<const Point> points, std::span<const std::size_t> assignment);

enum class PatternLabel { stable, rising, periodic, meteor };

std::string_view to_string(PatternLabel label);

struct LabelThresholds {
  double periodic_autocorrelation = 0.3;
  double rising_slope = 0.005;
  double meteor_mass = 0.5;
};

struct ClusterResult {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;
  std::vector<Point> centroids;
  double silhouette = 0.0;
  double sse = 0.0;
  std::vector<PatternLabel> labels;
  /// (k, silhouette) for every candidate tried, in k order.
  std::vector<std::pair<std::size_t, double>> candidates;

  std::vector<std::size_t> cluster_sizes() const;
};

struct SelectConfig {
  std::uint64_t seed = 1;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  std::size_t threads = 1;
};

/// Clusters for every k in [k_min, k_max] (within [2, 10]) and keeps the k
/// with the highest silhouette; ties go to the smaller k.
ClusterResult select_k(std::span<const Point> points, std::size_t k_min, std::size_t k_max,
                       const SelectConfig& config = {});

/// Lag-4 autocorrelation of the linearly detrended series.
double seasonal_autocorrelation(std::span<const double> series, std::size_t lag = 4);
/// Least-squares slope per bucket.
double linear_slope(std::span<const double> series);

/// Label of a single series: Meteor if its largest bucket holds more than
/// `meteor_mass`, else Periodic if the detrended lag-4 autocorrelation
/// exceeds its threshold, else Rising if the slope does, else Stable.
PatternLabel classify_series(std::span<const double> series, const LabelThresholds& thresholds = {});

/// Labels each cluster from the mean statistics of its members' series.
void label_clusters(ClusterResult& result, std::span<const TemporalProfile> profiles,
                    const LabelThresholds& thresholds = {});

struct TemporalConfig {
  QuarterRange range{};
  std::size_t top_k = 1000;
  std::size_t k_min = 2;
  std::size_t k_max = 10;
  SelectConfig select{};
  LabelThresholds thresholds{};
};

struct TemporalReport {
  std::vector<TemporalProfile> profiles;
  ClusterResult clusters;
};

/// Top-k hashtags by in-range share count -> profiles -> standardized
/// features -> k selection -> labels.
TemporalReport analyze_temporal(const Corpus& corpus, const TemporalConfig& config);

}  // namespace tagscope::temporal
