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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tagscope/corpus.hpp"
#include "tagscope/embedding.hpp"

namespace tagscope::drift {

/// Orthogonal d x d map taking one year's vectors onto the next year's.
struct AlignmentMap {
  Eigen::MatrixXd rotation;
  /// max |X X^T - I| over all entries.
  double orthogonality_residual = 0.0;
};

/// Solves min ||X S - T||_F over orthogonal X for d x n matrices whose
/// columns index the same tokens: X = U V^T with U S V^T = svd(T S^T).
/// Throws Error on a shape mismatch, SVD failure, or if X is not orthogonal
/// to 1e-8.
AlignmentMap procrustes_align(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

/// Cosine distance between an aligned vector and its counterpart, in [0, 2].
double single_displacement(std::span<const double> aligned_source, std::span<const double> target);

/// Mean of the per-pair displacements. Throws Error when empty.
double overall_displacement(std::span<const double> per_pair);

enum class LogBase { nats, bits };

/// Shannon entropy of a count vector (zero counts contribute nothing).
double entropy_from_counts(std::span<const double> counts, LogBase base = LogBase::nats);

/// Entropy of how a hashtag's shares in [begin, end) split across users.
/// Throws Error when the hashtag is not shared in the window.
double hashtag_entropy(const Corpus& corpus, std::string_view hashtag, std::int64_t begin, std::int64_t end,
                       LogBase base = LogBase::nats);

/// Pearson product-moment correlation. Throws Error unless both inputs have
/// the same length >= 3 and non-zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Hashtag sets of the posts in [begin, end), one sentence per post with at
/// least one hashtag.
std::vector<Sentence> hashtag_sentences(const Corpus& corpus, std::int64_t begin, std::int64_t end);

/// Columns of `table` for `tokens`, widened to double, as a d x n matrix.
Eigen::MatrixXd embedding_matrix(const EmbeddingTable& table, std::span<const std::string> tokens);

/// Tokens in both vocabularies, by combined frequency then lexicographic.
std::vector<std::string> shared_vocabulary(const Vocabulary& a, const Vocabulary& b);

enum class SeedMode {
  per_year,  // each year trains with a seed derived from the base seed and the year
  shared,    // every year uses the base seed unchanged
};

enum class EntropyYear { earlier, later };

struct DriftConfig {
  /// Consecutive years to compare, ascending.
  std::vector<int> years = {2012, 2013, 2014, 2015};
  std::size_t top_k = 1000;
  /// Hashtags seen fewer than five times in a year get no vector that year.
  TrainConfig train = [] {
    TrainConfig t;
    t.min_count = 5;
    return t;
  }();
  SeedMode seed_mode = SeedMode::per_year;
  /// Year of each consecutive pair whose entropy and frequency pair with its displacement.
  EntropyYear entropy_year = EntropyYear::earlier;
  LogBase log_base = LogBase::nats;
};

struct HashtagDrift {
  std::string hashtag;
  std::size_t shares = 0;
  /// One entry per consecutive year pair; empty when absent from either year.
  std::vector<std::optional<double>> displacements;
  std::optional<double> overall;
  /// One entry per year; empty when not shared that year.
  std::vector<std::optional<double>> entropy;
  std::vector<std::size_t> yearly_shares;
};

/// One (hashtag, consecutive-year pair) observation.
struct ScatterPoint {
  std::string hashtag;
  int year = 0;
  double displacement = 0.0;
  double entropy = 0.0;
  double frequency = 0.0;
};

struct DisplacementReport {
  std::vector<int> years;
  /// Top-k hashtags ordered by overall displacement, descending; hashtags
  /// without any displacement come last.
  std::vector<HashtagDrift> hashtags;
  std::vector<ScatterPoint> points;
  std::optional<double> entropy_correlation;
  std::optional<double> frequency_correlation;
  std::vector<double> orthogonality_residuals;
  std::vector<std::size_t> aligned_vocabulary;
};

/// Per-year embeddings -> pairwise alignment -> displacements, entropies and
/// correlations for the top-k hashtags of the analysed years.
DisplacementReport drift_analysis(const Corpus& corpus, const DriftConfig& config);

}  // namespace tagscope::drift
