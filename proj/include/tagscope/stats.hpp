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
#include <string>
#include <vector>

#include "tagscope/corpus.hpp"

namespace tagscope::stats {

/// Power-of-two bin [lower, upper] of a count distribution.
struct LogBin {
  std::size_t lower = 0;
  std::size_t upper = 0;
  std::size_t count = 0;
  double proportion = 0.0;
};

struct TopHashtag {
  std::string hashtag;
  std::size_t shares = 0;
  std::size_t users = 0;
};

struct AdoptionPoint {
  QuarterBucket quarter;
  std::size_t posts = 0;
  /// Share of the quarter's posts carrying at least one hashtag.
  double tagged_posts = 0.0;
  std::size_t users = 0;
  /// Share of the quarter's active users who used at least one hashtag.
  double tagged_users = 0.0;
};

struct CorpusSummary {
  std::size_t posts = 0;
  std::size_t users = 0;
  std::size_t hashtags = 0;
  std::size_t hashtag_instances = 0;
  std::size_t friendships = 0;
  std::size_t located_posts = 0;
  /// Entry i = proportion of posts with exactly i hashtags, i in [0, 30].
  std::vector<double> hashtags_per_post;
  /// How many times each hashtag was shared.
  std::vector<LogBin> share_counts;
  /// How many distinct users shared each hashtag.
  std::vector<LogBin> user_counts;
  std::vector<TopHashtag> top;
  std::vector<AdoptionPoint> adoption;
};

/// Descriptive statistics; throws Error on a corpus without posts.
CorpusSummary report_stats(const Corpus& corpus, std::size_t top_k = 20);

std::vector<LogBin> log_bins(const std::vector<std::size_t>& values);

}  // namespace tagscope::stats
