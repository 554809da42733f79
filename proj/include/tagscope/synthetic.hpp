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
#include <string>
#include <utility>
#include <vector>

#include "tagscope/corpus.hpp"

namespace tagscope {

/// Parameters of a synthetic corpus with planted ground truth.
///
/// The corpus is assembled from independent layers, each switched off by a
/// zero count:
///  - community posts: users post hashtags from a personal subset of their
///    synonym community's pool, mixed with Zipf-distributed background tags;
///  - temporal posts: each planted Stable/Rising/Periodic/Meteor hashtag gets
///    its shares spread over quarters according to its pattern;
///  - drift posts: each drifted hashtag co-occurs with one community before
///    `drift_year` and with another from then on;
///  - friendships: with probability `homophily` a friend pair is drawn inside
///    one community, otherwise uniformly.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t user_count = 400;
  /// Total distinct hashtags; whatever the planted sets leave is background.
  std::size_t hashtag_count = 1000;
  /// Community and background posts (temporal and drift layers add their own).
  std::size_t post_count = 30000;
  int first_year = 2012;
  int last_year = 2015;

  std::size_t periodic_count = 50;
  std::size_t rising_count = 50;
  std::size_t stable_count = 50;
  std::size_t meteor_count = 50;
  std::size_t min_pattern_shares = 80;
  std::size_t max_pattern_shares = 400;
  /// Relative weight of a periodic hashtag's designated quarter-of-year.
  double periodic_peak = 20.0;
  /// Relative weight of a meteor hashtag's burst quarter.
  double meteor_peak = 40.0;

  std::size_t community_count = 10;
  std::size_t community_size = 20;
  std::size_t tags_per_user = 6;
  /// Probability that a hashtag slot draws from the user's community.
  double community_rate = 0.85;

  std::size_t drifted_count = 10;
  int drift_year = 2014;
  std::size_t drift_posts_per_year = 60;
  /// Fraction of a drifted hashtag's posts made by one owner account.
  double drift_owner_share = 0.0;

  /// Probability that a friend pair shares a hashtag community.
  double homophily = 0.8;
  double mean_friends = 6.0;

  double zipf_exponent = 1.0;
  double mean_hashtags_per_post = 3.0;
  /// Share of posts without hashtags, interpolated linearly over time.
  double untagged_rate_start = 0.6;
  double untagged_rate_end = 0.4;
  /// Log-normal spread of per-user activity.
  double activity_sigma = 1.0;
  std::size_t min_posts_per_user = 5;

  std::size_t location_count = 40;
  double located_rate = 0.3;
  std::vector<std::string> categories = {"home", "restaurant", "park", "bar", "museum",
                                         "gym", "beach", "office", "cafe", "stadium"};
  /// Category whose posts carry fewer hashtags.
  std::string averse_category = "bar";
  /// Probability that each hashtag of a post at the averse category is dropped.
  double averse_suppression = 0.7;
};

/// What the generator planted, for scoring analyses against.
struct SyntheticTruth {
  std::vector<std::string> periodic;
  std::vector<std::string> rising;
  std::vector<std::string> stable;
  std::vector<std::string> meteor;
  /// Designated quarter-of-year (1..4) of each periodic hashtag.
  std::map<std::string, int> periodic_quarter;
  /// Community pools, most popular member first.
  std::vector<std::vector<std::string>> communities;
  std::vector<std::string> drifted;
  /// Community before and after the drift year.
  std::map<std::string, std::pair<std::size_t, std::size_t>> drift_communities;
  std::map<std::string, std::string> drift_owner;
  /// Background hashtags in descending planted popularity.
  std::vector<std::string> background;
  std::map<std::string, std::size_t> user_community;
};

struct SyntheticCorpus {
  Corpus corpus;
  SyntheticTruth truth;
};

/// Throws Error when the spec is infeasible (planted sets exceeding the
/// hashtag budget, probabilities outside [0,1], bad year ranges...).
void validate(const SyntheticSpec& spec);

/// Pure function of `spec` (including its seed).
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace tagscope
