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
#include <unordered_map>
#include <vector>

#include "tagscope/corpus.hpp"
#include "tagscope/embedding.hpp"

namespace tagscope::social {

/// Weighted user-hashtag graph. Node ids: users occupy [0, user_count),
/// hashtags [user_count, node_count). Edge weight = number of times the user
/// shared the hashtag.
class BipartiteGraph {
 public:
  struct Edge {
    std::uint32_t node;
    double weight;
  };

  std::size_t user_count() const noexcept { return users_.size(); }
  std::size_t hashtag_count() const noexcept { return hashtags_.size(); }
  std::size_t node_count() const noexcept { return users_.size() + hashtags_.size(); }
  bool is_user(std::uint32_t node) const noexcept { return node < users_.size(); }

  const std::vector<std::string>& users() const noexcept { return users_; }
  const std::vector<std::string>& hashtags() const noexcept { return hashtags_; }
  /// Users with posts but no hashtags; they are not part of the graph.
  const std::vector<std::string>& excluded_users() const noexcept { return excluded_; }

  const std::string& label(std::uint32_t node) const;
  std::optional<std::uint32_t> user_node(const std::string& user) const;
  std::optional<std::uint32_t> hashtag_node(const std::string& hashtag) const;

  const std::vector<Edge>& neighbors(std::uint32_t node) const { return adjacency_.at(node); }
  double weight(std::uint32_t a, std::uint32_t b) const;
  double total_weight() const noexcept { return total_weight_; }

  friend BipartiteGraph build_graph(const Corpus& corpus);

 private:
  std::vector<std::string> users_;
  std::vector<std::string> hashtags_;
  std::vector<std::string> excluded_;
  std::unordered_map<std::string, std::uint32_t> user_index_;
  std::unordered_map<std::string, std::uint32_t> hashtag_index_;
  std::vector<std::vector<Edge>> adjacency_;
  double total_weight_ = 0.0;
};

/// Throws Error when no post carries a hashtag.
BipartiteGraph build_graph(const Corpus& corpus);

struct WalkConfig {
  std::size_t walk_times = 80;
  /// Steps per walk; a walk visits walk_length + 1 nodes.
  std::size_t walk_length = 120;
  std::size_t dimension = 512;
  std::size_t context_radius = 10;
  std::size_t negatives = 5;
  std::size_t epochs = 1;
  double initial_lr = 0.025;
  double final_lr = 1e-4;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool strict = true;

  void validate() const;
};

using Walk = std::vector<std::uint32_t>;

/// walk_times walks from every user node, transitions proportional to edge
/// weight. Walk w from user u uses its own generator seeded by
/// (seed, u, w), so output does not depend on `threads`.
std::vector<Walk> random_walks(const BipartiteGraph& graph, const WalkConfig& config);

/// Learned user vectors keyed by user id.
using HashtagProfile = std::map<std::string, std::vector<float>>;

/// CBOW with negative sampling over the walks (context radius from the
/// config, windows truncated at walk ends). Hashtag node vectors are trained
/// and then dropped.
HashtagProfile learn_profiles(const BipartiteGraph& graph, const std::vector<Walk>& walks, const WalkConfig& config);

struct ScoredPair {
  UserPair users;
  double distance = 0.0;
  bool friends = false;   // ground-truth label
  bool predicted = false; // distance < threshold
};

struct Predictions {
  std::vector<ScoredPair> scored;
  /// Pairs where at least one user has no profile.
  std::vector<UserPair> skipped;
};

/// Cosine distance for each pair; predicted friends iff distance < threshold.
/// `labels` (optional) marks which pairs are true friendships.
Predictions predict(const HashtagProfile& profiles, std::span<const UserPair> pairs, double threshold,
                    std::span<const bool> labels = {});

struct BaselineScores {
  double common = 0.0;
  double jaccard = 0.0;
  double preferential = 0.0;
};

/// Per-user distinct hashtag sets, sorted, for repeated baseline queries.
class HashtagSets {
 public:
  explicit HashtagSets(const Corpus& corpus);
  const std::vector<std::string>& of(const std::string& user) const;

 private:
  std::unordered_map<std::string, std::vector<std::string>> sets_;
  std::vector<std::string> empty_;
};

BaselineScores baselines(const HashtagSets& sets, const UserPair& pair);
BaselineScores baselines(const Corpus& corpus, const UserPair& pair);

/// n distinct unordered non-friend pairs, uniform without replacement, drawn
/// from `eligible` users (all corpus users when empty). Throws Error when
/// fewer than n such pairs exist.
std::vector<UserPair> sample_strangers(const Corpus& corpus, std::size_t n, std::uint64_t seed,
                                       std::span<const std::string> eligible = {});

/// Mann-Whitney AUC with ties counted one half: the probability that a random
/// positive outscores a random negative. Throws Error on an empty side.
double auc(std::span<const double> positive, std::span<const double> negative);

struct MethodAuc {
  double profile = 0.0;
  double jaccard = 0.0;
  double common = 0.0;
  double preferential = 0.0;
};

struct EvaluatedPair {
  UserPair users;
  bool friends = false;
  double distance = 0.0;
  BaselineScores baseline;
};

struct PredictionReport {
  std::vector<EvaluatedPair> pairs;
  MethodAuc auc;
  /// Profile AUC restricted to pairs with no common hashtag (absent when
  /// either side of that subgroup is empty).
  std::optional<double> zero_common_auc;
  std::size_t zero_common_friends = 0;
  std::size_t zero_common_strangers = 0;
  std::vector<UserPair> skipped_friend_pairs;
  std::vector<std::string> excluded_users;
};

/// Graph -> walks -> profiles -> distances for every friend pair and an equal
/// number of sampled strangers -> AUC for the profile method and baselines.
/// Throws Error with fewer than 10 usable friend pairs.
PredictionReport friendship_eval(const Corpus& corpus, const WalkConfig& config);

}  // namespace tagscope::social
