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

#include "tagscope/social.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <thread>

#include "tagscope/error.hpp"
#include "tagscope/random.hpp"

namespace tagscope::social {

// ---------------------------------------------------------------------------
// Graph

const std::string& BipartiteGraph::label(std::uint32_t node) const {
  return is_user(node) ? users_.at(node) : hashtags_.at(node - users_.size());
}

std::optional<std::uint32_t> BipartiteGraph::user_node(const std::string& user) const {
  const auto it = user_index_.find(user);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> BipartiteGraph::hashtag_node(const std::string& hashtag) const {
  const auto it = hashtag_index_.find(hashtag);
  if (it == hashtag_index_.end()) return std::nullopt;
  return it->second;
}

double BipartiteGraph::weight(std::uint32_t a, std::uint32_t b) const {
  for (const auto& e : adjacency_.at(a)) {
    if (e.node == b) return e.weight;
  }
  return 0.0;
}

BipartiteGraph build_graph(const Corpus& corpus) {
  std::map<std::string, std::map<std::string, double>> shares;
  std::set<std::string> tags;
  for (const auto& post : corpus.posts) {
    if (post.hashtags.empty()) continue;
    auto& row = shares[post.user];
    for (const auto& tag : post.hashtags) {
      row[tag] += 1.0;
      tags.insert(tag);
    }
  }
  if (shares.empty()) throw Error("bipartite graph: no post carries a hashtag");

  BipartiteGraph g;
  for (const auto& user : corpus.users) {
    if (shares.contains(user)) {
      g.user_index_[user] = static_cast<std::uint32_t>(g.users_.size());
      g.users_.push_back(user);
    } else {
      g.excluded_.push_back(user);
    }
  }
  const auto offset = static_cast<std::uint32_t>(g.users_.size());
  for (const auto& tag : tags) {
    g.hashtag_index_[tag] = offset + static_cast<std::uint32_t>(g.hashtags_.size());
    g.hashtags_.push_back(tag);
  }
  g.adjacency_.resize(g.node_count());
  for (const auto& [user, row] : shares) {
    const std::uint32_t u = g.user_index_.at(user);
    for (const auto& [tag, w] : row) {
      const std::uint32_t h = g.hashtag_index_.at(tag);
      g.adjacency_[u].push_back({h, w});
      g.adjacency_[h].push_back({u, w});
      g.total_weight_ += w;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Walks and profiles

void WalkConfig::validate() const {
  if (walk_times < 1 || walk_length < 1 || dimension < 1 || context_radius < 1 || negatives < 1 || epochs < 1) {
    throw Error("walk config: walk_times, walk_length, dimension, context_radius, negatives and epochs must be positive");
  }
}

std::vector<Walk> random_walks(const BipartiteGraph& graph, const WalkConfig& config) {
  config.validate();
  std::vector<AliasTable> transitions(graph.node_count());
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    const auto& edges = graph.neighbors(v);
    if (edges.empty()) throw std::logic_error("random walk: dangling node " + graph.label(v));
    std::vector<double> w;
    for (const auto& e : edges) w.push_back(e.weight);
    transitions[v] = AliasTable(w);
  }

  const std::size_t users = graph.user_count();
  std::vector<Walk> walks(users * config.walk_times);
  const auto walk_from = [&](std::size_t u, std::size_t w) {
    Rng rng(derive_seed({config.seed, u, w}));
    Walk& walk = walks[w * users + u];
    walk.reserve(config.walk_length + 1);
    auto node = static_cast<std::uint32_t>(u);
    walk.push_back(node);
    for (std::size_t step = 0; step < config.walk_length; ++step) {
      node = graph.neighbors(node)[transitions[node].sample(rng)].node;
      walk.push_back(node);
    }
  };

  const std::size_t threads = config.strict ? 1 : std::max<std::size_t>(1, config.threads);
  if (threads == 1) {
    for (std::size_t w = 0; w < config.walk_times; ++w) {
      for (std::size_t u = 0; u < users; ++u) walk_from(u, w);
    }
  } else {
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t u = t; u < users; u += threads) {
          for (std::size_t w = 0; w < config.walk_times; ++w) walk_from(u, w);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }
  return walks;
}

HashtagProfile learn_profiles(const BipartiteGraph& graph, const std::vector<Walk>& walks, const WalkConfig& config) {
  config.validate();
  if (walks.empty()) throw Error("learn_profiles: no walks");

  std::vector<std::uint64_t> counts(graph.node_count(), 0);
  for (const auto& walk : walks) {
    for (auto node : walk) ++counts.at(node);
  }
  // Prefixes keep user and hashtag tokens apart even when the ids collide.
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> freqs;
  std::vector<std::uint32_t> remap(graph.node_count(), 0);
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    if (counts[v] == 0) continue;
    remap[v] = static_cast<std::uint32_t>(tokens.size());
    tokens.push_back((graph.is_user(v) ? "u:" : "h:") + graph.label(v));
    freqs.push_back(counts[v]);
  }
  const Vocabulary vocab(std::move(tokens), std::move(freqs));

  std::vector<IndexedSentence> sentences;
  sentences.reserve(walks.size());
  for (const auto& walk : walks) {
    IndexedSentence s(walk.size());
    for (std::size_t i = 0; i < walk.size(); ++i) s[i] = remap[walk[i]];
    sentences.push_back(std::move(s));
  }

  TrainConfig train;
  train.mode = Architecture::cbow;
  train.dimension = config.dimension;
  train.window = config.context_radius;
  train.negatives = config.negatives;
  train.epochs = config.epochs;
  train.initial_lr = config.initial_lr;
  train.final_lr = config.final_lr;
  train.seed = config.seed;
  train.threads = config.threads;
  train.strict = config.strict;
  const auto result = train_indexed(sentences, vocab, train);

  HashtagProfile profiles;
  for (std::uint32_t u = 0; u < graph.user_count(); ++u) {
    if (counts[u] == 0) continue;
    const auto row = result.table.row(remap[u]);
    profiles.emplace(graph.users()[u], std::vector<float>(row.begin(), row.end()));
  }
  return profiles;
}

// ---------------------------------------------------------------------------
// Prediction and baselines

Predictions predict(const HashtagProfile& profiles, std::span<const UserPair> pairs, double threshold,
                    std::span<const bool> labels) {
  if (!labels.empty() && labels.size() != pairs.size()) throw Error("predict: label count mismatch");
  Predictions out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto a = profiles.find(pairs[i].first);
    const auto b = profiles.find(pairs[i].second);
    if (a == profiles.end() || b == profiles.end()) {
      out.skipped.push_back(pairs[i]);
      continue;
    }
    ScoredPair s;
    s.users = pairs[i];
    s.distance = cosine_distance(std::span<const float>(a->second), std::span<const float>(b->second));
    s.friends = labels.empty() ? false : labels[i];
    s.predicted = s.distance < threshold;
    out.scored.push_back(std::move(s));
  }
  return out;
}

HashtagSets::HashtagSets(const Corpus& corpus) {
  for (const auto& post : corpus.posts) {
    auto& set = sets_[post.user];
    set.insert(set.end(), post.hashtags.begin(), post.hashtags.end());
  }
  for (auto& [user, set] : sets_) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
}

const std::vector<std::string>& HashtagSets::of(const std::string& user) const {
  const auto it = sets_.find(user);
  return it == sets_.end() ? empty_ : it->second;
}

BaselineScores baselines(const HashtagSets& sets, const UserPair& pair) {
  const auto& a = sets.of(pair.first);
  const auto& b = sets.of(pair.second);
  std::size_t common = 0;
  for (auto i = a.begin(), j = b.begin(); i != a.end() && j != b.end();) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  BaselineScores s;
  s.common = static_cast<double>(common);
  s.jaccard = uni ? static_cast<double>(common) / static_cast<double>(uni) : 0.0;
  s.preferential = static_cast<double>(a.size()) * static_cast<double>(b.size());
  return s;
}

BaselineScores baselines(const Corpus& corpus, const UserPair& pair) { return baselines(HashtagSets(corpus), pair); }

std::vector<UserPair> sample_strangers(const Corpus& corpus, std::size_t n, std::uint64_t seed,
                                       std::span<const std::string> eligible) {
  std::vector<std::string> pool;
  if (eligible.empty()) {
    pool.assign(corpus.users.begin(), corpus.users.end());
  } else {
    pool.assign(eligible.begin(), eligible.end());
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  }
  const std::size_t m = pool.size();
  const std::size_t total = m < 2 ? 0 : m * (m - 1) / 2;
  std::size_t friend_pairs = 0;
  for (const auto& [a, b] : corpus.friendships) {
    if (std::binary_search(pool.begin(), pool.end(), a) && std::binary_search(pool.begin(), pool.end(), b)) {
      ++friend_pairs;
    }
  }
  const std::size_t available = total - friend_pairs;
  if (n > available) {
    throw Error("sample_strangers: requested " + std::to_string(n) + " pairs but only " +
                std::to_string(available) + " non-friend pairs exist");
  }
  std::vector<UserPair> out;
  if (n == 0) return out;

  Rng rng(seed);
  if (n <= available / 2) {
    std::set<std::pair<std::size_t, std::size_t>> taken;
    while (out.size() < n) {
      std::size_t i = rng.below(m);
      std::size_t j = rng.below(m);
      if (i == j) continue;
      if (j < i) std::swap(i, j);
      if (corpus.are_friends(pool[i], pool[j]) || !taken.emplace(i, j).second) continue;
      out.emplace_back(pool[i], pool[j]);
    }
    return out;
  }
  // Dense request: enumerate the complement and take a random prefix.
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  candidates.reserve(available);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (!corpus.are_friends(pool[i], pool[j])) candidates.emplace_back(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(candidates[i], candidates[i + rng.below(candidates.size() - i)]);
    out.emplace_back(pool[candidates[i].first], pool[candidates[i].second]);
  }
  return out;
}

double auc(std::span<const double> positive, std::span<const double> negative) {
  if (positive.empty() || negative.empty()) throw Error("auc: both classes need at least one score");
  std::vector<std::pair<double, bool>> all;
  all.reserve(positive.size() + negative.size());
  for (double s : positive) all.emplace_back(s, true);
  for (double s : negative) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // Sum of mid-ranks (1-based) of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t pos_in_tie = 0;
    while (j < all.size() && all[j].first == all[i].first) {
      pos_in_tie += all[j].second ? 1 : 0;
      ++j;
    }
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += mid_rank * static_cast<double>(pos_in_tie);
    i = j;
  }
  const double np = static_cast<double>(positive.size());
  const double nn = static_cast<double>(negative.size());
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

// ---------------------------------------------------------------------------
// End to end

PredictionReport friendship_eval(const Corpus& corpus, const WalkConfig& config) {
  const auto graph = build_graph(corpus);
  const auto walks = random_walks(graph, config);
  const auto profiles = learn_profiles(graph, walks, config);

  PredictionReport report;
  report.excluded_users = graph.excluded_users();

  std::vector<UserPair> friends;
  for (const auto& pair : corpus.friendships) {
    if (profiles.contains(pair.first) && profiles.contains(pair.second)) {
      friends.push_back(pair);
    } else {
      report.skipped_friend_pairs.push_back(pair);
    }
  }
  if (friends.size() < 10) throw Error("friendship evaluation needs at least 10 friend pairs with profiles");

  std::vector<std::string> eligible;
  for (const auto& [user, vec] : profiles) eligible.push_back(user);
  const auto strangers = sample_strangers(corpus, friends.size(), derive_seed({config.seed, 0x57}), eligible);

  const HashtagSets sets(corpus);
  const auto add = [&](const UserPair& pair, bool is_friend) {
    EvaluatedPair e;
    e.users = pair;
    e.friends = is_friend;
    e.distance = cosine_distance(std::span<const float>(profiles.at(pair.first)),
                                 std::span<const float>(profiles.at(pair.second)));
    e.baseline = baselines(sets, pair);
    report.pairs.push_back(std::move(e));
  };
  for (const auto& pair : friends) add(pair, true);
  for (const auto& pair : strangers) add(pair, false);

  const auto method_auc = [&](auto score, bool zero_common_only) -> std::optional<double> {
    std::vector<double> pos, neg;
    for (const auto& e : report.pairs) {
      if (zero_common_only && e.baseline.common != 0.0) continue;
      (e.friends ? pos : neg).push_back(score(e));
    }
    if (pos.empty() || neg.empty()) return std::nullopt;
    return auc(pos, neg);
  };
  const auto by_profile = [](const EvaluatedPair& e) { return -e.distance; };
  report.auc.profile = *method_auc(by_profile, false);
  report.auc.jaccard = *method_auc([](const EvaluatedPair& e) { return e.baseline.jaccard; }, false);
  report.auc.common = *method_auc([](const EvaluatedPair& e) { return e.baseline.common; }, false);
  report.auc.preferential = *method_auc([](const EvaluatedPair& e) { return e.baseline.preferential; }, false);
  report.zero_common_auc = method_auc(by_profile, true);
  for (const auto& e : report.pairs) {
    if (e.baseline.common == 0.0) ++(e.friends ? report.zero_common_friends : report.zero_common_strangers);
  }
  return report;
}

}  // namespace tagscope::social
