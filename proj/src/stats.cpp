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

#include "tagscope/stats.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "tagscope/error.hpp"

namespace tagscope::stats {

std::vector<LogBin> log_bins(const std::vector<std::size_t>& values) {
  std::vector<LogBin> bins;
  if (values.empty()) return bins;
  const std::size_t top = *std::max_element(values.begin(), values.end());
  for (std::size_t lower = 1; lower <= top; lower *= 2) bins.push_back({lower, 2 * lower - 1, 0, 0.0});
  for (std::size_t v : values) {
    if (v == 0) continue;
    std::size_t b = 0;
    while (bins[b].upper < v) ++b;
    ++bins[b].count;
  }
  for (auto& bin : bins) bin.proportion = static_cast<double>(bin.count) / static_cast<double>(values.size());
  return bins;
}

CorpusSummary report_stats(const Corpus& corpus, std::size_t top_k) {
  if (corpus.posts.empty()) throw Error("stats: corpus has no posts");
  CorpusSummary s;
  s.posts = corpus.posts.size();
  s.users = corpus.users.size();
  s.friendships = corpus.friendships.size();

  std::vector<std::size_t> per_post(kMaxHashtagsPerPost + 1, 0);
  std::unordered_map<std::string, std::size_t> shares;
  std::unordered_map<std::string, std::set<std::string>> sharers;
  struct QuarterTally {
    std::size_t posts = 0, tagged = 0;
    std::set<std::string> users, tagged_users;
  };
  std::map<QuarterBucket, QuarterTally> quarters;

  for (const auto& post : corpus.posts) {
    ++per_post[std::min(post.hashtags.size(), kMaxHashtagsPerPost)];
    s.hashtag_instances += post.hashtags.size();
    if (post.location) ++s.located_posts;
    for (const auto& tag : post.hashtags) {
      ++shares[tag];
      sharers[tag].insert(post.user);
    }
    auto& q = quarters[QuarterBucket::of(post.time)];
    ++q.posts;
    q.users.insert(post.user);
    if (!post.hashtags.empty()) {
      ++q.tagged;
      q.tagged_users.insert(post.user);
    }
  }
  s.hashtags = shares.size();
  for (std::size_t c : per_post) s.hashtags_per_post.push_back(static_cast<double>(c) / static_cast<double>(s.posts));

  std::vector<std::size_t> share_values, user_values;
  for (const auto& [tag, c] : shares) {
    share_values.push_back(c);
    user_values.push_back(sharers[tag].size());
  }
  s.share_counts = log_bins(share_values);
  s.user_counts = log_bins(user_values);

  for (const auto& tag : top_k_hashtags(shares, top_k)) s.top.push_back({tag, shares[tag], sharers[tag].size()});

  for (const auto& [quarter, q] : quarters) {
    AdoptionPoint p;
    p.quarter = quarter;
    p.posts = q.posts;
    p.tagged_posts = static_cast<double>(q.tagged) / static_cast<double>(q.posts);
    p.users = q.users.size();
    p.tagged_users = static_cast<double>(q.tagged_users.size()) / static_cast<double>(q.users.size());
    s.adoption.push_back(p);
  }
  return s;
}

}  // namespace tagscope::stats
