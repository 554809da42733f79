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

#include "tagscope/spatial.hpp"

#include <algorithm>
#include <map>

#include "tagscope/error.hpp"

namespace tagscope::spatial {

std::vector<CategoryStats> category_propensity(const Corpus& corpus, std::size_t top_n) {
  std::map<std::string, CategoryStats> by_category;
  std::size_t total_visits = 0;
  std::size_t total_hashtags = 0;
  for (const auto& post : corpus.posts) {
    if (!post.location) continue;
    const auto it = corpus.location_categories.find(*post.location);
    if (it == corpus.location_categories.end()) continue;
    auto& stats = by_category[it->second];
    stats.category = it->second;
    ++stats.visits;
    stats.hashtags += post.hashtags.size();
    ++total_visits;
    total_hashtags += post.hashtags.size();
  }
  if (total_visits == 0) throw Error("category propensity: no post has a categorized location");

  std::vector<CategoryStats> ranked;
  for (auto& [name, stats] : by_category) {
    stats.visit_share = static_cast<double>(stats.visits) / static_cast<double>(total_visits);
    stats.hashtag_share =
        total_hashtags ? static_cast<double>(stats.hashtags) / static_cast<double>(total_hashtags) : 0.0;
    stats.delta = stats.hashtag_share - stats.visit_share;
    ranked.push_back(stats);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const CategoryStats& a, const CategoryStats& b) { return a.visits > b.visits; });
  if (top_n > 0 && ranked.size() > top_n) ranked.resize(top_n);
  return ranked;
}

}  // namespace tagscope::spatial
