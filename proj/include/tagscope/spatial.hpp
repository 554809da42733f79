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

namespace tagscope::spatial {

/// Visit and hashtag proportions of one location category. A negative
/// `delta` marks a category where people share fewer hashtags than their
/// visit share would suggest.
struct CategoryStats {
  std::string category;
  std::size_t visits = 0;
  std::size_t hashtags = 0;
  double visit_share = 0.0;
  double hashtag_share = 0.0;
  double delta = 0.0;
};

/// Only posts whose location has a category are counted; each contributes one
/// visit and one hashtag instance per hashtag. Categories are ranked by visit
/// count (ties lexicographic) and the first `top_n` returned (0 = all).
/// Throws Error when no post has a mapped location.
std::vector<CategoryStats> category_propensity(const Corpus& corpus, std::size_t top_n = 10);

}  // namespace tagscope::spatial
