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

#include <doctest.h>

#include "helpers.hpp"
#include "tagscope/error.hpp"
#include "tagscope/spatial.hpp"
#include "tagscope/synthetic.hpp"

using namespace tagscope;
using tagscope::testing::post;

namespace {

const spatial::CategoryStats& find(const std::vector<spatial::CategoryStats>& stats, const std::string& name) {
  for (const auto& s : stats) {
    if (s.category == name) return s;
  }
  FAIL("missing category " << name);
  throw Error("unreachable");
}

}  // namespace

TEST_CASE("all posts at one category") {
  Corpus corpus;
  corpus.location_categories = {{"l1", "park"}};
  corpus.add_post(post("a", 1, {"x", "y"}, "l1"));
  corpus.add_post(post("b", 2, {}, "l1"));
  const auto stats = spatial::category_propensity(corpus);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].visits == 2);
  CHECK(stats[0].hashtags == 2);
  CHECK(stats[0].visit_share == 1.0);
  CHECK(stats[0].hashtag_share == 1.0);
  CHECK(stats[0].delta == 0.0);
}

TEST_CASE("visit and hashtag shares from direct counts") {
  Corpus corpus;
  corpus.location_categories = {{"la", "A"}, {"lb", "B"}};
  for (int i = 0; i < 10; ++i) {
    corpus.add_post(post("u", i, {}, "la"));
    corpus.add_post(post("v", i, {"p", "q"}, "lb"));
  }
  const auto stats = spatial::category_propensity(corpus);
  CHECK(find(stats, "A").delta == doctest::Approx(-0.5));
  CHECK(find(stats, "B").delta == doctest::Approx(0.5));
  CHECK(find(stats, "B").hashtags == 20);
}

TEST_CASE("deltas sum to zero and unlocated posts are ignored") {
  const auto synth = generate_synthetic(SyntheticSpec{});
  const auto all = spatial::category_propensity(synth.corpus, 0);
  double sum = 0.0;
  for (const auto& s : all) sum += s.delta;
  CHECK(sum == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(all.size() == SyntheticSpec{}.categories.size());

  Corpus located;
  located.location_categories = synth.corpus.location_categories;
  for (const auto& p : synth.corpus.posts) {
    if (p.location) located.add_post(p);
  }
  const auto again = spatial::category_propensity(located, 0);
  REQUIRE(again.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(again[i].category == all[i].category);
    CHECK(again[i].delta == all[i].delta);
  }

  const auto top = spatial::category_propensity(synth.corpus, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].visits >= top[1].visits);
  CHECK(top[1].visits >= top[2].visits);
}

TEST_CASE("a hashtag-averse category has a negative delta") {
  const auto synth = generate_synthetic(SyntheticSpec{});
  const auto stats = spatial::category_propensity(synth.corpus, 0);
  CHECK(find(stats, "bar").delta < 0.0);
  for (const auto& s : stats) {
    if (s.category != "bar") CHECK(s.delta > find(stats, "bar").delta);
  }
}

TEST_CASE("posts without a known category are skipped; none at all is an error") {
  Corpus corpus;
  corpus.location_categories = {{"l1", "park"}};
  corpus.add_post(post("a", 1, {"x"}, "l1"));
  corpus.add_post(post("a", 2, {"x", "y", "z"}, "unknown"));
  const auto stats = spatial::category_propensity(corpus);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].hashtags == 1);

  Corpus empty;
  empty.add_post(post("a", 1, {"x"}));
  CHECK_THROWS_AS(spatial::category_propensity(empty), Error);
}
