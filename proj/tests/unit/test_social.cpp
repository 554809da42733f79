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

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "tagscope/error.hpp"
#include "tagscope/random.hpp"
#include "tagscope/social.hpp"
#include "tagscope/synthetic.hpp"

using namespace tagscope;
using namespace tagscope::social;
using tagscope::testing::post;

namespace {

double pairwise_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(pos.size() * neg.size());
}

// Two communities of users with disjoint hashtag pools.
Corpus two_communities() {
  Corpus corpus;
  Rng rng(12);
  for (int c = 0; c < 2; ++c) {
    for (int u = 0; u < 15; ++u) {
      const std::string user = std::string(c ? "b" : "a") + std::to_string(u);
      for (int p = 0; p < 12; ++p) {
        corpus.add_post(post(user, p, {std::string(c ? "y" : "x") + std::to_string(rng.below(6))}));
      }
    }
  }
  return corpus;
}

WalkConfig small_walks() {
  WalkConfig config;
  config.walk_times = 20;
  config.walk_length = 40;
  config.dimension = 32;
  config.context_radius = 5;
  return config;
}

// Upper 0.1% point of chi-square via the Wilson-Hilferty approximation.
double chi2_critical(double df) {
  const double z = 3.09;
  const double t = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - t + z * std::sqrt(t), 3.0);
}

}  // namespace

TEST_CASE("bipartite graph construction") {
  Corpus corpus;
  for (int i = 0; i < 3; ++i) corpus.add_post(post("alice", i, {"a"}));
  corpus.add_post(post("alice", 9, {"b"}));
  corpus.add_post(post("bob", 9, {"b"}));
  corpus.add_post(post("quiet", 9, {}));
  const auto g = build_graph(corpus);
  CHECK(g.user_count() == 2);
  CHECK(g.hashtag_count() == 2);
  CHECK(g.excluded_users() == std::vector<std::string>{"quiet"});
  const auto alice = *g.user_node("alice");
  const auto a = *g.hashtag_node("a");
  CHECK(g.weight(alice, a) == 3.0);
  CHECK(g.weight(a, alice) == 3.0);
  CHECK_FALSE(g.user_node("quiet").has_value());
  CHECK(g.total_weight() == 5.0);

  const auto synth = generate_synthetic(SyntheticSpec{}).corpus;
  double instances = 0.0;
  for (const auto& p : synth.posts) instances += static_cast<double>(p.hashtags.size());
  CHECK(build_graph(synth).total_weight() == instances);
}

TEST_CASE("random walks") {
  SUBCASE("a single edge forces alternation") {
    Corpus corpus;
    corpus.add_post(post("u", 1, {"h"}));
    auto config = small_walks();
    config.walk_times = 3;
    config.walk_length = 7;
    const auto g = build_graph(corpus);
    const auto walks = random_walks(g, config);
    CHECK(walks.size() == 3);
    for (const auto& w : walks) {
      REQUIRE(w.size() == 8);
      for (std::size_t i = 0; i < w.size(); ++i) CHECK(g.is_user(w[i]) == (i % 2 == 0));
    }
  }
  SUBCASE("first steps follow edge weights") {
    Corpus corpus;
    for (int i = 0; i < 9; ++i) corpus.add_post(post("u", i, {"h1"}));
    corpus.add_post(post("u", 10, {"h2"}));
    auto config = small_walks();
    config.walk_times = 10000;
    config.walk_length = 1;
    const auto g = build_graph(corpus);
    const auto walks = random_walks(g, config);
    std::size_t h1 = 0;
    for (const auto& w : walks) h1 += w[1] == *g.hashtag_node("h1");
    CHECK(static_cast<double>(h1) / 10000.0 == doctest::Approx(0.9).epsilon(0.02 / 0.9));
  }
  SUBCASE("walk count, starts and transition frequencies") {
    SyntheticSpec spec;
    spec.user_count = 80;
    spec.post_count = 3000;
    spec.community_count = 4;
    spec.community_size = 10;
    spec.drifted_count = 0;
    spec.hashtag_count = 300;
    const auto corpus = generate_synthetic(spec).corpus;
    const auto g = build_graph(corpus);
    auto config = small_walks();
    config.walk_times = 40;
    config.walk_length = 60;
    const auto walks = random_walks(g, config);
    REQUIRE(walks.size() == g.user_count() * config.walk_times);
    for (std::size_t i = 0; i < walks.size(); ++i) CHECK(walks[i].front() == i % g.user_count());

    std::map<std::uint32_t, std::map<std::uint32_t, double>> seen;
    for (const auto& w : walks) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) seen[w[i]][w[i + 1]] += 1.0;
    }
    std::size_t tested = 0;
    for (const auto& [node, next] : seen) {
      double n = 0.0;
      for (const auto& [to, c] : next) n += c;
      if (g.neighbors(node).size() < 2) continue;
      double total_w = 0.0, min_w = 1e300;
      for (const auto& e : g.neighbors(node)) {
        total_w += e.weight;
        min_w = std::min(min_w, e.weight);
      }
      if (n * min_w / total_w < 5.0) continue;
      double chi2 = 0.0;
      for (const auto& e : g.neighbors(node)) {
        const double expected = n * e.weight / total_w;
        const auto it = next.find(e.node);
        const double observed = it == next.end() ? 0.0 : it->second;
        chi2 += (observed - expected) * (observed - expected) / expected;
      }
      CHECK(chi2 < chi2_critical(static_cast<double>(g.neighbors(node).size() - 1)));
      ++tested;
    }
    CHECK(tested > 0);

    auto threaded = config;
    threaded.strict = false;
    threaded.threads = 3;
    CHECK(random_walks(g, threaded) == walks);
  }
}

TEST_CASE("profiles separate planted communities") {
  const auto corpus = two_communities();
  const auto g = build_graph(corpus);
  const auto config = small_walks();
  const auto walks = random_walks(g, config);
  const auto profiles = learn_profiles(g, walks, config);
  CHECK(profiles.size() == 30);
  double intra = 0.0, inter = 0.0;
  std::size_t ni = 0, nx = 0;
  for (const auto& [u, pu] : profiles) {
    for (const auto& [v, pv] : profiles) {
      if (u >= v) continue;
      const double d = cosine_distance(std::span<const float>(pu), std::span<const float>(pv));
      if (u[0] == v[0]) {
        intra += d;
        ++ni;
      } else {
        inter += d;
        ++nx;
      }
    }
  }
  CHECK(intra / ni < inter / nx);
  CHECK(learn_profiles(g, walks, config) == profiles);
}

TEST_CASE("zero learning rate keeps profiles at their initialization") {
  const auto corpus = two_communities();
  const auto g = build_graph(corpus);
  auto config = small_walks();
  config.initial_lr = 0.0;
  config.final_lr = 0.0;
  const auto walks = random_walks(g, config);
  const auto once = learn_profiles(g, walks, config);
  config.epochs = 2;
  CHECK(learn_profiles(g, walks, config) == once);
  for (const auto& [u, p] : once) {
    for (float v : p) CHECK(std::abs(v) <= 0.5f / 32.0f);
  }
}

TEST_CASE("predict") {
  HashtagProfile profiles = {{"a", {1, 0}}, {"b", {1, 0.1f}}, {"c", {-1, 0.2f}}, {"d", {0, 1}}};
  const std::vector<UserPair> pairs = {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"a", "zz"}};
  const auto all = predict(profiles, pairs, 2.0);
  CHECK(all.scored.size() == 4);
  CHECK(all.skipped.size() == 1);
  for (const auto& s : all.scored) CHECK(s.predicted);
  for (const auto& s : predict(profiles, pairs, 0.0).scored) CHECK_FALSE(s.predicted);
  for (double t = 0.0; t < 2.0; t += 0.1) {
    const auto lo = predict(profiles, pairs, t), hi = predict(profiles, pairs, t + 0.1);
    for (std::size_t i = 0; i < lo.scored.size(); ++i) CHECK((!lo.scored[i].predicted || hi.scored[i].predicted));
  }
  const bool labels[2] = {true, false};
  CHECK_THROWS_AS(predict(profiles, pairs, 1.0, labels), Error);
}

TEST_CASE("median-threshold prediction on a homophilous corpus") {
  SyntheticSpec spec;
  spec.periodic_count = spec.rising_count = spec.stable_count = spec.meteor_count = 0;
  spec.drifted_count = 0;
  spec.community_size = 60;
  spec.tags_per_user = 4;
  const auto corpus = generate_synthetic(spec).corpus;
  const auto config = small_walks();
  const auto g = build_graph(corpus);
  const auto profiles = learn_profiles(g, random_walks(g, config), config);
  std::vector<UserPair> pairs(corpus.friendships.begin(), corpus.friendships.end());
  const auto strangers = sample_strangers(corpus, pairs.size(), 3);
  std::vector<char> labels(pairs.size(), 1);
  pairs.insert(pairs.end(), strangers.begin(), strangers.end());
  labels.resize(pairs.size(), 0);
  std::unique_ptr<bool[]> flags(new bool[labels.size()]);
  for (std::size_t i = 0; i < labels.size(); ++i) flags[i] = labels[i];
  auto scored = predict(profiles, pairs, 2.1, {flags.get(), labels.size()}).scored;
  std::vector<double> d;
  for (const auto& s : scored) d.push_back(s.distance);
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
  const double median = d[d.size() / 2];
  std::size_t correct = 0;
  for (const auto& s : predict(profiles, pairs, median, {flags.get(), labels.size()}).scored) {
    correct += s.predicted == s.friends;
  }
  CHECK(static_cast<double>(correct) / scored.size() > 0.7);
}

TEST_CASE("baseline scores") {
  Corpus corpus;
  corpus.add_post(post("u", 1, {"a", "b", "c"}));
  corpus.add_post(post("v", 1, {"b", "c", "d"}));
  corpus.add_post(post("w", 1, {"x", "y"}));
  corpus.add_post(post("z", 1, {"b", "a"}));
  corpus.add_post(post("z", 2, {"c"}));
  auto s = baselines(corpus, {"u", "v"});
  CHECK(s.common == 2);
  CHECK(s.jaccard == doctest::Approx(0.5));
  CHECK(s.preferential == 9);
  s = baselines(corpus, {"w", "v"});
  CHECK(s.common == 0);
  CHECK(s.jaccard == 0);
  CHECK(s.preferential == 6);
  CHECK(baselines(corpus, {"u", "z"}).jaccard == 1.0);
}

TEST_CASE("stranger sampling") {
  Corpus complete;
  for (const char* a : {"a", "b", "c"}) {
    for (const char* b : {"a", "b", "c"}) {
      if (std::string(a) < b) complete.add_friendship(a, b);
    }
  }
  CHECK_THROWS_AS(sample_strangers(complete, 1, 1), Error);
  CHECK(sample_strangers(complete, 0, 1).empty());

  const auto corpus = generate_synthetic(SyntheticSpec{}).corpus;
  for (std::size_t n : {std::size_t{50}, std::size_t{5000}}) {
    const auto pairs = sample_strangers(corpus, n, 7);
    CHECK(pairs.size() == n);
    std::set<UserPair> unique(pairs.begin(), pairs.end());
    CHECK(unique.size() == n);
    for (const auto& p : pairs) {
      CHECK(p.first < p.second);
      CHECK_FALSE(corpus.are_friends(p.first, p.second));
    }
    CHECK(sample_strangers(corpus, n, 7) == pairs);
  }
  // Dense request on a small pool goes through enumeration.
  const std::vector<std::string> few = {"u000", "u001", "u002", "u003", "u004"};
  std::size_t friends_inside = 0;
  for (std::size_t i = 0; i < few.size(); ++i) {
    for (std::size_t j = i + 1; j < few.size(); ++j) friends_inside += corpus.are_friends(few[i], few[j]);
  }
  const auto all = sample_strangers(corpus, 10 - friends_inside, 2, few);
  CHECK(std::set<UserPair>(all.begin(), all.end()).size() == 10 - friends_inside);
}

TEST_CASE("AUC") {
  CHECK(auc(std::vector<double>{3, 4}, std::vector<double>{1, 2}) == 1.0);
  CHECK(auc(std::vector<double>{1, 1}, std::vector<double>{1, 1, 1}) == 0.5);
  CHECK_THROWS_AS(auc(std::vector<double>{}, std::vector<double>{1}), Error);

  Rng rng(6);
  std::vector<double> pos(200), neg(200);
  for (auto& v : pos) v = std::round(rng.normal() * 4 + 1) / 4;
  for (auto& v : neg) v = std::round(rng.normal() * 4) / 4;
  const double a = auc(pos, neg);
  CHECK(a == doctest::Approx(pairwise_auc(pos, neg)).epsilon(1e-12));

  auto tp = pos, tn = neg;
  for (auto& v : tp) v = std::exp(3 * v) - 2;
  for (auto& v : tn) v = std::exp(3 * v) - 2;
  CHECK(auc(tp, tn) == doctest::Approx(a).epsilon(1e-12));

  // Shuffled labels carry no signal.
  std::vector<double> scores(pos);
  scores.insert(scores.end(), neg.begin(), neg.end());
  std::vector<double> scores_big;
  for (int rep = 0; rep < 3; ++rep) scores_big.insert(scores_big.end(), scores.begin(), scores.end());
  rng.shuffle(scores_big);
  const std::vector<double> first(scores_big.begin(), scores_big.begin() + 600);
  const std::vector<double> second(scores_big.begin() + 600, scores_big.end());
  const double shuffled = auc(first, second);
  CHECK(shuffled >= 0.45);
  CHECK(shuffled <= 0.55);
}

TEST_CASE("friendship_eval end to end") {
  SyntheticSpec spec;
  spec.periodic_count = spec.rising_count = spec.stable_count = spec.meteor_count = 0;
  spec.drifted_count = 0;
  spec.user_count = 200;
  spec.post_count = 8000;
  const auto corpus = generate_synthetic(spec).corpus;
  const auto report = friendship_eval(corpus, small_walks());
  std::size_t friends = 0;
  for (const auto& p : report.pairs) friends += p.friends;
  CHECK(friends == report.pairs.size() - friends);
  CHECK(report.auc.profile > 0.6);
  CHECK(report.auc.profile >= 0.0);
  CHECK(report.auc.profile <= 1.0);

  Corpus tiny;
  tiny.add_post(post("a", 1, {"x"}));
  tiny.add_post(post("b", 1, {"x"}));
  tiny.add_friendship("a", "b");
  CHECK_THROWS_AS(friendship_eval(tiny, small_walks()), Error);
}
