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
#include "tagscope/embedding.hpp"
#include "tagscope/error.hpp"
#include "tagscope/random.hpp"
#include "tagscope/synthetic.hpp"

using namespace tagscope;
using tagscope::testing::TempDir;

namespace {

double cosine(std::span<const float> a, std::span<const float> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += double(a[i]) * b[i];
    aa += double(a[i]) * a[i];
    bb += double(b[i]) * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

std::vector<Sentence> paired_sentences() {
  std::vector<Sentence> s;
  for (int i = 0; i < 200; ++i) {
    s.push_back({"a", "b"});
    s.push_back({"c", "d"});
  }
  return s;
}

struct CommunityCorpus {
  std::vector<Sentence> sentences;
  std::map<std::string, std::size_t> community;
};

CommunityCorpus community_corpus() {
  SyntheticSpec spec;
  spec.periodic_count = spec.rising_count = spec.stable_count = spec.meteor_count = 0;
  spec.drifted_count = 0;
  spec.hashtag_count = 300;
  spec.post_count = 15000;
  const auto synth = generate_synthetic(spec);
  CommunityCorpus out;
  for (const auto& post : synth.corpus.posts) {
    if (!post.hashtags.empty()) out.sentences.push_back(post.hashtags);
  }
  for (std::size_t c = 0; c < synth.truth.communities.size(); ++c) {
    for (const auto& tag : synth.truth.communities[c]) out.community[tag] = c;
  }
  return out;
}

}  // namespace

TEST_CASE("build_vocab orders by frequency then text") {
  const auto vocab = build_vocab({{"a", "b"}, {"a"}}, 1);
  REQUIRE(vocab.size() == 2);
  CHECK(vocab.index_of("a") == 0);
  CHECK(vocab.index_of("b") == 1);
  CHECK(vocab.frequency(0) == 2);
  CHECK_THROWS_AS(build_vocab({{"a", "b"}}, 2), Error);
  CHECK_THROWS_AS(vocab.index_of("zzz"), Error);
  CHECK(vocab.encode({"b", "zzz", "a"}) == IndexedSentence{1, 0});

  const auto tied = build_vocab({{"y", "x"}, {"z"}}, 1);
  CHECK(tied.tokens() == std::vector<std::string>{"x", "y", "z"});

  SyntheticSpec spec;
  spec.periodic_count = spec.rising_count = spec.stable_count = spec.meteor_count = 0;
  spec.community_count = 0;
  spec.drifted_count = 0;
  spec.hashtag_count = 200;
  std::vector<Sentence> sentences;
  std::map<std::string, std::size_t> counts;
  for (const auto& post : generate_synthetic(spec).corpus.posts) {
    if (post.hashtags.empty()) continue;
    sentences.push_back(post.hashtags);
    for (const auto& t : post.hashtags) ++counts[t];
  }
  const auto modal = std::max_element(counts.begin(), counts.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(build_vocab(sentences, 1).token(0) == modal->first);
}

TEST_CASE("always co-occurring pairs end up closer than strangers") {
  for (Architecture mode : {Architecture::skipgram, Architecture::cbow}) {
    TrainConfig config;
    config.mode = mode;
    config.dimension = 16;
    config.negatives = 2;
    config.epochs = 10;
    // Two isolated pairs share no context, so their input vectors carry no
    // second-order similarity. What training does force is the first-order
    // score: a's input against b's output beats a's input against c's.
    const auto pairs = train(paired_sentences(), config);
    const auto score = [&](std::string_view x, std::string_view y) {
      const auto& vocab = pairs.table.vocab();
      const auto in = pairs.table.vector(x);
      const float* out = pairs.output.data() + vocab.index_of(y) * 16;
      double s = 0.0;
      for (std::size_t i = 0; i < 16; ++i) s += double(in[i]) * out[i];
      return s;
    };
    CHECK(score("a", "b") > score("a", "c"));
    CHECK(score("c", "d") > score("c", "b"));

    // Once co-occurring tokens also share contexts, input vectors align:
    // two groups whose members appear together in random triples.
    Rng rng(5);
    std::vector<Sentence> groups;
    for (int i = 0; i < 600; ++i) {
      const std::string g = i % 2 ? "p" : "q";
      Sentence s;
      while (s.size() < 3) {
        const std::string tok = g + std::to_string(rng.below(6));
        if (std::find(s.begin(), s.end(), tok) == s.end()) s.push_back(tok);
      }
      groups.push_back(s);
    }
    const auto table = train(groups, config).table;
    double intra = 0.0, inter = 0.0;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const auto p = "p" + std::to_string(i), q = "q" + std::to_string(j);
        if (i != j) intra += cosine(table.vector(p), table.vector("p" + std::to_string(j))) / 30.0;
        inter += cosine(table.vector(p), table.vector(q)) / 36.0;
      }
    }
    CHECK(intra > inter + 0.2);
  }
}

TEST_CASE("zero learning rate leaves the initialization untouched") {
  TrainConfig config;
  config.dimension = 8;
  config.epochs = 1;
  config.initial_lr = 0.0;
  config.final_lr = 0.0;
  const std::vector<Sentence> one = {{"a", "b", "c"}};
  const auto first = train(one, config).table;
  config.epochs = 3;
  const auto second = train(one, config).table;
  CHECK(first == second);
  for (float v : first.values()) {
    CHECK(std::abs(v) <= 0.5f / 8.0f);
  }
}

TEST_CASE("strict training is bitwise reproducible; threaded training stays finite") {
  const auto corpus = community_corpus();
  TrainConfig config;
  config.dimension = 24;
  config.epochs = 2;
  const auto a = train(corpus.sentences, config);
  const auto b = train(corpus.sentences, config);
  CHECK(a.table == b.table);
  CHECK(a.epoch_loss == b.epoch_loss);

  config.strict = false;
  config.threads = 3;
  const auto threaded = train(corpus.sentences, config).table;
  for (std::size_t r = 0; r < threaded.rows(); ++r) {
    double norm = 0.0;
    for (float v : threaded.row(r)) {
      REQUIRE(std::isfinite(v));
      norm += double(v) * v;
    }
    CHECK(norm > 0.0);
  }
}

TEST_CASE("planted communities are recovered by nearest neighbours") {
  const auto corpus = community_corpus();
  TrainConfig config;
  config.dimension = 32;
  const auto table = train(corpus.sentences, config).table;
  config.seed = 99;
  const auto other = train(corpus.sentences, config).table;

  std::size_t hits = 0, total = 0, agree = 0, queries = 0;
  for (const auto& [tag, c] : corpus.community) {
    if (!table.vocab().find(tag)) continue;
    for (const auto& n : nearest_neighbors(table, tag, 5)) {
      const auto it = corpus.community.find(n.token);
      hits += it != corpus.community.end() && it->second == c;
      ++total;
    }
    // Seeds need not agree on the exact neighbour; they should agree on its community.
    const auto n1 = nearest_neighbors(table, tag, 1).front().token;
    const auto n2 = nearest_neighbors(other, tag, 1).front().token;
    const auto c1 = corpus.community.find(n1), c2 = corpus.community.find(n2);
    agree += c1 != corpus.community.end() && c2 != corpus.community.end() && c1->second == c2->second;
    ++queries;
  }
  CHECK(static_cast<double>(hits) / total >= 0.8);
  CHECK(static_cast<double>(agree) / queries >= 0.9);
}

TEST_CASE("cosine distance") {
  const std::vector<double> u = {1, 2, 3}, neg = {-1, -2, -3}, x = {1, 0}, y = {0, 5}, zero = {0, 0, 0};
  CHECK(cosine_distance(std::span<const double>(u), std::span<const double>(u)) == doctest::Approx(0.0));
  CHECK(cosine_distance(std::span<const double>(u), std::span<const double>(neg)) == doctest::Approx(2.0));
  CHECK(cosine_distance(std::span<const double>(x), std::span<const double>(y)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine_distance(std::span<const double>(u), std::span<const double>(zero)), Error);
  CHECK_THROWS_AS(cosine_distance(std::span<const double>(u), std::span<const double>(x)), Error);
}

TEST_CASE("nearest_neighbors matches an exhaustive scan") {
  const std::size_t n = 100, d = 6;
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> freqs;
  for (std::size_t i = 0; i < n; ++i) {
    tokens.push_back("t" + std::to_string(1000 + i));
    freqs.push_back(n - i);
  }
  Rng rng(8);
  std::vector<float> values(n * d);
  for (auto& v : values) v = static_cast<float>(rng.normal());
  const EmbeddingTable table(Vocabulary(tokens, freqs), d, values);

  CHECK(nearest_neighbors(table, "t1000", 0).empty());
  for (std::size_t q = 0; q < n; q += 7) {
    std::vector<std::pair<double, std::size_t>> scan;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == q) continue;
      scan.emplace_back(1.0 - cosine(table.row(q), table.row(j)), j);
    }
    std::sort(scan.begin(), scan.end());
    const auto got = nearest_neighbors(table, tokens[q], 10);
    REQUIRE(got.size() == 10);
    for (std::size_t r = 0; r < 10; ++r) {
      CHECK(got[r].token == tokens[scan[r].second]);
      CHECK(got[r].distance == doctest::Approx(scan[r].first).epsilon(1e-6));
      CHECK(got[r].token != tokens[q]);
    }
  }
  CHECK(nearest_neighbors(table, "t1000", 500).size() == n - 1);
}

TEST_CASE("negative-sampling gradient matches central differences") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> w(5, std::vector<double>(3));
    for (auto& v : w) {
      for (auto& x : v) x = rng.uniform(-1.5, 1.5);
    }
    const auto loss = [](const std::vector<std::vector<double>>& m) {
      const auto dot = [&](std::size_t a, std::size_t b) { return m[a][0] * m[b][0] + m[a][1] * m[b][1] + m[a][2] * m[b][2]; };
      double l = std::log1p(std::exp(-dot(0, 1)));
      for (std::size_t k = 2; k < 5; ++k) l += std::log1p(std::exp(dot(0, k)));
      return l;
    };
    const auto g = negative_sampling_gradient(w[0], w[1], {w[2], w[3], w[4]});
    CHECK(g.loss == doctest::Approx(loss(w)).epsilon(1e-12));
    for (std::size_t t = 0; t < 5; ++t) {
      const auto& analytic = t == 0 ? g.d_hidden : t == 1 ? g.d_positive : g.d_negatives[t - 2];
      for (std::size_t i = 0; i < 3; ++i) {
        auto plus = w, minus = w;
        plus[t][i] += 1e-5;
        minus[t][i] -= 1e-5;
        const double numeric = (loss(plus) - loss(minus)) / 2e-5;
        CHECK(std::abs(numeric - analytic[i]) <= 1e-4 * std::max(1e-3, std::abs(numeric)));
      }
    }
  }
}

TEST_CASE("held-out loss is reported and falls with training") {
  const auto corpus = community_corpus();
  const auto cut = corpus.sentences.begin() + static_cast<std::ptrdiff_t>(corpus.sentences.size() * 2 / 3);
  std::vector<Sentence> train_part(corpus.sentences.begin(), cut);
  std::vector<Sentence> held(cut, corpus.sentences.end());
  TrainConfig config;
  config.dimension = 16;
  config.epochs = 4;
  const auto result = train(train_part, config, &held);
  REQUIRE(result.held_out_loss.size() == 4);
  CHECK(result.held_out_loss.back() < result.held_out_loss.front());
  CHECK(result.epoch_loss.back() < result.epoch_loss.front());
}

TEST_CASE("binary and text formats round-trip") {
  const auto table = train(paired_sentences(), [] {
                       TrainConfig c;
                       c.dimension = 5;
                       c.epochs = 1;
                       return c;
                     }()).table;
  TempDir dir("embedding");
  save_binary(table, dir / "t.bin");
  CHECK(load_binary(dir / "t.bin") == table);
  save_text(table, dir / "t.txt");
  const auto text = load_text(dir / "t.txt");
  REQUIRE(text.rows() == table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    CHECK(text.vocab().token(r) == table.vocab().token(r));
    for (std::size_t i = 0; i < 5; ++i) CHECK(text.row(r)[i] == table.row(r)[i]);
  }
  tagscope::testing::write_file(dir / "junk.bin", "nope");
  CHECK_THROWS_AS(load_binary(dir / "junk.bin"), Error);
}

TEST_CASE("invalid training configs are rejected") {
  TrainConfig config;
  config.dimension = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.epochs = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  config = {};
  config.initial_lr = -1.0;
  CHECK_THROWS_AS(config.validate(), Error);
  CHECK_THROWS_AS(train({}, TrainConfig{}), Error);
}
