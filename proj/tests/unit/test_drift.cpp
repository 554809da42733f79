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
#include <set>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "tagscope/drift.hpp"
#include "tagscope/error.hpp"
#include "tagscope/random.hpp"
#include "tagscope/synthetic.hpp"

using namespace tagscope;
using namespace tagscope::drift;
using tagscope::testing::post;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Eigen::MatrixXd random_orthogonal(Eigen::Index d, Rng& rng) {
  return Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(d, d, rng)).householderQ();
}

SyntheticSpec drift_spec() {
  SyntheticSpec spec;
  spec.seed = 21;
  spec.first_year = 2013;
  spec.last_year = 2014;
  spec.drift_year = 2014;
  spec.drifted_count = 20;
  spec.periodic_count = spec.rising_count = spec.stable_count = spec.meteor_count = 0;
  return spec;
}

DriftConfig small_config() {
  DriftConfig config;
  config.years = {2013, 2014};
  config.train.dimension = 32;
  config.train.epochs = 4;
  return config;
}

}  // namespace

TEST_CASE("procrustes special cases") {
  Rng rng(1);
  const auto s = random_matrix(4, 12, rng);
  const auto same = procrustes_align(s, s);
  CHECK((same.rotation * s - s).norm() < 1e-10);

  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2), rot(2, 2);
  rot << 0, -1, 1, 0;
  const auto map = procrustes_align(id, rot);
  CHECK((map.rotation - rot).norm() < 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    const auto src = random_matrix(10, 50, rng);
    const auto q = random_orthogonal(10, rng);
    const auto m = procrustes_align(src, q * src);
    CHECK((m.rotation * src - q * src).norm() < 1e-8);
    CHECK(m.orthogonality_residual < 1e-8);
  }
  CHECK_THROWS_AS(procrustes_align(random_matrix(3, 4, rng), random_matrix(3, 5, rng)), Error);
}

TEST_CASE("the SVD solution is never beaten by a random orthogonal map") {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_matrix(3, 5, rng), t = random_matrix(3, 5, rng);
    const auto m = procrustes_align(s, t);
    const double best = (m.rotation * s - t).norm();
    for (int r = 0; r < 1000; ++r) CHECK(best <= (random_orthogonal(3, rng) * s - t).norm() + 1e-12);
  }
}

TEST_CASE("displacement") {
  const std::vector<double> v = {0.3, -1.0, 2.0};
  CHECK(single_displacement(v, v) == doctest::Approx(0.0));
  CHECK(overall_displacement(std::vector<double>{0.2, 0.4}) == doctest::Approx(0.3));
  CHECK(overall_displacement(std::vector<double>{0.5}) == 0.5);
  CHECK(overall_displacement(std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(overall_displacement(std::vector<double>{}), Error);

  // A global rotation of one year's space is absorbed by the alignment.
  Rng rng(3);
  const auto s = random_matrix(6, 40, rng);
  const auto q = random_orthogonal(6, rng);
  const Eigen::MatrixXd t = q * s;
  const auto m = procrustes_align(s, t);
  const Eigen::MatrixXd aligned = m.rotation * s;
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    const Eigen::VectorXd a = aligned.col(c), b = t.col(c);
    CHECK(single_displacement({a.data(), 6}, {b.data(), 6}) < 1e-10);
  }
}

TEST_CASE("hashtag entropy") {
  Corpus corpus;
  for (const char* u : {"a", "b", "c", "d"}) corpus.add_post(post(u, 10, {"four"}));
  for (int i = 0; i < 3; ++i) corpus.add_post(post("solo", 10 + i, {"one"}));
  corpus.add_post(post("u1", 20, {"mix"}));
  corpus.add_post(post("u1", 21, {"mix"}));
  corpus.add_post(post("u2", 22, {"mix"}));
  corpus.add_post(post("u3", 23, {"mix"}));
  CHECK(hashtag_entropy(corpus, "four", 0, 100) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(hashtag_entropy(corpus, "one", 0, 100) == 0.0);
  CHECK(hashtag_entropy(corpus, "mix", 0, 100) == doctest::Approx(1.0397).epsilon(1e-4));
  CHECK(hashtag_entropy(corpus, "four", 0, 100, LogBase::bits) == doctest::Approx(2.0));
  CHECK_THROWS_AS(hashtag_entropy(corpus, "four", 50, 100), Error);

  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> counts(1 + rng.below(10));
    for (auto& c : counts) c = 1.0 + static_cast<double>(rng.below(20));
    const double h = entropy_from_counts(counts);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(counts.size())) + 1e-12);
  }
}

TEST_CASE("pearson") {
  const std::vector<double> x = {1, 2, 3, 4, 5}, up = {3, 5, 7, 9, 11}, down = {-1, -2, -3, -4, -5};
  CHECK(pearson(x, up) == doctest::Approx(1.0));
  CHECK(pearson(x, down) == doctest::Approx(-1.0));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 1, 3}) == doctest::Approx(0.5));

  Rng rng(5);
  std::vector<double> a(30), b(30), scaled(30);
  for (std::size_t i = 0; i < 30; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + rng.normal();
    scaled[i] = 3.0 * b[i] - 7.0;
  }
  CHECK(pearson(a, b) == doctest::Approx(pearson(b, a)).epsilon(1e-12));
  CHECK(pearson(a, b) == doctest::Approx(pearson(a, scaled)).epsilon(1e-12));
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("shared vocabulary is ordered by combined frequency then text") {
  const Vocabulary a({"x", "y", "z"}, {5, 3, 1});
  const Vocabulary b({"y", "z", "w"}, {9, 1, 1});
  CHECK(shared_vocabulary(a, b) == std::vector<std::string>{"y", "z"});
}

TEST_CASE("planted drifted hashtags rank in the top decile") {
  const auto synth = generate_synthetic(drift_spec());
  const auto report = drift_analysis(synth.corpus, small_config());
  std::vector<double> others;
  std::vector<double> drifted;
  std::size_t ranked = 0, in_top_decile = 0;
  const std::set<std::string> planted(synth.truth.drifted.begin(), synth.truth.drifted.end());
  for (const auto& row : report.hashtags) {
    if (!row.overall) continue;
    const bool is_drift = planted.count(row.hashtag) > 0;
    (is_drift ? drifted : others).push_back(*row.overall);
    ++ranked;
  }
  for (std::size_t i = 0; i < ranked / 10; ++i) in_top_decile += planted.count(report.hashtags[i].hashtag);
  CHECK(in_top_decile >= 16);
  std::sort(others.begin(), others.end());
  const double p90 = others[others.size() * 9 / 10];
  std::size_t above = 0;
  for (double d : drifted) above += d > p90;
  CHECK(above == drifted.size());

  CHECK(report.orthogonality_residuals.size() == 1);
  CHECK(report.orthogonality_residuals[0] < 1e-8);
  for (const auto& pt : report.points) CHECK(pt.year == 2013);
}

TEST_CASE("identical years give no displacement") {
  Corpus one_year;
  for (const auto& p : generate_synthetic(drift_spec()).corpus.posts) {
    if (year_of(p.time) == 2013) one_year.add_post(p);
  }
  Corpus twice = one_year;
  for (auto p : one_year.posts) {
    p.time += year_start(2014) - year_start(2013);
    twice.add_post(p);
  }
  auto config = small_config();
  config.seed_mode = SeedMode::shared;
  const auto report = drift_analysis(twice, config);
  for (const auto& row : report.hashtags) {
    if (row.overall) CHECK(*row.overall < 0.05);
  }
}

TEST_CASE("single-owner drifted hashtags give a negative entropy correlation") {
  auto spec = drift_spec();
  spec.hashtag_count = 220;
  spec.drift_owner_share = 0.9;
  const auto report = drift_analysis(generate_synthetic(spec).corpus, small_config());
  REQUIRE(report.entropy_correlation.has_value());
  CHECK(*report.entropy_correlation < -0.5);
}

TEST_CASE("drift options and errors") {
  const auto corpus = generate_synthetic(drift_spec()).corpus;
  auto config = small_config();
  config.entropy_year = EntropyYear::later;
  config.log_base = LogBase::bits;
  config.top_k = 30;
  const auto report = drift_analysis(corpus, config);
  CHECK(report.hashtags.size() == 30);
  for (const auto& pt : report.points) CHECK(pt.year == 2014);

  config = small_config();
  config.years = {2013};
  CHECK_THROWS_AS(drift_analysis(corpus, config), Error);
  config.years = {2013, 2015};
  CHECK_THROWS_AS(drift_analysis(corpus, config), Error);
  config.years = {2019, 2020};
  CHECK_THROWS_AS(drift_analysis(corpus, config), Error);
}
