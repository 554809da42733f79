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

#include "tagscope/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "tagscope/error.hpp"
#include "tagscope/random.hpp"

namespace tagscope {

namespace {

std::string numbered(const std::string& prefix, std::size_t i, std::size_t count) {
  const int width = count < 10 ? 1 : static_cast<int>(std::floor(std::log10(static_cast<double>(count - 1)))) + 1;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return prefix + buf;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string("synthetic spec: ") + name + " must lie in [0,1]");
}

std::vector<double> zipf_weights(std::size_t n, double exponent) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
  return w;
}

std::int64_t uniform_time(Rng& rng, std::int64_t begin, std::int64_t end) {
  return begin + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(end - begin)));
}

// Draws up to `want` distinct indices from `table`, giving up after a bounded
// number of collisions.
std::vector<std::size_t> draw_distinct(Rng& rng, const AliasTable& table, std::size_t want) {
  std::vector<std::size_t> out;
  want = std::min(want, table.size());
  for (std::size_t attempts = 0; out.size() < want && attempts < 8 * want + 16; ++attempts) {
    const std::size_t pick = table.sample(rng);
    if (std::find(out.begin(), out.end(), pick) == out.end()) out.push_back(pick);
  }
  return out;
}

struct PatternShape {
  std::vector<double> quarter_weights;
};

class Generator {
 public:
  explicit Generator(const SyntheticSpec& spec) : spec_(spec), rng_(derive_seed({spec.seed, 0x5eed})) {}

  SyntheticCorpus run() {
    plan_vocabulary();
    plan_users();
    plan_locations();
    emit_community_posts();
    emit_pattern_posts();
    emit_drift_posts();
    emit_friendships();

    std::stable_sort(posts_.begin(), posts_.end(),
                     [](const PostRecord& a, const PostRecord& b) { return a.time < b.time; });
    for (auto& post : posts_) out_.corpus.add_post(std::move(post));
    for (const auto& user : users_) out_.corpus.users.insert(user);
    return std::move(out_);
  }

 private:
  void plan_vocabulary() {
    auto& t = out_.truth;
    const std::size_t communal = spec_.community_count * spec_.community_size;
    for (std::size_t i = 0; i < spec_.periodic_count; ++i) t.periodic.push_back(numbered("periodic", i, spec_.periodic_count));
    for (std::size_t i = 0; i < spec_.rising_count; ++i) t.rising.push_back(numbered("rising", i, spec_.rising_count));
    for (std::size_t i = 0; i < spec_.stable_count; ++i) t.stable.push_back(numbered("stable", i, spec_.stable_count));
    for (std::size_t i = 0; i < spec_.meteor_count; ++i) t.meteor.push_back(numbered("meteor", i, spec_.meteor_count));
    for (std::size_t c = 0; c < spec_.community_count; ++c) {
      std::vector<std::string> pool;
      const std::string prefix = numbered("c", c, spec_.community_count) + "t";
      for (std::size_t j = 0; j < spec_.community_size; ++j) pool.push_back(numbered(prefix, j, spec_.community_size));
      t.communities.push_back(std::move(pool));
    }
    for (std::size_t i = 0; i < spec_.drifted_count; ++i) t.drifted.push_back(numbered("drift", i, spec_.drifted_count));

    const std::size_t planted = spec_.periodic_count + spec_.rising_count + spec_.stable_count +
                                spec_.meteor_count + communal + spec_.drifted_count;
    const std::size_t background = spec_.hashtag_count - planted;
    for (std::size_t i = 0; i < background; ++i) t.background.push_back(numbered("tag", i, background));

    if (!t.background.empty()) background_table_ = AliasTable(zipf_weights(background, spec_.zipf_exponent));
    if (spec_.community_size > 0) {
      community_weights_ = zipf_weights(spec_.community_size, spec_.zipf_exponent);
      community_table_ = AliasTable(community_weights_);
    }
  }

  void plan_users() {
    for (std::size_t i = 0; i < spec_.user_count; ++i) users_.push_back(numbered("u", i, spec_.user_count));

    activity_.resize(users_.size());
    for (auto& a : activity_) a = std::exp(spec_.activity_sigma * rng_.normal());

    if (spec_.community_count == 0) return;
    std::vector<std::size_t> order(users_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng_.shuffle(order);
    user_community_.assign(users_.size(), 0);
    members_.assign(spec_.community_count, {});
    for (std::size_t r = 0; r < order.size(); ++r) {
      const std::size_t u = order[r];
      const std::size_t c = r % spec_.community_count;
      user_community_[u] = c;
      members_[c].push_back(u);
      out_.truth.user_community[users_[u]] = c;
    }
    for (auto& m : members_) std::sort(m.begin(), m.end());

    // Each user favours a weighted subset of the community pool.
    personal_tags_.resize(users_.size());
    personal_tables_.resize(users_.size());
    for (std::size_t u = 0; u < users_.size(); ++u) {
      auto picks = draw_distinct(rng_, community_table_, std::max<std::size_t>(1, spec_.tags_per_user));
      std::vector<double> weights;
      for (std::size_t p : picks) weights.push_back(community_weights_[p]);
      personal_tags_[u] = std::move(picks);
      personal_tables_[u] = AliasTable(weights);
    }
  }

  void plan_locations() {
    if (spec_.location_count == 0) return;
    for (std::size_t i = 0; i < spec_.location_count; ++i) {
      const std::string id = numbered("loc", i, spec_.location_count);
      const std::string& category = spec_.categories[i % spec_.categories.size()];
      locations_.push_back(id);
      averse_.push_back(category == spec_.averse_category);
      out_.corpus.location_categories[id] = category;
    }
  }

  double untagged_rate(std::int64_t time) const {
    const double span = static_cast<double>(range_end() - range_begin());
    const double frac = static_cast<double>(time - range_begin()) / span;
    return spec_.untagged_rate_start + (spec_.untagged_rate_end - spec_.untagged_rate_start) * frac;
  }

  std::int64_t range_begin() const { return year_start(spec_.first_year); }
  std::int64_t range_end() const { return year_start(spec_.last_year + 1); }

  void emit_community_posts() {
    if (spec_.post_count == 0 || users_.empty()) return;
    std::vector<std::size_t> authors;
    const std::size_t guaranteed = std::min(spec_.post_count / users_.size(), spec_.min_posts_per_user);
    for (std::size_t u = 0; u < users_.size(); ++u) authors.insert(authors.end(), guaranteed, u);
    const AliasTable activity(activity_);
    while (authors.size() < spec_.post_count) authors.push_back(activity.sample(rng_));

    const double p_count = 1.0 / std::max(1.0, spec_.mean_hashtags_per_post);
    const bool has_background = !background_table_.empty();
    const bool has_community = !personal_tables_.empty();
    for (std::size_t author : authors) {
      PostRecord post;
      post.user = users_[author];
      post.time = uniform_time(rng_, range_begin(), range_end());
      bool averse = false;
      if (!locations_.empty() && rng_.bernoulli(spec_.located_rate)) {
        const std::size_t loc = rng_.below(locations_.size());
        post.location = locations_[loc];
        averse = averse_[loc];
      }
      const bool tagged = rng_.uniform() >= untagged_rate(post.time) && (has_background || has_community);
      if (tagged) {
        std::size_t m = std::min<std::size_t>(kMaxHashtagsPerPost, 1 + rng_.geometric(p_count));
        if (averse) {
          std::size_t kept = 0;
          for (std::size_t i = 0; i < m; ++i) kept += rng_.bernoulli(1.0 - spec_.averse_suppression) ? 1 : 0;
          m = kept;
        }
        std::set<std::string> chosen;
        for (std::size_t attempt = 0; chosen.size() < m && attempt < 4 * m + 4; ++attempt) {
          const bool communal = has_community && (!has_background || rng_.bernoulli(spec_.community_rate));
          if (communal) {
            const auto& pool = out_.truth.communities[user_community_[author]];
            chosen.insert(pool[personal_tags_[author][personal_tables_[author].sample(rng_)]]);
          } else {
            chosen.insert(out_.truth.background[background_table_.sample(rng_)]);
          }
        }
        post.hashtags.assign(chosen.begin(), chosen.end());
        rng_.shuffle(post.hashtags);
      }
      posts_.push_back(std::move(post));
    }
  }

  void emit_pattern(const std::string& tag, const std::vector<double>& weights) {
    const QuarterBucket first{spec_.first_year, 1};
    const AliasTable quarters(weights);
    const double lo = std::log(static_cast<double>(spec_.min_pattern_shares));
    const double hi = std::log(static_cast<double>(spec_.max_pattern_shares));
    const auto shares = static_cast<std::size_t>(std::llround(std::exp(rng_.uniform(lo, hi))));
    for (std::size_t s = 0; s < shares; ++s) {
      const auto q = QuarterBucket::from_ordinal(first.ordinal() + static_cast<int>(quarters.sample(rng_)));
      const auto next = QuarterBucket::from_ordinal(q.ordinal() + 1);
      PostRecord post;
      post.user = users_[rng_.below(users_.size())];
      post.time = uniform_time(rng_, q.start(), next.start());
      post.hashtags = {tag};
      posts_.push_back(std::move(post));
    }
  }

  void emit_pattern_posts() {
    if (users_.empty()) return;
    const std::size_t quarters = static_cast<std::size_t>(spec_.last_year - spec_.first_year + 1) * 4;
    auto& t = out_.truth;
    for (const auto& tag : t.stable) emit_pattern(tag, std::vector<double>(quarters, 1.0));
    for (const auto& tag : t.rising) {
      const double growth = rng_.uniform(2.0, 4.0);
      std::vector<double> w(quarters);
      for (std::size_t i = 0; i < quarters; ++i) w[i] = std::exp(growth * static_cast<double>(i) / static_cast<double>(quarters - 1));
      emit_pattern(tag, w);
    }
    for (const auto& tag : t.periodic) {
      const std::size_t q = rng_.below(4);
      t.periodic_quarter[tag] = static_cast<int>(q) + 1;
      std::vector<double> w(quarters, 1.0);
      for (std::size_t i = q; i < quarters; i += 4) w[i] = spec_.periodic_peak;
      emit_pattern(tag, w);
    }
    for (const auto& tag : t.meteor) {
      const std::size_t burst = rng_.below(quarters);
      std::vector<double> w(quarters, 1.0);
      w[burst] = spec_.meteor_peak;
      if (burst + 1 < quarters) w[burst + 1] = spec_.meteor_peak / 4.0;
      emit_pattern(tag, w);
    }
  }

  void emit_drift_posts() {
    auto& t = out_.truth;
    if (t.drifted.empty()) return;
    for (const auto& tag : t.drifted) {
      const std::size_t before = rng_.below(spec_.community_count);
      std::size_t after = rng_.below(spec_.community_count - 1);
      if (after >= before) ++after;
      t.drift_communities[tag] = {before, after};
      const auto& owners = members_[before];
      const std::size_t owner = owners.empty() ? rng_.below(users_.size()) : owners[rng_.below(owners.size())];
      t.drift_owner[tag] = users_[owner];

      for (int year = spec_.first_year; year <= spec_.last_year; ++year) {
        const std::size_t community = year < spec_.drift_year ? before : after;
        const auto& pool = t.communities[community];
        const auto& members = members_[community];
        for (std::size_t i = 0; i < spec_.drift_posts_per_year; ++i) {
          PostRecord post;
          if (rng_.bernoulli(spec_.drift_owner_share)) {
            post.user = users_[owner];
          } else {
            post.user = members.empty() ? users_[rng_.below(users_.size())] : users_[members[rng_.below(members.size())]];
          }
          post.time = uniform_time(rng_, year_start(year), year_start(year + 1));
          post.hashtags.push_back(tag);
          for (std::size_t p : draw_distinct(rng_, community_table_, 3)) post.hashtags.push_back(pool[p]);
          posts_.push_back(std::move(post));
        }
      }
    }
  }

  void emit_friendships() {
    const std::size_t n = users_.size();
    if (n < 2 || spec_.mean_friends <= 0.0) return;
    const std::size_t all_pairs = n * (n - 1) / 2;
    const auto target = std::min<std::size_t>(
        static_cast<std::size_t>(std::llround(spec_.mean_friends * static_cast<double>(n) / 2.0)), all_pairs / 2);
    const bool communal = !members_.empty();
    std::size_t attempts = 0;
    while (out_.corpus.friendships.size() < target && attempts++ < 100 * target + 100) {
      std::size_t a = rng_.below(n);
      std::size_t b;
      if (communal && rng_.bernoulli(spec_.homophily)) {
        const auto& group = members_[user_community_[a]];
        if (group.size() < 2) continue;
        b = group[rng_.below(group.size())];
      } else {
        b = rng_.below(n);
      }
      if (a == b) continue;
      out_.corpus.add_friendship(users_[a], users_[b]);
    }
  }

  const SyntheticSpec& spec_;
  Rng rng_;
  SyntheticCorpus out_;
  std::vector<PostRecord> posts_;

  std::vector<std::string> users_;
  std::vector<double> activity_;
  std::vector<std::size_t> user_community_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<std::size_t>> personal_tags_;
  std::vector<AliasTable> personal_tables_;
  std::vector<double> community_weights_;
  AliasTable community_table_;
  AliasTable background_table_;
  std::vector<std::string> locations_;
  std::vector<bool> averse_;
};

}  // namespace

void validate(const SyntheticSpec& spec) {
  const std::size_t planted = spec.periodic_count + spec.rising_count + spec.stable_count + spec.meteor_count +
                              spec.community_count * spec.community_size + spec.drifted_count;
  if (planted > spec.hashtag_count) {
    throw Error("synthetic spec: " + std::to_string(planted) + " planted hashtags exceed hashtag_count " +
                std::to_string(spec.hashtag_count));
  }
  if (spec.first_year > spec.last_year) throw Error("synthetic spec: first_year after last_year");
  check_probability(spec.community_rate, "community_rate");
  check_probability(spec.drift_owner_share, "drift_owner_share");
  check_probability(spec.homophily, "homophily");
  check_probability(spec.untagged_rate_start, "untagged_rate_start");
  check_probability(spec.untagged_rate_end, "untagged_rate_end");
  check_probability(spec.located_rate, "located_rate");
  check_probability(spec.averse_suppression, "averse_suppression");
  if (spec.community_count > 0 && spec.community_size == 0) throw Error("synthetic spec: empty communities");
  if (spec.drifted_count > 0) {
    if (spec.community_count < 2) throw Error("synthetic spec: drift needs at least two communities");
    if (spec.drift_year <= spec.first_year || spec.drift_year > spec.last_year) {
      throw Error("synthetic spec: drift_year must fall after first_year and no later than last_year");
    }
  }
  const std::size_t patterns = spec.periodic_count + spec.rising_count + spec.stable_count + spec.meteor_count;
  if (patterns > 0) {
    if (spec.min_pattern_shares == 0 || spec.min_pattern_shares > spec.max_pattern_shares) {
      throw Error("synthetic spec: need 0 < min_pattern_shares <= max_pattern_shares");
    }
    if (spec.periodic_peak < 1.0 || spec.meteor_peak < 1.0) throw Error("synthetic spec: peaks must be >= 1");
  }
  if ((patterns > 0 || spec.post_count > 0 || spec.drifted_count > 0) && spec.user_count == 0) {
    throw Error("synthetic spec: posts need at least one user");
  }
  if (spec.location_count > 0 && spec.categories.empty()) throw Error("synthetic spec: locations need categories");
  if (spec.mean_friends < 0.0) throw Error("synthetic spec: mean_friends must be non-negative");
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  return Generator(spec).run();
}

}  // namespace tagscope
