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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tagscope {

/// Platform cap on hashtags attached to a single post.
inline constexpr std::size_t kMaxHashtagsPerPost = 30;

/// One post: who, when (UTC epoch seconds), which hashtags, and where.
struct PostRecord {
  std::string user;
  std::int64_t time = 0;
  std::vector<std::string> hashtags;
  std::optional<std::string> location;

  bool operator==(const PostRecord&) const = default;
};

/// Unordered user pair stored with first < second.
using UserPair = std::pair<std::string, std::string>;

UserPair make_user_pair(std::string a, std::string b);

/// Lowercases and strips one leading '#'.
std::string normalize_hashtag(std::string_view raw);

/// A post collection plus the social and location side tables.
///
/// Mutate only through the member functions; they keep the invariants:
/// every post's user is in `users`, posts carry at most 30 unique lowercase
/// hashtags, and friendships are irreflexive, ordered and deduplicated.
struct Corpus {
  std::vector<PostRecord> posts;
  std::set<std::string> users;
  std::set<UserPair> friendships;
  std::map<std::string, std::string> location_categories;

  /// Normalizes and validates the post, then appends it. Throws Error when
  /// the post has more than 30 hashtags.
  void add_post(PostRecord post);

  /// Returns false for a pair that was already present. Throws on a self pair.
  bool add_friendship(const std::string& a, const std::string& b);

  bool are_friends(const std::string& a, const std::string& b) const;

  bool operator==(const Corpus&) const = default;
};

enum class Format { jsonl, csv };

Format parse_format(std::string_view name);
/// Picks the format from the file extension (.jsonl/.json or .csv).
Format format_from_path(const std::filesystem::path& path);

/// Loads posts. Rows that fail to parse (including rows with more than 30
/// hashtags or a missing timestamp) raise ParseError with the line number.
/// Exact duplicate posts are kept and reported through `warnings`.
Corpus load_corpus(const std::filesystem::path& path, Format format,
                   std::vector<std::string>* warnings = nullptr);

/// Two-column CSV of user ids; header optional. Symmetric duplicates collapse.
void load_friendships(const std::filesystem::path& path, Corpus& corpus);

/// Two-column CSV location-id,category; header optional.
void load_location_categories(const std::filesystem::path& path, Corpus& corpus);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, Format format);
void save_friendships(const Corpus& corpus, const std::filesystem::path& path);
void save_location_categories(const Corpus& corpus, const std::filesystem::path& path);

/// Calendar quarter in UTC.
struct QuarterBucket {
  int year = 2012;
  int quarter = 1;  // 1..4

  auto operator<=>(const QuarterBucket&) const = default;

  /// Months since year 0 divided by three; consecutive quarters differ by 1.
  int ordinal() const noexcept { return year * 4 + (quarter - 1); }
  static QuarterBucket from_ordinal(int ordinal);
  static QuarterBucket of(std::int64_t epoch_seconds);
  /// Epoch second at which the quarter starts.
  std::int64_t start() const;
};

/// Inclusive range of quarters.
struct QuarterRange {
  QuarterBucket first{2012, 1};
  QuarterBucket last{2015, 4};

  int size() const noexcept { return last.ordinal() - first.ordinal() + 1; }
  bool contains(QuarterBucket q) const noexcept { return first <= q && q <= last; }
};

int year_of(std::int64_t epoch_seconds);
/// Epoch second of January 1st, 00:00 UTC.
std::int64_t year_start(int year);

/// Per-hashtag share proportions over the quarters of `range`. Each vector
/// has `range.size()` entries summing to one. Throws on an empty range or when
/// no post falls inside it.
std::map<std::string, std::vector<double>> bucket_share_series(const Corpus& corpus,
                                                                const QuarterRange& range = {});

/// Total share count per hashtag, optionally restricted to a time window
/// [begin, end) in epoch seconds.
std::unordered_map<std::string, std::size_t> hashtag_share_counts(
    const Corpus& corpus, std::optional<std::pair<std::int64_t, std::int64_t>> window = std::nullopt);

/// Most-shared hashtags first, ties lexicographic. Returns fewer than k when
/// the vocabulary is smaller.
std::vector<std::string> top_k_hashtags(const std::unordered_map<std::string, std::size_t>& counts,
                                        std::size_t k);
std::vector<std::string> top_k_hashtags(const Corpus& corpus, std::size_t k);

}  // namespace tagscope
