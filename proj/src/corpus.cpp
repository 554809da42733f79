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

#include "tagscope/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "tagscope/error.hpp"

namespace tagscope {

namespace {

using nlohmann::json;

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  return sys_days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}}
      .time_since_epoch()
      .count();
}

std::chrono::year_month_day civil_from_seconds(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  return year_month_day{floor<days>(sys_seconds{seconds{epoch_seconds}})};
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

bool looks_like_header(const std::vector<std::string>& fields, std::string_view first) {
  return !fields.empty() && fields[0] == first;
}

PostRecord parse_json_row(const std::string& line, const std::string& source, std::size_t line_no) {
  json row;
  try {
    row = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!row.is_object()) throw ParseError(source, line_no, "expected a JSON object");

  PostRecord post;
  const auto user = row.find("user");
  if (user == row.end() || !user->is_string()) throw ParseError(source, line_no, "missing string field 'user'");
  post.user = user->get<std::string>();

  const auto time = row.find("time");
  if (time == row.end() || time->is_null()) throw ParseError(source, line_no, "missing timestamp");
  if (!time->is_number_integer()) throw ParseError(source, line_no, "'time' must be integer epoch seconds");
  post.time = time->get<std::int64_t>();

  const auto tags = row.find("hashtags");
  if (tags != row.end() && !tags->is_null()) {
    if (!tags->is_array()) throw ParseError(source, line_no, "'hashtags' must be an array");
    for (const auto& tag : *tags) {
      if (!tag.is_string()) throw ParseError(source, line_no, "hashtags must be strings");
      post.hashtags.push_back(tag.get<std::string>());
    }
  }

  const auto location = row.find("location");
  if (location != row.end() && !location->is_null()) {
    if (!location->is_string()) throw ParseError(source, line_no, "'location' must be a string or null");
    post.location = location->get<std::string>();
  }
  return post;
}

PostRecord parse_csv_row(const std::vector<std::string>& fields, const std::string& source,
                         std::size_t line_no) {
  if (fields.size() != 4) {
    throw ParseError(source, line_no, "expected 4 columns, found " + std::to_string(fields.size()));
  }
  PostRecord post;
  post.user = fields[0];
  if (post.user.empty()) throw ParseError(source, line_no, "empty user id");
  if (fields[1].empty()) throw ParseError(source, line_no, "missing timestamp");
  try {
    std::size_t used = 0;
    post.time = std::stoll(fields[1], &used);
    if (used != fields[1].size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ParseError(source, line_no, "invalid timestamp '" + fields[1] + "'");
  }
  std::string_view tags = fields[2];
  while (!tags.empty()) {
    const auto cut = tags.find(';');
    const auto tag = tags.substr(0, cut);
    if (!tag.empty()) post.hashtags.emplace_back(tag);
    if (cut == std::string_view::npos) break;
    tags.remove_prefix(cut + 1);
  }
  if (!fields[3].empty()) post.location = fields[3];
  return post;
}

std::string post_key(const PostRecord& post) {
  std::string key = post.user + '\x1f' + std::to_string(post.time) + '\x1f';
  for (const auto& tag : post.hashtags) key += tag + '\x1e';
  key += '\x1f';
  if (post.location) key += *post.location;
  return key;
}

}  // namespace

UserPair make_user_pair(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

std::string normalize_hashtag(std::string_view raw) {
  if (!raw.empty() && raw.front() == '#') raw.remove_prefix(1);
  std::string out(raw);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void Corpus::add_post(PostRecord post) {
  if (post.hashtags.size() > kMaxHashtagsPerPost) {
    throw Error("post by '" + post.user + "' has " + std::to_string(post.hashtags.size()) +
                " hashtags (limit " + std::to_string(kMaxHashtagsPerPost) + ")");
  }
  std::vector<std::string> unique;
  unique.reserve(post.hashtags.size());
  for (const auto& raw : post.hashtags) {
    std::string tag = normalize_hashtag(raw);
    if (tag.empty()) continue;
    if (std::find(unique.begin(), unique.end(), tag) == unique.end()) unique.push_back(std::move(tag));
  }
  post.hashtags = std::move(unique);
  users.insert(post.user);
  posts.push_back(std::move(post));
}

bool Corpus::add_friendship(const std::string& a, const std::string& b) {
  if (a == b) throw Error("self friendship for user '" + a + "'");
  users.insert(a);
  users.insert(b);
  return friendships.insert(make_user_pair(a, b)).second;
}

bool Corpus::are_friends(const std::string& a, const std::string& b) const {
  return friendships.contains(make_user_pair(a, b));
}

Format parse_format(std::string_view name) {
  if (name == "jsonl") return Format::jsonl;
  if (name == "csv") return Format::csv;
  throw Error("unknown corpus format '" + std::string(name) + "' (expected jsonl or csv)");
}

Format format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return Format::jsonl;
  if (ext == ".csv") return Format::csv;
  throw Error("cannot infer corpus format from '" + path.string() + "'");
}

Corpus load_corpus(const std::filesystem::path& path, Format format, std::vector<std::string>* warnings) {
  auto in = open_input(path);
  const std::string source = path.string();
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> seen;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    PostRecord post;
    if (format == Format::jsonl) {
      post = parse_json_row(line, source, line_no);
    } else {
      auto fields = detail::split_csv_line(line);
      if (!header_seen) {
        if (!looks_like_header(fields, "user")) throw ParseError(source, line_no, "missing CSV header row");
        header_seen = true;
        continue;
      }
      post = parse_csv_row(fields, source, line_no);
    }

    try {
      corpus.add_post(std::move(post));
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
    const auto [it, fresh] = seen.emplace(post_key(corpus.posts.back()), line_no);
    if (!fresh && warnings) {
      warnings->push_back(source + ":" + std::to_string(line_no) + ": duplicate of post at line " +
                          std::to_string(it->second));
    }
  }
  if (format == Format::csv && !header_seen) throw ParseError(source, 1, "missing CSV header row");
  return corpus;
}

void load_friendships(const std::filesystem::path& path, Corpus& corpus) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (line_no == 1 && (fields[0] == "user" || fields[0] == "user_a")) continue;
    if (fields.size() != 2) throw ParseError(path.string(), line_no, "expected two user ids");
    try {
      corpus.add_friendship(fields[0], fields[1]);
    } catch (const Error& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
}

void load_location_categories(const std::filesystem::path& path, Corpus& corpus) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (line_no == 1 && fields[0] == "location") continue;
    if (fields.size() != 2) throw ParseError(path.string(), line_no, "expected location,category");
    corpus.location_categories[fields[0]] = fields[1];
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, Format format) {
  auto out = open_output(path);
  if (format == Format::jsonl) {
    for (const auto& post : corpus.posts) {
      // Fixed key order keeps the file byte-stable.
      out << "{\"user\":" << json(post.user).dump() << ",\"time\":" << post.time
          << ",\"hashtags\":" << json(post.hashtags).dump()
          << ",\"location\":" << (post.location ? json(*post.location) : json(nullptr)).dump() << "}\n";
    }
    return;
  }
  out << "user,time,hashtags,location\n";
  for (const auto& post : corpus.posts) {
    std::string tags;
    for (std::size_t i = 0; i < post.hashtags.size(); ++i) {
      if (i) tags += ';';
      tags += post.hashtags[i];
    }
    out << detail::csv_escape(post.user) << ',' << post.time << ',' << detail::csv_escape(tags) << ','
        << detail::csv_escape(post.location.value_or("")) << '\n';
  }
}

void save_friendships(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "user_a,user_b\n";
  for (const auto& [a, b] : corpus.friendships) {
    out << detail::csv_escape(a) << ',' << detail::csv_escape(b) << '\n';
  }
}

void save_location_categories(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "location,category\n";
  for (const auto& [location, category] : corpus.location_categories) {
    out << detail::csv_escape(location) << ',' << detail::csv_escape(category) << '\n';
  }
}

QuarterBucket QuarterBucket::from_ordinal(int ordinal) {
  const int year = ordinal >= 0 ? ordinal / 4 : -((-ordinal + 3) / 4);
  return {year, ordinal - year * 4 + 1};
}

QuarterBucket QuarterBucket::of(std::int64_t epoch_seconds) {
  const auto ymd = civil_from_seconds(epoch_seconds);
  const unsigned month = static_cast<unsigned>(ymd.month());
  return {static_cast<int>(ymd.year()), static_cast<int>((month - 1) / 3 + 1)};
}

std::int64_t QuarterBucket::start() const {
  return days_from_civil(year, static_cast<unsigned>((quarter - 1) * 3 + 1), 1) * kSecondsPerDay;
}

int year_of(std::int64_t epoch_seconds) { return static_cast<int>(civil_from_seconds(epoch_seconds).year()); }

std::int64_t year_start(int year) { return days_from_civil(year, 1, 1) * kSecondsPerDay; }

std::map<std::string, std::vector<double>> bucket_share_series(const Corpus& corpus, const QuarterRange& range) {
  if (range.size() <= 0) throw Error("empty quarter range");
  const int width = range.size();
  const int base = range.first.ordinal();

  std::map<std::string, std::vector<double>> series;
  std::size_t in_range = 0;
  for (const auto& post : corpus.posts) {
    const auto q = QuarterBucket::of(post.time);
    if (!range.contains(q)) continue;
    ++in_range;
    for (const auto& tag : post.hashtags) {
      auto& counts = series[tag];
      if (counts.empty()) counts.assign(static_cast<std::size_t>(width), 0.0);
      counts[static_cast<std::size_t>(q.ordinal() - base)] += 1.0;
    }
  }
  if (in_range == 0) throw Error("no posts fall inside the quarter range");

  for (auto& [tag, counts] : series) {
    double total = 0.0;
    for (double c : counts) total += c;
    for (double& c : counts) c /= total;
  }
  return series;
}

std::unordered_map<std::string, std::size_t> hashtag_share_counts(
    const Corpus& corpus, std::optional<std::pair<std::int64_t, std::int64_t>> window) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& post : corpus.posts) {
    if (window && (post.time < window->first || post.time >= window->second)) continue;
    for (const auto& tag : post.hashtags) ++counts[tag];
  }
  return counts;
}

std::vector<std::string> top_k_hashtags(const std::unordered_map<std::string, std::size_t>& counts,
                                        std::size_t k) {
  if (k == 0) throw Error("top-k requires k >= 1");
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  const auto by_count = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), by_count);
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(std::move(ranked[i].first));
  return out;
}

std::vector<std::string> top_k_hashtags(const Corpus& corpus, std::size_t k) {
  return top_k_hashtags(hashtag_share_counts(corpus), k);
}

}  // namespace tagscope
