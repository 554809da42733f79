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

#include "tagscope/embedding.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "tagscope/random.hpp"

namespace tagscope {

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> frequencies)
    : tokens_(std::move(tokens)), frequencies_(std::move(frequencies)) {
  if (tokens_.size() != frequencies_.size()) throw Error("vocabulary: token/frequency size mismatch");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (frequencies_[i] == 0) throw Error("vocabulary: frequency of '" + tokens_[i] + "' is zero");
    if (!index_.emplace(tokens_[i], i).second) throw Error("vocabulary: duplicate token '" + tokens_[i] + "'");
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
  const auto found = find(token);
  if (!found) throw Error("unknown token '" + std::string(token) + "'");
  return *found;
}

IndexedSentence Vocabulary::encode(const Sentence& sentence) const {
  IndexedSentence out;
  out.reserve(sentence.size());
  for (const auto& token : sentence) {
    if (const auto i = find(token)) out.push_back(static_cast<std::uint32_t>(*i));
  }
  return out;
}

Vocabulary build_vocab(const std::vector<Sentence>& sentences, std::size_t min_count) {
  if (min_count == 0) throw Error("build_vocab: min_count must be >= 1");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence) ++counts[token];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  if (kept.empty()) throw Error("build_vocab: no token reaches min_count " + std::to_string(min_count));
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> freqs;
  for (auto& [token, count] : kept) {
    tokens.push_back(std::move(token));
    freqs.push_back(count);
  }
  return Vocabulary(std::move(tokens), std::move(freqs));
}

// ---------------------------------------------------------------------------
// EmbeddingTable

EmbeddingTable::EmbeddingTable(Vocabulary vocab, std::size_t dimension)
    : vocab_(std::move(vocab)), dimension_(dimension), values_(vocab_.size() * dimension, 0.0f) {}

EmbeddingTable::EmbeddingTable(Vocabulary vocab, std::size_t dimension, std::vector<float> values)
    : vocab_(std::move(vocab)), dimension_(dimension), values_(std::move(values)) {
  if (values_.size() != vocab_.size() * dimension_) throw Error("embedding table: matrix size mismatch");
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (dimension < 1) throw Error("train config: dimension must be >= 1");
  if (negatives < 1) throw Error("train config: negatives must be >= 1");
  if (window && *window < 1) throw Error("train config: window must be >= 1");
  if (epochs < 1) throw Error("train config: epochs must be >= 1");
  if (min_count < 1) throw Error("train config: min_count must be >= 1");
  if (!(initial_lr >= 0.0) || !(final_lr >= 0.0)) throw Error("train config: learning rates must be >= 0");
  if (!(noise_power >= 0.0)) throw Error("train config: noise_power must be >= 0");
}

namespace {

constexpr std::size_t kLockStripes = 4096;
constexpr std::size_t kMaxHeldOutExamples = 50000;

struct HeldOutExample {
  std::vector<std::uint32_t> inputs;  // center (skip-gram) or context (CBOW)
  std::uint32_t target = 0;
  std::vector<std::uint32_t> noise;
};

template <typename Fn>
void for_each_context(std::size_t length, std::size_t center, const std::optional<std::size_t>& window, Fn&& fn) {
  std::size_t lo = 0;
  std::size_t hi = length;
  if (window) {
    lo = center > *window ? center - *window : 0;
    hi = std::min(length, center + *window + 1);
  }
  for (std::size_t j = lo; j < hi; ++j) {
    if (j != center) fn(j);
  }
}

class Trainer {
 public:
  Trainer(const std::vector<IndexedSentence>& sentences, const Vocabulary& vocab, const TrainConfig& config)
      : sentences_(sentences), vocab_(vocab), config_(config), dim_(config.dimension) {
    std::vector<double> noise(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      noise[i] = std::pow(static_cast<double>(vocab.frequency(i)), config.noise_power);
    }
    noise_ = AliasTable(noise);
    for (const auto& s : sentences_) tokens_per_epoch_ += s.size();
    threads_ = config.strict ? 1 : std::max<std::size_t>(1, config.threads);
    if (threads_ > 1) {
      input_locks_ = std::make_unique<std::array<std::mutex, kLockStripes>>();
      output_locks_ = std::make_unique<std::array<std::mutex, kLockStripes>>();
    }
  }

  TrainResult run(const std::vector<IndexedSentence>* held_out) {
    input_.assign(vocab_.size() * dim_, 0.0f);
    output_.assign(vocab_.size() * dim_, 0.0f);
    Rng init(derive_seed({config_.seed, 1}));
    const double scale = 0.5 / static_cast<double>(dim_);
    for (auto& x : input_) x = static_cast<float>(init.uniform(-scale, scale));

    std::vector<HeldOutExample> held;
    if (held_out) held = build_held_out(*held_out);

    TrainResult result;
    const double final_lr = std::min(config_.final_lr, config_.initial_lr);
    const double total = static_cast<double>(tokens_per_epoch_ * config_.epochs);
    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
      LossAccumulator loss;
      if (threads_ == 1) {
        Rng rng(derive_seed({config_.seed, 3, epoch}));
        process<false>(0, sentences_.size(), rng, final_lr, total, loss);
      } else {
        std::vector<std::thread> workers;
        std::vector<LossAccumulator> partial(threads_);
        const std::size_t chunk = (sentences_.size() + threads_ - 1) / threads_;
        for (std::size_t t = 0; t < threads_; ++t) {
          workers.emplace_back([&, t] {
            Rng rng(derive_seed({config_.seed, 3, epoch, t}));
            const std::size_t begin = std::min(sentences_.size(), t * chunk);
            const std::size_t end = std::min(sentences_.size(), begin + chunk);
            process<true>(begin, end, rng, final_lr, total, partial[t]);
          });
        }
        for (auto& w : workers) w.join();
        for (const auto& p : partial) {
          loss.sum += p.sum;
          loss.count += p.count;
        }
      }
      check_finite(epoch);
      result.epoch_loss.push_back(loss.count ? loss.sum / static_cast<double>(loss.count) : 0.0);
      if (!held.empty()) result.held_out_loss.push_back(evaluate(held));
    }
    result.table = EmbeddingTable(vocab_, dim_, std::move(input_));
    result.output = std::move(output_);
    return result;
  }

 private:
  struct LossAccumulator {
    double sum = 0.0;
    std::size_t count = 0;
  };

  float* in_row(std::size_t i) { return input_.data() + i * dim_; }
  float* out_row(std::size_t i) { return output_.data() + i * dim_; }

  template <bool Locked>
  std::unique_lock<std::mutex> lock_input(std::size_t row) {
    if constexpr (Locked) return std::unique_lock<std::mutex>((*input_locks_)[row % kLockStripes]);
    return {};
  }
  template <bool Locked>
  std::unique_lock<std::mutex> lock_output(std::size_t row) {
    if constexpr (Locked) return std::unique_lock<std::mutex>((*output_locks_)[row % kLockStripes]);
    return {};
  }

  // Positive target first, then `negatives` noise draws (a draw equal to the
  // positive is skipped).
  template <bool Locked>
  double score_targets(std::span<const float> hidden, std::uint32_t positive, Rng& rng, float lr,
                       std::span<float> grad) {
    double loss = 0.0;
    {
      auto guard = lock_output<Locked>(positive);
      loss += update_target<float>(hidden, {out_row(positive), dim_}, true, lr, grad);
    }
    for (std::size_t k = 0; k < config_.negatives; ++k) {
      const auto noise = static_cast<std::uint32_t>(noise_.sample(rng));
      if (noise == positive) continue;
      auto guard = lock_output<Locked>(noise);
      loss += update_target<float>(hidden, {out_row(noise), dim_}, false, lr, grad);
    }
    return loss;
  }

  template <bool Locked>
  void process(std::size_t begin, std::size_t end, Rng& rng, double final_lr, double total, LossAccumulator& loss) {
    std::vector<float> hidden(dim_);
    std::vector<float> grad(dim_);
    std::vector<std::uint32_t> context;
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sentence = sentences_[s];
      const double progress = static_cast<double>(processed_.load(std::memory_order_relaxed)) / total;
      const float lr = static_cast<float>(config_.initial_lr - (config_.initial_lr - final_lr) * std::min(1.0, progress));

      for (std::size_t i = 0; i < sentence.size(); ++i) {
        const std::uint32_t center = sentence[i];
        if (config_.mode == Architecture::skipgram) {
          for_each_context(sentence.size(), i, config_.window, [&](std::size_t j) {
            {
              auto guard = lock_input<Locked>(center);
              std::copy_n(in_row(center), dim_, hidden.begin());
            }
            std::fill(grad.begin(), grad.end(), 0.0f);
            loss.sum += score_targets<Locked>(hidden, sentence[j], rng, lr, grad);
            ++loss.count;
            auto guard = lock_input<Locked>(center);
            float* row = in_row(center);
            for (std::size_t d = 0; d < dim_; ++d) row[d] += lr * grad[d];
          });
        } else {
          context.clear();
          for_each_context(sentence.size(), i, config_.window, [&](std::size_t j) { context.push_back(sentence[j]); });
          if (context.empty()) continue;
          std::fill(hidden.begin(), hidden.end(), 0.0f);
          for (std::uint32_t c : context) {
            auto guard = lock_input<Locked>(c);
            const float* row = in_row(c);
            for (std::size_t d = 0; d < dim_; ++d) hidden[d] += row[d];
          }
          const float inv = 1.0f / static_cast<float>(context.size());
          for (auto& h : hidden) h *= inv;
          std::fill(grad.begin(), grad.end(), 0.0f);
          loss.sum += score_targets<Locked>(hidden, center, rng, lr, grad);
          ++loss.count;
          // d(hidden)/d(context row) = 1/|context|.
          const float step = lr * inv;
          for (std::uint32_t c : context) {
            auto guard = lock_input<Locked>(c);
            float* row = in_row(c);
            for (std::size_t d = 0; d < dim_; ++d) row[d] += step * grad[d];
          }
        }
      }
      processed_.fetch_add(sentence.size(), std::memory_order_relaxed);
    }
  }

  std::vector<HeldOutExample> build_held_out(const std::vector<IndexedSentence>& held_out) {
    Rng rng(derive_seed({config_.seed, 2}));
    std::vector<HeldOutExample> out;
    for (const auto& sentence : held_out) {
      for (std::size_t i = 0; i < sentence.size() && out.size() < kMaxHeldOutExamples; ++i) {
        if (config_.mode == Architecture::skipgram) {
          for_each_context(sentence.size(), i, config_.window, [&](std::size_t j) {
            out.push_back({{sentence[i]}, sentence[j], {}});
          });
        } else {
          HeldOutExample ex;
          ex.target = sentence[i];
          for_each_context(sentence.size(), i, config_.window, [&](std::size_t j) { ex.inputs.push_back(sentence[j]); });
          if (!ex.inputs.empty()) out.push_back(std::move(ex));
        }
      }
    }
    for (auto& ex : out) {
      for (std::size_t k = 0; k < config_.negatives; ++k) {
        const auto noise = static_cast<std::uint32_t>(noise_.sample(rng));
        if (noise != ex.target) ex.noise.push_back(noise);
      }
    }
    return out;
  }

  double evaluate(const std::vector<HeldOutExample>& examples) {
    double sum = 0.0;
    std::vector<double> hidden(dim_);
    for (const auto& ex : examples) {
      std::fill(hidden.begin(), hidden.end(), 0.0);
      for (std::uint32_t c : ex.inputs) {
        const float* row = in_row(c);
        for (std::size_t d = 0; d < dim_; ++d) hidden[d] += row[d];
      }
      for (auto& h : hidden) h /= static_cast<double>(ex.inputs.size());
      const auto dot = [&](std::uint32_t target) {
        const float* row = out_row(target);
        double acc = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) acc += hidden[d] * row[d];
        return acc;
      };
      sum += neg_log_sigmoid(dot(ex.target));
      for (std::uint32_t n : ex.noise) sum += neg_log_sigmoid(-dot(n));
    }
    return sum / static_cast<double>(examples.size());
  }

  void check_finite(std::size_t epoch) const {
    for (const auto* matrix : {&input_, &output_}) {
      for (std::size_t i = 0; i < matrix->size(); ++i) {
        if (!std::isfinite((*matrix)[i])) {
          const std::size_t row = i / dim_;
          throw TrainingDiverged(std::string("non-finite ") + (matrix == &input_ ? "input" : "output") +
                                 " vector for token '" + vocab_.token(row) + "' after epoch " +
                                 std::to_string(epoch + 1) + "; lower the learning rate");
        }
      }
    }
  }

  const std::vector<IndexedSentence>& sentences_;
  const Vocabulary& vocab_;
  const TrainConfig& config_;
  const std::size_t dim_;
  std::size_t threads_ = 1;
  std::size_t tokens_per_epoch_ = 0;
  std::atomic<std::size_t> processed_{0};
  AliasTable noise_;
  std::vector<float> input_;
  std::vector<float> output_;
  std::unique_ptr<std::array<std::mutex, kLockStripes>> input_locks_;
  std::unique_ptr<std::array<std::mutex, kLockStripes>> output_locks_;
};

}  // namespace

TrainResult train_indexed(const std::vector<IndexedSentence>& sentences, const Vocabulary& vocab,
                          const TrainConfig& config, const std::vector<IndexedSentence>* held_out) {
  config.validate();
  if (vocab.empty()) throw Error("train: empty vocabulary");
  if (sentences.empty()) throw Error("train: no sentences");
  for (const auto& s : sentences) {
    for (auto i : s) {
      if (i >= vocab.size()) throw Error("train: token index out of range");
    }
  }
  return Trainer(sentences, vocab, config).run(held_out);
}

TrainResult train(const std::vector<Sentence>& sentences, const TrainConfig& config,
                  const std::vector<Sentence>* held_out) {
  config.validate();
  const Vocabulary vocab = build_vocab(sentences, config.min_count);
  std::vector<IndexedSentence> indexed;
  indexed.reserve(sentences.size());
  for (const auto& s : sentences) indexed.push_back(vocab.encode(s));
  if (!held_out) return train_indexed(indexed, vocab, config);
  std::vector<IndexedSentence> held;
  for (const auto& s : *held_out) held.push_back(vocab.encode(s));
  return train_indexed(indexed, vocab, config, &held);
}

PairGradient negative_sampling_gradient(std::span<const double> hidden, std::span<const double> positive,
                                        const std::vector<std::vector<double>>& negatives) {
  const std::size_t d = hidden.size();
  PairGradient out;
  std::vector<double> grad(d, 0.0);
  const auto run = [&](std::span<const double> target, bool is_positive) {
    std::vector<double> moved(target.begin(), target.end());
    out.loss += update_target<double>(hidden, moved, is_positive, 1.0, grad);
    // With lr = 1 the update moved the target by exactly -dL/dtarget.
    std::vector<double> g(d);
    for (std::size_t i = 0; i < d; ++i) g[i] = target[i] - moved[i];
    return g;
  };
  out.d_positive = run(positive, true);
  for (const auto& n : negatives) out.d_negatives.push_back(run(n, false));
  out.d_hidden.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.d_hidden[i] = -grad[i];
  return out;
}

// ---------------------------------------------------------------------------
// Queries

namespace {

template <typename Real>
double cosine_distance_impl(std::span<const Real> u, std::span<const Real> v) {
  if (u.size() != v.size()) throw Error("cosine distance: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    nu += static_cast<double>(u[i]) * u[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error("cosine distance: zero-norm vector");
  const double cos = std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
  return 1.0 - cos;
}

}  // namespace

double cosine_distance(std::span<const float> u, std::span<const float> v) { return cosine_distance_impl(u, v); }
double cosine_distance(std::span<const double> u, std::span<const double> v) { return cosine_distance_impl(u, v); }

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, std::string_view token, std::size_t k) {
  const std::size_t query = table.vocab().index_of(token);
  if (k == 0) return {};
  const auto q = table.row(query);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(table.rows());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (i == query) continue;
    scored.emplace_back(cosine_distance(q, table.row(i)), i);
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end());
  std::vector<Neighbor> out;
  for (std::size_t i = 0; i < keep; ++i) out.push_back({table.vocab().token(scored[i].second), scored[i].first});
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'S', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) throw Error("embedding file truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void save_binary(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, table.rows());
  put<std::uint64_t>(out, table.dimension());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const auto& token = table.vocab().token(i);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(token.size()));
    out.write(token.data(), static_cast<std::streamsize>(token.size()));
    put<std::uint64_t>(out, table.vocab().frequency(i));
  }
  for (float x : table.values()) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
}

EmbeddingTable load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error(path.string() + ": not an embedding file");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw Error(path.string() + ": unsupported version " + std::to_string(version));
  const auto rows = get<std::uint64_t>(in);
  const auto dim = get<std::uint64_t>(in);
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> freqs;
  for (std::uint64_t i = 0; i < rows; ++i) {
    const auto len = get<std::uint32_t>(in);
    std::string token(len, '\0');
    if (!in.read(token.data(), len)) throw Error("embedding file truncated");
    tokens.push_back(std::move(token));
    freqs.push_back(get<std::uint64_t>(in));
  }
  std::vector<float> values(rows * dim);
  for (auto& x : values) x = std::bit_cast<float>(get<std::uint32_t>(in));
  return EmbeddingTable(Vocabulary(std::move(tokens), std::move(freqs)), dim, std::move(values));
}

void save_text(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(9);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out << table.vocab().token(i);
    for (float x : table.row(i)) out << ' ' << x;
    out << '\n';
  }
}

EmbeddingTable load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> tokens;
  std::vector<float> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::size_t count = 0;
    float x;
    while (fields >> x) {
      values.push_back(x);
      ++count;
    }
    if (!fields.eof()) throw ParseError(path.string(), line_no, "invalid number");
    if (tokens.empty()) dim = count;
    if (count != dim || dim == 0) throw ParseError(path.string(), line_no, "inconsistent vector dimension");
    tokens.push_back(std::move(token));
  }
  if (tokens.empty()) throw Error(path.string() + ": no vectors");
  std::vector<std::uint64_t> freqs(tokens.size(), 1);
  return EmbeddingTable(Vocabulary(std::move(tokens), std::move(freqs)), dim, std::move(values));
}

}  // namespace tagscope
