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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tagscope/error.hpp"

namespace tagscope {

using Sentence = std::vector<std::string>;
using IndexedSentence = std::vector<std::uint32_t>;

/// Bijective token <-> index map; indices follow descending frequency, then
/// lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Tokens must be distinct and frequencies positive.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> frequencies);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::uint64_t frequency(std::size_t index) const { return frequencies_.at(index); }
  const std::vector<std::uint64_t>& frequencies() const noexcept { return frequencies_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::optional<std::size_t> find(std::string_view token) const;
  /// Throws Error for an unknown token.
  std::size_t index_of(std::string_view token) const;

  /// Maps tokens to indices, dropping out-of-vocabulary ones.
  IndexedSentence encode(const Sentence& sentence) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && frequencies_ == other.frequencies_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> frequencies_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Counts tokens and keeps those seen at least `min_count` times. Throws when
/// nothing survives the filter.
Vocabulary build_vocab(const std::vector<Sentence>& sentences, std::size_t min_count);

/// Input vectors, one row per vocabulary entry.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(Vocabulary vocab, std::size_t dimension);
  EmbeddingTable(Vocabulary vocab, std::size_t dimension, std::vector<float> values);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t rows() const noexcept { return vocab_.size(); }

  std::span<float> row(std::size_t index) { return {values_.data() + index * dimension_, dimension_}; }
  std::span<const float> row(std::size_t index) const {
    return {values_.data() + index * dimension_, dimension_};
  }
  /// Throws Error for an unknown token.
  std::span<const float> vector(std::string_view token) const { return row(vocab_.index_of(token)); }

  std::vector<float>& values() noexcept { return values_; }
  const std::vector<float>& values() const noexcept { return values_; }

  bool operator==(const EmbeddingTable&) const = default;

 private:
  Vocabulary vocab_;
  std::size_t dimension_ = 0;
  std::vector<float> values_;
};

enum class Architecture { skipgram, cbow };

struct TrainConfig {
  Architecture mode = Architecture::skipgram;
  std::size_t dimension = 300;
  /// Context radius; nullopt treats every other token of the sentence as context.
  std::optional<std::size_t> window;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  /// Learning rate decays linearly from `initial_lr` to `final_lr` (clamped to
  /// `initial_lr`) over all training tokens.
  double initial_lr = 0.025;
  double final_lr = 1e-4;
  /// Noise distribution is unigram frequency raised to this power.
  double noise_power = 0.75;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;
  /// Worker threads; ignored (forced to 1) in strict mode.
  std::size_t threads = 1;
  /// Single-threaded, bitwise reproducible training.
  bool strict = true;

  void validate() const;
};

struct TrainResult {
  EmbeddingTable table;
  /// Output ("context") vectors, row-major |vocab| x d. Only needed while training.
  std::vector<float> output;
  /// Mean per-example negative-sampling loss over each epoch.
  std::vector<double> epoch_loss;
  /// Mean loss on the held-out sentences after each epoch (empty without them).
  std::vector<double> held_out_loss;
};

/// Builds a vocabulary from `sentences` (honouring `config.min_count`) and trains.
TrainResult train(const std::vector<Sentence>& sentences, const TrainConfig& config,
                  const std::vector<Sentence>* held_out = nullptr);

/// Core trainer over pre-indexed sentences. Every index must be < vocab.size().
TrainResult train_indexed(const std::vector<IndexedSentence>& sentences, const Vocabulary& vocab,
                          const TrainConfig& config, const std::vector<IndexedSentence>* held_out = nullptr);

/// Logistic function, evaluated without overflow.
template <typename Real>
Real sigmoid(Real x) {
  if (x >= 0) return Real(1) / (Real(1) + std::exp(-x));
  const Real e = std::exp(x);
  return e / (Real(1) + e);
}

/// -log sigmoid(x), evaluated without overflow.
template <typename Real>
Real neg_log_sigmoid(Real x) {
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

/// One target of a negative-sampling objective. Adds -dL/dhidden into
/// `hidden_grad`, moves `target` by -lr * dL/dtarget, and returns this
/// target's loss term: -log sigmoid(h.t) for a positive, -log sigmoid(-h.t)
/// for a noise sample. `hidden` must not alias `target`.
template <typename Real>
Real update_target(std::span<const Real> hidden, std::span<Real> target, bool positive, Real lr,
                   std::span<Real> hidden_grad) {
  Real dot = 0;
  for (std::size_t i = 0; i < hidden.size(); ++i) dot += hidden[i] * target[i];
  const Real g = (positive ? Real(1) : Real(0)) - sigmoid(dot);
  for (std::size_t i = 0; i < hidden.size(); ++i) hidden_grad[i] += g * target[i];
  const Real step = lr * g;
  for (std::size_t i = 0; i < hidden.size(); ++i) target[i] += step * hidden[i];
  return positive ? neg_log_sigmoid(dot) : neg_log_sigmoid(-dot);
}

/// Value and analytic gradient of the per-example loss
///   L = -log s(h.o+) - sum_k log s(-h.o_k)
/// computed through the same update path the trainer uses.
struct PairGradient {
  double loss = 0.0;
  std::vector<double> d_hidden;
  std::vector<double> d_positive;
  std::vector<std::vector<double>> d_negatives;
};

PairGradient negative_sampling_gradient(std::span<const double> hidden, std::span<const double> positive,
                                        const std::vector<std::vector<double>>& negatives);

/// 1 - cos(u, v), in [0, 2]. Throws Error on a zero-norm vector or a size mismatch.
double cosine_distance(std::span<const float> u, std::span<const float> v);
double cosine_distance(std::span<const double> u, std::span<const double> v);

struct Neighbor {
  std::string token;
  double distance = 0.0;
};

/// The k nearest tokens by cosine distance, excluding `token` itself; ties go
/// to the lower vocabulary index.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, std::string_view token, std::size_t k);

/// Binary layout (little-endian): magic "TSEM", u32 version, u64 |vocab|, u64 d,
/// then per token u32 byte length + bytes + u64 frequency, then the row-major
/// float32 matrix.
void save_binary(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_binary(const std::filesystem::path& path);

/// One line per token: the token followed by d space-separated floats.
/// Frequencies are not stored; loading assigns 1.
void save_text(const EmbeddingTable& table, const std::filesystem::path& path);
EmbeddingTable load_text(const std::filesystem::path& path);

}  // namespace tagscope
