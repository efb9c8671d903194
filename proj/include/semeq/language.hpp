#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "semeq/gridworld.hpp"
#include "semeq/linalg.hpp"
#include "semeq/rng.hpp"

namespace semeq {

/// Deterministic language generator: one semantic symbol per observation,
/// indexed by the fixed observation bijection.
struct Encoder {
  std::vector<Vec2> table;

  bool operator==(const Encoder& o) const { return table == o.table; }
};

/// Stochastic language interpreter: two-layer perceptron 2 -> hidden -> 4
/// with tanh activations, softmax over action logits.
struct Decoder {
  int hidden = 32;
  std::vector<double> w1;  // hidden x 2, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // 4 x hidden, row-major
  std::vector<double> b2;  // 4
  double temperature = 1.0;

  std::array<double, kNumActions> logits(const Vec2& symbol) const;

  bool operator==(const Decoder& o) const {
    return hidden == o.hidden && w1 == o.w1 && b1 == o.b1 && w2 == o.w2 &&
           b2 == o.b2 && temperature == o.temperature;
  }
};

struct TrainConfig {
  int episodes = 60000;
  double learning_rate = 1e-2;
  double entropy_bonus = 1e-2;
  double train_snr_db = 10.0;
  double baseline_decay = 0.99;
  int hidden = 32;

  void validate() const;
};

struct TrainMeta {
  std::uint64_t seed = 0;
  TrainConfig config;
  double final_eval_mean_length = 0.0;

  bool operator==(const TrainMeta& o) const;
};

/// A full agent language over the grid task.
struct Language {
  GridConfig grid;
  Encoder encoder;
  Decoder decoder;
  TrainMeta meta;

  bool operator==(const Language& o) const {
    return grid == o.grid && encoder == o.encoder && decoder == o.decoder &&
           meta == o.meta;
  }
};

/// Table lookup; throws on observations outside the language's grid.
Vec2 encode(const Language& lang, const Observation& obs);

/// softmax(logits / temperature); throws on non-finite symbols.
std::array<double, kNumActions> decode_probs(const Language& lang,
                                             const Vec2& symbol);

Action sample_action(const Language& lang, const Vec2& symbol, Rng& rng);

/// argmax with ties broken toward the lowest action index.
Action greedy_action(const Language& lang, const Vec2& symbol);

/// One recorded step of a training rollout, frozen for gradient computation:
/// the noisy symbol is encoder.table[obs_index] + noise.
struct TrainStep {
  int obs_index = 0;
  Vec2 noise;
  int action = 0;
  double advantage = 0.0;
};

/// Policy-gradient objective over a frozen batch:
///   sum_t [ advantage_t * log pi(a_t | x_t + n_t) + beta * H(pi(.|x_t+n_t)) ]
/// Differentiable in the decoder weights and the touched encoder rows.
double reinforce_surrogate(const Encoder& enc, const Decoder& dec,
                           const std::vector<TrainStep>& steps,
                           double entropy_bonus);

struct ReinforceGrads {
  std::vector<Vec2> table;  // same length as the encoder table
  std::vector<double> w1, b1, w2, b2;
  double surrogate = 0.0;
};

ReinforceGrads reinforce_gradient(const Encoder& enc, const Decoder& dec,
                                  const std::vector<TrainStep>& steps,
                                  double entropy_bonus);

/// REINFORCE with a moving-average baseline and entropy bonus, the encoder
/// table and decoder trained jointly, symbols passed through the AWGN
/// channel at train_snr_db (noise power recalibrated each episode from the
/// current table). Deterministic given the seed. Throws
/// TrainingDivergedError naming the episode if parameters go non-finite.
Language train_language(const GridConfig& grid, const TrainConfig& tc,
                        std::uint64_t seed);

void save_language(const Language& lang, const std::string& path);
Language load_language(const std::string& path);

/// Stable identity of a language: fingerprint of its canonical JSON form.
/// Matches the fingerprint embedded by save_language.
std::uint64_t language_fingerprint(const Language& lang);

}  // namespace semeq
