#include "semeq/language.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "semeq/channel.hpp"
#include "semeq/errors.hpp"
#include "semeq/jsonio.hpp"

namespace semeq {

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kObsIndexing = "scout-major-skip-equal";

std::array<double, kNumActions> softmax(std::array<double, kNumActions> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

}  // namespace

std::array<double, kNumActions> Decoder::logits(const Vec2& symbol) const {
  std::array<double, kNumActions> z{};
  std::vector<double> h(static_cast<std::size_t>(hidden));
  for (int i = 0; i < hidden; ++i) {
    h[i] = std::tanh(w1[2 * i] * symbol.x + w1[2 * i + 1] * symbol.y + b1[i]);
  }
  for (int k = 0; k < kNumActions; ++k) {
    double acc = b2[k];
    for (int i = 0; i < hidden; ++i) acc += w2[k * hidden + i] * h[i];
    z[k] = acc;
  }
  return z;
}

void TrainConfig::validate() const {
  if (episodes <= 0) throw Error("episodes must be positive");
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (entropy_bonus < 0.0) throw Error("entropy_bonus must be nonnegative");
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0)) {
    throw Error("baseline_decay must lie in [0, 1)");
  }
  if (hidden <= 0) throw Error("hidden must be positive");
}

bool TrainMeta::operator==(const TrainMeta& o) const {
  return seed == o.seed && config.episodes == o.config.episodes &&
         config.learning_rate == o.config.learning_rate &&
         config.entropy_bonus == o.config.entropy_bonus &&
         config.train_snr_db == o.config.train_snr_db &&
         config.baseline_decay == o.config.baseline_decay &&
         config.hidden == o.config.hidden &&
         final_eval_mean_length == o.final_eval_mean_length;
}

Vec2 encode(const Language& lang, const Observation& obs) {
  const int idx = observation_index(obs, lang.grid);
  if (idx >= static_cast<int>(lang.encoder.table.size())) {
    throw Error("encoder table does not cover observation index " +
                std::to_string(idx));
  }
  return lang.encoder.table[static_cast<std::size_t>(idx)];
}

std::array<double, kNumActions> decode_probs(const Language& lang,
                                             const Vec2& symbol) {
  if (!symbol.finite()) throw Error("decode_probs: non-finite symbol");
  auto z = lang.decoder.logits(symbol);
  for (double& v : z) v /= lang.decoder.temperature;
  return softmax(z);
}

Action sample_action(const Language& lang, const Vec2& symbol, Rng& rng) {
  const auto p = decode_probs(lang, symbol);
  const double u = rng.uniform01();
  double cum = 0.0;
  for (int k = 0; k < kNumActions; ++k) {
    cum += p[k];
    if (u < cum) return static_cast<Action>(k);
  }
  return static_cast<Action>(kNumActions - 1);
}

Action greedy_action(const Language& lang, const Vec2& symbol) {
  const auto p = decode_probs(lang, symbol);
  int best = 0;
  for (int k = 1; k < kNumActions; ++k) {
    if (p[k] > p[best]) best = k;
  }
  return static_cast<Action>(best);
}

// ---------------------------------------------------------------------------
// REINFORCE

namespace {

struct StepForward {
  std::vector<double> h;                 // tanh activations
  std::array<double, kNumActions> p{};   // action probabilities
  Vec2 y;                                // noisy symbol
};

StepForward forward_step(const Encoder& enc, const Decoder& dec,
                         const TrainStep& s) {
  StepForward f;
  f.y = enc.table[static_cast<std::size_t>(s.obs_index)] + s.noise;
  f.h.resize(static_cast<std::size_t>(dec.hidden));
  std::array<double, kNumActions> z{};
  for (int i = 0; i < dec.hidden; ++i) {
    f.h[i] = std::tanh(dec.w1[2 * i] * f.y.x + dec.w1[2 * i + 1] * f.y.y +
                       dec.b1[i]);
  }
  for (int k = 0; k < kNumActions; ++k) {
    double acc = dec.b2[k];
    for (int i = 0; i < dec.hidden; ++i) acc += dec.w2[k * dec.hidden + i] * f.h[i];
    z[k] = acc / dec.temperature;
  }
  f.p = softmax(z);
  return f;
}

double entropy(const std::array<double, kNumActions>& p) {
  double h = 0.0;
  for (const double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace

double reinforce_surrogate(const Encoder& enc, const Decoder& dec,
                           const std::vector<TrainStep>& steps,
                           double entropy_bonus) {
  double total = 0.0;
  for (const TrainStep& s : steps) {
    const StepForward f = forward_step(enc, dec, s);
    total += s.advantage * std::log(f.p[s.action]) + entropy_bonus * entropy(f.p);
  }
  return total;
}

ReinforceGrads reinforce_gradient(const Encoder& enc, const Decoder& dec,
                                  const std::vector<TrainStep>& steps,
                                  double entropy_bonus) {
  const int hidden = dec.hidden;
  ReinforceGrads g;
  g.table.assign(enc.table.size(), Vec2{});
  g.w1.assign(dec.w1.size(), 0.0);
  g.b1.assign(dec.b1.size(), 0.0);
  g.w2.assign(dec.w2.size(), 0.0);
  g.b2.assign(dec.b2.size(), 0.0);

  for (const TrainStep& s : steps) {
    const StepForward f = forward_step(enc, dec, s);
    const double ent = entropy(f.p);
    g.surrogate += s.advantage * std::log(f.p[s.action]) + entropy_bonus * ent;

    // d/dz of [adv * log p_a + beta * H(p)] with z the temperature-scaled
    // logits: adv * (onehot_a - p) - beta * p .* (log p + H).
    std::array<double, kNumActions> gz{};
    for (int k = 0; k < kNumActions; ++k) {
      const double onehot = (k == s.action) ? 1.0 : 0.0;
      const double logp = f.p[k] > 0.0 ? std::log(f.p[k]) : 0.0;
      gz[k] = (s.advantage * (onehot - f.p[k]) -
               entropy_bonus * f.p[k] * (logp + ent)) /
              dec.temperature;
    }

    Vec2 gy{};
    for (int i = 0; i < hidden; ++i) {
      double gh = 0.0;
      for (int k = 0; k < kNumActions; ++k) {
        g.w2[k * hidden + i] += gz[k] * f.h[i];
        gh += dec.w2[k * hidden + i] * gz[k];
      }
      const double gpre = gh * (1.0 - f.h[i] * f.h[i]);
      g.b1[i] += gpre;
      g.w1[2 * i] += gpre * f.y.x;
      g.w1[2 * i + 1] += gpre * f.y.y;
      gy.x += dec.w1[2 * i] * gpre;
      gy.y += dec.w1[2 * i + 1] * gpre;
    }
    for (int k = 0; k < kNumActions; ++k) g.b2[k] += gz[k];
    g.table[static_cast<std::size_t>(s.obs_index)] += gy;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Training

namespace {

double table_avg_power(const Encoder& enc) {
  double sum = 0.0;
  for (const Vec2& v : enc.table) sum += v.norm2();
  return sum / static_cast<double>(enc.table.size());
}

bool all_finite(const std::vector<double>& v) {
  for (const double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

/// Greedy noiseless rollouts; the score recorded in train_meta.
double greedy_eval_mean_length(const Language& lang, int episodes, Rng& rng) {
  long long total = 0;
  for (int e = 0; e < episodes; ++e) {
    Observation obs = new_episode(lang.grid, rng);
    int len = 0;
    for (int t = 0; t < lang.grid.max_steps; ++t) {
      const Action a = greedy_action(lang, encode(lang, obs));
      const StepOutcome out = step(obs, a, lang.grid);
      ++len;
      obs = out.next;
      if (out.terminal) break;
    }
    total += len;
  }
  return static_cast<double>(total) / static_cast<double>(episodes);
}

}  // namespace

Language train_language(const GridConfig& grid, const TrainConfig& tc,
                        std::uint64_t seed) {
  grid.validate();
  tc.validate();
  Rng rng(seed);

  Language lang;
  lang.grid = grid;
  lang.meta.seed = seed;
  lang.meta.config = tc;

  const int n_obs = num_observations(grid);
  lang.encoder.table.resize(static_cast<std::size_t>(n_obs));
  for (Vec2& v : lang.encoder.table) {
    v = {rng.uniform01() - 0.5, rng.uniform01() - 0.5};
  }

  Decoder& dec = lang.decoder;
  dec.hidden = tc.hidden;
  dec.temperature = 1.0;
  dec.w1.resize(static_cast<std::size_t>(2 * tc.hidden));
  dec.b1.assign(static_cast<std::size_t>(tc.hidden), 0.0);
  dec.w2.resize(static_cast<std::size_t>(kNumActions * tc.hidden));
  dec.b2.assign(kNumActions, 0.0);
  const double lim1 = std::sqrt(6.0 / (2.0 + tc.hidden));
  for (double& w : dec.w1) w = (2.0 * rng.uniform01() - 1.0) * lim1;
  const double lim2 = std::sqrt(6.0 / (tc.hidden + 4.0));
  for (double& w : dec.w2) w = (2.0 * rng.uniform01() - 1.0) * lim2;

  // Returns-to-go against per-observation moving-average baselines (a
  // tabular value baseline keyed by the visited observation), advantages
  // scaled by a running estimate of their own magnitude so update sizes
  // stay O(learning_rate) throughout. The last 40% of training anneals the
  // learning rate and entropy bonus linearly.
  std::vector<double> value_baseline(static_cast<std::size_t>(n_obs), 0.0);
  std::vector<bool> value_seen(static_cast<std::size_t>(n_obs), false);
  double adv_scale = 1.0;
  std::vector<TrainStep> steps;
  std::vector<double> rewards;
  std::vector<double> returns;
  std::vector<int> touched;
  steps.reserve(static_cast<std::size_t>(grid.max_steps));
  rewards.reserve(static_cast<std::size_t>(grid.max_steps));
  returns.reserve(static_cast<std::size_t>(grid.max_steps));
  touched.reserve(static_cast<std::size_t>(grid.max_steps));

  for (int ep = 0; ep < tc.episodes; ++ep) {
    const double power = table_avg_power(lang.encoder);
    const ChannelConfig channel =
        ChannelConfig::from_snr(tc.train_snr_db, power);

    steps.clear();
    rewards.clear();
    Observation obs = new_episode(grid, rng);
    for (int t = 0; t < grid.max_steps; ++t) {
      const int idx = observation_index(obs, grid);
      const Vec2 x = lang.encoder.table[static_cast<std::size_t>(idx)];
      const Vec2 y = transmit(x, channel, rng);
      const Action a = sample_action(lang, y, rng);
      const StepOutcome out = step(obs, a, grid);
      steps.push_back({idx, y - x, static_cast<int>(a), 0.0});
      rewards.push_back(out.reward);
      obs = out.next;
      if (out.terminal) break;
    }

    returns.assign(rewards.size(), 0.0);
    double g = 0.0;
    for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
      g += rewards[static_cast<std::size_t>(t)];
      returns[static_cast<std::size_t>(t)] = g;
    }
    double mean_abs_adv = 0.0;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const auto o = static_cast<std::size_t>(steps[t].obs_index);
      if (!value_seen[o]) {
        value_baseline[o] = returns[t];
        value_seen[o] = true;
      }
      steps[t].advantage = returns[t] - value_baseline[o];
      mean_abs_adv += std::abs(steps[t].advantage);
    }
    mean_abs_adv /= static_cast<double>(steps.size());
    adv_scale = tc.baseline_decay * adv_scale +
                (1.0 - tc.baseline_decay) * mean_abs_adv;
    for (TrainStep& s : steps) s.advantage /= std::max(adv_scale, 1e-3);

    const double progress = static_cast<double>(ep) / tc.episodes;
    const double anneal = progress < 0.6 ? 1.0 : (1.0 - progress) / 0.4;
    const ReinforceGrads grads = reinforce_gradient(
        lang.encoder, dec, steps, tc.entropy_bonus * anneal);
    const double lr = tc.learning_rate * std::max(anneal, 0.05);
    touched.clear();
    for (const TrainStep& s : steps) touched.push_back(s.obs_index);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (const int i : touched) {
      lang.encoder.table[static_cast<std::size_t>(i)] +=
          grads.table[static_cast<std::size_t>(i)] * lr;
    }
    for (std::size_t i = 0; i < dec.w1.size(); ++i) dec.w1[i] += lr * grads.w1[i];
    for (std::size_t i = 0; i < dec.b1.size(); ++i) dec.b1[i] += lr * grads.b1[i];
    for (std::size_t i = 0; i < dec.w2.size(); ++i) dec.w2[i] += lr * grads.w2[i];
    for (std::size_t i = 0; i < dec.b2.size(); ++i) dec.b2[i] += lr * grads.b2[i];

    for (std::size_t t = 0; t < steps.size(); ++t) {
      const auto o = static_cast<std::size_t>(steps[t].obs_index);
      value_baseline[o] = tc.baseline_decay * value_baseline[o] +
                          (1.0 - tc.baseline_decay) * returns[t];
    }

    bool finite = std::isfinite(grads.surrogate) && all_finite(dec.w1) &&
                  all_finite(dec.b1) && all_finite(dec.w2) && all_finite(dec.b2);
    if (finite) {
      for (const TrainStep& s : steps) {
        if (!lang.encoder.table[static_cast<std::size_t>(s.obs_index)].finite()) {
          finite = false;
          break;
        }
      }
    }
    if (!finite) {
      throw TrainingDivergedError("training diverged at episode " +
                                  std::to_string(ep));
    }
  }

  Rng eval_rng(derive_seed(seed, 0x6576616cull));  // "eval"
  lang.meta.final_eval_mean_length = greedy_eval_mean_length(lang, 1000, eval_rng);
  return lang;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json language_to_json(const Language& lang) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "language";
  doc["grid"] = {{"size", lang.grid.size}, {"max_steps", lang.grid.max_steps}};
  doc["obs_indexing"] = kObsIndexing;
  nlohmann::json table = nlohmann::json::array();
  for (const Vec2& v : lang.encoder.table) {
    table.push_back(nlohmann::json::array({v.x, v.y}));
  }
  doc["encoder"] = std::move(table);
  nlohmann::json dec;
  dec["hidden"] = lang.decoder.hidden;
  dec["w1"] = lang.decoder.w1;
  dec["b1"] = lang.decoder.b1;
  dec["w2"] = lang.decoder.w2;
  dec["b2"] = lang.decoder.b2;
  dec["temperature"] = lang.decoder.temperature;
  doc["decoder"] = std::move(dec);
  doc["train_meta"] = {{"seed", lang.meta.seed},
                       {"episodes", lang.meta.config.episodes},
                       {"learning_rate", lang.meta.config.learning_rate},
                       {"entropy_bonus", lang.meta.config.entropy_bonus},
                       {"train_snr_db", lang.meta.config.train_snr_db},
                       {"baseline_decay", lang.meta.config.baseline_decay},
                       {"hidden", lang.meta.config.hidden},
                       {"final_eval_mean_length",
                        lang.meta.final_eval_mean_length}};
  return doc;
}

std::vector<double> require_double_array(const nlohmann::json& obj,
                                         const std::string& key,
                                         std::size_t expected,
                                         const std::string& path) {
  const auto& f = require_field(obj, key, path);
  if (!f.is_array() || f.size() != expected) {
    throw SchemaError(path + "." + key + ": expected " +
                      std::to_string(expected) + " entries, got " +
                      std::to_string(f.is_array() ? f.size() : 0));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f[i].is_number()) {
      throw SchemaError(path + "." + key + "[" + std::to_string(i) +
                        "]: expected a number");
    }
    const double v = f[i].get<double>();
    if (!std::isfinite(v)) {
      throw SchemaError(path + "." + key + "[" + std::to_string(i) +
                        "]: non-finite value");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

void save_language(const Language& lang, const std::string& path) {
  write_json_artifact(language_to_json(lang), path);
}

Language load_language(const std::string& path) {
  const nlohmann::json doc = read_json_artifact(path, "language");
  Language lang;
  const auto& grid = require_field(doc, "grid", path);
  lang.grid.size = static_cast<int>(require_int(grid, "size", path + ".grid"));
  lang.grid.max_steps =
      static_cast<int>(require_int(grid, "max_steps", path + ".grid"));
  lang.grid.validate();

  if (require_string(doc, "obs_indexing", path) != kObsIndexing) {
    throw SchemaError(path + ".obs_indexing: unsupported indexing order");
  }

  const int n_obs = num_observations(lang.grid);
  const auto& table = require_field(doc, "encoder", path);
  if (!table.is_array() || static_cast<int>(table.size()) != n_obs) {
    throw SchemaError(path + ".encoder: expected " + std::to_string(n_obs) +
                      " rows");
  }
  lang.encoder.table.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& row = table[i];
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
        !row[1].is_number()) {
      throw SchemaError(path + ".encoder[" + std::to_string(i) +
                        "]: expected a 2-vector");
    }
    const Vec2 v{row[0].get<double>(), row[1].get<double>()};
    if (!v.finite()) {
      throw SchemaError(path + ".encoder[" + std::to_string(i) +
                        "]: non-finite symbol");
    }
    lang.encoder.table.push_back(v);
  }

  const auto& dec = require_field(doc, "decoder", path);
  const std::string dec_path = path + ".decoder";
  lang.decoder.hidden =
      static_cast<int>(require_int(dec, "hidden", dec_path));
  if (lang.decoder.hidden <= 0) {
    throw SchemaError(dec_path + ".hidden: must be positive");
  }
  const auto h = static_cast<std::size_t>(lang.decoder.hidden);
  lang.decoder.w1 = require_double_array(dec, "w1", 2 * h, dec_path);
  lang.decoder.b1 = require_double_array(dec, "b1", h, dec_path);
  lang.decoder.w2 = require_double_array(dec, "w2", kNumActions * h, dec_path);
  lang.decoder.b2 = require_double_array(dec, "b2", kNumActions, dec_path);
  lang.decoder.temperature = require_double(dec, "temperature", dec_path);
  if (!(lang.decoder.temperature > 0.0)) {
    throw SchemaError(dec_path + ".temperature: must be positive");
  }

  const auto& meta = require_field(doc, "train_meta", path);
  const std::string meta_path = path + ".train_meta";
  lang.meta.seed =
      static_cast<std::uint64_t>(require_int(meta, "seed", meta_path));
  lang.meta.config.episodes =
      static_cast<int>(require_int(meta, "episodes", meta_path));
  lang.meta.config.learning_rate =
      require_double(meta, "learning_rate", meta_path);
  lang.meta.config.entropy_bonus =
      require_double(meta, "entropy_bonus", meta_path);
  lang.meta.config.train_snr_db =
      require_double(meta, "train_snr_db", meta_path);
  lang.meta.config.baseline_decay =
      require_double(meta, "baseline_decay", meta_path);
  lang.meta.config.hidden =
      static_cast<int>(require_int(meta, "hidden", meta_path));
  lang.meta.final_eval_mean_length =
      require_double(meta, "final_eval_mean_length", meta_path);
  return lang;
}

std::uint64_t language_fingerprint(const Language& lang) {
  return json_fingerprint(language_to_json(lang));
}

}  // namespace semeq
