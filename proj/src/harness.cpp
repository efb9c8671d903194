#include "semeq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "semeq/errors.hpp"
#include "semeq/jsonio.hpp"

namespace semeq {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::SourceMatched: return "source_matched";
    case Strategy::TargetMatched: return "target_matched";
    case Strategy::CrossNoEq: return "cross_no_eq";
    case Strategy::CrossSem: return "cross_sem";
    case Strategy::CrossEff: return "cross_eff";
  }
  return "?";
}

const char* decoder_mode_name(DecoderMode m) {
  return m == DecoderMode::Stochastic ? "stochastic" : "greedy";
}

void SweepConfig::validate() const {
  if (snr_list.empty()) throw Error("sweep needs a nonempty snr list");
  if (seeds.empty()) throw Error("sweep needs a nonempty seed list");
  if (episodes < 1) throw Error("sweep needs episodes >= 1");
  if (cloud_samples < 1) throw Error("sweep needs cloud_samples >= 1");
  if (reg < 0.0) throw Error("sweep reg must be nonnegative");
}

void Artifacts::validate() const {
  if (!(source.grid == target.grid)) {
    throw ProvenanceError("source and target languages use different grids");
  }
  const std::uint64_t fp_s = language_fingerprint(source);
  const std::uint64_t fp_t = language_fingerprint(target);
  if (source_cloud.language_fp != fp_s) {
    throw ProvenanceError("source cloud was built from a different language");
  }
  if (target_cloud.language_fp != fp_t) {
    throw ProvenanceError("target cloud was built from a different language");
  }
  if (codebook.source_lang_fp != fp_s || codebook.target_lang_fp != fp_t) {
    throw ProvenanceError("codebook was fitted for different languages");
  }
  if (tensor.source_lang_fp != fp_s || tensor.target_lang_fp != fp_t) {
    throw ProvenanceError("tensor was computed for different languages");
  }
  if (tensor.codebook_fp != codebook_fingerprint(codebook)) {
    throw ProvenanceError("tensor was computed for a different codebook");
  }
  if (tensor.n_maps != codebook.size()) {
    throw ProvenanceError("tensor map count differs from codebook size");
  }
  if (!(qtable.grid() == source.grid)) {
    throw ProvenanceError("qtable grid differs from language grid");
  }
}

Artifacts make_artifacts(Language source, Language target,
                         SampleCloud source_cloud, SampleCloud target_cloud,
                         Codebook codebook, TransferTensor tensor) {
  QTable qtable = optimal_q(source.grid);
  Artifacts a{std::move(source),       std::move(target),
              std::move(source_cloud), std::move(target_cloud),
              std::move(codebook),     std::move(tensor),
              std::move(qtable)};
  a.validate();
  return a;
}

EpisodeOutcome run_episode_from(const Observation& start, const Language& tx,
                                const Language& rx, const EqualizerState* eq,
                                const ChannelConfig& channel,
                                const GridConfig& grid, DecoderMode mode,
                                Rng& rng, std::vector<TraceRow>* trace,
                                int episode_index) {
  EpisodeOutcome out;
  Observation obs = start;
  for (int t = 0; t < grid.max_steps; ++t) {
    const Vec2 x = encode(tx, obs);
    Vec2 sent = x;
    if (eq != nullptr && eq->policy() != Policy::None) {
      const int map_id = eq->policy() == Policy::Sem ? select_sem(*eq, obs)
                                                     : select_eff(*eq, obs);
      sent = apply(eq->codebook().maps[static_cast<std::size_t>(map_id)], x);
      if (trace != nullptr) {
        trace->push_back({episode_index, t, observation_index(obs, grid),
                          eq->source_atom(obs), map_id, eq->policy()});
      }
    }
    out.post_t_power_sum += sent.norm2();
    const Vec2 received = transmit(sent, channel, rng);
    const Action a = mode == DecoderMode::Greedy
                         ? greedy_action(rx, received)
                         : sample_action(rx, received, rng);
    const StepOutcome step_out = step(obs, a, grid);
    ++out.length;
    obs = step_out.next;
    if (step_out.terminal) {
      out.success = true;
      return out;
    }
  }
  out.success = false;
  return out;
}

EpisodeOutcome run_episode(const Language& tx, const Language& rx,
                           const EqualizerState* eq,
                           const ChannelConfig& channel, const GridConfig& grid,
                           DecoderMode mode, Rng& rng) {
  return run_episode_from(new_episode(grid, rng), tx, rx, eq, channel, grid,
                          mode, rng);
}

EvalResult evaluate(const StrategySpec& spec, const Artifacts& artifacts,
                    std::optional<double> snr_db, int episodes,
                    std::uint64_t seed, std::vector<TraceRow>* trace) {
  if (episodes < 1) throw Error("evaluate needs episodes >= 1");
  artifacts.validate();

  const Language* tx = &artifacts.source;
  const Language* rx = &artifacts.target;
  double avg_power = artifacts.source_cloud.avg_power;
  Policy policy = Policy::None;
  switch (spec.strategy) {
    case Strategy::SourceMatched:
      rx = &artifacts.source;
      break;
    case Strategy::TargetMatched:
      tx = &artifacts.target;
      rx = &artifacts.target;
      avg_power = artifacts.target_cloud.avg_power;
      break;
    case Strategy::CrossNoEq:
      break;
    case Strategy::CrossSem:
      policy = Policy::Sem;
      break;
    case Strategy::CrossEff:
      policy = Policy::Eff;
      break;
  }

  std::optional<EqualizerState> eq;
  if (policy != Policy::None) {
    eq.emplace(artifacts.tensor, artifacts.codebook, Correspondence::identity(),
               artifacts.qtable, artifacts.source, policy);
  }

  const ChannelConfig channel =
      snr_db.has_value() ? ChannelConfig::from_snr(*snr_db, avg_power)
                         : ChannelConfig::noiseless();

  const GridConfig& grid = artifacts.source.grid;
  double sum = 0.0;
  double sum_sq = 0.0;
  long long successes = 0;
  double power_sum = 0.0;
  long long steps = 0;
  for (int e = 0; e < episodes; ++e) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(e)));
    const Observation start = new_episode(grid, rng);
    const EpisodeOutcome out =
        run_episode_from(start, *tx, *rx, eq ? &*eq : nullptr, channel, grid,
                         spec.decoder, rng, trace, e);
    sum += out.length;
    sum_sq += static_cast<double>(out.length) * out.length;
    successes += out.success ? 1 : 0;
    power_sum += out.post_t_power_sum;
    steps += out.length;
  }

  EvalResult r;
  r.strategy = spec.strategy;
  r.decoder = spec.decoder;
  r.snr_db = snr_db;
  r.seed = seed;
  r.episodes = episodes;
  r.mean_length = sum / episodes;
  r.std_length =
      episodes > 1
          ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / episodes) /
                                        (episodes - 1)))
          : 0.0;
  r.success_rate = static_cast<double>(successes) / episodes;
  r.mean_post_t_power = power_sum / static_cast<double>(steps);
  return r;
}

const char* kResultsCsvHeader() {
  return "strategy,decoder_mode,snr_db,seed,episodes,mean_length,std_length,"
         "success_rate,mean_post_T_power";
}

namespace {

void append_result_row(std::ostringstream& out, const EvalResult& r) {
  out << strategy_name(r.strategy) << "," << decoder_mode_name(r.decoder) << ","
      << (r.snr_db.has_value() ? format_double(*r.snr_db) : "inf") << ","
      << r.seed << "," << r.episodes << "," << format_double(r.mean_length)
      << "," << format_double(r.std_length) << ","
      << format_double(r.success_rate) << ","
      << format_double(r.mean_post_t_power) << "\n";
}

}  // namespace

std::string sweep_csv(const SweepConfig& cfg, const Artifacts& artifacts) {
  cfg.validate();
  artifacts.validate();
  std::ostringstream out;
  out << kResultsCsvHeader() << "\n";
  for (const Strategy strategy : kAllStrategies) {
    for (const double snr : cfg.snr_list) {
      for (const std::uint64_t seed : cfg.seeds) {
        const EvalResult r = evaluate({strategy, cfg.decoder}, artifacts, snr,
                                      cfg.episodes, seed);
        append_result_row(out, r);
      }
    }
  }
  return out.str();
}

void sweep(const SweepConfig& cfg, const Artifacts& artifacts,
           const std::string& out_path) {
  write_file(out_path, sweep_csv(cfg, artifacts));
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << "episode,step,obs,source_atom,map_id,policy\n";
  for (const TraceRow& r : rows) {
    out << r.episode << "," << r.step << "," << r.obs_index << ","
        << r.source_atom << "," << r.map_id << "," << policy_name(r.policy)
        << "\n";
  }
  return out.str();
}

Box default_raster_bounds(const Language& lang) {
  Vec2 lo{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec2 hi{-std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const Vec2& v : lang.encoder.table) {
    lo.x = std::min(lo.x, v.x);
    lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x);
    hi.y = std::max(hi.y, v.y);
  }
  const Vec2 center = (lo + hi) * 0.5;
  const Vec2 half = (hi - lo) * 0.5 * 1.2;
  return {center - half, center + half};
}

void partition_raster(const Language& lang, const Box& bounds, int resolution,
                      const std::string& pgm_path, const std::string& csv_path) {
  if (resolution < 2) throw Error("raster resolution must be >= 2");
  if (!(bounds.hi.x > bounds.lo.x) || !(bounds.hi.y > bounds.lo.y)) {
    throw Error("raster bounds are degenerate");
  }
  const Partition partition(lang);
  const double dx = (bounds.hi.x - bounds.lo.x) / resolution;
  const double dy = (bounds.hi.y - bounds.lo.y) / resolution;

  std::string pgm = "P5\n" + std::to_string(resolution) + " " +
                    std::to_string(resolution) + "\n255\n";
  pgm.reserve(pgm.size() +
              static_cast<std::size_t>(resolution) * resolution);
  for (int r = 0; r < resolution; ++r) {
    const double y = bounds.hi.y - (r + 0.5) * dy;
    for (int c = 0; c < resolution; ++c) {
      const double x = bounds.lo.x + (c + 0.5) * dx;
      const int atom = partition.atom_of({x, y});
      pgm.push_back(static_cast<char>(atom * 85));
    }
  }
  write_file(pgm_path, pgm);

  std::ostringstream csv;
  csv << "obs_index,symbol_x,symbol_y,atom\n";
  for (int i = 0; i < num_observations(lang.grid); ++i) {
    const Vec2 v = lang.encoder.table[static_cast<std::size_t>(i)];
    csv << i << "," << format_double(v.x) << "," << format_double(v.y) << ","
        << partition.atom_of(v) << "\n";
  }
  write_file(csv_path, csv.str());
}

}  // namespace semeq
