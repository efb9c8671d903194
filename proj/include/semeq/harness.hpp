#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semeq/channel.hpp"
#include "semeq/codebook.hpp"
#include "semeq/equalizer.hpp"
#include "semeq/gridworld.hpp"
#include "semeq/language.hpp"
#include "semeq/semantics.hpp"

namespace semeq {

/// The five communication strategies compared in the evaluation: matched
/// baselines, the raw cross-language system, and the two equalized ones.
enum class Strategy {
  SourceMatched,
  TargetMatched,
  CrossNoEq,
  CrossSem,
  CrossEff,
};

inline constexpr Strategy kAllStrategies[] = {
    Strategy::SourceMatched, Strategy::TargetMatched, Strategy::CrossNoEq,
    Strategy::CrossSem, Strategy::CrossEff};

const char* strategy_name(Strategy s);

enum class DecoderMode { Stochastic, Greedy };

const char* decoder_mode_name(DecoderMode m);

struct StrategySpec {
  Strategy strategy = Strategy::SourceMatched;
  DecoderMode decoder = DecoderMode::Stochastic;
};

struct EvalResult {
  Strategy strategy = Strategy::SourceMatched;
  DecoderMode decoder = DecoderMode::Stochastic;
  std::optional<double> snr_db;  // nullopt = noiseless
  std::uint64_t seed = 0;
  int episodes = 0;
  double mean_length = 0.0;
  double std_length = 0.0;
  double success_rate = 0.0;
  double mean_post_t_power = 0.0;
};

struct SweepConfig {
  std::vector<double> snr_list = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  int episodes = 1000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int cloud_samples = 10000;
  double reg = 1e-6;
  DecoderMode decoder = DecoderMode::Stochastic;

  void validate() const;
};

/// Everything evaluation needs, with the provenance chain enforced: clouds,
/// codebook and tensor must all have been produced from the two languages
/// they are used with.
struct Artifacts {
  Language source;
  Language target;
  SampleCloud source_cloud;
  SampleCloud target_cloud;
  Codebook codebook;
  TransferTensor tensor;
  QTable qtable;

  /// Throws ProvenanceError on any broken link; called by evaluate before
  /// any episode runs.
  void validate() const;
};

Artifacts make_artifacts(Language source, Language target,
                         SampleCloud source_cloud, SampleCloud target_cloud,
                         Codebook codebook, TransferTensor tensor);

/// Per-step equalizer decision record for the optional policy trace.
struct TraceRow {
  int episode = 0;
  int step = 0;
  int obs_index = 0;
  int source_atom = 0;
  int map_id = 0;
  Policy policy = Policy::None;
};

struct EpisodeOutcome {
  int length = 0;
  bool success = false;
  double post_t_power_sum = 0.0;
};

/// One communication episode: encode with tx, equalize (when an equalizer
/// is given), transmit, decode with rx, act. Runs from the given start
/// observation until capture or the step cap.
EpisodeOutcome run_episode_from(const Observation& start, const Language& tx,
                                const Language& rx, const EqualizerState* eq,
                                const ChannelConfig& channel,
                                const GridConfig& grid, DecoderMode mode,
                                Rng& rng, std::vector<TraceRow>* trace = nullptr,
                                int episode_index = 0);

/// Same, with the start drawn from the rng.
EpisodeOutcome run_episode(const Language& tx, const Language& rx,
                           const EqualizerState* eq,
                           const ChannelConfig& channel, const GridConfig& grid,
                           DecoderMode mode, Rng& rng);

/// Runs `episodes` independent episodes of the given strategy, each on its
/// own derived rng stream, and aggregates. Deterministic given the seed.
EvalResult evaluate(const StrategySpec& spec, const Artifacts& artifacts,
                    std::optional<double> snr_db, int episodes,
                    std::uint64_t seed, std::vector<TraceRow>* trace = nullptr);

/// Full cross product strategies x snr_list x seeds as a CSV string
/// (deterministic bytes for fixed inputs).
std::string sweep_csv(const SweepConfig& cfg, const Artifacts& artifacts);

void sweep(const SweepConfig& cfg, const Artifacts& artifacts,
           const std::string& out_path);

const char* kResultsCsvHeader();

std::string trace_csv(const std::vector<TraceRow>& rows);

/// Axis-aligned box in the semantic space.
struct Box {
  Vec2 lo;
  Vec2 hi;
};

/// Bounding box of the encoder table, inflated 20% about its center.
Box default_raster_bounds(const Language& lang);

/// Atom index at each pixel center over the box, written as a binary PGM
/// (atom * 85 gray levels), plus a CSV of the encoder points and their
/// atoms. Row 0 is the top of the box (max y).
void partition_raster(const Language& lang, const Box& bounds, int resolution,
                      const std::string& pgm_path, const std::string& csv_path);

}  // namespace semeq
