#include "semeq/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semeq/errors.hpp"
#include "semeq/harness.hpp"
#include "semeq/jsonio.hpp"

namespace semeq {

namespace {

std::optional<double> parse_snr(const std::string& text) {
  if (text == "noiseless" || text == "inf") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw Error("");
    return v;
  } catch (...) {
    throw Error("--snr expects a dB value or 'noiseless', got '" + text + "'");
  }
}

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw Error("--snr-list holds no values: '" + text + "'");
  return out;
}

DecoderMode parse_decoder(const std::string& text) {
  if (text == "stochastic") return DecoderMode::Stochastic;
  if (text == "greedy") return DecoderMode::Greedy;
  throw Error("--decoder expects 'stochastic' or 'greedy', got '" + text + "'");
}

Policy parse_policy(const std::string& text) {
  if (text == "none") return Policy::None;
  if (text == "sem") return Policy::Sem;
  if (text == "eff") return Policy::Eff;
  throw Error("--policy expects none|sem|eff, got '" + text + "'");
}

nlohmann::json load_config_file(const std::string& path) {
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": not valid JSON (" + e.what() + ")");
  }
  if (!cfg.is_object()) throw SchemaError(path + ": config must be an object");
  return cfg;
}

struct ArtifactPaths {
  std::string source;
  std::string target;
  std::string source_cloud;
  std::string target_cloud;
  std::string codebook;
  std::string tensor;
};

void add_artifact_options(CLI::App* cmd, ArtifactPaths* paths) {
  cmd->add_option("--source", paths->source, "source language file")->required();
  cmd->add_option("--target", paths->target, "target language file")->required();
  cmd->add_option("--source-cloud", paths->source_cloud,
                  "source sample-cloud file")
      ->required();
  cmd->add_option("--target-cloud", paths->target_cloud,
                  "target sample-cloud file")
      ->required();
  cmd->add_option("--codebook", paths->codebook, "codebook file")->required();
  cmd->add_option("--tensor", paths->tensor, "transfer-tensor file")->required();
}

Artifacts load_artifacts(const ArtifactPaths& paths) {
  return make_artifacts(load_language(paths.source),
                        load_language(paths.target),
                        load_cloud(paths.source_cloud),
                        load_cloud(paths.target_cloud),
                        load_codebook(paths.codebook),
                        load_tensor_csv(paths.tensor));
}

// --- train ------------------------------------------------------------

struct TrainArgs {
  std::uint64_t seed = 0;
  std::string out;
  std::string config_path;
  int grid_size = 5;
  int max_steps = 50;
  int episodes = -1;       // -1 = take config/default
  double train_snr = 0.0;
  bool train_snr_set = false;
};

int cmd_train(const TrainArgs& a) {
  TrainConfig tc;
  if (!a.config_path.empty()) {
    const nlohmann::json cfg = load_config_file(a.config_path);
    tc.episodes = cfg.value("episodes", tc.episodes);
    tc.learning_rate = cfg.value("learning_rate", tc.learning_rate);
    tc.entropy_bonus = cfg.value("entropy_bonus", tc.entropy_bonus);
    tc.train_snr_db = cfg.value("train_snr_db", tc.train_snr_db);
    tc.baseline_decay = cfg.value("baseline_decay", tc.baseline_decay);
    tc.hidden = cfg.value("hidden", tc.hidden);
  }
  if (a.episodes >= 0) tc.episodes = a.episodes;
  if (a.train_snr_set) tc.train_snr_db = a.train_snr;

  GridConfig grid{a.grid_size, a.max_steps};
  grid.validate();
  const Language lang = train_language(grid, tc, a.seed);
  save_language(lang, a.out);
  std::cout << "trained language -> " << a.out
            << " (greedy noiseless mean length "
            << format_double(lang.meta.final_eval_mean_length) << ")\n";
  return 0;
}

// --- codebook ---------------------------------------------------------

struct CodebookArgs {
  std::uint64_t seed = 0;
  std::string source;
  std::string target;
  std::string out_prefix;
  int samples = 10000;
  double reg = 1e-6;
};

int cmd_codebook(const CodebookArgs& a) {
  const Language lang_s = load_language(a.source);
  const Language lang_t = load_language(a.target);
  if (!(lang_s.grid == lang_t.grid)) {
    throw ProvenanceError("languages use different grids");
  }
  const ObservationSampler sampler{lang_s.grid};
  Rng rng_s(derive_seed(a.seed, 1));
  Rng rng_t(derive_seed(a.seed, 2));
  const SampleCloud cloud_s = build_cloud(lang_s, sampler, a.samples, rng_s);
  const SampleCloud cloud_t = build_cloud(lang_t, sampler, a.samples, rng_t);
  const Codebook cb = build_codebook(cloud_s, cloud_t, a.reg);
  const Partition target_partition(lang_t);
  const TransferTensor tensor = transfer_tensor(cb, cloud_s, target_partition);

  save_cloud(cloud_s, a.out_prefix + ".source_cloud.json");
  save_cloud(cloud_t, a.out_prefix + ".target_cloud.json");
  save_codebook(cb, a.out_prefix + ".codebook.json");
  save_tensor_csv(tensor, a.out_prefix + ".tensor.csv");
  std::cout << "codebook with " << cb.size() << " maps ("
            << cb.skipped.size() << " pairs skipped) -> " << a.out_prefix
            << ".{source_cloud,target_cloud}.json, .codebook.json, .tensor.csv\n";
  return 0;
}

// --- eval -------------------------------------------------------------

struct EvalArgs {
  std::uint64_t seed = 0;
  ArtifactPaths paths;
  std::string policy = "none";
  std::string decoder = "stochastic";
  std::string snr = "noiseless";
  int episodes = 1000;
  std::string out;
  std::string trace_path;
};

int cmd_eval(const EvalArgs& a) {
  const Artifacts artifacts = load_artifacts(a.paths);
  const Policy policy = parse_policy(a.policy);
  Strategy strategy = Strategy::CrossNoEq;
  if (policy == Policy::Sem) {
    strategy = Strategy::CrossSem;
  } else if (policy == Policy::Eff) {
    strategy = Strategy::CrossEff;
  } else if (language_fingerprint(artifacts.source) ==
             language_fingerprint(artifacts.target)) {
    strategy = Strategy::SourceMatched;
  }
  const StrategySpec spec{strategy, parse_decoder(a.decoder)};
  std::vector<TraceRow> trace;
  const EvalResult r =
      evaluate(spec, artifacts, parse_snr(a.snr), a.episodes, a.seed,
               a.trace_path.empty() ? nullptr : &trace);

  std::ostringstream row;
  row << kResultsCsvHeader() << "\n"
      << strategy_name(r.strategy) << "," << decoder_mode_name(r.decoder) << ","
      << (r.snr_db ? format_double(*r.snr_db) : "inf") << "," << r.seed << ","
      << r.episodes << "," << format_double(r.mean_length) << ","
      << format_double(r.std_length) << "," << format_double(r.success_rate)
      << "," << format_double(r.mean_post_t_power) << "\n";
  std::cout << row.str();
  if (!a.out.empty()) write_file(a.out, row.str());
  if (!a.trace_path.empty()) write_file(a.trace_path, trace_csv(trace));
  return 0;
}

// --- sweep ------------------------------------------------------------

struct SweepArgs {
  std::uint64_t seed = 0;
  ArtifactPaths paths;
  std::string config_path;
  std::string snr_list;
  int episodes = -1;
  std::string decoder = "stochastic";
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  SweepConfig cfg;
  cfg.seeds.clear();
  for (std::uint64_t i = 0; i < 10; ++i) cfg.seeds.push_back(a.seed + i);
  if (!a.config_path.empty()) {
    const nlohmann::json jc = load_config_file(a.config_path);
    if (jc.contains("snr_list")) {
      cfg.snr_list = jc["snr_list"].get<std::vector<double>>();
    }
    cfg.episodes = jc.value("episodes", cfg.episodes);
    if (jc.contains("seeds")) {
      cfg.seeds = jc["seeds"].get<std::vector<std::uint64_t>>();
    }
    cfg.cloud_samples = jc.value("cloud_samples", cfg.cloud_samples);
    cfg.reg = jc.value("reg", cfg.reg);
  }
  if (!a.snr_list.empty()) cfg.snr_list = parse_snr_list(a.snr_list);
  if (a.episodes >= 0) cfg.episodes = a.episodes;
  cfg.decoder = parse_decoder(a.decoder);

  const Artifacts artifacts = load_artifacts(a.paths);
  sweep(cfg, artifacts, a.out);
  std::cout << "sweep: " << 5 * cfg.snr_list.size() * cfg.seeds.size()
            << " rows -> " << a.out << "\n";
  return 0;
}

// --- raster -----------------------------------------------------------

struct RasterArgs {
  std::string source;
  std::string out_prefix;
  int resolution = 256;
  std::string bounds;
};

int cmd_raster(const RasterArgs& a) {
  const Language lang = load_language(a.source);
  Box box = default_raster_bounds(lang);
  if (!a.bounds.empty()) {
    const auto vals = parse_snr_list(a.bounds);  // same comma-float parsing
    if (vals.size() != 4) {
      throw Error("--bounds expects xmin,ymin,xmax,ymax");
    }
    box = {{vals[0], vals[1]}, {vals[2], vals[3]}};
  }
  partition_raster(lang, box, a.resolution, a.out_prefix + ".pgm",
                   a.out_prefix + ".csv");
  std::cout << "raster " << a.resolution << "x" << a.resolution << " -> "
            << a.out_prefix << ".pgm / .csv\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"semantic channel equalization experiments"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a language on the grid task");
  train->add_option("--seed", train_args.seed, "training seed")->required();
  train->add_option("--out", train_args.out, "output language file")->required();
  train->add_option("--grid-size", train_args.grid_size, "grid side length");
  train->add_option("--max-steps", train_args.max_steps, "episode step cap");
  train->add_option("--episodes", train_args.episodes, "training episodes");
  auto* train_snr_opt =
      train->add_option("--snr", train_args.train_snr, "training SNR in dB");
  train->add_option("--config", train_args.config_path,
                    "JSON config with TrainConfig keys");

  CodebookArgs cb_args;
  CLI::App* cb = app.add_subcommand(
      "codebook", "build clouds, codebook and transfer tensor for two languages");
  cb->add_option("--seed", cb_args.seed, "sampling seed")->required();
  cb->add_option("--source", cb_args.source, "source language file")->required();
  cb->add_option("--target", cb_args.target, "target language file")->required();
  cb->add_option("--samples", cb_args.samples, "cloud sample count");
  cb->add_option("--reg", cb_args.reg, "covariance regularizer");
  cb->add_option("--out", cb_args.out_prefix, "output file prefix")->required();

  EvalArgs eval_args;
  CLI::App* ev = app.add_subcommand("eval", "evaluate one strategy point");
  ev->add_option("--seed", eval_args.seed, "evaluation seed")->required();
  add_artifact_options(ev, &eval_args.paths);
  ev->add_option("--policy", eval_args.policy, "equalization policy: none|sem|eff");
  ev->add_option("--decoder", eval_args.decoder, "decoder mode: stochastic|greedy");
  ev->add_option("--snr", eval_args.snr, "channel SNR in dB or 'noiseless'");
  ev->add_option("--episodes", eval_args.episodes, "episode count");
  ev->add_option("--out", eval_args.out, "also write the result CSV here");
  ev->add_option("--trace", eval_args.trace_path, "write a policy trace CSV");

  SweepArgs sweep_args;
  CLI::App* sw = app.add_subcommand(
      "sweep", "run all strategies over an SNR grid and seed list");
  sw->add_option("--seed", sweep_args.seed,
                 "base seed; evaluation seeds are seed..seed+9 unless the "
                 "config file lists them")
      ->required();
  add_artifact_options(sw, &sweep_args.paths);
  sw->add_option("--snr-list", sweep_args.snr_list, "comma-separated dB values");
  sw->add_option("--episodes", sweep_args.episodes, "episodes per point");
  sw->add_option("--decoder", sweep_args.decoder, "decoder mode");
  sw->add_option("--config", sweep_args.config_path,
                 "JSON config with SweepConfig keys");
  sw->add_option("--out", sweep_args.out, "output CSV path")->required();

  RasterArgs raster_args;
  CLI::App* ra = app.add_subcommand("raster", "export a partition raster");
  ra->add_option("--source", raster_args.source, "language file")->required();
  ra->add_option("--out", raster_args.out_prefix, "output file prefix")->required();
  ra->add_option("--resolution", raster_args.resolution, "pixels per side");
  ra->add_option("--bounds", raster_args.bounds, "xmin,ymin,xmax,ymax");

  try {
    std::reverse(args.begin(), args.end());  // CLI11's vector API order
    app.parse(std::move(args));
    train_args.train_snr_set = train_snr_opt->count() > 0;
    if (train->parsed()) return cmd_train(train_args);
    if (cb->parsed()) return cmd_codebook(cb_args);
    if (ev->parsed()) return cmd_eval(eval_args);
    if (sw->parsed()) return cmd_sweep(sweep_args);
    if (ra->parsed()) return cmd_raster(raster_args);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace semeq
