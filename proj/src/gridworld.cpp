#include "semeq/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "semeq/errors.hpp"

namespace semeq {

void GridConfig::validate() const {
  if (size < 2) {
    throw Error("grid size must be >= 2, got " + std::to_string(size));
  }
  if (max_steps < 2 * (size - 1)) {
    throw Error("max_steps must be >= 2*(size-1), got " +
                std::to_string(max_steps));
  }
}

const char* action_name(Action a) {
  switch (a) {
    case Action::Right: return "right";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Up: return "up";
  }
  return "?";
}

int num_observations(const GridConfig& config) {
  const int c = config.cells();
  return c * (c - 1);
}

namespace {

int cell_index(const Cell& c, const GridConfig& config) {
  return c.row * config.size + c.col;
}

Cell cell_from_index(int idx, const GridConfig& config) {
  return {idx / config.size, idx % config.size};
}

}  // namespace

bool observation_valid(const Observation& obs, const GridConfig& config) {
  const auto in_bounds = [&](const Cell& c) {
    return c.row >= 0 && c.row < config.size && c.col >= 0 && c.col < config.size;
  };
  return in_bounds(obs.scout) && in_bounds(obs.treasure) &&
         !(obs.scout == obs.treasure);
}

int observation_index(const Observation& obs, const GridConfig& config) {
  if (!observation_valid(obs, config)) {
    throw Error("observation out of range for grid");
  }
  const int s = cell_index(obs.scout, config);
  const int t = cell_index(obs.treasure, config);
  return s * (config.cells() - 1) + (t < s ? t : t - 1);
}

Observation observation_from_index(int index, const GridConfig& config) {
  const int c = config.cells();
  if (index < 0 || index >= num_observations(config)) {
    throw Error("observation index out of range");
  }
  const int s = index / (c - 1);
  const int r = index % (c - 1);
  const int t = r < s ? r : r + 1;
  return {cell_from_index(s, config), cell_from_index(t, config)};
}

Observation new_episode(const GridConfig& config, Rng& rng) {
  const int c = config.cells();
  const int scout = rng.uniform_int(c);
  int treasure = rng.uniform_int(c);
  while (treasure == scout) {
    treasure = rng.uniform_int(c);
  }
  return {cell_from_index(scout, config), cell_from_index(treasure, config)};
}

StepOutcome step(const Observation& obs, Action action, const GridConfig& config) {
  static constexpr int kRowDelta[kNumActions] = {0, 1, 0, -1};
  static constexpr int kColDelta[kNumActions] = {1, 0, -1, 0};
  const int a = static_cast<int>(action);
  Cell next = obs.scout;
  next.row = std::clamp(next.row + kRowDelta[a], 0, config.size - 1);
  next.col = std::clamp(next.col + kColDelta[a], 0, config.size - 1);
  const bool terminal = next == obs.treasure;
  return {{next, obs.treasure}, terminal ? 0.0 : -1.0, terminal};
}

int manhattan(const Cell& a, const Cell& b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

double QTable::value(const Observation& obs, Action a) const {
  return q_[static_cast<std::size_t>(observation_index(obs, grid_))]
           [static_cast<std::size_t>(a)];
}

QTable optimal_q(const GridConfig& config) {
  config.validate();
  const int n_obs = num_observations(config);
  // V over valid (non-terminal) observations; terminal states are absorbing
  // with value 0.
  std::vector<double> v(static_cast<std::size_t>(n_obs), 0.0);
  std::vector<double> v_next(v.size(), 0.0);
  for (int iter = 0; iter < 4 * config.size * config.size + 16; ++iter) {
    double sup_change = 0.0;
    for (int i = 0; i < n_obs; ++i) {
      const Observation obs = observation_from_index(i, config);
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < kNumActions; ++a) {
        const StepOutcome out = step(obs, static_cast<Action>(a), config);
        const double next_v =
            out.terminal ? 0.0
                         : v[static_cast<std::size_t>(
                               observation_index(out.next, config))];
        best = std::max(best, -1.0 + next_v);
      }
      v_next[static_cast<std::size_t>(i)] = best;
      sup_change = std::max(
          sup_change, std::abs(best - v[static_cast<std::size_t>(i)]));
    }
    v.swap(v_next);
    if (sup_change < 1e-12) break;
  }
  std::vector<std::array<double, kNumActions>> q(
      static_cast<std::size_t>(n_obs));
  for (int i = 0; i < n_obs; ++i) {
    const Observation obs = observation_from_index(i, config);
    for (int a = 0; a < kNumActions; ++a) {
      const StepOutcome out = step(obs, static_cast<Action>(a), config);
      const double next_v =
          out.terminal
              ? 0.0
              : v[static_cast<std::size_t>(observation_index(out.next, config))];
      q[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] =
          -1.0 + next_v;
    }
  }
  return QTable(config, std::move(q));
}

double mean_optimal_length(const GridConfig& config) {
  config.validate();
  long long total = 0;
  long long pairs = 0;
  const int c = config.cells();
  for (int s = 0; s < c; ++s) {
    for (int t = 0; t < c; ++t) {
      if (s == t) continue;
      total += manhattan(cell_from_index(s, config), cell_from_index(t, config));
      ++pairs;
    }
  }
  return static_cast<double>(total) / static_cast<double>(pairs);
}

}  // namespace semeq
