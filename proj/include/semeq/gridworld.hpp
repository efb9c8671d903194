#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "semeq/rng.hpp"

namespace semeq {

/// Square grid task: a scout chases a fixed treasure, one move per step.
struct GridConfig {
  int size = 5;       // side length
  int max_steps = 50; // episode cap

  /// Throws Error unless size >= 2 and max_steps >= 2*(size-1).
  void validate() const;
  int cells() const { return size * size; }
  bool operator==(const GridConfig& o) const {
    return size == o.size && max_steps == o.max_steps;
  }
};

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell& o) const { return row == o.row && col == o.col; }
};

/// Full state visible to the encoder: both positions.
struct Observation {
  Cell scout;
  Cell treasure;
  bool operator==(const Observation& o) const {
    return scout == o.scout && treasure == o.treasure;
  }
};

/// Fixed action order; atom indices and all serialization inherit it.
enum class Action : int { Right = 0, Down = 1, Left = 2, Up = 3 };

inline constexpr int kNumActions = 4;

const char* action_name(Action a);

struct StepOutcome {
  Observation next;
  double reward = 0.0;
  bool terminal = false;
};

/// Count of valid observations (scout != treasure): size^2 * (size^2 - 1).
int num_observations(const GridConfig& config);

bool observation_valid(const Observation& obs, const GridConfig& config);

/// Fixed bijection valid observations <-> [0, num_observations).
/// Order: scout cell row-major, then treasure cell row-major skipping the
/// scout's own cell.
int observation_index(const Observation& obs, const GridConfig& config);
Observation observation_from_index(int index, const GridConfig& config);

/// Scout and treasure uniform over distinct cells; the treasure cell is
/// redrawn on collision.
Observation new_episode(const GridConfig& config, Rng& rng);

/// One move, clamped at the borders; the treasure never moves. Reward is 0
/// on the capturing step and -1 otherwise.
StepOutcome step(const Observation& obs, Action action, const GridConfig& config);

int manhattan(const Cell& a, const Cell& b);

/// Exact optimal action values q(a, o), one row per valid observation.
class QTable {
 public:
  QTable(GridConfig grid, std::vector<std::array<double, kNumActions>> q)
      : grid_(grid), q_(std::move(q)) {}

  double value(const Observation& obs, Action a) const;
  const std::array<double, kNumActions>& row(int obs_index) const {
    return q_[static_cast<std::size_t>(obs_index)];
  }
  const GridConfig& grid() const { return grid_; }

 private:
  GridConfig grid_;
  std::vector<std::array<double, kNumActions>> q_;
};

/// Value iteration under cost 1 per step, zero value at the absorbing goal,
/// discount 1. Iterates until the sup-norm change drops below 1e-12. On the
/// obstacle-free grid this equals -1 - manhattan(next, treasure) exactly.
QTable optimal_q(const GridConfig& config);

/// Exact expected shortest-path length between uniformly chosen distinct
/// cells, by enumeration of all placements.
double mean_optimal_length(const GridConfig& config);

}  // namespace semeq
