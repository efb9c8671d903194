#include <doctest.h>

#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "semeq/errors.hpp"
#include "semeq/gridworld.hpp"

using namespace semeq;

namespace {

/// Independent oracle: BFS shortest-path distance between scout and
/// treasure under the clamped one-step dynamics.
int bfs_steps_to_treasure(const Observation& start, const GridConfig& grid) {
  std::vector<int> dist(static_cast<std::size_t>(grid.cells()), -1);
  const auto idx = [&](const Cell& c) { return c.row * grid.size + c.col; };
  std::queue<Cell> frontier;
  dist[static_cast<std::size_t>(idx(start.scout))] = 0;
  frontier.push(start.scout);
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop();
    if (c == start.treasure) return dist[static_cast<std::size_t>(idx(c))];
    for (int a = 0; a < kNumActions; ++a) {
      const StepOutcome out = step({c, start.treasure}, static_cast<Action>(a), grid);
      const Cell n = out.next.scout;
      if (dist[static_cast<std::size_t>(idx(n))] < 0) {
        dist[static_cast<std::size_t>(idx(n))] =
            dist[static_cast<std::size_t>(idx(c))] + 1;
        frontier.push(n);
      }
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("grid config invariants") {
  CHECK_THROWS_AS((GridConfig{1, 50}.validate()), Error);
  CHECK_THROWS_AS((GridConfig{5, 7}.validate()), Error);
  CHECK_NOTHROW((GridConfig{5, 8}.validate()));
  CHECK_NOTHROW(GridConfig{}.validate());
}

TEST_CASE("observation indexing is a bijection") {
  const GridConfig grid{5, 50};
  CHECK(num_observations(grid) == 600);
  for (int i = 0; i < num_observations(grid); ++i) {
    const Observation obs = observation_from_index(i, grid);
    CHECK(observation_valid(obs, grid));
    CHECK(observation_index(obs, grid) == i);
  }
  CHECK_THROWS_AS(observation_index({{0, 0}, {0, 0}}, grid), Error);
  CHECK_THROWS_AS(observation_index({{5, 0}, {0, 0}}, grid), Error);
}

TEST_CASE("step dynamics") {
  const GridConfig grid{5, 50};

  SUBCASE("adjacent capture") {
    const StepOutcome out = step({{2, 2}, {2, 3}}, Action::Right, grid);
    CHECK(out.next.scout == Cell{2, 3});
    CHECK(out.terminal);
    CHECK(out.reward == 0.0);
  }
  SUBCASE("border clamp at the top") {
    const StepOutcome out = step({{0, 0}, {4, 4}}, Action::Up, grid);
    CHECK(out.next.scout == Cell{0, 0});
    CHECK(!out.terminal);
    CHECK(out.reward == -1.0);
  }
  SUBCASE("border clamp at the bottom") {
    const StepOutcome out = step({{4, 0}, {0, 0}}, Action::Down, grid);
    CHECK(out.next.scout == Cell{4, 0});
    CHECK(out.reward == -1.0);
  }
  SUBCASE("clamped dynamics never leave the grid") {
    for (int i = 0; i < num_observations(grid); ++i) {
      const Observation obs = observation_from_index(i, grid);
      for (int a = 0; a < kNumActions; ++a) {
        const StepOutcome out = step(obs, static_cast<Action>(a), grid);
        CHECK(out.next.scout.row >= 0);
        CHECK(out.next.scout.row < grid.size);
        CHECK(out.next.scout.col >= 0);
        CHECK(out.next.scout.col < grid.size);
        CHECK(out.next.treasure == obs.treasure);
        CHECK(out.terminal == (out.next.scout == out.next.treasure));
      }
    }
  }
}

TEST_CASE("new_episode sampling") {
  const GridConfig grid{5, 50};

  SUBCASE("distinct cells and determinism") {
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 200; ++i) {
      const Observation oa = new_episode(grid, a);
      const Observation ob = new_episode(grid, b);
      CHECK(oa == ob);
      CHECK(!(oa.scout == oa.treasure));
    }
    const GridConfig tiny{2, 2};
    Rng c(3);
    for (int i = 0; i < 50; ++i) {
      const Observation o = new_episode(tiny, c);
      CHECK(observation_valid(o, tiny));
    }
  }

  SUBCASE("uniform over the 600 observations") {
    const int draws = 100000;
    std::vector<int> counts(600, 0);
    Rng rng(42);
    for (int i = 0; i < draws; ++i) {
      ++counts[static_cast<std::size_t>(
          observation_index(new_episode(grid, rng), grid))];
    }
    const double p = 1.0 / 600.0;
    const double mean = draws * p;
    const double sigma = std::sqrt(draws * p * (1.0 - p));
    for (const int c : counts) {
      CHECK(c >= mean - 3.0 * sigma);
      CHECK(c <= mean + 3.0 * sigma);
    }
  }
}

TEST_CASE("optimal q table") {
  const GridConfig grid{5, 50};
  const QTable q = optimal_q(grid);

  SUBCASE("spot values") {
    CHECK(q.value({{1, 1}, {1, 2}}, Action::Right) == -1.0);
    CHECK(q.value({{1, 1}, {1, 2}}, Action::Left) == -3.0);
  }

  SUBCASE("equals the closed Manhattan form everywhere, exactly") {
    for (int i = 0; i < num_observations(grid); ++i) {
      const Observation obs = observation_from_index(i, grid);
      for (int a = 0; a < kNumActions; ++a) {
        const StepOutcome out = step(obs, static_cast<Action>(a), grid);
        const double expected =
            out.terminal ? -1.0
                         : -1.0 - manhattan(out.next.scout, obs.treasure);
        CHECK(q.value(obs, static_cast<Action>(a)) == expected);
      }
    }
  }

  SUBCASE("max_a q equals -Manhattan, against the BFS oracle") {
    for (int i = 0; i < num_observations(grid); ++i) {
      const Observation obs = observation_from_index(i, grid);
      double best = -1e9;
      for (int a = 0; a < kNumActions; ++a) {
        best = std::max(best, q.value(obs, static_cast<Action>(a)));
      }
      CHECK(best == -manhattan(obs.scout, obs.treasure));
      CHECK(best == -bfs_steps_to_treasure(obs, grid));
    }
  }

  SUBCASE("Bellman optimality residual is zero") {
    for (int i = 0; i < num_observations(grid); ++i) {
      const Observation obs = observation_from_index(i, grid);
      for (int a = 0; a < kNumActions; ++a) {
        const StepOutcome out = step(obs, static_cast<Action>(a), grid);
        double next_value = 0.0;
        if (!out.terminal) {
          next_value = -1e9;
          for (int b = 0; b < kNumActions; ++b) {
            next_value = std::max(next_value,
                                  q.value(out.next, static_cast<Action>(b)));
          }
        }
        const double residual =
            q.value(obs, static_cast<Action>(a)) - (-1.0 + next_value);
        CHECK(std::abs(residual) < 1e-12);
      }
    }
  }

  SUBCASE("greedy rollout terminates in exactly Manhattan steps") {
    for (int i = 0; i < num_observations(grid); ++i) {
      Observation obs = observation_from_index(i, grid);
      const int expected = manhattan(obs.scout, obs.treasure);
      int steps_taken = 0;
      while (steps_taken <= grid.max_steps) {
        int best = 0;
        for (int a = 1; a < kNumActions; ++a) {
          if (q.value(obs, static_cast<Action>(a)) >
              q.value(obs, static_cast<Action>(best))) {
            best = a;
          }
        }
        const StepOutcome out = step(obs, static_cast<Action>(best), grid);
        ++steps_taken;
        if (out.terminal) break;
        obs = out.next;
      }
      CHECK(steps_taken == expected);
    }
  }
}

TEST_CASE("mean optimal length") {
  CHECK(mean_optimal_length(GridConfig{2, 2}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(mean_optimal_length(GridConfig{5, 50}) == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
  for (int size = 2; size <= 8; ++size) {
    const double v = mean_optimal_length(GridConfig{size, 4 * size});
    CHECK(v >= 1.0);
    CHECK(v <= 2.0 * (size - 1));
  }
}
