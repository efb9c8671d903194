#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semeq/codebook.hpp"
#include "semeq/gridworld.hpp"
#include "semeq/language.hpp"
#include "semeq/linalg.hpp"

namespace semeq {

/// Uniform distribution over valid observations; sampling delegates to
/// new_episode so the two distributions coincide by construction.
struct ObservationSampler {
  GridConfig grid;

  Observation sample(Rng& rng) const { return new_episode(grid, rng); }
  int count() const { return num_observations(grid); }
  Observation at(int index) const { return observation_from_index(index, grid); }
};

/// Decision-region partition of the semantic space under a language's
/// decoder: atom i is where action i has maximal probability (lowest index
/// on ties). Atoms are disjoint and cover the plane.
struct Partition {
  Language language;

  explicit Partition(Language lang) : language(std::move(lang)) {}
  int atom_of(const Vec2& symbol) const;
};

/// Encoded observation samples binned by the encoding language's own atoms,
/// with the empirical mean squared symbol norm.
struct SampleCloud {
  std::array<std::vector<Vec2>, kNumActions> atoms;
  int total = 0;
  double avg_power = 0.0;
  bool exhaustive = false;
  std::uint64_t language_fp = 0;

  int atom_count(int i) const {
    return static_cast<int>(atoms[static_cast<std::size_t>(i)].size());
  }
};

/// M observations drawn i.i.d., encoded and binned.
SampleCloud build_cloud(const Language& lang, const ObservationSampler& sampler,
                        int samples, Rng& rng);

/// Every valid observation exactly `repeats` times, in index order.
SampleCloud build_cloud_exhaustive(const Language& lang,
                                   const ObservationSampler& sampler,
                                   int repeats = 1);

/// Bins raw symbols under the partition; used by tests and tooling that work
/// directly in the semantic space.
SampleCloud cloud_from_symbols(const Partition& partition,
                               std::span<const Vec2> symbols);

/// Counting estimator of the information transfer zeta_{i->j}(T): the
/// fraction of atom i's samples that T moves into target atom j. Throws
/// EmptyAtomError when atom i holds no samples.
double info_transfer(const LinearMap& map, const SampleCloud& source_cloud,
                     int source_atom, const Partition& target_partition,
                     int target_atom);

/// zeta and raw counts for every (source atom, target atom, codebook entry).
/// Rows of empty source atoms are flagged invalid. row_sum uses the integer
/// counts, so it is exactly 1 for valid rows.
struct TransferTensor {
  int n_maps = 0;
  std::array<bool, kNumActions> source_valid{};
  std::vector<double> zeta;           // [i][j][k] flattened
  std::vector<std::int64_t> counts;   // same layout
  std::array<std::int64_t, kNumActions> row_totals{};
  int sample_count = 0;
  std::uint64_t source_lang_fp = 0;
  std::uint64_t target_lang_fp = 0;
  std::uint64_t codebook_fp = 0;

  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * kNumActions +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(n_maps) +
           static_cast<std::size_t>(k);
  }
  double zeta_at(int i, int j, int k) const { return zeta[flat(i, j, k)]; }
  std::int64_t count_at(int i, int j, int k) const {
    return counts[flat(i, j, k)];
  }
  /// (sum_j counts) / row_total; exactly 1.0 for valid rows.
  double row_sum(int i, int k) const;
};

TransferTensor transfer_tensor(const Codebook& codebook,
                               const SampleCloud& source_cloud,
                               const Partition& target_partition);

/// One-hot indicator of the source atom of e(o); exact for the deterministic
/// encoder.
std::array<double, kNumActions> atom_membership_prob(const Language& lang,
                                                     const Observation& obs);

/// CSV with one row per (source_atom, target_atom, map_id); provenance and
/// the invalid-atom set ride in `#` comment lines.
void save_tensor_csv(const TransferTensor& tensor, const std::string& path);
TransferTensor load_tensor_csv(const std::string& path);

void save_cloud(const SampleCloud& cloud, const std::string& path);
SampleCloud load_cloud(const std::string& path);

}  // namespace semeq
