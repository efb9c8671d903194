#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "semeq/linalg.hpp"

namespace semeq {

struct SampleCloud;  // semantics.hpp

/// Affine transform of the semantic space: T(x) = A x + b. Fitted maps keep
/// the atom pair and fit diagnostics they came from.
struct LinearMap {
  Mat2 A = Mat2::identity();
  Vec2 b;
  int source_atom = -1;  // -1 for the identity entry
  int target_atom = -1;
  int n_source = 0;
  int n_target = 0;
  double reg = 0.0;

  bool operator==(const LinearMap& o) const {
    return A == o.A && b == o.b && source_atom == o.source_atom &&
           target_atom == o.target_atom;
  }
};

/// An atom with too few samples to fit against; every pair touching it is
/// skipped and this one record documents why.
struct SkippedAtom {
  enum class Side { Source, Target };
  Side side = Side::Source;
  int atom = 0;
  int samples = 0;
};

/// Codebook of transformations: one fitted map per pair of adequately
/// sampled atoms, plus the identity. Map ids are positions in `maps`.
struct Codebook {
  std::vector<LinearMap> maps;
  bool identity_included = true;
  double reg = 0.0;
  std::vector<SkippedAtom> skipped;
  std::uint64_t source_lang_fp = 0;
  std::uint64_t target_lang_fp = 0;

  int size() const { return static_cast<int>(maps.size()); }
};

/// Principal square root of a 2x2 SPD matrix via the closed form
/// (M + sqrt(det M) I) / sqrt(trace M + 2 sqrt(det M)). Throws when M is
/// asymmetric or has an eigenvalue below -1e-12 * scale.
Mat2 matrix_sqrt_spd(const Mat2& m);

/// Gaussian Monge map between moment pairs:
///   A = Ss^{-1/2} (Ss^{1/2} St Ss^{1/2})^{1/2} Ss^{-1/2},  b = mt - A ms,
/// with both covariances regularized to S + reg I first.
LinearMap monge_map_from_moments(const Vec2& mean_s, const Mat2& cov_s,
                                 const Vec2& mean_t, const Mat2& cov_t,
                                 double reg);

/// Fits the linear optimal-transport map from empirical moments of the two
/// sample lists (population covariances, accumulated in a canonical sample
/// order so the fit is independent of input ordering). Throws
/// InsufficientSamplesError below 2 samples on either side.
LinearMap fit_linear_ot(std::span<const Vec2> source_samples,
                        std::span<const Vec2> target_samples, double reg);

Vec2 apply(const LinearMap& map, const Vec2& symbol);

/// One fit per pair of nonempty atoms plus the identity appended last;
/// under-sampled pairs are skipped and recorded. Throws when no pair is
/// fittable.
Codebook build_codebook(const SampleCloud& source_cloud,
                        const SampleCloud& target_cloud, double reg);

void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

std::uint64_t codebook_fingerprint(const Codebook& cb);

}  // namespace semeq
