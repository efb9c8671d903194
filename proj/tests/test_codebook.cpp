#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "semeq/codebook.hpp"
#include "semeq/errors.hpp"
#include "semeq/jsonio.hpp"
#include "semeq/semantics.hpp"
#include "test_util.hpp"

using namespace semeq;
using namespace semeq::testing;

namespace {

std::vector<Vec2> gaussian_blob(const Vec2& center, const Mat2& shape, int n,
                                std::uint64_t seed) {
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    auto [a, b] = rng.gaussian_pair();
    out.push_back(center + shape * Vec2{a, b});
  }
  return out;
}

double identity_distance(const Mat2& a) {
  return (a - Mat2::identity()).frobenius();
}

}  // namespace

TEST_CASE("matrix_sqrt_spd") {
  SUBCASE("identity and diagonal") {
    CHECK(matrix_sqrt_spd(Mat2::identity()) == Mat2::identity());
    const Mat2 s = matrix_sqrt_spd(Mat2::diag(4.0, 9.0));
    CHECK(s.a00 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.a11 == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(s.a01 == 0.0);
  }

  SUBCASE("reconstruction residual on random SPD matrices") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      // Random SPD via B^T B + small diagonal.
      const Mat2 b{2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0,
                   2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0};
      const Mat2 m = b.transpose() * b + Mat2::diag(0.05, 0.05);
      const Mat2 s = matrix_sqrt_spd(m);
      CHECK((s * s - m).frobenius() / m.frobenius() < 1e-12);
      CHECK(s.a01 == s.a10);
      CHECK(s.min_eigenvalue_sym() > 0.0);
    }
  }

  SUBCASE("rejects asymmetric and indefinite input") {
    CHECK_THROWS_AS(matrix_sqrt_spd({1.0, 0.5, -0.5, 1.0}), Error);
    CHECK_THROWS_AS(matrix_sqrt_spd(Mat2::diag(1.0, -0.5)), Error);
  }
}

TEST_CASE("monge map from exact moments") {
  SUBCASE("diagonal closed form") {
    const LinearMap m = monge_map_from_moments({0.0, 0.0}, Mat2::identity(),
                                               {0.0, 0.0}, Mat2::diag(4.0, 9.0),
                                               0.0);
    CHECK(m.A.a00 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m.A.a11 == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(m.A.a01) < 1e-14);
    CHECK(m.b.x == 0.0);
    CHECK(m.b.y == 0.0);
  }

  SUBCASE("covariance pushforward identity: A Ss A = St") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const Mat2 bs{rng.uniform01() + 0.2, rng.uniform01() - 0.5, 0.0,
                    rng.uniform01() + 0.2};
      const Mat2 bt{rng.uniform01() + 0.2, 0.0, rng.uniform01() - 0.5,
                    rng.uniform01() + 0.2};
      const Mat2 ss = bs.transpose() * bs + Mat2::diag(0.01, 0.01);
      const Mat2 st = bt.transpose() * bt + Mat2::diag(0.01, 0.01);
      const LinearMap m =
          monge_map_from_moments({0.0, 0.0}, ss, {0.0, 0.0}, st, 0.0);
      CHECK((m.A * ss * m.A - st).frobenius() / st.frobenius() < 1e-6);
      CHECK(m.A.min_eigenvalue_sym() > 0.0);
    }
  }

  SUBCASE("swapping source and target inverts the map") {
    const Mat2 ss{1.3, 0.4, 0.4, 0.9};
    const Mat2 st{2.0, -0.3, -0.3, 0.6};
    const Vec2 ms{1.0, -2.0};
    const Vec2 mt{0.5, 3.0};
    const LinearMap fwd = monge_map_from_moments(ms, ss, mt, st, 1e-6);
    const LinearMap bwd = monge_map_from_moments(mt, st, ms, ss, 1e-6);
    CHECK(identity_distance(fwd.A * bwd.A) < 1e-3);
  }
}

TEST_CASE("fit_linear_ot") {
  const auto source = gaussian_blob({1.0, -0.5}, {0.8, 0.3, 0.0, 1.1}, 4000, 3);

  SUBCASE("identity transport when target equals source") {
    const LinearMap m = fit_linear_ot(source, source, 1e-6);
    CHECK(identity_distance(m.A) <= 1e-6);
    CHECK(m.b.norm() <= 1e-6);
    CHECK(m.n_source == 4000);
  }

  SUBCASE("exact affine relation is recovered") {
    std::vector<Vec2> target;
    target.reserve(source.size());
    for (const Vec2& v : source) {
      target.push_back({2.0 * v.x + 3.0, 2.0 * v.y - 1.0});
    }
    const LinearMap m = fit_linear_ot(source, target, 0.0);
    CHECK((m.A - Mat2::diag(2.0, 2.0)).frobenius() <= 1e-6);
    CHECK(std::abs(m.b.x - 3.0) <= 1e-6);
    CHECK(std::abs(m.b.y + 1.0) <= 1e-6);
  }

  SUBCASE("fit is independent of sample order") {
    auto shuffled = source;
    Rng rng(9);
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1],
                shuffled[static_cast<std::size_t>(rng.uniform_int(
                    static_cast<int>(i)))]);
    }
    const LinearMap a = fit_linear_ot(source, source, 1e-6);
    const LinearMap b = fit_linear_ot(shuffled, source, 1e-6);
    CHECK(a.A == b.A);
    CHECK(a.b == b.b);
  }

  SUBCASE("too few samples") {
    const std::vector<Vec2> one{{0.0, 0.0}};
    CHECK_THROWS_AS(fit_linear_ot(one, source, 1e-6), InsufficientSamplesError);
    CHECK_THROWS_AS(fit_linear_ot(source, one, 1e-6), InsufficientSamplesError);
  }
}

TEST_CASE("apply") {
  LinearMap m;
  SUBCASE("identity") {
    CHECK(apply(m, {1.5, -2.5}) == Vec2{1.5, -2.5});
  }
  SUBCASE("scale and shift") {
    m.A = Mat2::diag(2.0, 2.0);
    m.b = {3.0, -1.0};
    CHECK(apply(m, {1.0, 1.0}) == Vec2{5.0, 1.0});
  }
  SUBCASE("translation composes additively") {
    m.b = {0.25, -0.75};
    const Vec2 twice = apply(m, apply(m, {1.0, 1.0}));
    CHECK(twice == Vec2{1.5, -0.5});
  }
}

TEST_CASE("build_codebook") {
  const Language lang = cone_language();
  const Partition partition(lang);
  static constexpr Vec2 kCenters[4] = {{2.0, 0.0}, {0.0, 2.0}, {-2.0, 0.0}, {0.0, -2.0}};

  const auto cloud_with_atoms = [&](int atoms, std::uint64_t seed) {
    std::vector<Vec2> pts;
    for (int i = 0; i < atoms; ++i) {
      const auto blob = gaussian_blob(kCenters[i] * 3.0,
                                      Mat2::diag(0.25, 0.25), 400, seed + i);
      pts.insert(pts.end(), blob.begin(), blob.end());
    }
    return cloud_from_symbols(partition, pts);
  };

  SUBCASE("full codebook: 16 pairs plus identity") {
    const SampleCloud s = cloud_with_atoms(4, 100);
    const SampleCloud t = cloud_with_atoms(4, 200);
    const Codebook cb = build_codebook(s, t, 1e-6);
    CHECK(cb.size() == 17);
    CHECK(cb.identity_included);
    CHECK(cb.skipped.empty());
    CHECK(cb.maps.back().A == Mat2::identity());
    CHECK(cb.maps.back().source_atom == -1);
    for (const LinearMap& m : cb.maps) {
      CHECK(m.A.min_eigenvalue_sym() > -1e-8);
      CHECK(m.A.a01 == m.A.a10);
    }
  }

  SUBCASE("an empty source atom drops its pairs and leaves one record") {
    const SampleCloud s = cloud_with_atoms(3, 300);
    const SampleCloud t = cloud_with_atoms(4, 400);
    CHECK(s.atom_count(3) == 0);
    const Codebook cb = build_codebook(s, t, 1e-6);
    CHECK(cb.size() == 13);
    REQUIRE(cb.skipped.size() == 1);
    CHECK(cb.skipped[0].side == SkippedAtom::Side::Source);
    CHECK(cb.skipped[0].atom == 3);
    CHECK(cb.skipped[0].samples == 0);
  }

  SUBCASE("matched clouds give near-identity diagonal maps") {
    // Two independent draws of the same per-atom population, 2500 samples
    // per atom: moment noise keeps the diagonal fits within 0.1 of identity.
    std::vector<Vec2> pts_a, pts_b;
    for (int i = 0; i < 4; ++i) {
      const auto blob_a = gaussian_blob(kCenters[i] * 2.0,
                                        {0.5, 0.2, 0.0, 0.4}, 2500,
                                        900 + static_cast<std::uint64_t>(i));
      const auto blob_b = gaussian_blob(kCenters[i] * 2.0,
                                        {0.5, 0.2, 0.0, 0.4}, 2500,
                                        950 + static_cast<std::uint64_t>(i));
      pts_a.insert(pts_a.end(), blob_a.begin(), blob_a.end());
      pts_b.insert(pts_b.end(), blob_b.begin(), blob_b.end());
    }
    const SampleCloud a = cloud_from_symbols(partition, pts_a);
    const SampleCloud b = cloud_from_symbols(partition, pts_b);
    const Codebook cb = build_codebook(a, b, 1e-6);
    int checked = 0;
    for (const LinearMap& m : cb.maps) {
      if (m.source_atom >= 0 && m.source_atom == m.target_atom) {
        CHECK(identity_distance(m.A) <= 0.1);
        ++checked;
      }
    }
    CHECK(checked == 4);
  }

  SUBCASE("no fittable pair") {
    SampleCloud s;
    s.atoms[0] = {{1.0, 0.0}};
    s.total = 1;
    const SampleCloud t = cloud_with_atoms(4, 500);
    CHECK_THROWS_AS(build_codebook(s, t, 1e-6), Error);
  }
}

TEST_CASE("codebook serialization") {
  const Language lang = cone_language();
  const Partition partition(lang);
  std::vector<Vec2> pts;
  for (int i = 0; i < 4; ++i) {
    static constexpr Vec2 kCenters[4] = {{6.0, 0.0}, {0.0, 6.0}, {-6.0, 0.0}, {0.0, -6.0}};
    const auto blob = gaussian_blob(kCenters[i], Mat2::diag(0.4, 0.2), 300,
                                    700 + static_cast<std::uint64_t>(i));
    pts.insert(pts.end(), blob.begin(), blob.end());
  }
  const SampleCloud cloud = cloud_from_symbols(partition, pts);
  const Codebook cb = build_codebook(cloud, cloud, 1e-6);
  TempDir dir("cb");
  const std::string path = dir.file("cb.json");
  save_codebook(cb, path);

  SUBCASE("round trip preserves every map bit-exactly") {
    const Codebook loaded = load_codebook(path);
    CHECK(loaded.size() == cb.size());
    for (int k = 0; k < cb.size(); ++k) {
      CHECK(loaded.maps[static_cast<std::size_t>(k)] ==
            cb.maps[static_cast<std::size_t>(k)]);
    }
    CHECK(loaded.source_lang_fp == cb.source_lang_fp);
    CHECK(loaded.target_lang_fp == cb.target_lang_fp);
    CHECK(codebook_fingerprint(loaded) == codebook_fingerprint(cb));
  }

  SUBCASE("truncated file fails") {
    const std::string full = read_file(path);
    write_file(path, full.substr(0, full.size() / 3));
    CHECK_THROWS_AS(load_codebook(path), Error);
  }

  SUBCASE("non-SPD map is rejected with a field path") {
    nlohmann::json doc = nlohmann::json::parse(read_file(path));
    doc["maps"][0]["A"] = {0.0, -1.0, 1.0, 0.0};  // rotation, not SPD
    write_json_artifact(doc, path);
    CHECK_THROWS_AS(load_codebook(path), SchemaError);
  }
}
