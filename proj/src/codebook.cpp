#include "semeq/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "semeq/errors.hpp"
#include "semeq/jsonio.hpp"
#include "semeq/semantics.hpp"

namespace semeq {

namespace {

constexpr int kSchemaVersion = 1;

struct Moments {
  Vec2 mean;
  Mat2 cov;
};

/// Population moments over a canonical (sorted) copy of the samples, so the
/// result does not depend on input order even at the last bit.
Moments empirical_moments(std::span<const Vec2> samples) {
  std::vector<Vec2> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  const double n = static_cast<double>(sorted.size());
  Vec2 mean;
  for (const Vec2& v : sorted) mean += v;
  mean = mean * (1.0 / n);
  Mat2 cov;
  for (const Vec2& v : sorted) {
    const Vec2 d = v - mean;
    cov.a00 += d.x * d.x;
    cov.a01 += d.x * d.y;
    cov.a11 += d.y * d.y;
  }
  cov.a00 /= n;
  cov.a01 /= n;
  cov.a10 = cov.a01;
  cov.a11 /= n;
  return {mean, cov};
}

}  // namespace

Mat2 matrix_sqrt_spd(const Mat2& m) {
  const double scale = std::max(1.0, std::abs(m.trace()));
  if (std::abs(m.a01 - m.a10) > 1e-9 * scale) {
    throw Error("matrix_sqrt_spd: input not symmetric");
  }
  const double lambda_min = m.min_eigenvalue_sym();
  if (lambda_min < -1e-12 * scale) {
    throw Error("matrix_sqrt_spd: negative eigenvalue " +
                std::to_string(lambda_min));
  }
  const double det = std::max(m.det(), 0.0);
  const double s = std::sqrt(det);
  const double denom = std::sqrt(m.trace() + 2.0 * s);
  if (!(denom > 0.0)) {
    throw Error("matrix_sqrt_spd: matrix is zero up to tolerance");
  }
  Mat2 r = (m + Mat2::diag(s, s)) * (1.0 / denom);
  r.a10 = r.a01;  // keep the result exactly symmetric
  return r;
}

LinearMap monge_map_from_moments(const Vec2& mean_s, const Mat2& cov_s,
                                 const Vec2& mean_t, const Mat2& cov_t,
                                 double reg) {
  if (!mean_s.finite() || !cov_s.finite() || !mean_t.finite() ||
      !cov_t.finite()) {
    throw Error("monge map: non-finite moments");
  }
  if (mean_s == mean_t && cov_s == cov_t) {
    // Transport between identical moment pairs is the identity; return it
    // bit-exactly instead of round-tripping through the square roots.
    LinearMap id;
    id.reg = reg;
    return id;
  }
  const Mat2 ss = cov_s + Mat2::diag(reg, reg);
  const Mat2 st = cov_t + Mat2::diag(reg, reg);
  const Mat2 ss_half = matrix_sqrt_spd(ss);
  if (!(ss_half.det() > 0.0)) {
    throw Error("monge map: singular source covariance; increase reg");
  }
  const Mat2 ss_half_inv = ss_half.inverse();
  const Mat2 middle = matrix_sqrt_spd(ss_half * st * ss_half);
  Mat2 a = ss_half_inv * middle * ss_half_inv;
  const double sym = 0.5 * (a.a01 + a.a10);
  a.a01 = sym;
  a.a10 = sym;
  LinearMap map;
  map.A = a;
  map.b = mean_t - a * mean_s;
  map.reg = reg;
  if (!map.A.finite() || !map.b.finite()) {
    throw Error("monge map: fit produced non-finite entries");
  }
  return map;
}

LinearMap fit_linear_ot(std::span<const Vec2> source_samples,
                        std::span<const Vec2> target_samples, double reg) {
  if (source_samples.size() < 2 || target_samples.size() < 2) {
    throw InsufficientSamplesError(
        "linear OT fit needs >= 2 samples per side, got " +
        std::to_string(source_samples.size()) + " source / " +
        std::to_string(target_samples.size()) + " target");
  }
  const Moments ms = empirical_moments(source_samples);
  const Moments mt = empirical_moments(target_samples);
  LinearMap map = monge_map_from_moments(ms.mean, ms.cov, mt.mean, mt.cov, reg);
  map.n_source = static_cast<int>(source_samples.size());
  map.n_target = static_cast<int>(target_samples.size());
  return map;
}

Vec2 apply(const LinearMap& map, const Vec2& symbol) {
  return map.A * symbol + map.b;
}

Codebook build_codebook(const SampleCloud& source_cloud,
                        const SampleCloud& target_cloud, double reg) {
  Codebook cb;
  cb.reg = reg;
  cb.source_lang_fp = source_cloud.language_fp;
  cb.target_lang_fp = target_cloud.language_fp;
  for (int i = 0; i < kNumActions; ++i) {
    if (source_cloud.atom_count(i) < 2) {
      cb.skipped.push_back(
          {SkippedAtom::Side::Source, i, source_cloud.atom_count(i)});
    }
    if (target_cloud.atom_count(i) < 2) {
      cb.skipped.push_back(
          {SkippedAtom::Side::Target, i, target_cloud.atom_count(i)});
    }
  }
  for (int i = 0; i < kNumActions; ++i) {
    const auto& src = source_cloud.atoms[static_cast<std::size_t>(i)];
    if (src.size() < 2) continue;
    for (int j = 0; j < kNumActions; ++j) {
      const auto& tgt = target_cloud.atoms[static_cast<std::size_t>(j)];
      if (tgt.size() < 2) continue;
      LinearMap map = fit_linear_ot(src, tgt, reg);
      map.source_atom = i;
      map.target_atom = j;
      cb.maps.push_back(std::move(map));
    }
  }
  if (cb.maps.empty()) {
    throw Error("codebook: no atom pair has enough samples to fit");
  }
  LinearMap identity;
  identity.reg = reg;
  cb.maps.push_back(identity);
  cb.identity_included = true;
  return cb;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json codebook_to_json(const Codebook& cb) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "codebook";
  doc["identity_included"] = cb.identity_included;
  doc["reg"] = cb.reg;
  nlohmann::json maps = nlohmann::json::array();
  for (std::size_t id = 0; id < cb.maps.size(); ++id) {
    const LinearMap& m = cb.maps[id];
    maps.push_back({{"id", id},
                    {"i", m.source_atom},
                    {"j", m.target_atom},
                    {"A", {m.A.a00, m.A.a01, m.A.a10, m.A.a11}},
                    {"b", {m.b.x, m.b.y}}});
  }
  doc["maps"] = std::move(maps);
  nlohmann::json fits = nlohmann::json::array();
  for (std::size_t id = 0; id < cb.maps.size(); ++id) {
    const LinearMap& m = cb.maps[id];
    fits.push_back({{"id", id},
                    {"n_source", m.n_source},
                    {"n_target", m.n_target},
                    {"reg", m.reg}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const SkippedAtom& s : cb.skipped) {
    skipped.push_back(
        {{"side", s.side == SkippedAtom::Side::Source ? "source" : "target"},
         {"atom", s.atom},
         {"samples", s.samples},
         {"reason", "insufficient_samples"}});
  }
  doc["diagnostics"] = {{"fits", std::move(fits)},
                        {"skipped", std::move(skipped)}};
  doc["provenance"] = {{"source_lang", fingerprint_hex(cb.source_lang_fp)},
                       {"target_lang", fingerprint_hex(cb.target_lang_fp)}};
  return doc;
}

}  // namespace

void save_codebook(const Codebook& cb, const std::string& path) {
  write_json_artifact(codebook_to_json(cb), path);
}

Codebook load_codebook(const std::string& path) {
  const nlohmann::json doc = read_json_artifact(path, "codebook");
  Codebook cb;
  cb.identity_included =
      require_field(doc, "identity_included", path).get<bool>();
  cb.reg = require_double(doc, "reg", path);
  const auto& maps = require_field(doc, "maps", path);
  if (!maps.is_array() || maps.empty()) {
    throw SchemaError(path + ".maps: expected a nonempty array");
  }
  for (std::size_t id = 0; id < maps.size(); ++id) {
    const auto& jm = maps[id];
    const std::string mp = path + ".maps[" + std::to_string(id) + "]";
    if (static_cast<std::size_t>(require_int(jm, "id", mp)) != id) {
      throw SchemaError(mp + ".id: ids must be consecutive from 0");
    }
    LinearMap m;
    m.source_atom = static_cast<int>(require_int(jm, "i", mp));
    m.target_atom = static_cast<int>(require_int(jm, "j", mp));
    const auto& a = require_field(jm, "A", mp);
    if (!a.is_array() || a.size() != 4) {
      throw SchemaError(mp + ".A: expected 4 entries");
    }
    m.A = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>(),
           a[3].get<double>()};
    const auto& b = require_field(jm, "b", mp);
    if (!b.is_array() || b.size() != 2) {
      throw SchemaError(mp + ".b: expected 2 entries");
    }
    m.b = {b[0].get<double>(), b[1].get<double>()};
    if (!m.A.finite() || !m.b.finite()) {
      throw SchemaError(mp + ": non-finite map entries");
    }
    const double scale = std::max(1.0, m.A.frobenius());
    if (std::abs(m.A.a01 - m.A.a10) > 1e-8 * scale ||
        m.A.min_eigenvalue_sym() < -1e-8 * scale) {
      throw SchemaError(mp + ".A: not SPD within tolerance");
    }
    cb.maps.push_back(m);
  }
  const auto& diag = require_field(doc, "diagnostics", path);
  const auto& fits = require_field(diag, "fits", path + ".diagnostics");
  if (fits.is_array() && fits.size() == cb.maps.size()) {
    for (std::size_t id = 0; id < fits.size(); ++id) {
      cb.maps[id].n_source = static_cast<int>(fits[id].value("n_source", 0));
      cb.maps[id].n_target = static_cast<int>(fits[id].value("n_target", 0));
      cb.maps[id].reg = fits[id].value("reg", 0.0);
    }
  }
  const auto& skipped = require_field(diag, "skipped", path + ".diagnostics");
  for (const auto& js : skipped) {
    cb.skipped.push_back({js.value("side", "source") == std::string("target")
                              ? SkippedAtom::Side::Target
                              : SkippedAtom::Side::Source,
                          static_cast<int>(js.value("atom", 0)),
                          static_cast<int>(js.value("samples", 0))});
  }
  const auto& prov = require_field(doc, "provenance", path);
  cb.source_lang_fp = parse_fingerprint_hex(
      require_string(prov, "source_lang", path + ".provenance"));
  cb.target_lang_fp = parse_fingerprint_hex(
      require_string(prov, "target_lang", path + ".provenance"));
  return cb;
}

std::uint64_t codebook_fingerprint(const Codebook& cb) {
  return json_fingerprint(codebook_to_json(cb));
}

}  // namespace semeq
