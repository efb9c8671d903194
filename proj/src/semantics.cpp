#include "semeq/semantics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "semeq/errors.hpp"
#include "semeq/jsonio.hpp"

namespace semeq {

int Partition::atom_of(const Vec2& symbol) const {
  const auto p = decode_probs(language, symbol);
  int best = 0;
  for (int k = 1; k < kNumActions; ++k) {
    if (p[k] > p[best]) best = k;
  }
  return best;
}

namespace {

void push_symbol(SampleCloud& cloud, const Partition& partition, const Vec2& x) {
  cloud.atoms[static_cast<std::size_t>(partition.atom_of(x))].push_back(x);
  cloud.avg_power += x.norm2();
  ++cloud.total;
}

void finalize_power(SampleCloud& cloud) {
  if (cloud.total > 0) cloud.avg_power /= static_cast<double>(cloud.total);
}

}  // namespace

SampleCloud build_cloud(const Language& lang, const ObservationSampler& sampler,
                        int samples, Rng& rng) {
  if (samples < 1) throw Error("cloud needs at least one sample");
  if (!(sampler.grid == lang.grid)) {
    throw ProvenanceError("cloud sampler grid differs from language grid");
  }
  const Partition partition(lang);
  SampleCloud cloud;
  cloud.language_fp = language_fingerprint(lang);
  for (int s = 0; s < samples; ++s) {
    push_symbol(cloud, partition, encode(lang, sampler.sample(rng)));
  }
  finalize_power(cloud);
  return cloud;
}

SampleCloud build_cloud_exhaustive(const Language& lang,
                                   const ObservationSampler& sampler,
                                   int repeats) {
  if (repeats < 1) throw Error("cloud needs at least one repeat");
  if (!(sampler.grid == lang.grid)) {
    throw ProvenanceError("cloud sampler grid differs from language grid");
  }
  const Partition partition(lang);
  SampleCloud cloud;
  cloud.exhaustive = true;
  cloud.language_fp = language_fingerprint(lang);
  for (int r = 0; r < repeats; ++r) {
    for (int i = 0; i < sampler.count(); ++i) {
      push_symbol(cloud, partition, encode(lang, sampler.at(i)));
    }
  }
  finalize_power(cloud);
  return cloud;
}

SampleCloud cloud_from_symbols(const Partition& partition,
                               std::span<const Vec2> symbols) {
  SampleCloud cloud;
  cloud.language_fp = language_fingerprint(partition.language);
  for (const Vec2& x : symbols) push_symbol(cloud, partition, x);
  finalize_power(cloud);
  return cloud;
}

double info_transfer(const LinearMap& map, const SampleCloud& source_cloud,
                     int source_atom, const Partition& target_partition,
                     int target_atom) {
  const auto& samples = source_cloud.atoms[static_cast<std::size_t>(source_atom)];
  if (samples.empty()) {
    throw EmptyAtomError("info_transfer: source atom " +
                         std::to_string(source_atom) + " has no samples");
  }
  std::int64_t hits = 0;
  for (const Vec2& x : samples) {
    if (target_partition.atom_of(apply(map, x)) == target_atom) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

TransferTensor transfer_tensor(const Codebook& codebook,
                               const SampleCloud& source_cloud,
                               const Partition& target_partition) {
  if (codebook.maps.empty()) throw Error("transfer tensor: empty codebook");
  TransferTensor t;
  t.n_maps = codebook.size();
  t.sample_count = source_cloud.total;
  t.source_lang_fp = source_cloud.language_fp;
  t.target_lang_fp = language_fingerprint(target_partition.language);
  t.codebook_fp = codebook_fingerprint(codebook);
  t.zeta.assign(static_cast<std::size_t>(kNumActions) * kNumActions *
                    static_cast<std::size_t>(t.n_maps),
                0.0);
  t.counts.assign(t.zeta.size(), 0);

  bool any_valid = false;
  for (int i = 0; i < kNumActions; ++i) {
    const auto& samples = source_cloud.atoms[static_cast<std::size_t>(i)];
    t.row_totals[static_cast<std::size_t>(i)] =
        static_cast<std::int64_t>(samples.size());
    t.source_valid[static_cast<std::size_t>(i)] = !samples.empty();
    if (samples.empty()) continue;
    any_valid = true;
    for (int k = 0; k < t.n_maps; ++k) {
      const LinearMap& map = codebook.maps[static_cast<std::size_t>(k)];
      std::array<std::int64_t, kNumActions> hits{};
      for (const Vec2& x : samples) {
        ++hits[static_cast<std::size_t>(target_partition.atom_of(apply(map, x)))];
      }
      for (int j = 0; j < kNumActions; ++j) {
        const std::size_t f = t.flat(i, j, k);
        t.counts[f] = hits[static_cast<std::size_t>(j)];
        t.zeta[f] = static_cast<double>(hits[static_cast<std::size_t>(j)]) /
                    static_cast<double>(samples.size());
      }
    }
  }
  if (!any_valid) {
    throw EmptyAtomError("transfer tensor: every source atom is empty");
  }
  return t;
}

double TransferTensor::row_sum(int i, int k) const {
  std::int64_t total = 0;
  for (int j = 0; j < kNumActions; ++j) total += count_at(i, j, k);
  return static_cast<double>(total) /
         static_cast<double>(row_totals[static_cast<std::size_t>(i)]);
}

std::array<double, kNumActions> atom_membership_prob(const Language& lang,
                                                     const Observation& obs) {
  const Partition partition(lang);
  std::array<double, kNumActions> out{};
  out[static_cast<std::size_t>(partition.atom_of(encode(lang, obs)))] = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Tensor CSV

void save_tensor_csv(const TransferTensor& tensor, const std::string& path) {
  std::ostringstream out;
  out << "# semeq transfer tensor v1\n";
  out << "# source_lang " << fingerprint_hex(tensor.source_lang_fp) << "\n";
  out << "# target_lang " << fingerprint_hex(tensor.target_lang_fp) << "\n";
  out << "# codebook " << fingerprint_hex(tensor.codebook_fp) << "\n";
  out << "# samples " << tensor.sample_count << "\n";
  out << "# maps " << tensor.n_maps << "\n";
  out << "# invalid_source_atoms";
  for (int i = 0; i < kNumActions; ++i) {
    if (!tensor.source_valid[static_cast<std::size_t>(i)]) out << " " << i;
  }
  out << "\n";
  out << "source_atom,target_atom,map_id,zeta,samples\n";
  for (int i = 0; i < kNumActions; ++i) {
    if (!tensor.source_valid[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < kNumActions; ++j) {
      for (int k = 0; k < tensor.n_maps; ++k) {
        out << i << "," << j << "," << k << ","
            << format_double(tensor.zeta_at(i, j, k)) << ","
            << tensor.count_at(i, j, k) << "\n";
      }
    }
  }
  write_file(path, out.str());
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

TransferTensor load_tensor_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  TransferTensor t;
  std::array<bool, kNumActions> seen_invalid{};
  std::string line;
  bool header_seen = false;
  int n_maps = 0;
  std::int64_t samples_declared = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string key;
      meta >> key;
      if (key == "source_lang") {
        std::string v;
        meta >> v;
        t.source_lang_fp = parse_fingerprint_hex(v);
      } else if (key == "target_lang") {
        std::string v;
        meta >> v;
        t.target_lang_fp = parse_fingerprint_hex(v);
      } else if (key == "codebook") {
        std::string v;
        meta >> v;
        t.codebook_fp = parse_fingerprint_hex(v);
      } else if (key == "samples") {
        meta >> samples_declared;
      } else if (key == "maps") {
        meta >> n_maps;
      } else if (key == "invalid_source_atoms") {
        int i;
        while (meta >> i) {
          if (i < 0 || i >= kNumActions) {
            throw SchemaError(path + ": invalid atom index in header");
          }
          seen_invalid[static_cast<std::size_t>(i)] = true;
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != "source_atom,target_atom,map_id,zeta,samples") {
        throw SchemaError(path + ": unexpected column header '" + line + "'");
      }
      if (n_maps <= 0) {
        throw SchemaError(path + ": missing '# maps' metadata line");
      }
      t.n_maps = n_maps;
      t.sample_count = static_cast<int>(samples_declared);
      t.zeta.assign(static_cast<std::size_t>(kNumActions) * kNumActions *
                        static_cast<std::size_t>(n_maps),
                    0.0);
      t.counts.assign(t.zeta.size(), 0);
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 5) {
      throw SchemaError(path + ": expected 5 columns, got '" + line + "'");
    }
    const int i = std::stoi(fields[0]);
    const int j = std::stoi(fields[1]);
    const int k = std::stoi(fields[2]);
    if (i < 0 || i >= kNumActions || j < 0 || j >= kNumActions || k < 0 ||
        k >= t.n_maps) {
      throw SchemaError(path + ": index out of range in '" + line + "'");
    }
    const double zeta = std::stod(fields[3]);
    const std::int64_t count = std::stoll(fields[4]);
    const std::size_t f = t.flat(i, j, k);
    t.zeta[f] = zeta;
    t.counts[f] = count;
    t.source_valid[static_cast<std::size_t>(i)] = true;
  }
  if (!header_seen) {
    throw SchemaError(path + ": no tensor rows found");
  }
  for (int i = 0; i < kNumActions; ++i) {
    if (seen_invalid[static_cast<std::size_t>(i)] &&
        t.source_valid[static_cast<std::size_t>(i)]) {
      throw SchemaError(path + ": atom " + std::to_string(i) +
                        " both invalid and present in rows");
    }
    if (t.source_valid[static_cast<std::size_t>(i)]) {
      std::int64_t row = 0;
      for (int j = 0; j < kNumActions; ++j) row += t.count_at(i, j, 0);
      t.row_totals[static_cast<std::size_t>(i)] = row;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Cloud JSON

void save_cloud(const SampleCloud& cloud, const std::string& path) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "cloud";
  doc["language"] = fingerprint_hex(cloud.language_fp);
  doc["samples"] = cloud.total;
  doc["avg_power"] = cloud.avg_power;
  doc["mode"] = cloud.exhaustive ? "exhaustive" : "monte_carlo";
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& atom : cloud.atoms) {
    nlohmann::json list = nlohmann::json::array();
    for (const Vec2& v : atom) list.push_back({v.x, v.y});
    atoms.push_back(std::move(list));
  }
  doc["atoms"] = std::move(atoms);
  write_json_artifact(doc, path);
}

SampleCloud load_cloud(const std::string& path) {
  const nlohmann::json doc = read_json_artifact(path, "cloud");
  SampleCloud cloud;
  cloud.language_fp =
      parse_fingerprint_hex(require_string(doc, "language", path));
  cloud.total = static_cast<int>(require_int(doc, "samples", path));
  cloud.avg_power = require_double(doc, "avg_power", path);
  cloud.exhaustive = require_string(doc, "mode", path) == "exhaustive";
  const auto& atoms = require_field(doc, "atoms", path);
  if (!atoms.is_array() || atoms.size() != kNumActions) {
    throw SchemaError(path + ".atoms: expected " + std::to_string(kNumActions) +
                      " atom lists");
  }
  int total = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (const auto& row : atoms[i]) {
      if (!row.is_array() || row.size() != 2) {
        throw SchemaError(path + ".atoms[" + std::to_string(i) +
                          "]: expected 2-vectors");
      }
      cloud.atoms[i].push_back({row[0].get<double>(), row[1].get<double>()});
      ++total;
    }
  }
  if (total != cloud.total) {
    throw SchemaError(path + ".samples: declared " +
                      std::to_string(cloud.total) + " but file holds " +
                      std::to_string(total));
  }
  return cloud;
}

}  // namespace semeq
