#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace semeq {

/// FNV-1a 64-bit over a byte string. Used as the artifact fingerprint.
std::uint64_t fnv1a64(const std::string& bytes);

std::string fingerprint_hex(std::uint64_t fp);
std::uint64_t parse_fingerprint_hex(const std::string& hex);

/// Fingerprint of a JSON document: FNV-1a over the canonical dump of the
/// object with any "fingerprint" member removed. nlohmann keeps object keys
/// sorted, so the dump is canonical.
std::uint64_t json_fingerprint(nlohmann::json doc);

/// Serializes with an embedded "fingerprint" member and writes atomically
/// enough for our purposes (single write). Throws on I/O failure.
void write_json_artifact(nlohmann::json doc, const std::string& path);

/// Parses, verifies the embedded fingerprint against the recomputed one and
/// checks "kind". Throws SchemaError / ProvenanceError with detail.
nlohmann::json read_json_artifact(const std::string& path,
                                  const std::string& expected_kind);

/// Typed field access with field-path error messages.
const nlohmann::json& require_field(const nlohmann::json& obj,
                                    const std::string& key,
                                    const std::string& path);
double require_double(const nlohmann::json& obj, const std::string& key,
                      const std::string& path);
std::int64_t require_int(const nlohmann::json& obj, const std::string& key,
                         const std::string& path);
std::string require_string(const nlohmann::json& obj, const std::string& key,
                           const std::string& path);

/// Shortest round-trip decimal form of a double ("inf"/"-inf"/"nan" for
/// non-finite). Used for all CSV output so reruns are byte-identical.
std::string format_double(double v);

/// Writes a whole file; throws on failure.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace semeq
