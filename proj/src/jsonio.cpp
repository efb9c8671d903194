#include "semeq/jsonio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "semeq/errors.hpp"

namespace semeq {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
  return std::string(buf);
}

std::uint64_t parse_fingerprint_hex(const std::string& hex) {
  if (hex.size() != 16) {
    throw SchemaError("fingerprint: expected 16 hex digits, got '" + hex + "'");
  }
  std::uint64_t v = 0;
  const auto res = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
  if (res.ec != std::errc() || res.ptr != hex.data() + hex.size()) {
    throw SchemaError("fingerprint: malformed hex '" + hex + "'");
  }
  return v;
}

std::uint64_t json_fingerprint(nlohmann::json doc) {
  doc.erase("fingerprint");
  return fnv1a64(doc.dump());
}

void write_json_artifact(nlohmann::json doc, const std::string& path) {
  doc.erase("fingerprint");
  doc["fingerprint"] = fingerprint_hex(fnv1a64(doc.dump()));
  write_file(path, doc.dump(2) + "\n");
}

nlohmann::json read_json_artifact(const std::string& path,
                                  const std::string& expected_kind) {
  const std::string content = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": not valid JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) {
    throw SchemaError(path + ": top level must be an object");
  }
  const std::string kind = require_string(doc, "kind", path);
  if (kind != expected_kind) {
    throw SchemaError(path + ".kind: expected '" + expected_kind + "', got '" +
                      kind + "'");
  }
  const std::string stored = require_string(doc, "fingerprint", path);
  const std::uint64_t recomputed = json_fingerprint(doc);
  if (parse_fingerprint_hex(stored) != recomputed) {
    throw ProvenanceError(path + ": fingerprint mismatch (file corrupted or "
                                  "hand-edited)");
  }
  return doc;
}

const nlohmann::json& require_field(const nlohmann::json& obj,
                                    const std::string& key,
                                    const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(path + "." + key + ": missing field");
  }
  return *it;
}

double require_double(const nlohmann::json& obj, const std::string& key,
                      const std::string& path) {
  const auto& f = require_field(obj, key, path);
  if (!f.is_number()) {
    throw SchemaError(path + "." + key + ": expected a number");
  }
  return f.get<double>();
}

std::int64_t require_int(const nlohmann::json& obj, const std::string& key,
                         const std::string& path) {
  const auto& f = require_field(obj, key, path);
  if (!f.is_number_integer()) {
    throw SchemaError(path + "." + key + ": expected an integer");
  }
  return f.get<std::int64_t>();
}

std::string require_string(const nlohmann::json& obj, const std::string& key,
                           const std::string& path) {
  const auto& f = require_field(obj, key, path);
  if (!f.is_string()) {
    throw SchemaError(path + "." + key + ": expected a string");
  }
  return f.get<std::string>();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace semeq
