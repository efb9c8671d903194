#pragma once

#include <stdexcept>
#include <string>

namespace semeq {

/// Base class for all semeq errors; everything user-facing derives from this
/// so the CLI can catch one type and print a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An information-transfer query hit a source atom with no samples.
/// Distinguished so callers can tell "empty atom" from a zero transfer value.
class EmptyAtomError : public Error {
 public:
  explicit EmptyAtomError(const std::string& msg) : Error(msg) {}
};

/// An optimal-transport fit was requested with fewer than two samples.
class InsufficientSamplesError : public Error {
 public:
  explicit InsufficientSamplesError(const std::string& msg) : Error(msg) {}
};

/// Artifact files do not form a consistent chain (wrong input hashes,
/// mismatched grids, corrupted content).
class ProvenanceError : public Error {
 public:
  explicit ProvenanceError(const std::string& msg) : Error(msg) {}
};

/// A serialized artifact violates its schema. The message carries the
/// offending field path.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& msg) : Error(msg) {}
};

/// Training produced non-finite parameters.
class TrainingDivergedError : public Error {
 public:
  explicit TrainingDivergedError(const std::string& msg) : Error(msg) {}
};

}  // namespace semeq
