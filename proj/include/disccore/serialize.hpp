#pragma once

#include <string>

#include "disccore/coreset.hpp"
#include "disccore/sketch.hpp"

namespace disccore {

inline constexpr int format_version = 1;

// NDJSON, canonical key order and shortest round-trip floats:
// serialize(deserialize(serialize(x))) is byte-identical to serialize(x).
// A format_version other than the current one is rejected.

std::string serialize_sketch(const compactor_stack& stack);
compactor_stack deserialize_sketch(const std::string& text);

std::string serialize_coreset(const weighted_coreset& coreset);
weighted_coreset deserialize_coreset(const std::string& text);

// Peeks at the header's "kind" field ("sketch" or "coreset").
std::string sketch_file_kind(const std::string& text);

}  // namespace disccore
