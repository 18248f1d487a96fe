#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tabletop {

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

/// FNV-1a over a byte string; used for canonical request hashes and
/// deterministic id derivation. Stable across runs of the same build.
uint64_t fnv1a64(const std::string& bytes);

/// Hex token for an FNV digest (16 lowercase hex chars).
std::string hex64(uint64_t value);

/// splitmix64-style mixer for deriving independent RNG streams from a
/// master seed plus lane indices.
uint64_t mix_seed(uint64_t seed, uint64_t lane);

}  // namespace tabletop
