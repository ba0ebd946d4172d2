#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "helt/league/league.hpp"

namespace helt::harness {

inline constexpr int kCheckpointVersion = 1;

// Parameters as IEEE-754 doubles in little-endian byte order, whatever the
// host order.
std::string encode_params(std::span<const double> values);
// Throws CorruptionError if the size is not a multiple of 8.
std::vector<double> decode_params(std::string_view bytes);

// Writes <stem>.bin and <stem>.json into `dir` (stem defaults to
// snap_<id>) and returns the manifest path. The snapshot must carry params.
std::string save_snapshot(const league::PolicySnapshot& snap, const std::string& dir, const std::string& stem = "");

// Reads a manifest and its blob. Size or hash mismatches and malformed
// manifests throw CorruptionError.
league::PolicySnapshot load_snapshot(const std::string& manifest_path);

}  // namespace helt::harness
