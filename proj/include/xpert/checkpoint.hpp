#pragma once

#include <string>

#include "xpert/model.hpp"

namespace xpert {

/// Binary little-endian checkpoint:
///   "XPRT" | u32 version | u64 n + n bytes of config JSON |
///   per tensor, in layout order: u32 name length, name, u32 rank,
///   rank x u64 dims, f64 data.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const ModelParameters& params, const std::string& path);

/// Throws std::runtime_error on a bad magic, version, truncated file or a
/// tensor table that disagrees with the stored config.
ModelParameters load_checkpoint(const std::string& path);

}  // namespace xpert
