#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sogs/splat_cloud.hpp"

namespace sogs {

// Binary little-endian 3DGS PLY: one "vertex" element of float properties
//   x y z nx ny nz f_dc_0..2 [f_rest_0..44] opacity scale_0..2 rot_0..3
// f_rest_i uses the 3DGS channel-major order (coefficient k of color c is
// f_rest_{15c + k}).
//
// The reader also accepts comment/obj_info lines, missing normals and any
// property order. Errors are Error(kParseError) naming the byte offset.
SplatCloud read_ply(std::span<const std::uint8_t> bytes);

// Header then packed float32 records in the order above; normals are zero.
// Throws Error(kInvalidInput) for an invalid or empty cloud.
std::vector<std::uint8_t> write_ply(const SplatCloud& cloud);

SplatCloud read_ply_file(const std::filesystem::path& path);

}  // namespace sogs
