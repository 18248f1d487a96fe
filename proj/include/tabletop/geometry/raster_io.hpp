#pragma once

#include <string>

#include "tabletop/core/result.hpp"
#include "tabletop/geometry/raster.hpp"

namespace tabletop {

// Masks and depth rasters travel as portable graymaps (P5) with a JSON
// sidecar carrying units and quantization; rgb frames as P6 pixmaps.
// Serialize -> parse -> serialize must reproduce the file bytes exactly.

std::string mask_to_pgm(const BinaryMask& mask);
Result<BinaryMask> mask_from_pgm(const std::string& bytes);

struct DepthEncoding {
    double offset_m = 0.0;   // depth at raw value 0
    double quantum_m = 0.0;  // meters per raw count (0 for a constant raster)

    bool operator==(const DepthEncoding&) const = default;
};

/// Quantizes to 16-bit counts. The chosen encoding is needed to decode.
std::string depth_to_pgm16(const DepthMap& depth, DepthEncoding& encoding_out);
Result<DepthMap> depth_from_pgm16(const std::string& bytes, const DepthEncoding& encoding);

std::string rgb_to_ppm(const RgbImage& img);
Result<RgbImage> rgb_from_ppm(const std::string& bytes);

Status save_mask(const BinaryMask& mask, const std::string& path);
Result<BinaryMask> load_mask(const std::string& path);

/// Writes <path> plus a <path>.json sidecar with dimensions, units and the
/// quantization constants.
Status save_depth(const DepthMap& depth, const std::string& path);
Result<DepthMap> load_depth(const std::string& path);

Status save_rgb(const RgbImage& img, const std::string& path);
Result<RgbImage> load_rgb(const std::string& path);

Status write_file(const std::string& path, const std::string& bytes);
Result<std::string> read_file(const std::string& path);

}  // namespace tabletop
