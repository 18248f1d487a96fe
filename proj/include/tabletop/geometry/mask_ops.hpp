#pragma once

#include <cstdint>
#include <optional>

#include "tabletop/core/types.hpp"
#include "tabletop/geometry/raster.hpp"

namespace tabletop {

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;

    bool operator==(const PixelPoint&) const = default;
};

/// Mean position of all set pixels, subpixel.
Result<PixelPoint> centroid(const BinaryMask& mask);

struct RayHit {
    double radius = 0.0;  // marched distance from the start point
    int u = 0;            // hit pixel
    int v = 0;
};

/// Marches r = 0, dr, 2·dr, ... along direction theta from (cx, cy) until the
/// nearest pixel under the sample is set. Nearest-pixel lookup rounds half to
/// even. Returns nullopt once the ray leaves the image without a hit.
std::optional<RayHit> ray_march_first_hit(const BinaryMask& mask, double cx, double cy,
                                          double theta, double step = 0.5);

inline constexpr double kRayMarchStep = 0.5;  // sub-pixel so a 1 px rim cannot be skipped
inline constexpr int kMaxRayAngles = 16;      // fresh angles before declaring a ray miss

/// Selects a grasp pixel for the object according to its geometry class:
/// radial march with a seeded uniform angle for irregular shapes, the
/// centroid for round and flat ones, and the set pixel closest to the
/// centroid for rimmed ones. The returned point's pixel is always verified
/// to lie on the mask.
Result<GraspPoint2D> grasp_point_2d(const BinaryMask& mask, GeometryClass geometry_class,
                                    uint64_t rng_seed, const std::string& object_id = "");

}  // namespace tabletop
