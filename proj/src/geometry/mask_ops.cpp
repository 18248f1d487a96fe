#include "tabletop/geometry/mask_ops.hpp"

#include <cmath>
#include <random>

namespace tabletop {

Result<PixelPoint> centroid(const BinaryMask& mask) {
    double sum_u = 0.0;
    double sum_v = 0.0;
    size_t n = 0;
    for (int v = 0; v < mask.height; ++v) {
        for (int u = 0; u < mask.width; ++u) {
            if (mask.at(u, v)) {
                sum_u += u;
                sum_v += v;
                ++n;
            }
        }
    }
    if (n == 0) {
        return make_error(Errc::empty_mask, "centroid of an empty mask");
    }
    return PixelPoint{sum_u / static_cast<double>(n), sum_v / static_cast<double>(n)};
}

std::optional<RayHit> ray_march_first_hit(const BinaryMask& mask, double cx, double cy,
                                          double theta, double step) {
    const double dir_u = std::cos(theta);
    const double dir_v = std::sin(theta);
    const double max_radius = std::hypot(mask.width, mask.height) + 1.0;
    for (double r = 0.0; r <= max_radius; r += step) {
        const double su = cx + r * dir_u;
        const double sv = cy + r * dir_v;
        const int pu = static_cast<int>(std::nearbyint(su));
        const int pv = static_cast<int>(std::nearbyint(sv));
        if (!mask.in_bounds(pu, pv)) {
            return std::nullopt;
        }
        if (mask.at(pu, pv)) {
            return RayHit{r, pu, pv};
        }
    }
    return std::nullopt;
}

namespace {

Result<GraspPoint2D> nearest_set_pixel(const BinaryMask& mask, const PixelPoint& center,
                                       const std::string& object_id) {
    double best = -1.0;
    int best_u = 0;
    int best_v = 0;
    for (int v = 0; v < mask.height; ++v) {
        for (int u = 0; u < mask.width; ++u) {
            if (!mask.at(u, v)) continue;
            const double d = std::hypot(u - center.u, v - center.v);
            if (best < 0.0 || d < best) {
                best = d;
                best_u = u;
                best_v = v;
            }
        }
    }
    if (best < 0.0) {
        return make_error(Errc::empty_mask, "no set pixel in mask");
    }
    return GraspPoint2D{static_cast<double>(best_u), static_cast<double>(best_v), object_id, true};
}

}  // namespace

Result<GraspPoint2D> grasp_point_2d(const BinaryMask& mask, GeometryClass geometry_class,
                                    uint64_t rng_seed, const std::string& object_id) {
    auto center = centroid(mask);
    if (!center.ok()) return center.error();
    const PixelPoint c = center.value();

    switch (geometry_class) {
        case GeometryClass::round:
        case GeometryClass::flat: {
            // Grasp at the centroid; a centroid off the mask fails verification.
            const int pu = static_cast<int>(std::nearbyint(c.u));
            const int pv = static_cast<int>(std::nearbyint(c.v));
            if (!mask.in_bounds(pu, pv) || !mask.at(pu, pv)) {
                return make_error(Errc::projector_error,
                                  "centroid grasp point is not on the mask");
            }
            return GraspPoint2D{c.u, c.v, object_id, true};
        }
        case GeometryClass::rimmed:
            return nearest_set_pixel(mask, c, object_id);
        case GeometryClass::irregular: {
            std::mt19937_64 rng(rng_seed);
            std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
            for (int tries = 0; tries < kMaxRayAngles; ++tries) {
                const double theta = angle(rng);
                if (const auto hit = ray_march_first_hit(mask, c.u, c.v, theta, kRayMarchStep)) {
                    return GraspPoint2D{static_cast<double>(hit->u),
                                        static_cast<double>(hit->v), object_id, true};
                }
            }
            return make_error(Errc::ray_miss,
                              "no radial hit on the mask after " +
                                  std::to_string(kMaxRayAngles) + " angles");
        }
    }
    return make_error(Errc::projector_error, "unknown geometry class");
}

}  // namespace tabletop
