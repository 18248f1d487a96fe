#pragma once

#include "tabletop/core/types.hpp"
#include "tabletop/geometry/raster.hpp"

namespace tabletop {

struct ProjectedPixel {
    double u = 0.0;
    double v = 0.0;
    double z_axial = 0.0;  // third camera-frame coordinate, meters

    bool operator==(const ProjectedPixel&) const = default;
};

/// Pinhole projection: dehomogenized K (R·world + t). Points with
/// non-positive axial distance are behind the camera.
Result<ProjectedPixel> project_to_pixel(const CameraModel& cam, const Vec3& world);

/// Axial depth from a stereo pair: z = B·f / d. Zero disparity means a point
/// at infinity and is rejected.
Result<double> stereo_depth(double baseline_m, double focal_px, double disparity_px);

/// Inverse mapping: world = R⁻¹ (z·K⁻¹·[u, v, 1]ᵀ − t).
Result<Vec3> backproject(const CameraModel& cam, double u, double v, double z_axial);

/// Lifts a 2D grasp point through the depth map. The depth is read at the
/// nearest pixel; non-positive or non-finite depth is a hole.
Result<GraspPoint3D> grasp_point_3d(const GraspPoint2D& gp, const DepthMap& depth,
                                    const CameraModel& cam);

}  // namespace tabletop
