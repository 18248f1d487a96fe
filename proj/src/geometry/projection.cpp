#include "tabletop/geometry/projection.hpp"

#include <cmath>

namespace tabletop {

Result<ProjectedPixel> project_to_pixel(const CameraModel& cam, const Vec3& world) {
    const Vec3 p_cam = cam.rotation * world + cam.translation;
    if (!(p_cam.z > 0.0)) {
        return make_error(Errc::behind_camera, "point is behind the camera plane");
    }
    const double u = (cam.fu * p_cam.x + cam.alpha * p_cam.y) / p_cam.z + cam.u0;
    const double v = cam.fv * p_cam.y / p_cam.z + cam.v0;
    return ProjectedPixel{u, v, p_cam.z};
}

Result<double> stereo_depth(double baseline_m, double focal_px, double disparity_px) {
    if (!(disparity_px > 0.0)) {
        return make_error(Errc::invalid_disparity,
                          "disparity must be positive (zero maps to infinity)");
    }
    return baseline_m * focal_px / disparity_px;
}

Result<Vec3> backproject(const CameraModel& cam, double u, double v, double z_axial) {
    if (!(z_axial > 0.0)) {
        return make_error(Errc::behind_camera, "axial depth must be positive");
    }
    const Mat3 k_inv = cam.intrinsic_matrix().inverse();
    const Vec3 ray = k_inv * Vec3{u, v, 1.0};
    const Vec3 p_cam = ray * z_axial;
    return cam.rotation.inverse() * (p_cam - cam.translation);
}

Result<GraspPoint3D> grasp_point_3d(const GraspPoint2D& gp, const DepthMap& depth,
                                    const CameraModel& cam) {
    const int pu = static_cast<int>(std::nearbyint(gp.u));
    const int pv = static_cast<int>(std::nearbyint(gp.v));
    if (!depth.in_bounds(pu, pv)) {
        return make_error(Errc::depth_hole, "grasp point outside the depth raster");
    }
    const double z = depth.at(pu, pv);
    if (!std::isfinite(z) || !(z > 0.0)) {
        return make_error(Errc::depth_hole, "invalid depth under the grasp point");
    }
    auto world = backproject(cam, gp.u, gp.v, z);
    if (!world.ok()) return world.error();
    return GraspPoint3D{world.value().x, world.value().y, world.value().z, gp.object_id, 0.0};
}

}  // namespace tabletop
