#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "tabletop/core/encoding.hpp"
#include "tabletop/geometry/mask_ops.hpp"
#include "tabletop/geometry/projection.hpp"
#include "tabletop/geometry/raster_io.hpp"

using namespace tabletop;

namespace {

BinaryMask solid_square(int side) {
    BinaryMask m = BinaryMask::blank(side, side);
    for (int v = 0; v < side; ++v)
        for (int u = 0; u < side; ++u) m.set(u, v);
    return m;
}

// Pixel set iff its integer distance from the center lies in [r_in, r_out].
BinaryMask annulus(int size, double cx, double cy, double r_in, double r_out) {
    BinaryMask m = BinaryMask::blank(size, size);
    for (int v = 0; v < size; ++v) {
        for (int u = 0; u < size; ++u) {
            const double d = std::hypot(u - cx, v - cy);
            if (d >= r_in && d <= r_out) m.set(u, v);
        }
    }
    return m;
}

CameraModel plain_camera() {
    auto cam = make_camera(500, 500, 0, 320, 240, Mat3::identity(), Vec3{0, 0, 0}, 0.1);
    REQUIRE(cam.ok());
    return cam.value();
}

// Independent projection oracle: raw 3x4 multiply with plain arrays.
void oracle_project(const double k[9], const double r[9], const double t[3], const double w[3],
                    double out[3]) {
    double cam_pt[3];
    for (int i = 0; i < 3; ++i) {
        cam_pt[i] = r[i * 3] * w[0] + r[i * 3 + 1] * w[1] + r[i * 3 + 2] * w[2] + t[i];
    }
    double hom[3];
    for (int i = 0; i < 3; ++i) {
        hom[i] = k[i * 3] * cam_pt[0] + k[i * 3 + 1] * cam_pt[1] + k[i * 3 + 2] * cam_pt[2];
    }
    out[0] = hom[0] / hom[2];
    out[1] = hom[1] / hom[2];
    out[2] = cam_pt[2];
}

Mat3 rotation_from_quaternion(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n;
    x /= n;
    y /= n;
    z /= n;
    Mat3 r;
    r.m = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
           2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
           2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
    return r;
}

}  // namespace

TEST_CASE("centroid of a full square is its center") {
    const auto c = centroid(solid_square(10));
    REQUIRE(c.ok());
    CHECK(c.value().u == doctest::Approx(4.5));
    CHECK(c.value().v == doctest::Approx(4.5));
}

TEST_CASE("centroid of a single pixel") {
    BinaryMask m = BinaryMask::blank(16, 16);
    m.set(3, 7);
    const auto c = centroid(m);
    REQUIRE(c.ok());
    CHECK(c.value().u == doctest::Approx(3.0));
    CHECK(c.value().v == doctest::Approx(7.0));
}

TEST_CASE("centroid of an L-shaped triple") {
    BinaryMask m = BinaryMask::blank(4, 4);
    m.set(0, 0);
    m.set(1, 0);
    m.set(0, 1);
    const auto c = centroid(m);
    REQUIRE(c.ok());
    CHECK(c.value().u == doctest::Approx(1.0 / 3.0));
    CHECK(c.value().v == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("centroid of an empty mask errors") {
    const auto c = centroid(BinaryMask::blank(5, 5));
    REQUIRE(!c.ok());
    CHECK(c.error().code == Errc::empty_mask);
}

TEST_CASE("solid square: radial minimum is zero at the centroid") {
    const auto gp = grasp_point_2d(solid_square(10), GeometryClass::irregular, 7);
    REQUIRE(gp.ok());
    // Centroid (4.5, 4.5); r = 0 sample lands on its nearest pixel.
    CHECK(gp.value().u == doctest::Approx(4.0));
    CHECK(gp.value().v == doctest::Approx(4.0));
    CHECK(gp.value().on_mask);
}

TEST_CASE("annulus ray at theta=0 hits the inner rim at r=5") {
    const BinaryMask m = annulus(33, 16.0, 16.0, 5.0, 8.0);
    const auto c = centroid(m);
    REQUIRE(c.ok());
    CHECK(c.value().u == doctest::Approx(16.0));
    CHECK(c.value().v == doctest::Approx(16.0));
    const auto hit = ray_march_first_hit(m, c.value().u, c.value().v, 0.0);
    REQUIRE(hit.has_value());
    CHECK(hit->radius == doctest::Approx(5.0));
    CHECK(hit->u == 21);
    CHECK(hit->v == 16);
}

TEST_CASE("rimmed grasp returns the set pixel nearest the centroid") {
    const BinaryMask m = annulus(33, 16.0, 16.0, 5.0, 8.0);
    const auto gp = grasp_point_2d(m, GeometryClass::rimmed, 0);
    REQUIRE(gp.ok());
    const double d = std::hypot(gp.value().u - 16.0, gp.value().v - 16.0);
    CHECK(d == doctest::Approx(5.0));
    CHECK(m.at(static_cast<int>(gp.value().u), static_cast<int>(gp.value().v)));
}

TEST_CASE("empty mask grasp errors") {
    const auto gp = grasp_point_2d(BinaryMask::blank(8, 8), GeometryClass::irregular, 1);
    REQUIRE(!gp.ok());
    CHECK(gp.error().code == Errc::empty_mask);
}

TEST_CASE("round grasp off the mask fails verification") {
    // Annulus centroid is in the hole.
    const BinaryMask m = annulus(33, 16.0, 16.0, 5.0, 8.0);
    const auto gp = grasp_point_2d(m, GeometryClass::round, 0);
    REQUIRE(!gp.ok());
    CHECK(gp.error().code == Errc::projector_error);
}

TEST_CASE("grasp points land on set pixels across random blobs") {
    std::mt19937_64 rng(20240811);
    int produced = 0;
    for (int iter = 0; iter < 300; ++iter) {
        BinaryMask m = BinaryMask::blank(48, 48);
        std::uniform_int_distribution<int> coord(4, 43);
        std::uniform_int_distribution<int> radius(2, 9);
        const int blobs = 1 + static_cast<int>(rng() % 3);
        for (int b = 0; b < blobs; ++b) {
            const int cx = coord(rng);
            const int cy = coord(rng);
            const int r = radius(rng);
            const bool hole = (rng() % 2) == 0;
            for (int v = 0; v < 48; ++v) {
                for (int u = 0; u < 48; ++u) {
                    const double d = std::hypot(u - cx, v - cy);
                    if (d <= r && (!hole || d >= r * 0.5)) m.set(u, v);
                }
            }
        }
        if (m.count() == 0) continue;
        for (const GeometryClass cls : {GeometryClass::irregular, GeometryClass::rimmed}) {
            const auto gp = grasp_point_2d(m, cls, rng());
            if (!gp.ok()) continue;  // ray misses are allowed, wrong pixels are not
            ++produced;
            CHECK(m.at(static_cast<int>(std::nearbyint(gp.value().u)),
                       static_cast<int>(std::nearbyint(gp.value().v))));
        }
    }
    CHECK(produced > 400);
}

TEST_CASE("grasp extraction is deterministic in (mask, class, seed)") {
    const BinaryMask m = annulus(33, 16.0, 16.0, 4.0, 9.0);
    const auto a = grasp_point_2d(m, GeometryClass::irregular, 99);
    const auto b = grasp_point_2d(m, GeometryClass::irregular, 99);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.value() == b.value());
}

TEST_CASE("projection identity case on the optical axis") {
    const auto p = project_to_pixel(plain_camera(), Vec3{0, 0, 2});
    REQUIRE(p.ok());
    CHECK(p.value().u == doctest::Approx(320.0));
    CHECK(p.value().v == doctest::Approx(240.0));
    CHECK(p.value().z_axial == doctest::Approx(2.0));
}

TEST_CASE("projection matches the raw matrix oracle") {
    const double k[9] = {500, 0, 320, 0, 500, 240, 0, 0, 1};
    const double r[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    const double t[3] = {0, 0, 0};
    const double w[3] = {0.2, 0, 2};
    double expected[3];
    oracle_project(k, r, t, w, expected);
    CHECK(expected[0] == doctest::Approx(370.0));

    const auto p = project_to_pixel(plain_camera(), Vec3{0.2, 0, 2});
    REQUIRE(p.ok());
    CHECK(p.value().u == doctest::Approx(expected[0]));
    CHECK(p.value().v == doctest::Approx(expected[1]));
    CHECK(p.value().z_axial == doctest::Approx(expected[2]));
}

TEST_CASE("projection rejects points behind the camera") {
    const auto p = project_to_pixel(plain_camera(), Vec3{0, 0, -1});
    REQUIRE(!p.ok());
    CHECK(p.error().code == Errc::behind_camera);
}

TEST_CASE("stereo depth on rational fixtures") {
    auto z = stereo_depth(0.1, 500, 50);
    REQUIRE(z.ok());
    CHECK(z.value() == doctest::Approx(1.0));
    z = stereo_depth(0.064, 400, 32);
    REQUIRE(z.ok());
    CHECK(z.value() == doctest::Approx(0.8));
}

TEST_CASE("zero disparity is rejected") {
    const auto z = stereo_depth(0.1, 500, 0);
    REQUIRE(!z.ok());
    CHECK(z.error().code == Errc::invalid_disparity);
}

TEST_CASE("stereo depth is homogeneous in baseline and disparity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.01, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double b = pos(rng);
        const double f = pos(rng) * 100;
        const double d = pos(rng);
        const double s = pos(rng);
        const auto z1 = stereo_depth(b, f, d);
        const auto z2 = stereo_depth(b * s, f, d * s);
        REQUIRE(z1.ok());
        REQUIRE(z2.ok());
        CHECK(z1.value() == doctest::Approx(z2.value()).epsilon(1e-12));
    }
}

TEST_CASE("backprojection inverts the projection example") {
    const auto w = backproject(plain_camera(), 370, 240, 2.0);
    REQUIRE(w.ok());
    CHECK(w.value().x == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(w.value().y == doctest::Approx(0.0));
    CHECK(w.value().z == doctest::Approx(2.0));
}

TEST_CASE("principal point backprojects onto the optical axis") {
    for (const double z : {0.5, 1.0, 7.25}) {
        const auto w = backproject(plain_camera(), 320, 240, z);
        REQUIRE(w.ok());
        CHECK(std::abs(w.value().x) < 1e-12);
        CHECK(std::abs(w.value().y) < 1e-12);
        CHECK(w.value().z == doctest::Approx(z));
    }
}

TEST_CASE("project/backproject round trip over random cameras") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> focal(100.0, 1200.0);
    for (int i = 0; i < 1000; ++i) {
        const Mat3 rot = rotation_from_quaternion(unit(rng) + 1.5, unit(rng), unit(rng), unit(rng));
        auto cam = make_camera(focal(rng), focal(rng), unit(rng) * 5.0, 200 + unit(rng) * 100,
                               150 + unit(rng) * 80, rot, Vec3{unit(rng), unit(rng), unit(rng)},
                               0.05 + std::abs(unit(rng)));
        REQUIRE(cam.ok());
        const Vec3 world{unit(rng) * 2, unit(rng) * 2, unit(rng) * 2};
        const auto px = project_to_pixel(cam.value(), world);
        if (!px.ok()) continue;  // behind this camera; skip
        const auto back = backproject(cam.value(), px.value().u, px.value().v, px.value().z_axial);
        REQUIRE(back.ok());
        CHECK(std::abs(back.value().x - world.x) < 1e-9);
        CHECK(std::abs(back.value().y - world.y) < 1e-9);
        CHECK(std::abs(back.value().z - world.z) < 1e-9);
    }
}

TEST_CASE("grasp point lift through the depth map") {
    DepthMap depth = DepthMap::filled(640, 480, 2.0);
    const auto gp = grasp_point_3d(GraspPoint2D{320, 240, "obj", true}, depth, plain_camera());
    REQUIRE(gp.ok());
    CHECK(gp.value().x == doctest::Approx(0.0));
    CHECK(gp.value().y == doctest::Approx(0.0));
    CHECK(gp.value().z == doctest::Approx(2.0));

    depth.set(320, 240, 0.0);
    const auto hole = grasp_point_3d(GraspPoint2D{320, 240, "obj", true}, depth, plain_camera());
    REQUIRE(!hole.ok());
    CHECK(hole.error().code == Errc::depth_hole);
}

TEST_CASE("mask pgm files round trip bit-exact") {
    const BinaryMask m = annulus(24, 11.5, 11.5, 3.0, 8.0);
    const std::string bytes = mask_to_pgm(m);
    const auto parsed = mask_from_pgm(bytes);
    REQUIRE(parsed.ok());
    CHECK(parsed.value() == m);
    CHECK(mask_to_pgm(parsed.value()) == bytes);
}

TEST_CASE("depth pgm16 files round trip bit-exact") {
    DepthMap d = DepthMap::filled(16, 12, 1.0);
    for (int v = 0; v < 12; ++v)
        for (int u = 0; u < 16; ++u) d.set(u, v, 1.0 + 0.01 * (u + v));
    DepthEncoding enc;
    const std::string bytes = depth_to_pgm16(d, enc);
    const auto parsed = depth_from_pgm16(bytes, enc);
    REQUIRE(parsed.ok());
    DepthEncoding enc2;
    const std::string bytes2 = depth_to_pgm16(parsed.value(), enc2);
    CHECK(bytes2 == bytes);
    CHECK(enc2 == enc);
    // Quantization error is bounded by one quantum.
    for (size_t i = 0; i < d.meters.size(); ++i) {
        CHECK(std::abs(parsed.value().meters[i] - d.meters[i]) <= enc.quantum_m + 1e-12);
    }
}

TEST_CASE("depth save/load through sidecar files") {
    DepthMap d = DepthMap::filled(8, 8, 0.5);
    d.set(3, 3, 0.75);
    const std::string path = "/tmp/tabletop_depth_test.pgm";
    REQUIRE(save_depth(d, path).ok());
    const auto loaded = load_depth(path);
    REQUIRE(loaded.ok());
    for (size_t i = 0; i < d.meters.size(); ++i) {
        CHECK(std::abs(loaded.value().meters[i] - d.meters[i]) <= 1e-4);
    }
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("rgb ppm files round trip bit-exact") {
    RgbImage img = RgbImage::filled(7, 5, 10, 20, 30);
    img.set(2, 3, 200, 100, 50);
    const std::string bytes = rgb_to_ppm(img);
    const auto parsed = rgb_from_ppm(bytes);
    REQUIRE(parsed.ok());
    CHECK(parsed.value() == img);
    CHECK(rgb_to_ppm(parsed.value()) == bytes);
}
