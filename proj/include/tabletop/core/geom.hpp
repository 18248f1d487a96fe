#pragma once

#include <array>
#include <cmath>

namespace tabletop {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm_xy() const { return std::sqrt(x * x + y * y); }
};

// Row-major 3x3 matrix; just enough linear algebra for the camera model.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    bool operator==(const Mat3&) const = default;

    static Mat3 identity() { return Mat3{}; }

    double at(int r, int c) const { return m[static_cast<size_t>(r * 3 + c)]; }
    double& at(int r, int c) { return m[static_cast<size_t>(r * 3 + c)]; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double acc = 0.0;
                for (int k = 0; k < 3; ++k) acc += at(i, k) * o.at(k, j);
                r.at(i, j) = acc;
            }
        }
        return r;
    }

    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.at(i, j) = at(j, i);
        return r;
    }

    double determinant() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    // Adjugate inverse; callers guarantee a non-singular matrix.
    Mat3 inverse() const {
        const double det = determinant();
        const double inv = 1.0 / det;
        Mat3 r;
        r.m = {(m[4] * m[8] - m[5] * m[7]) * inv, (m[2] * m[7] - m[1] * m[8]) * inv,
               (m[1] * m[5] - m[2] * m[4]) * inv, (m[5] * m[6] - m[3] * m[8]) * inv,
               (m[0] * m[8] - m[2] * m[6]) * inv, (m[2] * m[3] - m[0] * m[5]) * inv,
               (m[3] * m[7] - m[4] * m[6]) * inv, (m[1] * m[6] - m[0] * m[7]) * inv,
               (m[0] * m[4] - m[1] * m[3]) * inv};
        return r;
    }
};

// (X, Y, Z) position in meters plus a yaw about the vertical axis.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double yaw = 0.0;

    bool operator==(const Pose&) const = default;

    Vec3 position() const { return {x, y, z}; }
    double planar_distance(const Pose& o) const {
        const double dx = x - o.x;
        const double dy = y - o.y;
        return std::sqrt(dx * dx + dy * dy);
    }
};

/// Wraps an angle into [-pi, pi).
inline double normalize_yaw(double yaw) {
    double w = std::fmod(yaw + kPi, 2.0 * kPi);
    if (w < 0) w += 2.0 * kPi;
    return w - kPi;
}

}  // namespace tabletop
