#pragma once

#include <cstdint>
#include <vector>

namespace tabletop {

/// Row-major boolean raster. Pixel (u, v) = column u, row v.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;  // 0 or 1 per pixel

    bool operator==(const BinaryMask&) const = default;

    static BinaryMask blank(int w, int h) {
        BinaryMask m;
        m.width = w;
        m.height = h;
        m.bits.assign(static_cast<size_t>(w) * static_cast<size_t>(h), 0);
        return m;
    }

    bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }

    bool at(int u, int v) const { return bits[static_cast<size_t>(v) * width + u] != 0; }

    void set(int u, int v, bool on = true) {
        bits[static_cast<size_t>(v) * width + u] = on ? 1 : 0;
    }

    size_t count() const {
        size_t n = 0;
        for (const uint8_t b : bits) n += b ? 1 : 0;
        return n;
    }
};

/// Dense depth raster in meters (axial distance from the camera).
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> meters;

    bool operator==(const DepthMap&) const = default;

    static DepthMap filled(int w, int h, double value) {
        DepthMap d;
        d.width = w;
        d.height = h;
        d.meters.assign(static_cast<size_t>(w) * static_cast<size_t>(h), value);
        return d;
    }

    bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }
    double at(int u, int v) const { return meters[static_cast<size_t>(v) * width + u]; }
    void set(int u, int v, double z) { meters[static_cast<size_t>(v) * width + u] = z; }
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // interleaved r, g, b

    bool operator==(const RgbImage&) const = default;

    static RgbImage filled(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
        RgbImage img;
        img.width = w;
        img.height = h;
        img.pixels.resize(static_cast<size_t>(w) * static_cast<size_t>(h) * 3);
        for (size_t i = 0; i < img.pixels.size(); i += 3) {
            img.pixels[i] = r;
            img.pixels[i + 1] = g;
            img.pixels[i + 2] = b;
        }
        return img;
    }

    void set(int u, int v, uint8_t r, uint8_t g, uint8_t b) {
        const size_t i = (static_cast<size_t>(v) * width + u) * 3;
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
};

}  // namespace tabletop
