#include "tabletop/geometry/raster_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tabletop {

namespace {

struct PnmHeader {
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 0;
    size_t data_offset = 0;
};

Result<PnmHeader> parse_pnm_header(const std::string& bytes, const std::string& expected_magic) {
    std::istringstream in(bytes);
    PnmHeader h;
    in >> h.magic >> h.width >> h.height >> h.maxval;
    if (!in || h.magic != expected_magic) {
        return make_error(Errc::invalid_input, "not a " + expected_magic + " raster");
    }
    if (h.width <= 0 || h.height <= 0) {
        return make_error(Errc::invalid_input, "raster dimensions must be positive");
    }
    h.data_offset = static_cast<size_t>(in.tellg()) + 1;  // single whitespace after maxval
    return h;
}

std::string pnm_header(const std::string& magic, int width, int height, int maxval) {
    std::ostringstream out;
    out << magic << "\n" << width << " " << height << "\n" << maxval << "\n";
    return out.str();
}

}  // namespace

std::string mask_to_pgm(const BinaryMask& mask) {
    std::string out = pnm_header("P5", mask.width, mask.height, 255);
    out.reserve(out.size() + mask.bits.size());
    for (const uint8_t b : mask.bits) out += static_cast<char>(b ? 255 : 0);
    return out;
}

Result<BinaryMask> mask_from_pgm(const std::string& bytes) {
    auto header = parse_pnm_header(bytes, "P5");
    if (!header.ok()) return header.error();
    const PnmHeader& h = header.value();
    const size_t n = static_cast<size_t>(h.width) * static_cast<size_t>(h.height);
    if (bytes.size() < h.data_offset + n) {
        return make_error(Errc::invalid_input, "truncated mask raster");
    }
    BinaryMask mask = BinaryMask::blank(h.width, h.height);
    for (size_t i = 0; i < n; ++i) {
        mask.bits[i] = static_cast<unsigned char>(bytes[h.data_offset + i]) >= 128 ? 1 : 0;
    }
    return mask;
}

std::string depth_to_pgm16(const DepthMap& depth, DepthEncoding& encoding_out) {
    double lo = 0.0;
    double hi = 0.0;
    if (!depth.meters.empty()) {
        const auto [mn, mx] = std::minmax_element(depth.meters.begin(), depth.meters.end());
        lo = *mn;
        hi = *mx;
    }
    encoding_out.offset_m = lo;
    encoding_out.quantum_m = hi > lo ? (hi - lo) / 65535.0 : 0.0;

    std::string out = pnm_header("P5", depth.width, depth.height, 65535);
    out.reserve(out.size() + depth.meters.size() * 2);
    for (const double z : depth.meters) {
        uint16_t raw = 0;
        if (encoding_out.quantum_m > 0.0) {
            const double q = std::nearbyint((z - encoding_out.offset_m) / encoding_out.quantum_m);
            raw = static_cast<uint16_t>(std::clamp(q, 0.0, 65535.0));
        }
        out += static_cast<char>(raw >> 8);  // big-endian per netpbm
        out += static_cast<char>(raw & 0xFF);
    }
    return out;
}

Result<DepthMap> depth_from_pgm16(const std::string& bytes, const DepthEncoding& encoding) {
    auto header = parse_pnm_header(bytes, "P5");
    if (!header.ok()) return header.error();
    const PnmHeader& h = header.value();
    if (h.maxval != 65535) {
        return make_error(Errc::invalid_input, "depth raster must be 16-bit");
    }
    const size_t n = static_cast<size_t>(h.width) * static_cast<size_t>(h.height);
    if (bytes.size() < h.data_offset + n * 2) {
        return make_error(Errc::invalid_input, "truncated depth raster");
    }
    DepthMap depth = DepthMap::filled(h.width, h.height, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const uint16_t raw =
            static_cast<uint16_t>((static_cast<unsigned char>(bytes[h.data_offset + i * 2]) << 8) |
                                  static_cast<unsigned char>(bytes[h.data_offset + i * 2 + 1]));
        depth.meters[i] = encoding.offset_m + raw * encoding.quantum_m;
    }
    return depth;
}

std::string rgb_to_ppm(const RgbImage& img) {
    std::string out = pnm_header("P6", img.width, img.height, 255);
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

Result<RgbImage> rgb_from_ppm(const std::string& bytes) {
    auto header = parse_pnm_header(bytes, "P6");
    if (!header.ok()) return header.error();
    const PnmHeader& h = header.value();
    const size_t n = static_cast<size_t>(h.width) * static_cast<size_t>(h.height) * 3;
    if (bytes.size() < h.data_offset + n) {
        return make_error(Errc::invalid_input, "truncated rgb raster");
    }
    RgbImage img;
    img.width = h.width;
    img.height = h.height;
    img.pixels.assign(bytes.begin() + static_cast<long>(h.data_offset),
                      bytes.begin() + static_cast<long>(h.data_offset + n));
    return img;
}

Status write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return make_error(Errc::invalid_input, "cannot open for writing: " + path);
    out.write(bytes.data(), static_cast<long>(bytes.size()));
    if (!out) return make_error(Errc::invalid_input, "write failed: " + path);
    return ok_status();
}

Result<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return make_error(Errc::invalid_input, "cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Status save_mask(const BinaryMask& mask, const std::string& path) {
    if (auto st = write_file(path, mask_to_pgm(mask)); !st.ok()) return st;
    nlohmann::json side{{"kind", "mask"}, {"width", mask.width}, {"height", mask.height}};
    return write_file(path + ".json", side.dump(2) + "\n");
}

Result<BinaryMask> load_mask(const std::string& path) {
    auto bytes = read_file(path);
    if (!bytes.ok()) return bytes.error();
    return mask_from_pgm(bytes.value());
}

Status save_depth(const DepthMap& depth, const std::string& path) {
    DepthEncoding enc;
    const std::string bytes = depth_to_pgm16(depth, enc);
    if (auto st = write_file(path, bytes); !st.ok()) return st;
    nlohmann::json side{{"kind", "depth"},    {"units", "m"},
                        {"width", depth.width}, {"height", depth.height},
                        {"offset_m", enc.offset_m}, {"quantum_m", enc.quantum_m}};
    return write_file(path + ".json", side.dump(2) + "\n");
}

Result<DepthMap> load_depth(const std::string& path) {
    auto bytes = read_file(path);
    if (!bytes.ok()) return bytes.error();
    auto side_bytes = read_file(path + ".json");
    if (!side_bytes.ok()) return side_bytes.error();
    DepthEncoding enc;
    try {
        const auto side = nlohmann::json::parse(side_bytes.value());
        enc.offset_m = side.at("offset_m").get<double>();
        enc.quantum_m = side.at("quantum_m").get<double>();
    } catch (const std::exception& e) {
        return make_error(Errc::invalid_input, std::string("bad depth sidecar: ") + e.what());
    }
    return depth_from_pgm16(bytes.value(), enc);
}

Status save_rgb(const RgbImage& img, const std::string& path) {
    return write_file(path, rgb_to_ppm(img));
}

Result<RgbImage> load_rgb(const std::string& path) {
    auto bytes = read_file(path);
    if (!bytes.ok()) return bytes.error();
    return rgb_from_ppm(bytes.value());
}

}  // namespace tabletop
