#include "tabletop/detect/providers.hpp"

#include <algorithm>
#include <set>

#include <httplib.h>

#include "tabletop/core/encoding.hpp"
#include "tabletop/geometry/raster_io.hpp"

namespace tabletop {

bool DetectionQuery::valid() const {
    if (labels.empty() || observation == nullptr) return false;
    std::set<std::string> seen(labels.begin(), labels.end());
    return seen.size() == labels.size();
}

std::vector<Detection> sanitize_detections(std::vector<Detection> dets, int width, int height) {
    std::vector<Detection> out;
    for (auto& d : dets) {
        d.u_min = std::clamp(d.u_min, 0.0, static_cast<double>(width));
        d.u_max = std::clamp(d.u_max, 0.0, static_cast<double>(width));
        d.v_min = std::clamp(d.v_min, 0.0, static_cast<double>(height));
        d.v_max = std::clamp(d.v_max, 0.0, static_cast<double>(height));
        if (validate_detection(d).ok()) out.push_back(d);
    }
    return out;
}

SimOracleProvider::SimOracleProvider(Simulator& sim, DetectorProfile profile, uint64_t seed)
    : sim_(sim), profile_(std::move(profile)), seed_(seed) {}

Result<std::vector<Detection>> SimOracleProvider::detect(const DetectionQuery& query) {
    if (!query.valid()) {
        return make_error(Errc::invalid_input, "detection query must carry deduplicated labels");
    }
    DetectionNoise noise;
    noise.miss_rate = profile_.miss_rate;
    noise.bbox_jitter_px = profile_.bbox_jitter_px;
    noise.conf_min = profile_.conf_min;
    noise.conf_max = profile_.conf_max;
    const uint64_t call_seed = mix_seed(seed_, ++call_index_);
    auto dets = sim_.oracle_detect(query.labels, noise, profile_.id, call_seed);
    return sanitize_detections(std::move(dets), query.observation->rgb.width,
                               query.observation->rgb.height);
}

RemoteDetectorProvider::RemoteDetectorProvider(std::string provider_id, std::string endpoint_url,
                                               double timeout_s)
    : id_(std::move(provider_id)), endpoint_url_(std::move(endpoint_url)),
      timeout_s_(timeout_s) {}

Result<std::vector<Detection>> RemoteDetectorProvider::detect(const DetectionQuery& query) {
    if (!query.valid()) {
        return make_error(Errc::invalid_input, "detection query must carry deduplicated labels");
    }
    std::string host = endpoint_url_;
    int port = 80;
    if (host.rfind("http://", 0) == 0) host = host.substr(7);
    if (const auto slash = host.find('/'); slash != std::string::npos) host = host.substr(0, slash);
    if (const auto colon = host.find(':'); colon != std::string::npos) {
        port = std::atoi(host.c_str() + colon + 1);
        host = host.substr(0, colon);
    }

    nlohmann::json body{{"image", base64_encode(rgb_to_ppm(query.observation->rgb))},
                        {"labels", query.labels}};
    httplib::Client client(host, port);
    client.set_read_timeout(static_cast<time_t>(timeout_s_), 0);
    client.set_connection_timeout(static_cast<time_t>(timeout_s_), 0);
    auto res = client.Post("/detect", body.dump(), "application/json");
    if (!res || res->status != 200) {
        return make_error(Errc::backend_unavailable, "detector provider " + id_ + " unreachable");
    }
    std::vector<Detection> dets;
    try {
        const auto j = nlohmann::json::parse(res->body);
        for (const auto& dj : j.at("detections")) {
            Detection d;
            d.label = dj.at("label").get<std::string>();
            const auto& bbox = dj.at("bbox");
            d.u_min = bbox.at(0).get<double>();
            d.v_min = bbox.at(1).get<double>();
            d.u_max = bbox.at(2).get<double>();
            d.v_max = bbox.at(3).get<double>();
            d.confidence = dj.at("confidence").get<double>();
            d.source = id_;
            dets.push_back(d);
        }
    } catch (const std::exception& e) {
        return make_error(Errc::schema_violation,
                          std::string("detector response malformed: ") + e.what());
    }
    return sanitize_detections(std::move(dets), query.observation->rgb.width,
                               query.observation->rgb.height);
}

}  // namespace tabletop
