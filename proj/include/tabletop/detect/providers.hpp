#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tabletop/core/state.hpp"
#include "tabletop/sim/simulator.hpp"

namespace tabletop {

struct DetectionQuery {
    std::vector<std::string> labels;          // non-empty, deduplicated
    const Observation* observation = nullptr;  // frame to detect on
    std::string source_hint;

    bool valid() const;
};

/// One detector feeding the grounder. A transport fault is an error result;
/// the pipeline logs it and keeps going on the remaining providers.
class DetectionProvider {
public:
    virtual ~DetectionProvider() = default;
    virtual const std::string& id() const = 0;
    virtual Result<std::vector<Detection>> detect(const DetectionQuery& query) = 0;
};

/// Ground-truth detector over the simulator with a seeded noise profile;
/// stands in for an open-vocabulary detector.
class SimOracleProvider : public DetectionProvider {
public:
    SimOracleProvider(Simulator& sim, DetectorProfile profile, uint64_t seed);

    const std::string& id() const override { return profile_.id; }
    Result<std::vector<Detection>> detect(const DetectionQuery& query) override;

private:
    Simulator& sim_;
    DetectorProfile profile_;
    uint64_t seed_ = 0;
    uint64_t call_index_ = 0;
};

/// Bridge to a remote open-vocabulary detector speaking a single-endpoint
/// protocol: POST /detect with {image (base64 ppm), labels} returning
/// {detections: [{label, bbox, confidence}]}.
class RemoteDetectorProvider : public DetectionProvider {
public:
    RemoteDetectorProvider(std::string provider_id, std::string endpoint_url,
                           double timeout_s = 10.0);

    const std::string& id() const override { return id_; }
    Result<std::vector<Detection>> detect(const DetectionQuery& query) override;

private:
    std::string id_;
    std::string endpoint_url_;
    double timeout_s_;
};

/// Drops detections that leave the image or are degenerate; shared by all
/// providers so no out-of-bounds bbox ever reaches the grounder.
std::vector<Detection> sanitize_detections(std::vector<Detection> dets, int width, int height);

}  // namespace tabletop
