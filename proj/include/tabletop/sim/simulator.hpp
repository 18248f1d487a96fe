#pragma once

#include <random>
#include <utility>

#include "tabletop/core/state.hpp"
#include "tabletop/sim/scenario.hpp"

namespace tabletop {

struct ActionCommand {
    Verb primitive = Verb::pick_place;
    Pose pick;
    Pose place;

    bool operator==(const ActionCommand&) const = default;
};

struct DetectionNoise {
    double miss_rate = 0.0;
    double bbox_jitter_px = 0.0;
    double conf_min = 1.0;
    double conf_max = 1.0;
};

/// The Actor's execution surface. Implemented by the simulator; decorators
/// wrap it for failure scripting in tests.
class Environment {
public:
    virtual ~Environment() = default;

    virtual Result<Observation> reset() = 0;
    virtual Result<Observation> observe() = 0;
    virtual Result<std::pair<Observation, ActuationResult>> execute(const ActionCommand& cmd) = 0;
    virtual const CameraModel& camera() const = 0;
    virtual const Scenario& scenario() const = 0;
};

/// Deterministic 2.5D tabletop: top-down rendering through a synthetic
/// overhead pinhole camera, pose-teleport actuation with seeded drop and
/// displacement noise, and ground-truth oracles for tests. Object pose z is
/// the top-surface height; there are no rigid-body dynamics.
class Simulator : public Environment {
public:
    explicit Simulator(Scenario scenario, uint64_t seed_override = 0,
                       bool use_override = false);

    Result<Observation> reset() override;
    Result<Observation> observe() override;
    Result<std::pair<Observation, ActuationResult>> execute(const ActionCommand& cmd) override;
    const CameraModel& camera() const override { return camera_; }
    const Scenario& scenario() const override { return scenario_; }

    /// Ground-truth detections with seeded jitter and dropouts.
    std::vector<Detection> oracle_detect(const std::vector<std::string>& labels,
                                         const DetectionNoise& noise,
                                         const std::string& source_id, uint64_t seed) const;

    /// True iff every goal atom holds in the current world.
    Result<bool> check_goal() const;
    Result<bool> check_goal(const GoalPredicate& goal) const;

    Result<Pose> object_pose(const std::string& id) const;
    const std::vector<ScenarioObject>& objects() const { return scenario_.objects; }

    /// Renders rgb, depth and per-object visibility masks for the current
    /// world. Pure function of the poses; stacking occludes from above.
    Observation render() const;

private:
    struct Body {
        size_t object_index = 0;
        Pose pose;
    };

    const ScenarioObject& spec_of(const Body& b) const { return scenario_.objects[b.object_index]; }
    Body* topmost_at(double x, double y, bool graspable);
    double settle_height(double x, double y, const Body* ignore, double height) const;

    Scenario scenario_;
    CameraModel camera_;
    std::vector<Body> bodies_;
    std::mt19937_64 rng_;
    uint64_t seed_ = 0;
    int step_count_ = 0;
    Observation current_;
};

/// Named color -> rgb used by the renderer and shared with fixtures.
std::array<uint8_t, 3> color_rgb(const std::string& name);

}  // namespace tabletop
