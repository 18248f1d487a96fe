#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/core/state.hpp"
#include "tabletop/core/types.hpp"

namespace tabletop {

enum class ShapeKind { block, cup, pad, bowl };

const char* to_string(ShapeKind shape);
std::optional<ShapeKind> shape_from_string(const std::string& name);

/// Static description of one tabletop object. Pose z is the height of the
/// object's top surface; solid shapes rest with bottom = z - height.
struct ScenarioObject {
    std::string id;
    std::string label;
    std::string color;
    ShapeKind shape = ShapeKind::block;
    double size = 0.04;    // footprint side (squares) or diameter (rounds), meters
    double height = 0.04;  // meters
    Pose pose;
    GeometryClass geometry_class = GeometryClass::flat;

    bool operator==(const ScenarioObject&) const = default;

    /// Depth of the interior support plane below the top surface; zero for
    /// solid shapes, positive for containers (cup, bowl).
    double interior_depth() const;
    /// Half of the bounding footprint extent.
    double half_extent() const;
};

enum class GoalAtomKind { on_top_of, inside, at_position };

struct GoalAtom {
    GoalAtomKind kind = GoalAtomKind::on_top_of;
    std::string object_id;
    std::string target_id;  // on_top_of / inside
    double x = 0.0;         // at_position
    double y = 0.0;
    std::optional<double> tolerance_m;  // overrides the goal default

    bool operator==(const GoalAtom&) const = default;
};

struct GoalPredicate {
    std::vector<GoalAtom> atoms;
    double tolerance_m = 0.01;

    bool operator==(const GoalPredicate&) const = default;
};

struct FailureInjection {
    double p_drop = 0.0;
    double displacement_sigma_m = 0.0;

    bool operator==(const FailureInjection&) const = default;
};

struct Workspace {
    double x_min = -0.3;
    double x_max = 0.3;
    double y_min = -0.25;
    double y_max = 0.25;

    bool operator==(const Workspace&) const = default;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
};

/// Overhead camera parametrization used by the simulator's renderer.
struct OverheadCamera {
    double height_m = 1.0;
    double fu = 420.0;
    double fv = 420.0;
    double alpha = 0.0;
    int image_width = 320;
    int image_height = 240;
    double baseline_b = 0.1;

    bool operator==(const OverheadCamera&) const = default;

    CameraModel to_camera_model() const;
};

struct DetectorProfile {
    std::string id;
    double miss_rate = 0.0;
    double bbox_jitter_px = 0.0;
    double conf_min = 1.0;
    double conf_max = 1.0;

    bool operator==(const DetectorProfile&) const = default;
};

/// One reproducible episode setup: objects, goal, camera, failure injection
/// and the scripted decomposition used by deterministic backends.
struct Scenario {
    std::string name;
    std::string prompt;
    uint64_t seed = 0;
    Workspace workspace;
    OverheadCamera camera;
    std::array<uint8_t, 3> table_rgb{70, 70, 75};
    std::vector<ScenarioObject> objects;
    GoalPredicate goal;
    FailureInjection failure_injection;
    std::vector<DetectorProfile> detectors;
    nlohmann::json plan = nlohmann::json::array();  // scripted decomposition

    bool operator==(const Scenario&) const = default;

    const ScenarioObject* find_object(const std::string& id) const;
};

Result<Scenario> scenario_from_json(const nlohmann::json& j);
Result<Scenario> load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& s);

/// Unique ids, in-bounds non-overlapping initial footprints, valid drop
/// probability, goal atoms referencing existing objects.
Status validate_scenario(const Scenario& s);

}  // namespace tabletop
