#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tabletop/core/geom.hpp"
#include "tabletop/core/result.hpp"

namespace tabletop {

// ---------------------------------------------------------------------------
// Subtasks and memory tags

enum class Verb { pick_place, move, reach, push, rotate };

const char* to_string(Verb verb);
std::optional<Verb> verb_from_string(const std::string& name);

enum class MemoryTagKind { object_ref, position_ref, context_ref };

const char* to_string(MemoryTagKind kind);
std::optional<MemoryTagKind> memory_tag_kind_from_string(const std::string& name);

struct MemoryTag {
    std::string key;
    MemoryTagKind kind = MemoryTagKind::context_ref;
    std::string value;

    bool operator==(const MemoryTag&) const = default;
};

Result<MemoryTag> make_memory_tag(std::string key, MemoryTagKind kind, std::string value);

/// One primitive subtask. Verbs outside the closed vocabulary are rejected
/// at construction; ids are assigned by the decomposer in plan order.
struct AtomicInstruction {
    std::string id;
    Verb verb = Verb::pick_place;
    std::string object_query;
    std::string target_query;
    std::vector<MemoryTag> memory_tags;
    std::string raw_text;

    bool operator==(const AtomicInstruction&) const = default;
};

Result<AtomicInstruction> make_atomic_instruction(std::string id, const std::string& verb,
                                                  std::string object_query,
                                                  std::string target_query,
                                                  std::vector<MemoryTag> memory_tags,
                                                  std::string raw_text);

// ---------------------------------------------------------------------------
// Scene graph

enum class GeometryClass { round, rimmed, flat, irregular };

const char* to_string(GeometryClass cls);
std::optional<GeometryClass> geometry_class_from_string(const std::string& name);

enum class RelationKind { left_of, right_of, above, below, on_top_of, inside, near };

const char* to_string(RelationKind rel);
std::optional<RelationKind> relation_from_string(const std::string& name);

/// Mirror relation for the symmetric pairs; on_top_of and inside have no
/// stored inverse.
std::optional<RelationKind> mirrored(RelationKind rel);

struct ObjectNode {
    std::string id;
    std::string label;
    std::string color;
    std::string size_class;
    GeometryClass geometry_class = GeometryClass::irregular;

    bool operator==(const ObjectNode&) const = default;
};

struct Relation {
    std::string subject_id;
    RelationKind relation = RelationKind::near;
    std::string object_id;

    bool operator==(const Relation&) const = default;
};

/// Objects plus pairwise spatial relations; the pipeline's visual memory.
/// left/right, above/below and near edges are kept closed under mirroring.
class SceneGraph {
public:
    Status add_node(ObjectNode node);
    Status add_edge(const std::string& subject_id, RelationKind rel, const std::string& object_id);

    const std::vector<ObjectNode>& nodes() const { return nodes_; }
    const std::vector<Relation>& edges() const { return edges_; }

    const ObjectNode* find_node(const std::string& id) const;
    const ObjectNode* find_by_label(const std::string& label) const;
    bool has_edge(const std::string& subject_id, RelationKind rel,
                  const std::string& object_id) const;

    bool operator==(const SceneGraph&) const = default;

private:
    std::vector<ObjectNode> nodes_;
    std::vector<Relation> edges_;
};

// ---------------------------------------------------------------------------
// Detections and the camera

struct Detection {
    std::string label;
    double u_min = 0.0;
    double v_min = 0.0;
    double u_max = 0.0;
    double v_max = 0.0;
    double confidence = 0.0;
    std::string source;

    bool operator==(const Detection&) const = default;

    double center_u() const { return 0.5 * (u_min + u_max); }
    double center_v() const { return 0.5 * (v_min + v_max); }
};

Status validate_detection(const Detection& det);

/// Calibrated pinhole parameters: intrinsics (fu, fv, alpha, u0, v0), the
/// world-to-camera rotation R and translation t, and the stereo baseline.
struct CameraModel {
    double fu = 1.0;
    double fv = 1.0;
    double alpha = 0.0;
    double u0 = 0.0;
    double v0 = 0.0;
    Mat3 rotation;      // world -> camera
    Vec3 translation;   // meters
    double baseline_b = 0.1;

    bool operator==(const CameraModel&) const = default;

    Mat3 intrinsic_matrix() const {
        Mat3 k;
        k.m = {fu, alpha, u0, 0.0, fv, v0, 0.0, 0.0, 1.0};
        return k;
    }
};

Result<CameraModel> make_camera(double fu, double fv, double alpha, double u0, double v0,
                                const Mat3& rotation, const Vec3& translation,
                                double baseline_b);

Status validate_camera(const CameraModel& cam);

// ---------------------------------------------------------------------------
// Grasp points

struct GraspPoint2D {
    double u = 0.0;
    double v = 0.0;
    std::string object_id;
    bool on_mask = false;

    bool operator==(const GraspPoint2D&) const = default;
};

struct GraspPoint3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::string object_id;
    double yaw = 0.0;

    bool operator==(const GraspPoint3D&) const = default;
};

// ---------------------------------------------------------------------------
// Plans, actuation and reflection

struct ActionPlan {
    std::string subtask_id;
    Verb primitive = Verb::pick_place;
    Pose pick_pose;
    Pose place_pose;

    bool operator==(const ActionPlan&) const = default;
};

struct ActuationResult {
    std::string subtask_id;
    bool executed = false;
    bool dropped = false;
    Pose final_object_pose;

    bool operator==(const ActuationResult&) const = default;
};

enum class Verdict { success, failure };

const char* to_string(Verdict verdict);

struct ReflectionResult {
    std::string subtask_id;
    Verdict verdict = Verdict::failure;
    Stage failing_stage = Stage::none;
    std::string explanation;

    bool operator==(const ReflectionResult&) const = default;
};

/// Enforces "success implies failing_stage == none" and non-empty
/// explanations on failure.
Result<ReflectionResult> make_reflection_result(std::string subtask_id, Verdict verdict,
                                                Stage failing_stage, std::string explanation);

enum class RecoveryKind { retry_subtask, reactivate, rescan_scene, terminate_failure };

const char* to_string(RecoveryKind kind);

struct RecoveryAction {
    RecoveryKind kind = RecoveryKind::retry_subtask;
    Stage stage = Stage::none;  // set for reactivate

    bool operator==(const RecoveryAction&) const = default;
};

}  // namespace tabletop
