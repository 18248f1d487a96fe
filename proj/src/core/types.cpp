#include "tabletop/core/types.hpp"

#include <algorithm>
#include <cmath>

namespace tabletop {

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::decomposer: return "decomposer";
        case Stage::descriptor: return "descriptor";
        case Stage::perceptor: return "perceptor";
        case Stage::grounder: return "grounder";
        case Stage::projector: return "projector";
        case Stage::thinker: return "thinker";
        case Stage::actor: return "actor";
        case Stage::reflector: return "reflector";
        case Stage::none: return "none";
    }
    return "none";
}

Stage stage_from_string(const std::string& name) {
    for (const Stage s : {Stage::decomposer, Stage::descriptor, Stage::perceptor, Stage::grounder,
                          Stage::projector, Stage::thinker, Stage::actor, Stage::reflector}) {
        if (name == to_string(s)) return s;
    }
    return Stage::none;
}

const char* to_string(Errc code) {
    switch (code) {
        case Errc::invalid_input: return "invalid_input";
        case Errc::camera_invariant: return "camera_invariant";
        case Errc::empty_mask: return "empty_mask";
        case Errc::ray_miss: return "ray_miss";
        case Errc::behind_camera: return "behind_camera";
        case Errc::invalid_disparity: return "invalid_disparity";
        case Errc::depth_hole: return "depth_hole";
        case Errc::schema_violation: return "schema_violation";
        case Errc::decomposition_error: return "decomposition_error";
        case Errc::descriptor_error: return "descriptor_error";
        case Errc::perception_miss: return "perception_miss";
        case Errc::grounding_failure: return "grounding_failure";
        case Errc::projector_error: return "projector_error";
        case Errc::thinker_error: return "thinker_error";
        case Errc::actuation_error: return "actuation_error";
        case Errc::scenario_error: return "scenario_error";
        case Errc::goal_error: return "goal_error";
        case Errc::backend_unavailable: return "backend_unavailable";
        case Errc::fixture_miss: return "fixture_miss";
        case Errc::cassette_miss: return "cassette_miss";
        case Errc::config_error: return "config_error";
        case Errc::trace_error: return "trace_error";
    }
    return "invalid_input";
}

const char* to_string(Verb verb) {
    switch (verb) {
        case Verb::pick_place: return "pick_place";
        case Verb::move: return "move";
        case Verb::reach: return "reach";
        case Verb::push: return "push";
        case Verb::rotate: return "rotate";
    }
    return "pick_place";
}

std::optional<Verb> verb_from_string(const std::string& name) {
    for (const Verb v : {Verb::pick_place, Verb::move, Verb::reach, Verb::push, Verb::rotate}) {
        if (name == to_string(v)) return v;
    }
    return std::nullopt;
}

const char* to_string(MemoryTagKind kind) {
    switch (kind) {
        case MemoryTagKind::object_ref: return "object_ref";
        case MemoryTagKind::position_ref: return "position_ref";
        case MemoryTagKind::context_ref: return "context_ref";
    }
    return "context_ref";
}

std::optional<MemoryTagKind> memory_tag_kind_from_string(const std::string& name) {
    for (const MemoryTagKind k :
         {MemoryTagKind::object_ref, MemoryTagKind::position_ref, MemoryTagKind::context_ref}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

Result<MemoryTag> make_memory_tag(std::string key, MemoryTagKind kind, std::string value) {
    if (key.empty()) {
        return make_error(Errc::invalid_input, "memory tag key must be non-empty");
    }
    return MemoryTag{std::move(key), kind, std::move(value)};
}

Result<AtomicInstruction> make_atomic_instruction(std::string id, const std::string& verb,
                                                  std::string object_query,
                                                  std::string target_query,
                                                  std::vector<MemoryTag> memory_tags,
                                                  std::string raw_text) {
    const auto parsed = verb_from_string(verb);
    if (!parsed) {
        return make_error(Errc::schema_violation, "unknown primitive verb: " + verb);
    }
    if (*parsed == Verb::pick_place && object_query.empty()) {
        return make_error(Errc::schema_violation, "pick_place requires a non-empty object query");
    }
    for (const auto& tag : memory_tags) {
        if (tag.key.empty()) {
            return make_error(Errc::schema_violation, "memory tag with empty key");
        }
    }
    AtomicInstruction instr;
    instr.id = std::move(id);
    instr.verb = *parsed;
    instr.object_query = std::move(object_query);
    instr.target_query = std::move(target_query);
    instr.memory_tags = std::move(memory_tags);
    instr.raw_text = std::move(raw_text);
    return instr;
}

const char* to_string(GeometryClass cls) {
    switch (cls) {
        case GeometryClass::round: return "round";
        case GeometryClass::rimmed: return "rimmed";
        case GeometryClass::flat: return "flat";
        case GeometryClass::irregular: return "irregular";
    }
    return "irregular";
}

std::optional<GeometryClass> geometry_class_from_string(const std::string& name) {
    for (const GeometryClass c : {GeometryClass::round, GeometryClass::rimmed, GeometryClass::flat,
                                  GeometryClass::irregular}) {
        if (name == to_string(c)) return c;
    }
    return std::nullopt;
}

const char* to_string(RelationKind rel) {
    switch (rel) {
        case RelationKind::left_of: return "left_of";
        case RelationKind::right_of: return "right_of";
        case RelationKind::above: return "above";
        case RelationKind::below: return "below";
        case RelationKind::on_top_of: return "on_top_of";
        case RelationKind::inside: return "inside";
        case RelationKind::near: return "near";
    }
    return "near";
}

std::optional<RelationKind> relation_from_string(const std::string& name) {
    for (const RelationKind r :
         {RelationKind::left_of, RelationKind::right_of, RelationKind::above, RelationKind::below,
          RelationKind::on_top_of, RelationKind::inside, RelationKind::near}) {
        if (name == to_string(r)) return r;
    }
    return std::nullopt;
}

std::optional<RelationKind> mirrored(RelationKind rel) {
    switch (rel) {
        case RelationKind::left_of: return RelationKind::right_of;
        case RelationKind::right_of: return RelationKind::left_of;
        case RelationKind::above: return RelationKind::below;
        case RelationKind::below: return RelationKind::above;
        case RelationKind::near: return RelationKind::near;
        case RelationKind::on_top_of:
        case RelationKind::inside: return std::nullopt;
    }
    return std::nullopt;
}

Status SceneGraph::add_node(ObjectNode node) {
    if (node.id.empty()) {
        return make_error(Errc::descriptor_error, "scene graph node with empty id");
    }
    if (find_node(node.id) != nullptr) {
        return make_error(Errc::descriptor_error, "duplicate scene graph node id: " + node.id);
    }
    for (const auto& existing : nodes_) {
        if (existing.label == node.label) {
            return make_error(Errc::descriptor_error,
                              "duplicate scene graph node label: " + node.label);
        }
    }
    nodes_.push_back(std::move(node));
    return ok_status();
}

Status SceneGraph::add_edge(const std::string& subject_id, RelationKind rel,
                            const std::string& object_id) {
    if (subject_id == object_id) {
        return make_error(Errc::descriptor_error, "self-relation on node " + subject_id);
    }
    if (find_node(subject_id) == nullptr || find_node(object_id) == nullptr) {
        return make_error(Errc::descriptor_error,
                          "edge references unknown node: " + subject_id + " -> " + object_id);
    }
    if (!has_edge(subject_id, rel, object_id)) {
        edges_.push_back(Relation{subject_id, rel, object_id});
    }
    if (const auto inv = mirrored(rel); inv && !has_edge(object_id, *inv, subject_id)) {
        edges_.push_back(Relation{object_id, *inv, subject_id});
    }
    return ok_status();
}

const ObjectNode* SceneGraph::find_node(const std::string& id) const {
    for (const auto& n : nodes_) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

const ObjectNode* SceneGraph::find_by_label(const std::string& label) const {
    for (const auto& n : nodes_) {
        if (n.label == label) return &n;
    }
    return nullptr;
}

bool SceneGraph::has_edge(const std::string& subject_id, RelationKind rel,
                          const std::string& object_id) const {
    return std::any_of(edges_.begin(), edges_.end(), [&](const Relation& e) {
        return e.subject_id == subject_id && e.relation == rel && e.object_id == object_id;
    });
}

Status validate_detection(const Detection& det) {
    if (!(det.u_min < det.u_max) || !(det.v_min < det.v_max)) {
        return make_error(Errc::invalid_input, "detection bbox corners inverted");
    }
    if (det.confidence < 0.0 || det.confidence > 1.0) {
        return make_error(Errc::invalid_input, "detection confidence outside [0, 1]");
    }
    return ok_status();
}

Status validate_camera(const CameraModel& cam) {
    if (!(cam.fu > 0.0) || !(cam.fv > 0.0)) {
        return make_error(Errc::camera_invariant, "focal lengths must be positive");
    }
    if (!(cam.baseline_b > 0.0)) {
        return make_error(Errc::camera_invariant, "stereo baseline must be positive");
    }
    const Mat3 gram = cam.rotation.transpose() * cam.rotation;
    double max_abs = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double target = (i == j) ? 1.0 : 0.0;
            max_abs = std::max(max_abs, std::abs(gram.at(i, j) - target));
        }
    }
    if (max_abs >= 1e-9) {
        return make_error(Errc::camera_invariant, "rotation matrix is not orthonormal");
    }
    return ok_status();
}

Result<CameraModel> make_camera(double fu, double fv, double alpha, double u0, double v0,
                                const Mat3& rotation, const Vec3& translation,
                                double baseline_b) {
    CameraModel cam;
    cam.fu = fu;
    cam.fv = fv;
    cam.alpha = alpha;
    cam.u0 = u0;
    cam.v0 = v0;
    cam.rotation = rotation;
    cam.translation = translation;
    cam.baseline_b = baseline_b;
    if (auto st = validate_camera(cam); !st.ok()) return st.error();
    return cam;
}

const char* to_string(Verdict verdict) {
    return verdict == Verdict::success ? "success" : "failure";
}

Result<ReflectionResult> make_reflection_result(std::string subtask_id, Verdict verdict,
                                                Stage failing_stage, std::string explanation) {
    if (verdict == Verdict::success && failing_stage != Stage::none) {
        return make_error(Errc::schema_violation,
                          "success verdict must not name a failing stage");
    }
    if (verdict == Verdict::failure && failing_stage == Stage::none) {
        return make_error(Errc::schema_violation, "failure verdict must name a failing stage");
    }
    if (verdict == Verdict::failure && explanation.empty()) {
        return make_error(Errc::schema_violation, "failure verdict requires an explanation");
    }
    ReflectionResult r;
    r.subtask_id = std::move(subtask_id);
    r.verdict = verdict;
    r.failing_stage = failing_stage;
    r.explanation = std::move(explanation);
    return r;
}

const char* to_string(RecoveryKind kind) {
    switch (kind) {
        case RecoveryKind::retry_subtask: return "retry_subtask";
        case RecoveryKind::reactivate: return "reactivate";
        case RecoveryKind::rescan_scene: return "rescan_scene";
        case RecoveryKind::terminate_failure: return "terminate_failure";
    }
    return "retry_subtask";
}

}  // namespace tabletop
