#include "tabletop/core/json_io.hpp"

#include <cstring>
#include <stdexcept>

#include "tabletop/core/encoding.hpp"

namespace tabletop {

namespace {

std::string bytes_of(const std::vector<uint8_t>& v) {
    return std::string(reinterpret_cast<const char*>(v.data()), v.size());
}

std::string bytes_of(const std::vector<double>& v) {
    return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
}

template <typename Enum>
Enum parse_enum(const json& j, std::optional<Enum> (*parser)(const std::string&),
                const char* what) {
    const auto parsed = parser(j.get<std::string>());
    if (!parsed) throw std::invalid_argument(std::string("unknown ") + what + ": " + j.dump());
    return *parsed;
}

}  // namespace

void to_json(json& j, const Vec3& v) { j = json{{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

void from_json(const json& j, Vec3& v) {
    v.x = j.at("x").get<double>();
    v.y = j.at("y").get<double>();
    v.z = j.at("z").get<double>();
}

void to_json(json& j, const Mat3& m) { j = m.m; }

void from_json(const json& j, Mat3& m) { j.get_to(m.m); }

void to_json(json& j, const Pose& p) {
    j = json{{"x", p.x}, {"y", p.y}, {"z", p.z}, {"yaw", p.yaw}};
}

void from_json(const json& j, Pose& p) {
    p.x = j.at("x").get<double>();
    p.y = j.at("y").get<double>();
    p.z = j.at("z").get<double>();
    p.yaw = j.at("yaw").get<double>();
}

void to_json(json& j, const MemoryTag& t) {
    j = json{{"key", t.key}, {"kind", to_string(t.kind)}, {"value", t.value}};
}

void from_json(const json& j, MemoryTag& t) {
    t.key = j.at("key").get<std::string>();
    t.kind = parse_enum<MemoryTagKind>(j.at("kind"), memory_tag_kind_from_string, "memory tag kind");
    t.value = j.at("value").get<std::string>();
}

void to_json(json& j, const AtomicInstruction& a) {
    j = json{{"id", a.id},
             {"verb", to_string(a.verb)},
             {"object_query", a.object_query},
             {"target_query", a.target_query},
             {"memory_tags", a.memory_tags},
             {"raw_text", a.raw_text}};
}

void from_json(const json& j, AtomicInstruction& a) {
    auto made = make_atomic_instruction(
        j.at("id").get<std::string>(), j.at("verb").get<std::string>(),
        j.at("object_query").get<std::string>(), j.at("target_query").get<std::string>(),
        j.at("memory_tags").get<std::vector<MemoryTag>>(), j.at("raw_text").get<std::string>());
    if (!made.ok()) throw std::invalid_argument(made.error().message);
    a = std::move(made).value();
}

void to_json(json& j, const ObjectNode& n) {
    j = json{{"id", n.id},
             {"label", n.label},
             {"color", n.color},
             {"size_class", n.size_class},
             {"geometry_class", to_string(n.geometry_class)}};
}

void from_json(const json& j, ObjectNode& n) {
    n.id = j.at("id").get<std::string>();
    n.label = j.at("label").get<std::string>();
    n.color = j.at("color").get<std::string>();
    n.size_class = j.at("size_class").get<std::string>();
    n.geometry_class =
        parse_enum<GeometryClass>(j.at("geometry_class"), geometry_class_from_string,
                                  "geometry class");
}

void to_json(json& j, const Relation& r) {
    j = json{{"subject", r.subject_id}, {"relation", to_string(r.relation)},
             {"object", r.object_id}};
}

void from_json(const json& j, Relation& r) {
    r.subject_id = j.at("subject").get<std::string>();
    r.relation = parse_enum<RelationKind>(j.at("relation"), relation_from_string, "relation");
    r.object_id = j.at("object").get<std::string>();
}

void to_json(json& j, const SceneGraph& g) {
    j = json{{"nodes", g.nodes()}, {"edges", g.edges()}};
}

void from_json(const json& j, SceneGraph& g) {
    SceneGraph built;
    for (const auto& nj : j.at("nodes")) {
        if (auto st = built.add_node(nj.get<ObjectNode>()); !st.ok()) {
            throw std::invalid_argument(st.error().message);
        }
    }
    for (const auto& ej : j.at("edges")) {
        const auto rel = ej.get<Relation>();
        if (auto st = built.add_edge(rel.subject_id, rel.relation, rel.object_id); !st.ok()) {
            throw std::invalid_argument(st.error().message);
        }
    }
    g = std::move(built);
}

void to_json(json& j, const Detection& d) {
    j = json{{"label", d.label},
             {"bbox", {d.u_min, d.v_min, d.u_max, d.v_max}},
             {"confidence", d.confidence},
             {"source", d.source}};
}

void from_json(const json& j, Detection& d) {
    d.label = j.at("label").get<std::string>();
    const auto& bbox = j.at("bbox");
    d.u_min = bbox.at(0).get<double>();
    d.v_min = bbox.at(1).get<double>();
    d.u_max = bbox.at(2).get<double>();
    d.v_max = bbox.at(3).get<double>();
    d.confidence = j.at("confidence").get<double>();
    d.source = j.at("source").get<std::string>();
}

void to_json(json& j, const CameraModel& c) {
    j = json{{"fu", c.fu},
             {"fv", c.fv},
             {"alpha", c.alpha},
             {"u0", c.u0},
             {"v0", c.v0},
             {"rotation", c.rotation},
             {"translation", c.translation},
             {"baseline_b", c.baseline_b}};
}

void from_json(const json& j, CameraModel& c) {
    c.fu = j.at("fu").get<double>();
    c.fv = j.at("fv").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.u0 = j.at("u0").get<double>();
    c.v0 = j.at("v0").get<double>();
    c.rotation = j.at("rotation").get<Mat3>();
    c.translation = j.at("translation").get<Vec3>();
    c.baseline_b = j.at("baseline_b").get<double>();
}

void to_json(json& j, const GraspPoint2D& g) {
    j = json{{"u", g.u}, {"v", g.v}, {"object_id", g.object_id}, {"on_mask", g.on_mask}};
}

void from_json(const json& j, GraspPoint2D& g) {
    g.u = j.at("u").get<double>();
    g.v = j.at("v").get<double>();
    g.object_id = j.at("object_id").get<std::string>();
    g.on_mask = j.at("on_mask").get<bool>();
}

void to_json(json& j, const GraspPoint3D& g) {
    j = json{{"x", g.x}, {"y", g.y}, {"z", g.z}, {"object_id", g.object_id}, {"yaw", g.yaw}};
}

void from_json(const json& j, GraspPoint3D& g) {
    g.x = j.at("x").get<double>();
    g.y = j.at("y").get<double>();
    g.z = j.at("z").get<double>();
    g.object_id = j.at("object_id").get<std::string>();
    g.yaw = j.at("yaw").get<double>();
}

void to_json(json& j, const ActionPlan& p) {
    j = json{{"subtask_id", p.subtask_id},
             {"primitive", to_string(p.primitive)},
             {"pick", p.pick_pose},
             {"place", p.place_pose}};
}

void from_json(const json& j, ActionPlan& p) {
    p.subtask_id = j.at("subtask_id").get<std::string>();
    p.primitive = parse_enum<Verb>(j.at("primitive"), verb_from_string, "primitive");
    p.pick_pose = j.at("pick").get<Pose>();
    p.place_pose = j.at("place").get<Pose>();
}

void to_json(json& j, const ActuationResult& r) {
    j = json{{"subtask_id", r.subtask_id},
             {"executed", r.executed},
             {"dropped", r.dropped},
             {"final_object_pose", r.final_object_pose}};
}

void from_json(const json& j, ActuationResult& r) {
    r.subtask_id = j.at("subtask_id").get<std::string>();
    r.executed = j.at("executed").get<bool>();
    r.dropped = j.at("dropped").get<bool>();
    r.final_object_pose = j.at("final_object_pose").get<Pose>();
}

void to_json(json& j, const ReflectionResult& r) {
    j = json{{"subtask_id", r.subtask_id},
             {"verdict", to_string(r.verdict)},
             {"failing_stage", to_string(r.failing_stage)},
             {"explanation", r.explanation}};
}

void from_json(const json& j, ReflectionResult& r) {
    const std::string verdict = j.at("verdict").get<std::string>();
    if (verdict != "success" && verdict != "failure") {
        throw std::invalid_argument("unknown verdict: " + verdict);
    }
    auto made = make_reflection_result(j.at("subtask_id").get<std::string>(),
                                       verdict == "success" ? Verdict::success : Verdict::failure,
                                       stage_from_string(j.at("failing_stage").get<std::string>()),
                                       j.at("explanation").get<std::string>());
    if (!made.ok()) throw std::invalid_argument(made.error().message);
    r = std::move(made).value();
}

void to_json(json& j, const RecoveryAction& a) {
    j = json{{"kind", to_string(a.kind)}, {"stage", to_string(a.stage)}};
}

void from_json(const json& j, RecoveryAction& a) {
    const std::string kind = j.at("kind").get<std::string>();
    bool known = false;
    for (const RecoveryKind k : {RecoveryKind::retry_subtask, RecoveryKind::reactivate,
                                 RecoveryKind::rescan_scene, RecoveryKind::terminate_failure}) {
        if (kind == to_string(k)) {
            a.kind = k;
            known = true;
        }
    }
    if (!known) throw std::invalid_argument("unknown recovery kind: " + kind);
    a.stage = stage_from_string(j.at("stage").get<std::string>());
}

void to_json(json& j, const BinaryMask& m) {
    j = json{{"width", m.width}, {"height", m.height}, {"bits", base64_encode(bytes_of(m.bits))}};
}

void from_json(const json& j, BinaryMask& m) {
    m.width = j.at("width").get<int>();
    m.height = j.at("height").get<int>();
    const std::string raw = base64_decode(j.at("bits").get<std::string>());
    if (raw.size() != static_cast<size_t>(m.width) * static_cast<size_t>(m.height)) {
        throw std::invalid_argument("mask payload size does not match dimensions");
    }
    m.bits.assign(raw.begin(), raw.end());
}

void to_json(json& j, const DepthMap& d) {
    // Raw little-endian IEEE-754 payload; exact round-trip on one platform.
    j = json{{"width", d.width},
             {"height", d.height},
             {"meters_le64", base64_encode(bytes_of(d.meters))}};
}

void from_json(const json& j, DepthMap& d) {
    d.width = j.at("width").get<int>();
    d.height = j.at("height").get<int>();
    const std::string raw = base64_decode(j.at("meters_le64").get<std::string>());
    const size_t n = static_cast<size_t>(d.width) * static_cast<size_t>(d.height);
    if (raw.size() != n * sizeof(double)) {
        throw std::invalid_argument("depth payload size does not match dimensions");
    }
    d.meters.resize(n);
    std::memcpy(d.meters.data(), raw.data(), raw.size());
}

void to_json(json& j, const RgbImage& img) {
    j = json{{"width", img.width},
             {"height", img.height},
             {"pixels", base64_encode(bytes_of(img.pixels))}};
}

void from_json(const json& j, RgbImage& img) {
    img.width = j.at("width").get<int>();
    img.height = j.at("height").get<int>();
    const std::string raw = base64_decode(j.at("pixels").get<std::string>());
    if (raw.size() != static_cast<size_t>(img.width) * static_cast<size_t>(img.height) * 3) {
        throw std::invalid_argument("rgb payload size does not match dimensions");
    }
    img.pixels.assign(raw.begin(), raw.end());
}

void to_json(json& j, const Observation& o) {
    j = json{{"rgb", o.rgb}, {"depth", o.depth}, {"masks", o.masks},
             {"step_index", o.step_index}};
}

void from_json(const json& j, Observation& o) {
    o.rgb = j.at("rgb").get<RgbImage>();
    o.depth = j.at("depth").get<DepthMap>();
    o.masks = j.at("masks").get<std::map<std::string, BinaryMask>>();
    o.step_index = j.at("step_index").get<int>();
}

void to_json(json& j, const SubtaskRecord& r) {
    j = json{{"id", r.id}, {"attempts", r.attempts}, {"outcome", to_string(r.outcome)}};
}

void from_json(const json& j, SubtaskRecord& r) {
    r.id = j.at("id").get<std::string>();
    r.attempts = j.at("attempts").get<int>();
    const std::string outcome = j.at("outcome").get<std::string>();
    if (outcome == "success") {
        r.outcome = SubtaskOutcome::success;
    } else if (outcome == "failed") {
        r.outcome = SubtaskOutcome::failed;
    } else if (outcome == "skipped") {
        r.outcome = SubtaskOutcome::skipped;
    } else {
        throw std::invalid_argument("unknown subtask outcome: " + outcome);
    }
}

void to_json(json& j, const TaskState& s) {
    j = json{{"task_name", s.task_name},
             {"original_prompt", s.original_prompt},
             {"initial_decomposition_done", s.initial_decomposition_done},
             {"decomposed_prompts", s.decomposed_prompts},
             {"queue", s.queue},
             {"should_terminate", s.should_terminate},
             {"multi_object", s.multi_object},
             {"object_of_interest", s.object_of_interest},
             {"not_object_of_interest", s.not_object_of_interest},
             {"all_objects", s.all_objects},
             {"camera", s.camera},
             {"grounder_output", s.grounder_output},
             {"grasp_points_2d", s.grasp_points_2d},
             {"grasp_points_3d", s.grasp_points_3d},
             {"thinker_output", s.thinker_output},
             {"actor_output", s.actor_output},
             {"reflection_output", s.reflection_output},
             {"attempt_counts", s.attempt_counts},
             {"reactivation_counts", s.reactivation_counts},
             {"rescan_count", s.rescan_count},
             {"results", s.results}};
    if (s.current) j["current"] = *s.current;
    if (s.scene_graph) j["scene_graph"] = *s.scene_graph;
    if (s.observation) j["observation"] = *s.observation;
}

void from_json(const json& j, TaskState& s) {
    s = TaskState{};
    s.task_name = j.at("task_name").get<std::string>();
    s.original_prompt = j.at("original_prompt").get<std::string>();
    s.initial_decomposition_done = j.at("initial_decomposition_done").get<bool>();
    s.decomposed_prompts = j.at("decomposed_prompts").get<std::vector<AtomicInstruction>>();
    s.queue = j.at("queue").get<std::vector<AtomicInstruction>>();
    s.should_terminate = j.at("should_terminate").get<bool>();
    s.multi_object = j.at("multi_object").get<bool>();
    s.object_of_interest = j.at("object_of_interest").get<std::string>();
    s.not_object_of_interest = j.at("not_object_of_interest").get<std::string>();
    s.all_objects = j.at("all_objects").get<std::vector<std::string>>();
    s.camera = j.at("camera").get<CameraModel>();
    s.grounder_output = j.at("grounder_output").get<std::vector<Detection>>();
    s.grasp_points_2d = j.at("grasp_points_2d").get<std::vector<GraspPoint2D>>();
    s.grasp_points_3d = j.at("grasp_points_3d").get<std::vector<GraspPoint3D>>();
    s.thinker_output = j.at("thinker_output").get<std::map<std::string, ActionPlan>>();
    s.actor_output = j.at("actor_output").get<std::map<std::string, ActuationResult>>();
    s.reflection_output =
        j.at("reflection_output").get<std::map<std::string, ReflectionResult>>();
    s.attempt_counts = j.at("attempt_counts").get<std::map<std::string, int>>();
    s.reactivation_counts = j.at("reactivation_counts").get<std::map<std::string, int>>();
    s.rescan_count = j.at("rescan_count").get<int>();
    s.results = j.at("results").get<std::map<std::string, SubtaskRecord>>();
    if (j.contains("current")) s.current = j.at("current").get<AtomicInstruction>();
    if (j.contains("scene_graph")) s.scene_graph = j.at("scene_graph").get<SceneGraph>();
    if (j.contains("observation")) s.observation = j.at("observation").get<Observation>();
}

}  // namespace tabletop
