#include "tabletop/agents/agents.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "tabletop/core/encoding.hpp"
#include "tabletop/core/json_io.hpp"
#include "tabletop/geometry/raster_io.hpp"

namespace tabletop {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

Result<nlohmann::json> parse_json(const std::string& raw, Stage stage) {
    try {
        return nlohmann::json::parse(raw);
    } catch (const std::exception& e) {
        return make_error(Errc::schema_violation,
                          std::string("response is not valid JSON: ") + e.what(), stage);
    }
}

json pose_json(const Pose& p) {
    return json{{"x", p.x}, {"y", p.y}, {"z", p.z}, {"yaw", p.yaw}};
}

Result<Pose> pose_from(const json& j, Stage stage) {
    if (!j.is_object() || !j.contains("x") || !j.contains("y") || !j.contains("z")) {
        return make_error(Errc::schema_violation, "pose must carry numeric x, y, z", stage);
    }
    for (const char* key : {"x", "y", "z"}) {
        if (!j.at(key).is_number()) {
            return make_error(Errc::schema_violation, "pose field is not numeric", stage);
        }
    }
    Pose p;
    p.x = j.at("x").get<double>();
    p.y = j.at("y").get<double>();
    p.z = j.at("z").get<double>();
    p.yaw = j.value("yaw", 0.0);
    if (!j.value("yaw", json(0.0)).is_number()) {
        return make_error(Errc::schema_violation, "pose yaw is not numeric", stage);
    }
    p.yaw = normalize_yaw(p.yaw);
    return p;
}

json objects_json(const std::vector<ThinkObject>& objects) {
    json arr = json::array();
    for (const auto& o : objects) {
        arr.push_back({{"label", o.label},
                       {"node_id", o.node_id},
                       {"grasp", {{"x", o.grasp.x}, {"y", o.grasp.y}, {"z", o.grasp.z}}},
                       {"height", o.height},
                       {"interior_depth", o.interior_depth},
                       {"extent_half", o.extent_half},
                       {"geometry_class", to_string(o.geometry_class)}});
    }
    return arr;
}

json positions_json(const std::map<std::string, Vec3>& positions) {
    json out = json::object();
    for (const auto& [label, p] : positions) {
        out[label] = {{"x", p.x}, {"y", p.y}, {"z", p.z}};
    }
    return out;
}

}  // namespace

std::optional<std::string> match_label(const std::string& query,
                                       const std::vector<std::string>& labels) {
    const std::string q = lower(query);
    for (const auto& label : labels) {
        if (lower(label) == q) return label;
    }
    for (const auto& label : labels) {
        const std::string l = lower(label);
        if (l.find(q) != std::string::npos || q.find(l) != std::string::npos) return label;
    }
    return std::nullopt;
}

AgentRequest build_decompose_request(const std::string& prompt, const InstructionSet& instr) {
    AgentRequest req;
    req.role = Role::decomposer;
    req.instruction_version = instr.version;
    req.system_instruction = instr.text(Role::decomposer);
    req.user_payload = json{{"prompt", prompt}};
    return req;
}

AgentRequest build_describe_request(const Observation& obs, const InstructionSet& instr) {
    AgentRequest req;
    req.role = Role::descriptor;
    req.instruction_version = instr.version;
    req.system_instruction = instr.text(Role::descriptor);
    const std::string ppm = rgb_to_ppm(obs.rgb);
    req.user_payload = json{{"image",
                             {{"digest", hex64(fnv1a64(ppm))},
                              {"width", obs.rgb.width},
                              {"height", obs.rgb.height}}},
                            {"step_index", obs.step_index}};
    req.image_attachment = ppm;
    return req;
}

AgentRequest build_perceive_request(const AtomicInstruction& subtask, const SceneGraph& graph,
                                    const InstructionSet& instr) {
    AgentRequest req;
    req.role = Role::perceptor;
    req.instruction_version = instr.version;
    req.system_instruction = instr.text(Role::perceptor);
    req.user_payload = json{{"subtask", subtask}, {"scene_graph", graph}};
    return req;
}

AgentRequest build_think_request(const AtomicInstruction& subtask,
                                 const std::vector<ThinkObject>& objects, const SceneGraph& graph,
                                 const std::optional<ActionPlan>& prior_plan,
                                 const InstructionSet& instr) {
    AgentRequest req;
    req.role = Role::thinker;
    req.instruction_version = instr.version;
    req.system_instruction = instr.text(Role::thinker);
    req.user_payload = json{{"subtask", subtask},
                            {"objects", objects_json(objects)},
                            {"scene_graph", graph},
                            {"prior_plan", prior_plan ? json(*prior_plan) : json(nullptr)}};
    return req;
}

AgentRequest build_reflect_request(const ReflectContext& ctx, const InstructionSet& instr) {
    AgentRequest req;
    req.role = Role::reflector;
    req.instruction_version = instr.version;
    req.system_instruction = instr.text(Role::reflector);
    json extents = json::object();
    for (const auto& [label, e] : ctx.extents) extents[label] = e;
    req.user_payload =
        json{{"subtask", ctx.subtask},
             {"plan", ctx.plan},
             {"actuation", ctx.actuation},
             {"tolerance_m", ctx.tolerance_m},
             {"extents", extents},
             {"before", {{"step_index", ctx.before_step},
                         {"objects", positions_json(ctx.before_positions)}}},
             {"after", {{"step_index", ctx.after_step},
                        {"objects", positions_json(ctx.after_positions)}}}};
    return req;
}

AgentRequest build_single_agent_request(const std::string& prompt,
                                        const std::vector<ThinkObject>& objects,
                                        const InstructionSet& instr) {
    AgentRequest req;
    req.role = Role::single_agent;
    req.instruction_version = instr.version;
    req.system_instruction = instr.text(Role::single_agent);
    req.user_payload = json{{"prompt", prompt}, {"objects", objects_json(objects)}};
    return req;
}

Result<DecompositionOutcome> parse_decomposer_response(const std::string& raw) {
    auto parsed = parse_json(raw, Stage::decomposer);
    if (!parsed.ok()) return parsed.error();
    const json& j = parsed.value();
    if (!j.is_object() || !j.contains("subtasks") || !j.at("subtasks").is_array()) {
        return make_error(Errc::schema_violation, "decomposer response lacks a subtasks array",
                          Stage::decomposer);
    }
    DecompositionOutcome out;
    std::set<std::string> distinct_objects;
    size_t index = 0;
    for (const auto& sj : j.at("subtasks")) {
        if (!sj.is_object() || !sj.contains("verb")) {
            return make_error(Errc::schema_violation, "subtask entry lacks a verb",
                              Stage::decomposer);
        }
        std::vector<MemoryTag> tags;
        if (sj.contains("memory_tags")) {
            if (!sj.at("memory_tags").is_array()) {
                return make_error(Errc::schema_violation, "memory_tags must be an array",
                                  Stage::decomposer);
            }
            for (const auto& tj : sj.at("memory_tags")) {
                const auto kind =
                    memory_tag_kind_from_string(tj.value("kind", std::string()));
                if (!kind) {
                    return make_error(Errc::schema_violation, "unknown memory tag kind",
                                      Stage::decomposer);
                }
                auto tag = make_memory_tag(tj.value("key", std::string()), *kind,
                                           tj.value("value", std::string()));
                if (!tag.ok()) {
                    return make_error(Errc::schema_violation, tag.error().message,
                                      Stage::decomposer);
                }
                tags.push_back(std::move(tag).value());
            }
        }
        auto instr = make_atomic_instruction(
            "s" + std::to_string(index), sj.at("verb").get<std::string>(),
            sj.value("object_query", std::string()), sj.value("target_query", std::string()),
            std::move(tags), sj.value("raw_text", std::string()));
        if (!instr.ok()) {
            Error err = instr.error();
            err.stage = Stage::decomposer;
            return err;
        }
        if (!instr.value().object_query.empty()) {
            distinct_objects.insert(instr.value().object_query);
        }
        out.instructions.push_back(std::move(instr).value());
        ++index;
    }
    if (out.instructions.empty()) {
        return make_error(Errc::decomposition_error, "decomposer produced an empty plan",
                          Stage::decomposer);
    }
    out.multi_object = distinct_objects.size() > 1;
    return out;
}

Result<SceneGraph> parse_descriptor_response(const std::string& raw) {
    auto parsed = parse_json(raw, Stage::descriptor);
    if (!parsed.ok()) return parsed.error();
    const json& j = parsed.value();
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges")) {
        return make_error(Errc::schema_violation, "descriptor response lacks nodes/edges",
                          Stage::descriptor);
    }
    SceneGraph graph;
    try {
        for (const auto& nj : j.at("nodes")) {
            if (auto st = graph.add_node(nj.get<ObjectNode>()); !st.ok()) return st.error();
        }
        for (const auto& ej : j.at("edges")) {
            const auto rel = relation_from_string(ej.at("relation").get<std::string>());
            if (!rel) {
                return make_error(Errc::schema_violation, "unknown relation kind",
                                  Stage::descriptor);
            }
            if (auto st = graph.add_edge(ej.at("subject").get<std::string>(), *rel,
                                         ej.at("object").get<std::string>());
                !st.ok()) {
                return st.error();
            }
        }
    } catch (const std::exception& e) {
        return make_error(Errc::schema_violation, std::string("descriptor payload: ") + e.what(),
                          Stage::descriptor);
    }
    return graph;
}

Result<PerceptionTargets> parse_perceptor_response(const std::string& raw) {
    auto parsed = parse_json(raw, Stage::perceptor);
    if (!parsed.ok()) return parsed.error();
    const json& j = parsed.value();
    if (!j.is_object() || !j.contains("object_of_interest") || !j.contains("all_objects") ||
        !j.at("all_objects").is_array()) {
        return make_error(Errc::schema_violation, "perceptor response is incomplete",
                          Stage::perceptor);
    }
    PerceptionTargets out;
    out.object_of_interest = j.at("object_of_interest").get<std::string>();
    out.not_object_of_interest = j.value("not_object_of_interest", std::string());
    out.all_objects = j.at("all_objects").get<std::vector<std::string>>();
    if (!out.object_of_interest.empty() &&
        out.not_object_of_interest.find(out.object_of_interest) != std::string::npos) {
        return make_error(Errc::schema_violation,
                          "object of interest listed among the non-targets", Stage::perceptor);
    }
    return out;
}

Result<ActionPlan> parse_thinker_response(const std::string& raw, const std::string& subtask_id,
                                          Verb expected_primitive) {
    auto parsed = parse_json(raw, Stage::thinker);
    if (!parsed.ok()) return parsed.error();
    const json& j = parsed.value();
    if (!j.is_object() || !j.contains("primitive") || !j.contains("pick") ||
        !j.contains("place")) {
        return make_error(Errc::schema_violation, "thinker response is incomplete",
                          Stage::thinker);
    }
    const auto verb = verb_from_string(j.at("primitive").get<std::string>());
    if (!verb || *verb != expected_primitive) {
        return make_error(Errc::schema_violation, "thinker primitive does not match the subtask",
                          Stage::thinker);
    }
    auto pick = pose_from(j.at("pick"), Stage::thinker);
    if (!pick.ok()) return pick.error();
    auto place = pose_from(j.at("place"), Stage::thinker);
    if (!place.ok()) return place.error();
    ActionPlan plan;
    plan.subtask_id = subtask_id;
    plan.primitive = *verb;
    plan.pick_pose = pick.value();
    plan.place_pose = place.value();
    return plan;
}

Result<ReflectionResult> parse_reflector_response(const std::string& raw,
                                                  const std::string& subtask_id) {
    auto parsed = parse_json(raw, Stage::reflector);
    if (!parsed.ok()) return parsed.error();
    const json& j = parsed.value();
    if (!j.is_object() || !j.contains("verdict") || !j.contains("failing_stage")) {
        return make_error(Errc::schema_violation, "reflector response is incomplete",
                          Stage::reflector);
    }
    const std::string verdict = j.at("verdict").get<std::string>();
    if (verdict != "success" && verdict != "failure") {
        return make_error(Errc::schema_violation, "unknown verdict: " + verdict,
                          Stage::reflector);
    }
    const std::string stage_name = j.at("failing_stage").get<std::string>();
    Stage stage = stage_from_string(stage_name);
    if (stage == Stage::none && stage_name != "none") {
        return make_error(Errc::schema_violation, "unknown failing stage: " + stage_name,
                          Stage::reflector);
    }
    if (stage == Stage::reflector) {
        return make_error(Errc::schema_violation, "reflector cannot blame itself",
                          Stage::reflector);
    }
    auto made = make_reflection_result(subtask_id,
                                       verdict == "success" ? Verdict::success : Verdict::failure,
                                       stage, j.value("explanation", std::string()));
    if (!made.ok()) {
        Error err = made.error();
        err.stage = Stage::reflector;
        return err;
    }
    return made;
}

Result<std::vector<ActionPlan>> parse_single_agent_response(const std::string& raw) {
    auto parsed = parse_json(raw, Stage::none);
    if (!parsed.ok()) return parsed.error();
    const json& j = parsed.value();
    if (!j.is_object() || !j.contains("actions") || !j.at("actions").is_array()) {
        return make_error(Errc::schema_violation, "single-agent response lacks an actions array");
    }
    std::vector<ActionPlan> out;
    size_t index = 0;
    for (const auto& aj : j.at("actions")) {
        if (!aj.is_object() || !aj.contains("primitive")) {
            return make_error(Errc::schema_violation, "action entry lacks a primitive");
        }
        const auto verb = verb_from_string(aj.at("primitive").get<std::string>());
        if (!verb) {
            return make_error(Errc::schema_violation,
                              "unknown primitive: " + aj.at("primitive").dump());
        }
        auto pick = pose_from(aj.value("pick", json::object()), Stage::none);
        if (!pick.ok()) return pick.error();
        auto place = pose_from(aj.value("place", json::object()), Stage::none);
        if (!place.ok()) return place.error();
        ActionPlan plan;
        plan.subtask_id = "s" + std::to_string(index++);
        plan.primitive = *verb;
        plan.pick_pose = pick.value();
        plan.place_pose = place.value();
        out.push_back(plan);
    }
    if (out.empty()) {
        return make_error(Errc::schema_violation, "single-agent plan is empty");
    }
    return out;
}

Result<DecompositionOutcome> decompose(const std::string& prompt, Backend& backend,
                                       const InstructionSet& instr) {
    if (prompt.empty()) {
        return make_error(Errc::invalid_input, "prompt must be non-empty", Stage::decomposer);
    }
    auto response = backend.complete(build_decompose_request(prompt, instr));
    if (!response.ok()) return response.error();
    return parse_decomposer_response(response.value().raw_text);
}

Result<SceneGraph> describe(const Observation& obs, Backend& backend,
                            const InstructionSet& instr) {
    if (obs.rgb.width <= 0 || obs.rgb.height <= 0) {
        return make_error(Errc::invalid_input, "observation carries no image",
                          Stage::descriptor);
    }
    auto response = backend.complete(build_describe_request(obs, instr));
    if (!response.ok()) return response.error();
    return parse_descriptor_response(response.value().raw_text);
}

Result<PerceptionTargets> perceive(const AtomicInstruction& subtask, const SceneGraph& graph,
                                   Backend& backend, const InstructionSet& instr) {
    auto response = backend.complete(build_perceive_request(subtask, graph, instr));
    if (!response.ok()) return response.error();
    auto targets = parse_perceptor_response(response.value().raw_text);
    if (!targets.ok()) return targets;

    std::vector<std::string> labels;
    for (const auto& n : graph.nodes()) labels.push_back(n.label);
    if (targets.value().object_of_interest.empty() ||
        std::find(labels.begin(), labels.end(), targets.value().object_of_interest) ==
            labels.end()) {
        return make_error(Errc::perception_miss,
                          "subtask object '" + subtask.object_query +
                              "' is not present in the scene graph",
                          Stage::perceptor);
    }
    return targets;
}

Result<ActionPlan> think(const AtomicInstruction& subtask, const std::vector<ThinkObject>& objects,
                         const SceneGraph& graph, const std::optional<ActionPlan>& prior_plan,
                         Backend& backend, const InstructionSet& instr) {
    std::vector<std::string> labels;
    for (const auto& o : objects) labels.push_back(o.label);
    if (!subtask.object_query.empty() && !match_label(subtask.object_query, labels)) {
        return make_error(Errc::thinker_error,
                          "no grasp point available for " + subtask.object_query,
                          Stage::thinker);
    }
    for (const auto& tag : subtask.memory_tags) {
        if (tag.kind == MemoryTagKind::object_ref && graph.find_node(tag.value) == nullptr) {
            return make_error(Errc::thinker_error,
                              "memory tag does not resolve to a scene graph node: " + tag.value,
                              Stage::thinker);
        }
    }
    if (subtask.verb == Verb::pick_place && !prior_plan) {
        const bool has_position_tag =
            std::any_of(subtask.memory_tags.begin(), subtask.memory_tags.end(),
                        [](const MemoryTag& t) { return t.kind == MemoryTagKind::position_ref; });
        const bool has_target =
            !subtask.target_query.empty() && match_label(subtask.target_query, labels).has_value();
        const bool has_object_ref =
            std::any_of(subtask.memory_tags.begin(), subtask.memory_tags.end(),
                        [](const MemoryTag& t) { return t.kind == MemoryTagKind::object_ref; });
        if (!has_position_tag && !has_target && !has_object_ref) {
            return make_error(Errc::thinker_error,
                              "pick_place target cannot be resolved for " + subtask.id,
                              Stage::thinker);
        }
    }
    auto response =
        backend.complete(build_think_request(subtask, objects, graph, prior_plan, instr));
    if (!response.ok()) return response.error();
    return parse_thinker_response(response.value().raw_text, subtask.id, subtask.verb);
}

Result<ReflectionResult> reflect(const ReflectContext& ctx, Backend& backend,
                                 const InstructionSet& instr) {
    if (ctx.after_step < ctx.before_step) {
        return make_error(Errc::invalid_input, "observations out of order", Stage::reflector);
    }
    auto response = backend.complete(build_reflect_request(ctx, instr));
    if (!response.ok()) return response.error();
    return parse_reflector_response(response.value().raw_text, ctx.subtask.id);
}

Result<std::vector<ActionPlan>> single_agent_plan(const std::string& prompt,
                                                  const std::vector<ThinkObject>& objects,
                                                  Backend& backend,
                                                  const InstructionSet& instr) {
    auto response = backend.complete(build_single_agent_request(prompt, objects, instr));
    if (!response.ok()) return response.error();
    return parse_single_agent_response(response.value().raw_text);
}

}  // namespace tabletop
