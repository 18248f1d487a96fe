#include "tabletop/sim/oracle_rules.hpp"

#include <cmath>
#include <sstream>

#include "tabletop/agents/agents.hpp"
#include "tabletop/core/json_io.hpp"
#include "tabletop/geometry/projection.hpp"

namespace tabletop {

namespace {

using nlohmann::json;

std::vector<std::string> keys_of(const json& obj) {
    std::vector<std::string> out;
    for (auto it = obj.begin(); it != obj.end(); ++it) out.push_back(it.key());
    return out;
}

json pose_json(double x, double y, double z, double yaw = 0.0) {
    return json{{"x", x}, {"y", y}, {"z", z}, {"yaw", yaw}};
}

std::optional<json> find_object_entry(const json& objects, const std::string& query) {
    std::vector<std::string> labels;
    for (const auto& o : objects) labels.push_back(o.at("label").get<std::string>());
    const auto matched = match_label(query, labels);
    if (!matched) return std::nullopt;
    for (const auto& o : objects) {
        if (o.at("label").get<std::string>() == *matched) return std::optional<json>(o);
    }
    return std::nullopt;
}

std::optional<json> find_by_node_id(const json& objects, const std::string& node_id) {
    for (const auto& o : objects) {
        if (o.value("node_id", std::string()) == node_id) return std::optional<json>(o);
    }
    return std::nullopt;
}

// "(x, y, z)" with optional parentheses.
std::optional<Vec3> parse_position_ref(const std::string& text) {
    std::string cleaned;
    for (const char c : text) {
        if (c == '(' || c == ')' || c == ',') {
            cleaned += ' ';
        } else {
            cleaned += c;
        }
    }
    std::istringstream in(cleaned);
    Vec3 p;
    if (in >> p.x >> p.y >> p.z) return p;
    return std::nullopt;
}

std::optional<double> yaw_from_tags(const json& subtask) {
    for (const auto& tag : subtask.at("memory_tags")) {
        const std::string key = tag.at("key").get<std::string>();
        if (key == "yaw_degrees") {
            return std::stod(tag.at("value").get<std::string>()) * kPi / 180.0;
        }
        if (key == "yaw") {
            return std::stod(tag.at("value").get<std::string>());
        }
    }
    return std::nullopt;
}

std::optional<json> resolve_place_anchor(const json& subtask, const json& objects) {
    for (const auto& tag : subtask.at("memory_tags")) {
        if (tag.at("kind").get<std::string>() == "position_ref") {
            if (const auto p = parse_position_ref(tag.at("value").get<std::string>())) {
                return json{{"kind", "position"}, {"x", p->x}, {"y", p->y}, {"z", p->z}};
            }
        }
    }
    for (const auto& tag : subtask.at("memory_tags")) {
        if (tag.at("kind").get<std::string>() == "object_ref") {
            if (const auto entry = find_by_node_id(objects, tag.at("value").get<std::string>())) {
                return json{{"kind", "object"}, {"entry", *entry}};
            }
        }
    }
    const std::string target = subtask.value("target_query", std::string());
    if (!target.empty()) {
        if (const auto entry = find_object_entry(objects, target)) {
            return json{{"kind", "object"}, {"entry", *entry}};
        }
    }
    return std::nullopt;
}

}  // namespace

nlohmann::json oracle_perceive_response(const nlohmann::json& payload) {
    const json& subtask = payload.at("subtask");
    const json& graph = payload.at("scene_graph");
    std::vector<std::string> labels;
    for (const auto& n : graph.at("nodes")) labels.push_back(n.at("label").get<std::string>());

    const std::string object_query = subtask.value("object_query", std::string());
    const std::string target_query = subtask.value("target_query", std::string());
    const auto matched_object = match_label(object_query, labels);
    const auto matched_target =
        target_query.empty() ? std::nullopt : match_label(target_query, labels);

    std::string non_targets;
    for (const auto& label : labels) {
        if (matched_object && label == *matched_object) continue;
        if (matched_target && label == *matched_target) continue;
        if (!non_targets.empty()) non_targets += ", ";
        non_targets += label;
    }
    return json{{"object_of_interest", matched_object.value_or("")},
                {"not_object_of_interest", non_targets},
                {"all_objects", labels}};
}

nlohmann::json oracle_think_response(const nlohmann::json& payload) {
    const json& subtask = payload.at("subtask");
    const json& objects = payload.at("objects");
    const std::string verb = subtask.at("verb").get<std::string>();

    const auto obj = find_object_entry(objects, subtask.value("object_query", std::string()));
    if (!obj) {
        return json{{"error", "object not found"}};
    }
    const json& grasp = obj->at("grasp");
    const double gx = grasp.at("x").get<double>();
    const double gy = grasp.at("y").get<double>();
    const double gz = grasp.at("z").get<double>();
    const double height = obj->at("height").get<double>();

    json pick = pose_json(gx, gy, gz);
    json place = pick;

    if (verb == "rotate") {
        const double yaw = normalize_yaw(yaw_from_tags(subtask).value_or(0.0));
        pick["yaw"] = yaw;
        place = pick;
    } else if (verb == "pick_place") {
        const json& prior = payload.at("prior_plan");
        if (!prior.is_null()) {
            place = prior.at("place");
        } else {
            const auto anchor = resolve_place_anchor(subtask, objects);
            if (!anchor) return json{{"error", "target not found"}};
            if (anchor->at("kind") == "position") {
                place = pose_json(anchor->at("x").get<double>(), anchor->at("y").get<double>(),
                                  anchor->at("z").get<double>() + height);
            } else {
                const json& entry = anchor->at("entry");
                const double support = entry.at("grasp").at("z").get<double>() -
                                       entry.at("interior_depth").get<double>();
                place = pose_json(entry.at("grasp").at("x").get<double>(),
                                  entry.at("grasp").at("y").get<double>(), support + height);
            }
        }
    } else if (verb == "push" || verb == "move" || verb == "reach") {
        const auto anchor = resolve_place_anchor(subtask, objects);
        if (anchor) {
            if (anchor->at("kind") == "position") {
                place = pose_json(anchor->at("x").get<double>(), anchor->at("y").get<double>(),
                                  verb == "push" ? gz : anchor->at("z").get<double>());
            } else {
                const json& entry = anchor->at("entry");
                place = pose_json(entry.at("grasp").at("x").get<double>(),
                                  entry.at("grasp").at("y").get<double>(), gz);
            }
        }
        if (verb != "push") pick = place;
    }
    return json{{"primitive", verb}, {"pick", pick}, {"place", place}};
}

nlohmann::json oracle_reflect_response(const nlohmann::json& payload) {
    const json& subtask = payload.at("subtask");
    const json& plan = payload.at("plan");
    const json& actuation = payload.at("actuation");
    const double tol = payload.at("tolerance_m").get<double>();
    const json& before = payload.at("before").at("objects");
    const json& after = payload.at("after").at("objects");
    const json& extents = payload.at("extents");
    const std::string verb = subtask.at("verb").get<std::string>();

    const auto fail = [&](const char* stage, const std::string& why) {
        return json{{"verdict", "failure"}, {"failing_stage", stage}, {"explanation", why}};
    };
    const json success{{"verdict", "success"}, {"failing_stage", "none"}, {"explanation", ""}};

    if (verb == "move" || verb == "reach") {
        return actuation.at("executed").get<bool>() ? success
                                                    : fail("actor", "motion was not executed");
    }
    if (!actuation.at("executed").get<bool>()) {
        return fail("actor", "nothing was grasped at the pick position");
    }

    const auto labels = keys_of(after);
    const auto obj_label = match_label(subtask.value("object_query", std::string()), labels);
    if (!obj_label || !before.contains(*obj_label)) {
        return fail("perceptor", "manipulated object is not visible after the action");
    }
    const json& b = before.at(*obj_label);
    const json& a = after.at(*obj_label);
    const double moved = std::hypot(a.at("x").get<double>() - b.at("x").get<double>(),
                                    a.at("y").get<double>() - b.at("y").get<double>());

    if (verb == "rotate") {
        const double want = plan.at("place").at("yaw").get<double>();
        const double got = actuation.at("final_object_pose").at("yaw").get<double>();
        return std::abs(normalize_yaw(want - got)) <= 0.05
                   ? success
                   : fail("actor", "object yaw does not match the commanded rotation");
    }

    const double du = a.at("x").get<double>() - plan.at("place").at("x").get<double>();
    const double dv = a.at("y").get<double>() - plan.at("place").at("y").get<double>();
    const double plan_miss = std::hypot(du, dv);

    const auto target_label = match_label(subtask.value("target_query", std::string()), labels);
    bool target_consistent = true;
    if (verb == "pick_place" && target_label && after.contains(*target_label)) {
        const json& t = after.at(*target_label);
        const double dt = std::hypot(a.at("x").get<double>() - t.at("x").get<double>(),
                                     a.at("y").get<double>() - t.at("y").get<double>());
        // The placed object may occlude the target and bias its estimate by
        // up to the target's extent.
        const double slack = tol + extents.value(*target_label, 0.0);
        target_consistent = dt <= slack;
    }

    if (plan_miss <= tol && target_consistent) {
        return success;
    }

    if (moved < 1e-3) {
        return fail("actor", "object did not move");
    }

    for (const auto& label : labels) {
        if (obj_label && label == *obj_label) continue;
        if (target_label && label == *target_label) continue;
        const json& other = after.at(label);
        const double d = std::hypot(a.at("x").get<double>() - other.at("x").get<double>(),
                                    a.at("y").get<double>() - other.at("y").get<double>());
        if (d <= std::max(tol, extents.value(label, 0.0))) {
            return fail("grounder", "object was placed on '" + label + "' instead of the target");
        }
    }
    return fail("thinker", "object landed " + std::to_string(plan_miss) +
                               " m from the planned place position");
}

nlohmann::json oracle_single_agent_response(const nlohmann::json& payload,
                                            const nlohmann::json& plan) {
    const json& objects = payload.at("objects");

    // Virtual scene the monolith reasons over; updated by its own planned
    // actions, never by feedback.
    struct Virtual {
        double x, y, top, height, interior;
    };
    std::map<std::string, Virtual> virt;
    std::vector<std::string> labels;
    for (const auto& o : objects) {
        const std::string label = o.at("label").get<std::string>();
        labels.push_back(label);
        virt[label] = Virtual{o.at("grasp").at("x").get<double>(),
                              o.at("grasp").at("y").get<double>(),
                              o.at("grasp").at("z").get<double>(),
                              o.at("height").get<double>(),
                              o.at("interior_depth").get<double>()};
    }

    json actions = json::array();
    for (const auto& step : plan) {
        const std::string verb = step.at("verb").get<std::string>();
        const auto obj_label = match_label(step.value("object_query", std::string()), labels);
        if (!obj_label) return json{{"error", "unknown object in plan"}};
        Virtual& obj = virt[*obj_label];
        json pick = pose_json(obj.x, obj.y, obj.top);
        json place = pick;

        if (verb == "pick_place") {
            std::optional<Vec3> position;
            if (step.contains("memory_tags")) {
                for (const auto& tag : step.at("memory_tags")) {
                    if (tag.at("kind").get<std::string>() == "position_ref") {
                        position = parse_position_ref(tag.at("value").get<std::string>());
                    }
                }
            }
            if (position) {
                place = pose_json(position->x, position->y, position->z + obj.height);
                obj.x = position->x;
                obj.y = position->y;
                obj.top = position->z + obj.height;
            } else {
                const auto target_label =
                    match_label(step.value("target_query", std::string()), labels);
                if (!target_label) return json{{"error", "unknown target in plan"}};
                const Virtual& target = virt[*target_label];
                const double support = target.top - target.interior;
                place = pose_json(target.x, target.y, support + obj.height);
                obj.x = target.x;
                obj.y = target.y;
                obj.top = support + obj.height;
            }
        } else if (verb == "rotate") {
            double yaw = 0.0;
            if (step.contains("memory_tags")) {
                json subtask_like{{"memory_tags", step.at("memory_tags")}};
                yaw = yaw_from_tags(subtask_like).value_or(0.0);
            }
            pick["yaw"] = normalize_yaw(yaw);
            place = pick;
        } else if (verb == "push" || verb == "move" || verb == "reach") {
            const auto target_label =
                match_label(step.value("target_query", std::string()), labels);
            if (target_label) {
                const Virtual& target = virt[*target_label];
                place = pose_json(target.x, target.y, verb == "push" ? obj.top : target.top);
                if (verb == "push") {
                    obj.x = target.x;
                    obj.y = target.y;
                }
            }
            if (verb != "push") pick = place;
        }
        actions.push_back(json{{"primitive", verb}, {"pick", pick}, {"place", place}});
    }
    return json{{"actions", actions}};
}

nlohmann::json oracle_describe_response(const Simulator& sim) {
    const auto& objects = sim.objects();
    const CameraModel& cam = sim.camera();
    const double diag = std::hypot(sim.scenario().camera.image_width,
                                   sim.scenario().camera.image_height);
    constexpr double kPixelMargin = 4.0;
    constexpr double kZAdjacency = 0.002;

    json nodes = json::array();
    struct Projected {
        std::string id;
        double u, v;
        Pose pose;
        const ScenarioObject* spec;
    };
    std::vector<Projected> projected;

    for (const auto& spec : objects) {
        const auto pose = sim.object_pose(spec.id);
        if (!pose.ok()) continue;
        const char* size_class = spec.size < 0.05 ? "small" : (spec.size < 0.12 ? "medium" : "large");
        nodes.push_back({{"id", spec.id},
                         {"label", spec.label},
                         {"color", spec.color},
                         {"size_class", size_class},
                         {"geometry_class", to_string(spec.geometry_class)}});
        const auto px = project_to_pixel(
            cam, Vec3{pose.value().x, pose.value().y, pose.value().z});
        if (px.ok()) {
            projected.push_back(Projected{spec.id, px.value().u, px.value().v, pose.value(), &spec});
        }
    }

    json edges = json::array();
    const auto add_edge = [&edges](const std::string& s, const char* rel, const std::string& o) {
        edges.push_back({{"subject", s}, {"relation", rel}, {"object", o}});
    };
    for (size_t i = 0; i < projected.size(); ++i) {
        for (size_t k = i + 1; k < projected.size(); ++k) {
            const auto& a = projected[i];
            const auto& b = projected[k];
            if (a.u < b.u - kPixelMargin) {
                add_edge(a.id, "left_of", b.id);
            } else if (b.u < a.u - kPixelMargin) {
                add_edge(b.id, "left_of", a.id);
            }
            if (a.v < b.v - kPixelMargin) {
                add_edge(a.id, "above", b.id);
            } else if (b.v < a.v - kPixelMargin) {
                add_edge(b.id, "above", a.id);
            }
            if (std::hypot(a.u - b.u, a.v - b.v) < kNearDiagonalFraction * diag) {
                add_edge(a.id, "near", b.id);
            }

            // Physical stacking/containment from ground truth.
            for (const auto* upper : {&a, &b}) {
                const auto* lower = upper == &a ? &b : &a;
                const double planar = upper->pose.planar_distance(lower->pose);
                if (planar > lower->spec->half_extent()) continue;
                const double bottom = upper->pose.z - upper->spec->height;
                const double interior = lower->spec->interior_depth();
                if (interior > 0.0 &&
                    std::abs(bottom - (lower->pose.z - interior)) <= kZAdjacency) {
                    add_edge(upper->id, "inside", lower->id);
                } else if (std::abs(bottom - lower->pose.z) <= kZAdjacency) {
                    add_edge(upper->id, "on_top_of", lower->id);
                }
            }
        }
    }
    return json{{"nodes", nodes}, {"edges", edges}};
}

OracleBackend::OracleBackend(Simulator& sim, nlohmann::json plan)
    : sim_(sim), plan_(std::move(plan)) {}

Result<AgentResponse> OracleBackend::complete(const AgentRequest& req) {
    json response;
    switch (req.role) {
        case Role::decomposer: response = json{{"subtasks", plan_}}; break;
        case Role::descriptor: response = oracle_describe_response(sim_); break;
        case Role::perceptor: response = oracle_perceive_response(req.user_payload); break;
        case Role::thinker: response = oracle_think_response(req.user_payload); break;
        case Role::reflector: response = oracle_reflect_response(req.user_payload); break;
        case Role::single_agent:
            response = oracle_single_agent_response(req.user_payload, plan_);
            break;
    }
    AgentResponse out;
    out.raw_text = response.dump();
    return out;
}

}  // namespace tabletop
