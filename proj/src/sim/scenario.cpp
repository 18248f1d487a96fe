#include "tabletop/sim/scenario.hpp"

#include <cmath>
#include <set>

#include "tabletop/core/json_io.hpp"
#include "tabletop/geometry/raster_io.hpp"

namespace tabletop {

const char* to_string(ShapeKind shape) {
    switch (shape) {
        case ShapeKind::block: return "block";
        case ShapeKind::cup: return "cup";
        case ShapeKind::pad: return "pad";
        case ShapeKind::bowl: return "bowl";
    }
    return "block";
}

std::optional<ShapeKind> shape_from_string(const std::string& name) {
    for (const ShapeKind s : {ShapeKind::block, ShapeKind::cup, ShapeKind::pad, ShapeKind::bowl}) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

double ScenarioObject::interior_depth() const {
    switch (shape) {
        case ShapeKind::cup: return 0.8 * height;
        case ShapeKind::bowl: return 0.6 * height;
        case ShapeKind::block:
        case ShapeKind::pad: return 0.0;
    }
    return 0.0;
}

double ScenarioObject::half_extent() const { return 0.5 * size; }

CameraModel OverheadCamera::to_camera_model() const {
    Mat3 rot;
    rot.m = {1, 0, 0, 0, -1, 0, 0, 0, -1};  // x right, image v along -y, looking down
    CameraModel cam;
    cam.fu = fu;
    cam.fv = fv;
    cam.alpha = alpha;
    cam.u0 = image_width / 2.0;
    cam.v0 = image_height / 2.0;
    cam.rotation = rot;
    cam.translation = Vec3{0, 0, height_m};
    cam.baseline_b = baseline_b;
    return cam;
}

const ScenarioObject* Scenario::find_object(const std::string& id) const {
    for (const auto& o : objects) {
        if (o.id == id) return &o;
    }
    return nullptr;
}

namespace {

double default_height(ShapeKind shape, double size) {
    switch (shape) {
        case ShapeKind::block: return size;
        case ShapeKind::cup: return size;
        case ShapeKind::pad: return 0.02;
        case ShapeKind::bowl: return 0.5 * size;
    }
    return size;
}

GeometryClass default_geometry(ShapeKind shape) {
    switch (shape) {
        case ShapeKind::block:
        case ShapeKind::pad: return GeometryClass::flat;
        case ShapeKind::cup:
        case ShapeKind::bowl: return GeometryClass::rimmed;
    }
    return GeometryClass::irregular;
}

const char* to_string(GoalAtomKind kind) {
    switch (kind) {
        case GoalAtomKind::on_top_of: return "on_top_of";
        case GoalAtomKind::inside: return "inside";
        case GoalAtomKind::at_position: return "at_position";
    }
    return "on_top_of";
}

std::optional<GoalAtomKind> goal_atom_from_string(const std::string& name) {
    for (const GoalAtomKind k :
         {GoalAtomKind::on_top_of, GoalAtomKind::inside, GoalAtomKind::at_position}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

}  // namespace

Result<Scenario> scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    try {
        s.name = j.at("name").get<std::string>();
        s.prompt = j.at("prompt").get<std::string>();
        s.seed = j.value("seed", 0ULL);
        if (j.contains("workspace")) {
            const auto& w = j.at("workspace");
            s.workspace = Workspace{w.at("x_min"), w.at("x_max"), w.at("y_min"), w.at("y_max")};
        }
        if (j.contains("camera")) {
            const auto& c = j.at("camera");
            s.camera.height_m = c.value("height_m", 1.0);
            s.camera.fu = c.value("fu", 420.0);
            s.camera.fv = c.value("fv", 420.0);
            s.camera.alpha = c.value("alpha", 0.0);
            s.camera.image_width = c.value("width", 320);
            s.camera.image_height = c.value("height", 240);
            s.camera.baseline_b = c.value("baseline_b", 0.1);
        }
        if (j.contains("table_rgb")) {
            const auto& t = j.at("table_rgb");
            s.table_rgb = {t.at(0).get<uint8_t>(), t.at(1).get<uint8_t>(),
                           t.at(2).get<uint8_t>()};
        }
        for (const auto& oj : j.at("objects")) {
            ScenarioObject o;
            o.id = oj.at("id").get<std::string>();
            o.label = oj.at("label").get<std::string>();
            o.color = oj.value("color", std::string("gray"));
            const auto shape = shape_from_string(oj.value("shape", std::string("block")));
            if (!shape) {
                return make_error(Errc::scenario_error,
                                  "unknown shape for object " + o.id);
            }
            o.shape = *shape;
            o.size = oj.at("size").get<double>();
            o.height = oj.value("height", default_height(o.shape, o.size));
            o.pose = oj.at("pose").get<Pose>();
            if (oj.contains("geometry_class")) {
                const auto cls =
                    geometry_class_from_string(oj.at("geometry_class").get<std::string>());
                if (!cls) {
                    return make_error(Errc::scenario_error,
                                      "unknown geometry class for object " + o.id);
                }
                o.geometry_class = *cls;
            } else {
                o.geometry_class = default_geometry(o.shape);
            }
            s.objects.push_back(std::move(o));
        }
        if (j.contains("goal")) {
            const auto& g = j.at("goal");
            s.goal.tolerance_m = g.value("tolerance_m", 0.01);
            for (const auto& aj : g.at("atoms")) {
                GoalAtom a;
                const auto kind = goal_atom_from_string(aj.at("kind").get<std::string>());
                if (!kind) {
                    return make_error(Errc::scenario_error, "unknown goal atom kind");
                }
                a.kind = *kind;
                a.object_id = aj.at("object").get<std::string>();
                a.target_id = aj.value("target", std::string());
                a.x = aj.value("x", 0.0);
                a.y = aj.value("y", 0.0);
                if (aj.contains("tolerance_m")) a.tolerance_m = aj.at("tolerance_m").get<double>();
                s.goal.atoms.push_back(std::move(a));
            }
        }
        if (j.contains("failure_injection")) {
            const auto& f = j.at("failure_injection");
            s.failure_injection.p_drop = f.value("p_drop", 0.0);
            s.failure_injection.displacement_sigma_m = f.value("displacement_sigma_m", 0.0);
        }
        if (j.contains("detectors")) {
            for (const auto& dj : j.at("detectors")) {
                DetectorProfile d;
                d.id = dj.at("id").get<std::string>();
                d.miss_rate = dj.value("miss_rate", 0.0);
                d.bbox_jitter_px = dj.value("bbox_jitter_px", 0.0);
                d.conf_min = dj.value("conf_min", 1.0);
                d.conf_max = dj.value("conf_max", 1.0);
                s.detectors.push_back(std::move(d));
            }
        } else {
            s.detectors = {DetectorProfile{"detector-a", 0, 0, 1, 1},
                           DetectorProfile{"detector-b", 0, 0, 1, 1}};
        }
        if (j.contains("plan")) s.plan = j.at("plan");
    } catch (const std::exception& e) {
        return make_error(Errc::scenario_error, std::string("scenario parse: ") + e.what());
    }
    if (auto st = validate_scenario(s); !st.ok()) return st.error();
    return s;
}

Result<Scenario> load_scenario(const std::string& path) {
    auto bytes = read_file(path);
    if (!bytes.ok()) {
        return make_error(Errc::scenario_error, "cannot read scenario: " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes.value());
    } catch (const std::exception& e) {
        return make_error(Errc::scenario_error, std::string("scenario json: ") + e.what());
    }
    return scenario_from_json(j);
}

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& o : s.objects) {
        objects.push_back({{"id", o.id},
                           {"label", o.label},
                           {"color", o.color},
                           {"shape", to_string(o.shape)},
                           {"size", o.size},
                           {"height", o.height},
                           {"pose", o.pose},
                           {"geometry_class", to_string(o.geometry_class)}});
    }
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : s.goal.atoms) {
        nlohmann::json aj{{"kind", to_string(a.kind)}, {"object", a.object_id}};
        if (!a.target_id.empty()) aj["target"] = a.target_id;
        if (a.kind == GoalAtomKind::at_position) {
            aj["x"] = a.x;
            aj["y"] = a.y;
        }
        if (a.tolerance_m) aj["tolerance_m"] = *a.tolerance_m;
        atoms.push_back(aj);
    }
    nlohmann::json detectors = nlohmann::json::array();
    for (const auto& d : s.detectors) {
        detectors.push_back({{"id", d.id},
                             {"miss_rate", d.miss_rate},
                             {"bbox_jitter_px", d.bbox_jitter_px},
                             {"conf_min", d.conf_min},
                             {"conf_max", d.conf_max}});
    }
    return nlohmann::json{
        {"name", s.name},
        {"prompt", s.prompt},
        {"seed", s.seed},
        {"workspace",
         {{"x_min", s.workspace.x_min},
          {"x_max", s.workspace.x_max},
          {"y_min", s.workspace.y_min},
          {"y_max", s.workspace.y_max}}},
        {"camera",
         {{"height_m", s.camera.height_m},
          {"fu", s.camera.fu},
          {"fv", s.camera.fv},
          {"alpha", s.camera.alpha},
          {"width", s.camera.image_width},
          {"height", s.camera.image_height},
          {"baseline_b", s.camera.baseline_b}}},
        {"table_rgb", s.table_rgb},
        {"objects", objects},
        {"goal", {{"tolerance_m", s.goal.tolerance_m}, {"atoms", atoms}}},
        {"failure_injection",
         {{"p_drop", s.failure_injection.p_drop},
          {"displacement_sigma_m", s.failure_injection.displacement_sigma_m}}},
        {"detectors", detectors},
        {"plan", s.plan}};
}

Status validate_scenario(const Scenario& s) {
    if (s.objects.empty()) {
        return make_error(Errc::scenario_error, "scenario has no objects");
    }
    std::set<std::string> ids;
    std::set<std::string> labels;
    for (const auto& o : s.objects) {
        if (!ids.insert(o.id).second) {
            return make_error(Errc::scenario_error, "duplicate object id: " + o.id);
        }
        if (!labels.insert(o.label).second) {
            return make_error(Errc::scenario_error, "duplicate object label: " + o.label);
        }
        if (o.size <= 0.0 || o.height <= 0.0) {
            return make_error(Errc::scenario_error, "non-positive size for object " + o.id);
        }
        if (!s.workspace.contains(o.pose.x, o.pose.y)) {
            return make_error(Errc::scenario_error, "object outside workspace: " + o.id);
        }
    }
    for (size_t i = 0; i < s.objects.size(); ++i) {
        for (size_t k = i + 1; k < s.objects.size(); ++k) {
            const auto& a = s.objects[i];
            const auto& b = s.objects[k];
            const double gap = a.half_extent() + b.half_extent();
            if (std::abs(a.pose.x - b.pose.x) < gap && std::abs(a.pose.y - b.pose.y) < gap) {
                return make_error(Errc::scenario_error,
                                  "initial footprints overlap: " + a.id + ", " + b.id);
            }
        }
    }
    if (s.failure_injection.p_drop < 0.0 || s.failure_injection.p_drop > 1.0) {
        return make_error(Errc::scenario_error, "p_drop outside [0, 1]");
    }
    if (s.failure_injection.displacement_sigma_m < 0.0) {
        return make_error(Errc::scenario_error, "negative displacement sigma");
    }
    for (const auto& a : s.goal.atoms) {
        if (s.find_object(a.object_id) == nullptr) {
            return make_error(Errc::goal_error, "goal references unknown id: " + a.object_id);
        }
        if (a.kind != GoalAtomKind::at_position && s.find_object(a.target_id) == nullptr) {
            return make_error(Errc::goal_error, "goal references unknown id: " + a.target_id);
        }
    }
    if (s.detectors.empty()) {
        return make_error(Errc::scenario_error, "at least one detector profile required");
    }
    return ok_status();
}

}  // namespace tabletop
