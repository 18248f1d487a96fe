#include "tabletop/sim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "tabletop/core/encoding.hpp"
#include "tabletop/geometry/projection.hpp"

namespace tabletop {

namespace {

// In the object frame: squares are |dx|,|dy| <= half, rounds are radial.
bool footprint_contains(const ScenarioObject& spec, const Pose& pose, double x, double y,
                        bool graspable_region) {
    const double dx = x - pose.x;
    const double dy = y - pose.y;
    const double half = spec.half_extent();
    switch (spec.shape) {
        case ShapeKind::block:
        case ShapeKind::pad: {
            const double c = std::cos(-pose.yaw);
            const double s = std::sin(-pose.yaw);
            const double lx = c * dx - s * dy;
            const double ly = s * dx + c * dy;
            return std::abs(lx) <= half && std::abs(ly) <= half;
        }
        case ShapeKind::cup:
        case ShapeKind::bowl: {
            const double r = std::hypot(dx, dy);
            if (!graspable_region) return r <= half;
            // Containers are grasped by the rim.
            return r >= 0.7 * half && r <= half;
        }
    }
    return false;
}

struct Surface {
    size_t object_index;
    double top_z;
    bool in_mask;        // contributes to the object's visibility mask
    bool annulus;        // rim ring instead of the full footprint
    double inner_scale;  // inner radius as a fraction of half extent
    std::array<uint8_t, 3> rgb;
};

}  // namespace

std::array<uint8_t, 3> color_rgb(const std::string& name) {
    if (name == "red") return {200, 40, 40};
    if (name == "green") return {40, 170, 60};
    if (name == "blue") return {50, 80, 210};
    if (name == "yellow") return {220, 200, 40};
    if (name == "orange") return {230, 130, 30};
    if (name == "purple") return {140, 60, 180};
    if (name == "wooden") return {165, 120, 70};
    if (name == "brown") return {120, 80, 50};
    if (name == "white") return {235, 235, 235};
    if (name == "black") return {25, 25, 25};
    if (name == "gray") return {128, 128, 128};
    if (name == "pink") return {230, 130, 170};
    const uint64_t h = fnv1a64(name);
    return {static_cast<uint8_t>(64 + (h & 0x7F)), static_cast<uint8_t>(64 + ((h >> 8) & 0x7F)),
            static_cast<uint8_t>(64 + ((h >> 16) & 0x7F))};
}

Simulator::Simulator(Scenario scenario, uint64_t seed_override, bool use_override)
    : scenario_(std::move(scenario)),
      camera_(scenario_.camera.to_camera_model()),
      seed_(use_override ? seed_override : scenario_.seed) {
    rng_.seed(mix_seed(seed_, 0));
    for (size_t i = 0; i < scenario_.objects.size(); ++i) {
        bodies_.push_back(Body{i, scenario_.objects[i].pose});
    }
    current_ = render();
}

Result<Observation> Simulator::reset() {
    if (auto st = validate_scenario(scenario_); !st.ok()) return st.error();
    bodies_.clear();
    for (size_t i = 0; i < scenario_.objects.size(); ++i) {
        bodies_.push_back(Body{i, scenario_.objects[i].pose});
    }
    rng_.seed(mix_seed(seed_, 0));
    step_count_ = 0;
    current_ = render();
    return current_;
}

Result<Observation> Simulator::observe() { return current_; }

Observation Simulator::render() const {
    const int w = scenario_.camera.image_width;
    const int h = scenario_.camera.image_height;
    const double cam_h = scenario_.camera.height_m;

    Observation obs;
    obs.rgb = RgbImage::filled(w, h, scenario_.table_rgb[0], scenario_.table_rgb[1],
                               scenario_.table_rgb[2]);
    obs.depth = DepthMap::filled(w, h, cam_h);
    obs.step_index = step_count_;

    std::vector<Surface> surfaces;
    for (const auto& body : bodies_) {
        const ScenarioObject& spec = spec_of(body);
        const auto rgb = color_rgb(spec.color);
        const bool container = spec.shape == ShapeKind::cup || spec.shape == ShapeKind::bowl;
        if (container) {
            // Interior floor first (darker, not part of the mask), rim on top.
            const std::array<uint8_t, 3> dim{static_cast<uint8_t>(rgb[0] / 2),
                                             static_cast<uint8_t>(rgb[1] / 2),
                                             static_cast<uint8_t>(rgb[2] / 2)};
            surfaces.push_back(
                Surface{body.object_index, body.pose.z - spec.interior_depth(), false, false, 0.0,
                        dim});
            surfaces.push_back(Surface{body.object_index, body.pose.z, true, true, 0.7, rgb});
        } else {
            surfaces.push_back(Surface{body.object_index, body.pose.z, true, false, 0.0, rgb});
        }
    }
    std::stable_sort(surfaces.begin(), surfaces.end(),
                     [](const Surface& a, const Surface& b) { return a.top_z < b.top_z; });

    std::vector<int> winner(static_cast<size_t>(w) * static_cast<size_t>(h), -1);

    for (const auto& surf : surfaces) {
        const Body& body = bodies_[surf.object_index];
        const ScenarioObject& spec = spec_of(body);
        const double z_axial = cam_h - surf.top_z;
        if (z_axial <= 0.0) continue;  // above the camera; nothing sensible to draw

        // Project the footprint's bounding square to a pixel window.
        const double r = spec.half_extent() * std::sqrt(2.0);
        int u_lo = w, u_hi = -1, v_lo = h, v_hi = -1;
        for (const double sx : {-r, r}) {
            for (const double sy : {-r, r}) {
                const auto px = project_to_pixel(
                    camera_, Vec3{body.pose.x + sx, body.pose.y + sy, surf.top_z});
                if (!px.ok()) continue;
                u_lo = std::min(u_lo, static_cast<int>(std::floor(px.value().u)));
                u_hi = std::max(u_hi, static_cast<int>(std::ceil(px.value().u)));
                v_lo = std::min(v_lo, static_cast<int>(std::floor(px.value().v)));
                v_hi = std::max(v_hi, static_cast<int>(std::ceil(px.value().v)));
            }
        }
        u_lo = std::max(u_lo, 0);
        v_lo = std::max(v_lo, 0);
        u_hi = std::min(u_hi, w - 1);
        v_hi = std::min(v_hi, h - 1);

        for (int v = v_lo; v <= v_hi; ++v) {
            for (int u = u_lo; u <= u_hi; ++u) {
                const auto world = backproject(camera_, u, v, z_axial);
                if (!world.ok()) continue;
                const double wx = world.value().x;
                const double wy = world.value().y;
                bool inside = footprint_contains(spec, body.pose, wx, wy, false);
                if (inside && surf.annulus) {
                    const double rad = std::hypot(wx - body.pose.x, wy - body.pose.y);
                    inside = rad >= surf.inner_scale * spec.half_extent();
                }
                if (!inside) continue;
                obs.depth.set(u, v, z_axial);
                obs.rgb.set(u, v, surf.rgb[0], surf.rgb[1], surf.rgb[2]);
                winner[static_cast<size_t>(v) * w + u] =
                    surf.in_mask ? static_cast<int>(surf.object_index) : -1;
            }
        }
    }

    for (const auto& body : bodies_) {
        obs.masks[spec_of(body).id] = BinaryMask::blank(w, h);
    }
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const int idx = winner[static_cast<size_t>(v) * w + u];
            if (idx >= 0) {
                obs.masks[scenario_.objects[static_cast<size_t>(idx)].id].set(u, v);
            }
        }
    }
    return obs;
}

Simulator::Body* Simulator::topmost_at(double x, double y, bool graspable) {
    Body* best = nullptr;
    for (auto& body : bodies_) {
        if (!footprint_contains(spec_of(body), body.pose, x, y, graspable)) continue;
        if (best == nullptr || body.pose.z > best->pose.z) best = &body;
    }
    return best;
}

double Simulator::settle_height(double x, double y, const Body* ignore, double height) const {
    double top = 0.0;
    for (const auto& body : bodies_) {
        if (&body == ignore) continue;
        if (footprint_contains(spec_of(body), body.pose, x, y, false)) {
            top = std::max(top, body.pose.z);
        }
    }
    return top + height;
}

Result<std::pair<Observation, ActuationResult>> Simulator::execute(const ActionCommand& cmd) {
    ActuationResult result;
    result.executed = false;
    result.dropped = false;
    result.final_object_pose = cmd.pick;

    if (!scenario_.workspace.contains(cmd.pick.x, cmd.pick.y) ||
        !scenario_.workspace.contains(cmd.place.x, cmd.place.y)) {
        return make_error(Errc::actuation_error, "command outside workspace bounds", Stage::actor);
    }

    switch (cmd.primitive) {
        case Verb::pick_place: {
            Body* body = topmost_at(cmd.pick.x, cmd.pick.y, true);
            if (body == nullptr) {
                break;  // no object grasped; reported via executed=false
            }
            result.executed = true;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            if (unit(rng_) < scenario_.failure_injection.p_drop) {
                result.dropped = true;
                const ScenarioObject& spec = spec_of(*body);
                const double margin = spec.half_extent();
                std::uniform_real_distribution<double> dx(scenario_.workspace.x_min + margin,
                                                          scenario_.workspace.x_max - margin);
                std::uniform_real_distribution<double> dy(scenario_.workspace.y_min + margin,
                                                          scenario_.workspace.y_max - margin);
                const double lx = dx(rng_);
                const double ly = dy(rng_);
                body->pose.x = lx;
                body->pose.y = ly;
                body->pose.z = settle_height(lx, ly, body, spec.height);
            } else {
                double px = cmd.place.x;
                double py = cmd.place.y;
                if (scenario_.failure_injection.displacement_sigma_m > 0.0) {
                    std::normal_distribution<double> noise(
                        0.0, scenario_.failure_injection.displacement_sigma_m);
                    px += noise(rng_);
                    py += noise(rng_);
                }
                body->pose.x = px;
                body->pose.y = py;
                body->pose.z = cmd.place.z;
                body->pose.yaw = normalize_yaw(cmd.place.yaw);
            }
            result.final_object_pose = body->pose;
            break;
        }
        case Verb::push: {
            Body* body = topmost_at(cmd.pick.x, cmd.pick.y, false);
            if (body == nullptr) break;
            result.executed = true;
            body->pose.x = cmd.place.x;
            body->pose.y = cmd.place.y;
            result.final_object_pose = body->pose;
            break;
        }
        case Verb::rotate: {
            Body* body = topmost_at(cmd.pick.x, cmd.pick.y, false);
            if (body == nullptr) break;
            result.executed = true;
            body->pose.yaw = normalize_yaw(cmd.place.yaw);
            result.final_object_pose = body->pose;
            break;
        }
        case Verb::move:
        case Verb::reach: {
            // Gripper motion only; the world is untouched.
            result.executed = true;
            result.final_object_pose = cmd.place;
            break;
        }
    }

    ++step_count_;
    current_ = render();
    return std::make_pair(current_, result);
}

std::vector<Detection> Simulator::oracle_detect(const std::vector<std::string>& labels,
                                                const DetectionNoise& noise,
                                                const std::string& source_id,
                                                uint64_t seed) const {
    std::vector<Detection> out;
    for (const auto& label : labels) {
        for (const auto& body : bodies_) {
            const ScenarioObject& spec = spec_of(body);
            if (spec.label != label) continue;
            const auto it = current_.masks.find(spec.id);
            if (it == current_.masks.end()) continue;
            const BinaryMask& mask = it->second;
            int u_lo = mask.width, u_hi = -1, v_lo = mask.height, v_hi = -1;
            for (int v = 0; v < mask.height; ++v) {
                for (int u = 0; u < mask.width; ++u) {
                    if (!mask.at(u, v)) continue;
                    u_lo = std::min(u_lo, u);
                    u_hi = std::max(u_hi, u);
                    v_lo = std::min(v_lo, v);
                    v_hi = std::max(v_hi, v);
                }
            }
            if (u_hi < 0) continue;  // fully occluded

            std::mt19937_64 rng(mix_seed(seed, fnv1a64(source_id + "/" + spec.id)));
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            if (noise.miss_rate > 0.0 && unit(rng) < noise.miss_rate) continue;

            Detection det;
            det.label = label;
            det.u_min = u_lo;
            det.v_min = v_lo;
            det.u_max = u_hi + 1;
            det.v_max = v_hi + 1;
            det.source = source_id;
            if (noise.bbox_jitter_px > 0.0) {
                std::uniform_real_distribution<double> jitter(-noise.bbox_jitter_px,
                                                              noise.bbox_jitter_px);
                det.u_min = std::clamp(det.u_min + jitter(rng), 0.0, mask.width - 2.0);
                det.v_min = std::clamp(det.v_min + jitter(rng), 0.0, mask.height - 2.0);
                det.u_max = std::clamp(det.u_max + jitter(rng), det.u_min + 1.0,
                                       static_cast<double>(mask.width));
                det.v_max = std::clamp(det.v_max + jitter(rng), det.v_min + 1.0,
                                       static_cast<double>(mask.height));
            }
            det.confidence = noise.conf_max > noise.conf_min
                                 ? noise.conf_min +
                                       unit(rng) * (noise.conf_max - noise.conf_min)
                                 : noise.conf_max;
            out.push_back(det);
        }
    }
    return out;
}

Result<bool> Simulator::check_goal() const { return check_goal(scenario_.goal); }

Result<bool> Simulator::check_goal(const GoalPredicate& goal) const {
    constexpr double kZAdjacency = 0.002;  // meters
    for (const auto& atom : goal.atoms) {
        const auto obj_pose = object_pose(atom.object_id);
        if (!obj_pose.ok()) return obj_pose.error();
        const ScenarioObject* obj = scenario_.find_object(atom.object_id);
        const double tol = atom.tolerance_m.value_or(goal.tolerance_m);

        switch (atom.kind) {
            case GoalAtomKind::at_position: {
                const double d = std::hypot(obj_pose.value().x - atom.x,
                                            obj_pose.value().y - atom.y);
                if (d > tol) return false;
                break;
            }
            case GoalAtomKind::on_top_of: {
                const auto target_pose = object_pose(atom.target_id);
                if (!target_pose.ok()) return target_pose.error();
                const double d = obj_pose.value().planar_distance(target_pose.value());
                if (d > tol) return false;
                const double bottom = obj_pose.value().z - obj->height;
                if (std::abs(bottom - target_pose.value().z) > kZAdjacency) return false;
                break;
            }
            case GoalAtomKind::inside: {
                const auto target_pose = object_pose(atom.target_id);
                if (!target_pose.ok()) return target_pose.error();
                const ScenarioObject* target = scenario_.find_object(atom.target_id);
                const double d = obj_pose.value().planar_distance(target_pose.value());
                if (d > std::max(tol, 0.5 * target->half_extent())) return false;
                const double bottom = obj_pose.value().z - obj->height;
                const double floor = target_pose.value().z - target->interior_depth();
                if (std::abs(bottom - floor) > kZAdjacency) return false;
                break;
            }
        }
    }
    return true;
}

Result<Pose> Simulator::object_pose(const std::string& id) const {
    for (const auto& body : bodies_) {
        if (spec_of(body).id == id) return body.pose;
    }
    return make_error(Errc::goal_error, "unknown object id: " + id);
}

}  // namespace tabletop
