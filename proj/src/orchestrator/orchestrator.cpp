#include "tabletop/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <future>

#include "tabletop/core/encoding.hpp"
#include "tabletop/core/json_io.hpp"
#include "tabletop/geometry/mask_ops.hpp"
#include "tabletop/geometry/projection.hpp"

namespace tabletop {

namespace {

using nlohmann::json;

enum Phase : int { kPerceive = 0, kGround = 1, kProject = 2, kThink = 3, kAct = 4 };

Phase phase_for_stage(Stage stage) {
    switch (stage) {
        case Stage::grounder: return kGround;
        case Stage::projector: return kProject;
        case Stage::thinker: return kThink;
        case Stage::actor: return kAct;
        default: return kPerceive;
    }
}

bool is_abort(const Error& e) {
    return e.code == Errc::backend_unavailable || e.code == Errc::cassette_miss ||
           e.code == Errc::fixture_miss;
}

Stage stage_of(const Error& e, Stage fallback) {
    return e.stage != Stage::none ? e.stage : fallback;
}

void emit(const RunHooks& hooks, std::string_view kind, std::string_view stage,
          const std::string& subtask_id, json payload) {
    if (hooks.emit) hooks.emit(kind, stage, subtask_id, std::move(payload));
}

ReflectionResult synthesize_failure(const std::string& sid, Stage stage,
                                    const std::string& message) {
    auto made = make_reflection_result(
        sid, Verdict::failure, stage == Stage::none ? Stage::actor : stage,
        message.empty() ? "stage failed without detail" : message);
    return std::move(made).value();
}

struct BoundingBox {
    double u_min, v_min, u_max, v_max;
};

std::optional<BoundingBox> mask_bbox(const BinaryMask& mask) {
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
    if (u_hi < 0) return std::nullopt;
    return BoundingBox{static_cast<double>(u_lo), static_cast<double>(v_lo),
                       static_cast<double>(u_hi + 1), static_cast<double>(v_hi + 1)};
}

double box_iou(const BoundingBox& a, const Detection& d) {
    const double iu = std::max(0.0, std::min(a.u_max, d.u_max) - std::max(a.u_min, d.u_min));
    const double iv = std::max(0.0, std::min(a.v_max, d.v_max) - std::max(a.v_min, d.v_min));
    const double inter = iu * iv;
    const double uni = (a.u_max - a.u_min) * (a.v_max - a.v_min) +
                       (d.u_max - d.u_min) * (d.v_max - d.v_min) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

const ScenarioObject* scenario_object_by_id(const Environment& env, const std::string& id) {
    return env.scenario().find_object(id);
}

// Runs perceive .. reflect starting at `start`; earlier stage outputs are
// reused from the state (reactivation leaves them intentionally stale).
Result<ReflectionResult> run_attempt(TaskState& state, AgentSet& agents, Environment& env,
                                     const RecoveryConfig& cfg, const RunHooks& hooks,
                                     Phase start) {
    const AtomicInstruction subtask = *state.current;
    const std::string& sid = subtask.id;
    const int attempt = ++state.attempt_counts[sid];
    const InstructionSet& instr = *agents.instructions;
    const Observation before = *state.observation;

    const auto record_failure = [&](const Error& e, Stage fallback) -> ReflectionResult {
        ReflectionResult refl = synthesize_failure(sid, stage_of(e, fallback), e.message);
        if (cfg.reflector_enabled) state.reflection_output[sid] = refl;
        return refl;
    };

    if (start <= kPerceive) {
        if (!state.scene_graph) {
            return record_failure(
                make_error(Errc::perception_miss, "no scene graph available", Stage::perceptor),
                Stage::perceptor);
        }
        auto targets = perceive(subtask, *state.scene_graph, *agents.perceptor, instr);
        emit(hooks, "model", "perceive", sid,
             targets.ok() ? json{{"object_of_interest", targets.value().object_of_interest},
                                 {"attempt", attempt}}
                          : json{{"error", targets.error().message}, {"attempt", attempt}});
        if (!targets.ok()) {
            if (is_abort(targets.error())) return targets.error();
            return record_failure(targets.error(), Stage::perceptor);
        }
        state.object_of_interest = targets.value().object_of_interest;
        state.not_object_of_interest = targets.value().not_object_of_interest;
        state.all_objects = targets.value().all_objects;
    }

    if (start <= kGround) {
        std::map<std::string, std::vector<Detection>> per_source;
        for (DetectionProvider* provider : agents.providers) {
            DetectionQuery query;
            query.labels = state.all_objects;
            query.observation = &*state.observation;
            query.source_hint = provider->id();
            auto dets = provider->detect(query);
            if (!dets.ok()) {
                emit(hooks, "env", "provider_fault", sid,
                     json{{"provider", provider->id()}, {"error", dets.error().message}});
                continue;
            }
            per_source[provider->id()] = std::move(dets).value();
        }
        PerceptionTargets targets{state.object_of_interest, state.not_object_of_interest,
                                  state.all_objects};
        auto fused = fuse_detections(per_source, targets, *state.scene_graph,
                                     state.observation->rgb.width,
                                     state.observation->rgb.height);
        emit(hooks, "compute", "ground", sid,
             fused.ok() ? json{{"sources", per_source.size()},
                               {"fused", fused.value().size()},
                               {"attempt", attempt}}
                        : json{{"error", fused.error().message}, {"attempt", attempt}});
        if (!fused.ok()) return record_failure(fused.error(), Stage::grounder);
        state.grounder_output = std::move(fused).value();
    }

    if (start <= kProject) {
        state.grasp_points_2d.clear();
        state.grasp_points_3d.clear();
        for (const auto& det : state.grounder_output) {
            // Segmentation stand-in: the observation mask best overlapping
            // the fused bbox.
            const BinaryMask* mask = nullptr;
            std::string mask_id;
            double best = 0.0;
            for (const auto& [id, m] : state.observation->masks) {
                const auto bbox = mask_bbox(m);
                if (!bbox) continue;
                const double iou = box_iou(*bbox, det);
                if (iou > best) {
                    best = iou;
                    mask = &m;
                    mask_id = id;
                }
            }
            const bool critical = det.label == state.object_of_interest;
            if (mask == nullptr) {
                if (!critical) continue;
                return record_failure(make_error(Errc::projector_error,
                                                 "no segmentation mask under the detection",
                                                 Stage::projector),
                                      Stage::projector);
            }
            GeometryClass cls = GeometryClass::irregular;
            if (const ObjectNode* node = state.scene_graph->find_by_label(det.label)) {
                cls = node->geometry_class;
            }
            const uint64_t seed =
                mix_seed(mix_seed(hooks.seed, fnv1a64(sid + "/" + det.label)),
                         static_cast<uint64_t>(attempt));
            auto gp2 = grasp_point_2d(*mask, cls, seed, mask_id);
            if (!gp2.ok()) {
                if (!critical) continue;
                return record_failure(gp2.error(), Stage::projector);
            }
            auto gp3 = grasp_point_3d(gp2.value(), state.observation->depth, env.camera());
            if (!gp3.ok()) {
                if (!critical) continue;
                return record_failure(gp3.error(), Stage::projector);
            }
            state.grasp_points_2d.push_back(gp2.value());
            state.grasp_points_3d.push_back(gp3.value());
        }
        emit(hooks, "compute", "project", sid,
             json{{"grasp_points", state.grasp_points_3d.size()}, {"attempt", attempt}});
    }

    ActionPlan plan;
    if (start <= kThink) {
        std::vector<ThinkObject> objects;
        for (const auto& gp : state.grasp_points_3d) {
            const ScenarioObject* spec = scenario_object_by_id(env, gp.object_id);
            if (spec == nullptr) continue;
            ThinkObject obj;
            obj.label = spec->label;
            obj.node_id = gp.object_id;
            if (const ObjectNode* node = state.scene_graph->find_by_label(spec->label)) {
                obj.node_id = node->id;
                obj.geometry_class = node->geometry_class;
            }
            obj.grasp = gp;
            obj.height = spec->height;
            obj.interior_depth = spec->interior_depth();
            obj.extent_half = spec->half_extent();
            objects.push_back(std::move(obj));
        }
        std::optional<ActionPlan> prior;
        if (const auto it = state.thinker_output.find(sid); it != state.thinker_output.end()) {
            prior = it->second;
        }
        auto thought = think(subtask, objects, *state.scene_graph, prior, *agents.thinker, instr);
        emit(hooks, "model", "think", sid,
             thought.ok() ? json{{"plan", thought.value()}, {"attempt", attempt}}
                          : json{{"error", thought.error().message}, {"attempt", attempt}});
        if (!thought.ok()) {
            if (is_abort(thought.error())) return thought.error();
            return record_failure(thought.error(), Stage::thinker);
        }
        state.thinker_output[sid] = thought.value();
    }
    {
        const auto it = state.thinker_output.find(sid);
        if (it == state.thinker_output.end()) {
            return record_failure(
                make_error(Errc::thinker_error, "no plan available for reactivated actor",
                           Stage::thinker),
                Stage::thinker);
        }
        plan = it->second;
    }

    {
        ActionCommand cmd{plan.primitive, plan.pick_pose, plan.place_pose};
        auto outcome = env.execute(cmd);
        if (!outcome.ok()) {
            emit(hooks, "env", "act", sid,
                 json{{"error", outcome.error().message}, {"attempt", attempt}});
            return record_failure(outcome.error(), Stage::actor);
        }
        state.observation = outcome.value().first;
        ActuationResult actuation = outcome.value().second;
        actuation.subtask_id = sid;
        state.actor_output[sid] = actuation;
        emit(hooks, "env", "act", sid,
             json{{"executed", actuation.executed},
                  {"dropped", actuation.dropped},
                  {"final", actuation.final_object_pose},
                  {"attempt", attempt}});
    }

    if (!cfg.reflector_enabled) {
        const ActuationResult& actuation = state.actor_output[sid];
        const bool passed = actuation.executed && !actuation.dropped;
        auto open_loop = make_reflection_result(
            sid, passed ? Verdict::success : Verdict::failure,
            passed ? Stage::none : Stage::actor,
            passed ? "" : "actuation reported a drop or an empty grasp");
        return std::move(open_loop).value();
    }

    ReflectContext ctx;
    ctx.subtask = subtask;
    ctx.plan = plan;
    ctx.actuation = state.actor_output[sid];
    ctx.tolerance_m = env.scenario().goal.tolerance_m;
    ctx.before_positions = estimate_object_positions(before, env);
    ctx.after_positions = estimate_object_positions(*state.observation, env);
    for (const auto& spec : env.scenario().objects) {
        ctx.extents[spec.label] = spec.half_extent();
    }
    ctx.before_step = before.step_index;
    ctx.after_step = state.observation->step_index;

    auto verdict = reflect(ctx, *agents.reflector, instr);
    if (!verdict.ok()) {
        // Without a verdict the ladder cannot attribute anything; treat as a
        // run-level fault like a transport error.
        emit(hooks, "model", "reflect", sid, json{{"error", verdict.error().message}});
        return verdict.error();
    }
    emit(hooks, "model", "reflect", sid,
         json{{"verdict", to_string(verdict.value().verdict)},
              {"failing_stage", to_string(verdict.value().failing_stage)},
              {"attempt", attempt}});
    state.reflection_output[sid] = verdict.value();
    return verdict;
}

Result<SceneGraph> redescribe(TaskState& state, AgentSet& agents, Environment& env,
                              const RunHooks& hooks) {
    auto obs = env.observe();
    if (!obs.ok()) return obs.error();
    state.observation = obs.value();
    auto graph = describe(*state.observation, *agents.descriptor, *agents.instructions);
    emit(hooks, "model", "describe", "",
         graph.ok() ? json{{"nodes", graph.value().nodes().size()},
                           {"edges", graph.value().edges().size()},
                           {"rescan", true}}
                    : json{{"error", graph.error().message}, {"rescan", true}});
    return graph;
}

RunReport finalize_report(TaskState& state) {
    RunReport report;
    for (const auto& instr : state.decomposed_prompts) {
        const auto it = state.results.find(instr.id);
        if (it != state.results.end()) {
            report.subtasks.push_back(it->second);
        } else {
            report.subtasks.push_back(SubtaskRecord{instr.id, 0, SubtaskOutcome::skipped});
        }
    }
    report.task_outcome =
        !report.subtasks.empty() &&
                std::all_of(report.subtasks.begin(), report.subtasks.end(),
                            [](const SubtaskRecord& r) {
                                return r.outcome == SubtaskOutcome::success;
                            })
            ? TaskOutcome::success
            : TaskOutcome::failure;
    return report;
}

}  // namespace

Status validate_recovery_config(const RecoveryConfig& cfg) {
    if (cfg.max_retries_same < 0 || cfg.max_reactivations < 0 || cfg.max_rescans < 0) {
        return make_error(Errc::config_error, "recovery budgets must be non-negative");
    }
    return ok_status();
}

const char* to_string(TaskOutcome outcome) {
    return outcome == TaskOutcome::success ? "success" : "failure";
}

void to_json(json& j, const RunReport& r) {
    j = json{{"subtasks", r.subtasks}, {"task_outcome", to_string(r.task_outcome)}};
    if (r.failure_report) {
        j["failure_report"] = json{{"failed_subtask_id", r.failure_report->failed_subtask_id},
                                   {"ladder_history", r.failure_report->ladder_history},
                                   {"last_explanation", r.failure_report->last_explanation}};
    }
    if (r.abort) j["abort"] = to_string(*r.abort);
}

AgentSet AgentSet::uniform(Backend& backend, std::vector<DetectionProvider*> providers,
                           const InstructionSet& instructions) {
    AgentSet set;
    set.decomposer = &backend;
    set.descriptor = &backend;
    set.perceptor = &backend;
    set.thinker = &backend;
    set.reflector = &backend;
    set.providers = std::move(providers);
    set.instructions = &instructions;
    return set;
}

std::map<std::string, Vec3> estimate_object_positions(const Observation& obs,
                                                      const Environment& env) {
    std::map<std::string, Vec3> out;
    for (const auto& spec : env.scenario().objects) {
        const auto it = obs.masks.find(spec.id);
        if (it == obs.masks.end()) continue;
        auto center = centroid(it->second);
        if (!center.ok()) continue;
        const int pu = static_cast<int>(std::nearbyint(center.value().u));
        const int pv = static_cast<int>(std::nearbyint(center.value().v));
        if (!obs.depth.in_bounds(pu, pv)) continue;
        auto world = backproject(env.camera(), center.value().u, center.value().v,
                                 obs.depth.at(pu, pv));
        if (!world.ok()) continue;
        out[spec.label] = world.value();
    }
    return out;
}

RecoveryAction next_recovery(const TaskState& state, const ReflectionResult& last,
                             const RecoveryConfig& cfg) {
    const auto attempts_it = state.attempt_counts.find(last.subtask_id);
    const int attempts = attempts_it == state.attempt_counts.end() ? 0 : attempts_it->second;
    if (attempts <= cfg.max_retries_same) {
        return RecoveryAction{RecoveryKind::retry_subtask, Stage::none};
    }
    const auto reacts_it = state.reactivation_counts.find(last.subtask_id);
    const int reacts = reacts_it == state.reactivation_counts.end() ? 0 : reacts_it->second;
    if (reacts < cfg.max_reactivations) {
        const Stage stage =
            last.failing_stage == Stage::none ? Stage::actor : last.failing_stage;
        return RecoveryAction{RecoveryKind::reactivate, stage};
    }
    if (state.rescan_count < cfg.max_rescans) {
        return RecoveryAction{RecoveryKind::rescan_scene, Stage::none};
    }
    return RecoveryAction{RecoveryKind::terminate_failure, Stage::none};
}

Result<ReflectionResult> step_subtask(TaskState& state, AgentSet& agents, Environment& env,
                                      const RecoveryConfig& cfg, const RunHooks& hooks) {
    if (!state.current) {
        return make_error(Errc::invalid_input, "step_subtask requires a current subtask");
    }
    if (!state.observation) {
        auto obs = env.observe();
        if (!obs.ok()) return obs.error();
        state.observation = obs.value();
    }
    return run_attempt(state, agents, env, cfg, hooks, kPerceive);
}

Result<RunReport> run_pipeline(TaskState& state, AgentSet& agents, Environment& env,
                               const RecoveryConfig& cfg, const RunHooks& hooks) {
    if (auto st = validate_recovery_config(cfg); !st.ok()) return st.error();
    if (agents.instructions == nullptr || agents.decomposer == nullptr) {
        return make_error(Errc::config_error, "agent set is incomplete");
    }

    const auto abort_run = [&](const std::string& sid, std::vector<RecoveryAction> history,
                               const Error& e) {
        state.should_terminate = true;
        if (!sid.empty()) {
            state.results[sid] =
                SubtaskRecord{sid, state.attempt_counts[sid], SubtaskOutcome::failed};
        }
        while (!state.queue.empty()) {
            state.results[state.queue.front().id] =
                SubtaskRecord{state.queue.front().id, 0, SubtaskOutcome::skipped};
            state.queue.erase(state.queue.begin());
        }
        RunReport report = finalize_report(state);
        report.task_outcome = TaskOutcome::failure;
        report.failure_report = FailureReport{sid, std::move(history), e.message};
        report.abort = e.code;
        return report;
    };

    if (!state.initial_decomposition_done) {
        auto obs = env.reset();
        if (!obs.ok()) return obs.error();
        state.observation = obs.value();
        emit(hooks, "env", "reset", "", json{{"step_index", state.observation->step_index}});

        // Decomposer and descriptor run concurrently and join here.
        auto decomposition_future = std::async(std::launch::async, [&]() {
            return decompose(state.original_prompt, *agents.decomposer, *agents.instructions);
        });
        auto graph_future = std::async(std::launch::async, [&]() {
            return describe(*state.observation, *agents.descriptor, *agents.instructions);
        });
        auto decomposition = decomposition_future.get();
        auto graph = graph_future.get();

        emit(hooks, "model", "decompose", "",
             decomposition.ok()
                 ? json{{"subtasks", decomposition.value().instructions.size()},
                        {"multi_object", decomposition.value().multi_object}}
                 : json{{"error", decomposition.error().message}});
        emit(hooks, "model", "describe", "",
             graph.ok() ? json{{"nodes", graph.value().nodes().size()},
                               {"edges", graph.value().edges().size()}}
                        : json{{"error", graph.error().message}});

        if (!decomposition.ok()) return abort_run("", {}, decomposition.error());
        if (!graph.ok()) return abort_run("", {}, graph.error());

        state.decomposed_prompts = decomposition.value().instructions;
        state.queue = decomposition.value().instructions;
        state.multi_object = decomposition.value().multi_object;
        state.initial_decomposition_done = true;
        state.scene_graph = std::move(graph).value();
    }

    while (!state.queue.empty() && !state.should_terminate) {
        state.current = state.queue.front();
        state.queue.erase(state.queue.begin());
        const std::string sid = state.current->id;
        std::vector<RecoveryAction> ladder_history;
        Phase start = kPerceive;

        while (true) {
            auto attempt = run_attempt(state, agents, env, cfg, hooks, start);
            if (!attempt.ok()) {
                return abort_run(sid, std::move(ladder_history), attempt.error());
            }
            const ReflectionResult& reflection = attempt.value();

            if (!cfg.reflector_enabled) {
                state.results[sid] = SubtaskRecord{
                    sid, state.attempt_counts[sid],
                    reflection.verdict == Verdict::success ? SubtaskOutcome::success
                                                           : SubtaskOutcome::failed};
                state.current.reset();
                break;  // open loop: no recovery, keep executing the sequence
            }

            if (reflection.verdict == Verdict::success) {
                state.results[sid] =
                    SubtaskRecord{sid, state.attempt_counts[sid], SubtaskOutcome::success};
                state.current.reset();
                break;
            }

            const RecoveryAction action = next_recovery(state, reflection, cfg);
            ladder_history.push_back(action);
            emit(hooks, "ladder", "recovery", sid,
                 json{{"action", action},
                      {"attempts", state.attempt_counts[sid]},
                      {"failing_stage", to_string(reflection.failing_stage)}});

            if (action.kind == RecoveryKind::retry_subtask) {
                start = kPerceive;
                continue;
            }
            if (action.kind == RecoveryKind::reactivate) {
                ++state.reactivation_counts[sid];
                if (action.stage == Stage::descriptor || action.stage == Stage::decomposer) {
                    auto graph = redescribe(state, agents, env, hooks);
                    if (!graph.ok()) {
                        return abort_run(sid, std::move(ladder_history), graph.error());
                    }
                    state.scene_graph = std::move(graph).value();
                    start = kPerceive;
                } else {
                    start = phase_for_stage(action.stage);
                }
                continue;
            }
            if (action.kind == RecoveryKind::rescan_scene) {
                ++state.rescan_count;
                state.scene_graph.reset();
                state.grounder_output.clear();
                state.grasp_points_2d.clear();
                state.grasp_points_3d.clear();
                state.thinker_output.erase(sid);
                auto graph = redescribe(state, agents, env, hooks);
                if (!graph.ok()) {
                    return abort_run(sid, std::move(ladder_history), graph.error());
                }
                state.scene_graph = std::move(graph).value();
                start = kPerceive;
                continue;
            }

            // terminate_failure
            state.results[sid] =
                SubtaskRecord{sid, state.attempt_counts[sid], SubtaskOutcome::failed};
            state.current.reset();
            state.should_terminate = true;
            RunReport report;
            while (!state.queue.empty()) {
                state.results[state.queue.front().id] =
                    SubtaskRecord{state.queue.front().id, 0, SubtaskOutcome::skipped};
                state.queue.erase(state.queue.begin());
            }
            report = finalize_report(state);
            report.failure_report =
                FailureReport{sid, std::move(ladder_history), reflection.explanation};
            return report;
        }
    }

    return finalize_report(state);
}

Result<RunReport> run_single_agent(TaskState& state, Backend& backend, Environment& env,
                                   AgentSet& agents, const RunHooks& hooks) {
    auto obs = env.reset();
    if (!obs.ok()) return obs.error();
    state.observation = obs.value();
    emit(hooks, "env", "reset", "", json{{"step_index", state.observation->step_index}});

    std::vector<std::string> labels;
    for (const auto& spec : env.scenario().objects) labels.push_back(spec.label);

    std::map<std::string, std::vector<Detection>> per_source;
    for (DetectionProvider* provider : agents.providers) {
        DetectionQuery query;
        query.labels = labels;
        query.observation = &*state.observation;
        query.source_hint = provider->id();
        auto dets = provider->detect(query);
        if (!dets.ok()) {
            emit(hooks, "env", "provider_fault", "",
                 json{{"provider", provider->id()}, {"error", dets.error().message}});
            continue;
        }
        per_source[provider->id()] = std::move(dets).value();
    }
    PerceptionTargets all_targets{"", "", labels};
    SceneGraph empty_graph;
    auto fused = fuse_detections(per_source, all_targets, empty_graph,
                                 state.observation->rgb.width, state.observation->rgb.height);
    if (!fused.ok()) {
        RunReport report;
        report.task_outcome = TaskOutcome::failure;
        report.failure_report = FailureReport{"", {}, fused.error().message};
        return report;
    }

    std::vector<ThinkObject> objects;
    for (const auto& det : fused.value()) {
        const BinaryMask* mask = nullptr;
        std::string mask_id;
        double best = 0.0;
        for (const auto& [id, m] : state.observation->masks) {
            const auto bbox = mask_bbox(m);
            if (!bbox) continue;
            const double iou = box_iou(*bbox, det);
            if (iou > best) {
                best = iou;
                mask = &m;
                mask_id = id;
            }
        }
        if (mask == nullptr) continue;
        const ScenarioObject* spec = env.scenario().find_object(mask_id);
        if (spec == nullptr) continue;
        const uint64_t seed = mix_seed(hooks.seed, fnv1a64("single/" + det.label));
        auto gp2 = grasp_point_2d(*mask, spec->geometry_class, seed, mask_id);
        if (!gp2.ok()) continue;
        auto gp3 = grasp_point_3d(gp2.value(), state.observation->depth, env.camera());
        if (!gp3.ok()) continue;
        ThinkObject obj;
        obj.label = spec->label;
        obj.node_id = spec->id;
        obj.grasp = gp3.value();
        obj.height = spec->height;
        obj.interior_depth = spec->interior_depth();
        obj.extent_half = spec->half_extent();
        obj.geometry_class = spec->geometry_class;
        objects.push_back(std::move(obj));
    }

    auto plans = single_agent_plan(state.original_prompt, objects, backend,
                                   *agents.instructions);
    emit(hooks, "model", "single_agent", "",
         plans.ok() ? json{{"actions", plans.value().size()}}
                    : json{{"error", plans.error().message}});
    if (!plans.ok()) {
        RunReport report;
        report.task_outcome = TaskOutcome::failure;
        report.failure_report = FailureReport{"", {}, plans.error().message};
        if (is_abort(plans.error())) report.abort = plans.error().code;
        return report;  // schema gate: zero actuations
    }

    RunReport report;
    bool all_ok = true;
    for (const auto& plan : plans.value()) {
        ActionCommand cmd{plan.primitive, plan.pick_pose, plan.place_pose};
        auto outcome = env.execute(cmd);
        if (!outcome.ok()) {
            emit(hooks, "env", "act", plan.subtask_id,
                 json{{"error", outcome.error().message}});
            report.subtasks.push_back(SubtaskRecord{plan.subtask_id, 1, SubtaskOutcome::failed});
            all_ok = false;
            continue;
        }
        state.observation = outcome.value().first;
        ActuationResult actuation = outcome.value().second;
        actuation.subtask_id = plan.subtask_id;
        state.actor_output[plan.subtask_id] = actuation;
        state.attempt_counts[plan.subtask_id] = 1;
        emit(hooks, "env", "act", plan.subtask_id,
             json{{"executed", actuation.executed},
                  {"dropped", actuation.dropped},
                  {"final", actuation.final_object_pose}});
        const bool passed = actuation.executed && !actuation.dropped;
        report.subtasks.push_back(SubtaskRecord{plan.subtask_id, 1,
                                                passed ? SubtaskOutcome::success
                                                       : SubtaskOutcome::failed});
        state.results[plan.subtask_id] = report.subtasks.back();
        all_ok = all_ok && passed;
    }
    report.task_outcome = all_ok ? TaskOutcome::success : TaskOutcome::failure;
    return report;
}

}  // namespace tabletop
