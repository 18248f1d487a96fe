#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "tabletop/agents/agents.hpp"
#include "tabletop/detect/providers.hpp"
#include "tabletop/sim/simulator.hpp"

namespace tabletop {

/// Recovery budgets for the reflector-driven ladder. With the reflector
/// disabled the pipeline runs open loop and every budget acts as zero.
struct RecoveryConfig {
    int max_retries_same = 2;
    int max_reactivations = 1;
    int max_rescans = 1;
    bool reflector_enabled = true;
    bool single_agent_mode = false;

    bool operator==(const RecoveryConfig&) const = default;
};

Status validate_recovery_config(const RecoveryConfig& cfg);

enum class TaskOutcome { success, failure };

const char* to_string(TaskOutcome outcome);

struct FailureReport {
    std::string failed_subtask_id;
    std::vector<RecoveryAction> ladder_history;
    std::string last_explanation;

    bool operator==(const FailureReport&) const = default;
};

struct RunReport {
    std::vector<SubtaskRecord> subtasks;  // plan order
    TaskOutcome task_outcome = TaskOutcome::failure;
    std::optional<FailureReport> failure_report;
    std::optional<Errc> abort;  // transport/cassette aborts, never ladder failures

    bool operator==(const RunReport&) const = default;
};

void to_json(nlohmann::json& j, const RunReport& r);

/// All seven pipeline roles: five model-backed agents plus the grounder's
/// detection providers; the projector is pure geometry and the actor is the
/// environment itself.
struct AgentSet {
    Backend* decomposer = nullptr;
    Backend* descriptor = nullptr;
    Backend* perceptor = nullptr;
    Backend* thinker = nullptr;
    Backend* reflector = nullptr;
    std::vector<DetectionProvider*> providers;
    const InstructionSet* instructions = nullptr;

    /// Wires every model-backed role to one backend.
    static AgentSet uniform(Backend& backend, std::vector<DetectionProvider*> providers,
                            const InstructionSet& instructions);
};

/// kind is one of model / compute / env / ladder / episode.
using StageEmitter = std::function<void(std::string_view kind, std::string_view stage,
                                        const std::string& subtask_id, nlohmann::json payload)>;

struct RunHooks {
    StageEmitter emit;
    uint64_t seed = 0;  // drives grasp-angle sampling
};

/// Strict escalation on a failure verdict: retries while the same-subtask
/// budget lasts, then one targeted reactivation of the failing stage, then a
/// full scene rescan, then termination with a structured report.
RecoveryAction next_recovery(const TaskState& state, const ReflectionResult& last,
                             const RecoveryConfig& cfg);

/// One attempt of the current subtask: perceive, ground, project, think,
/// act, reflect. Stage failures come back as failure reflections charged to
/// the emitting stage; only transport/cassette misses surface as errors.
Result<ReflectionResult> step_subtask(TaskState& state, AgentSet& agents, Environment& env,
                                      const RecoveryConfig& cfg, const RunHooks& hooks = {});

/// Full closed-loop run: concurrent decompose/describe, then the sequential
/// subtask loop with reflector-driven recovery.
Result<RunReport> run_pipeline(TaskState& state, AgentSet& agents, Environment& env,
                               const RecoveryConfig& cfg, const RunHooks& hooks = {});

/// Ablation baseline: one monolithic backend call plans every action from
/// the initial observation; actions execute open loop.
Result<RunReport> run_single_agent(TaskState& state, Backend& backend, Environment& env,
                                   AgentSet& agents, const RunHooks& hooks = {});

/// Label -> estimated world position extracted from per-object masks and
/// the depth raster; the reflector's visual position feed.
std::map<std::string, Vec3> estimate_object_positions(const Observation& obs,
                                                      const Environment& env);

}  // namespace tabletop
