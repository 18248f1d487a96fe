#pragma once

#include <optional>
#include <vector>

#include "tabletop/agents/fusion.hpp"
#include "tabletop/agents/prompts.hpp"
#include "tabletop/backends/backend.hpp"
#include "tabletop/core/state.hpp"

namespace tabletop {

struct DecompositionOutcome {
    std::vector<AtomicInstruction> instructions;  // ids "s0", "s1", ... in plan order
    bool multi_object = false;
};

/// Per-object context handed to the thinker: fresh grasp geometry plus the
/// static metadata needed for the stacking height rule.
struct ThinkObject {
    std::string label;
    std::string node_id;
    GraspPoint3D grasp;
    double height = 0.0;
    double interior_depth = 0.0;
    double extent_half = 0.0;
    GeometryClass geometry_class = GeometryClass::flat;
};

/// Everything the reflector sees: the executed plan, the actuation echo and
/// per-label position estimates extracted from the before/after frames.
struct ReflectContext {
    AtomicInstruction subtask;
    ActionPlan plan;
    ActuationResult actuation;
    std::map<std::string, Vec3> before_positions;  // label -> estimated position
    std::map<std::string, Vec3> after_positions;
    std::map<std::string, double> extents;  // label -> half extent, meters
    double tolerance_m = 0.01;
    int before_step = 0;
    int after_step = 0;
};

/// Case-insensitive exact-then-substring match of a query against labels.
std::optional<std::string> match_label(const std::string& query,
                                       const std::vector<std::string>& labels);

// Request builders are exposed so fixtures, cassette tooling and mock
// servers can reproduce the exact payloads.
AgentRequest build_decompose_request(const std::string& prompt, const InstructionSet& instr);
AgentRequest build_describe_request(const Observation& obs, const InstructionSet& instr);
AgentRequest build_perceive_request(const AtomicInstruction& subtask, const SceneGraph& graph,
                                    const InstructionSet& instr);
AgentRequest build_think_request(const AtomicInstruction& subtask,
                                 const std::vector<ThinkObject>& objects, const SceneGraph& graph,
                                 const std::optional<ActionPlan>& prior_plan,
                                 const InstructionSet& instr);
AgentRequest build_reflect_request(const ReflectContext& ctx, const InstructionSet& instr);
AgentRequest build_single_agent_request(const std::string& prompt,
                                        const std::vector<ThinkObject>& objects,
                                        const InstructionSet& instr);

// Response parsers validate against the role schema; anything that does not
// validate is a schema violation, never silently coerced.
Result<DecompositionOutcome> parse_decomposer_response(const std::string& raw);
Result<SceneGraph> parse_descriptor_response(const std::string& raw);
Result<PerceptionTargets> parse_perceptor_response(const std::string& raw);
Result<ActionPlan> parse_thinker_response(const std::string& raw, const std::string& subtask_id,
                                          Verb expected_primitive);
Result<ReflectionResult> parse_reflector_response(const std::string& raw,
                                                  const std::string& subtask_id);
Result<std::vector<ActionPlan>> parse_single_agent_response(const std::string& raw);

Result<DecompositionOutcome> decompose(const std::string& prompt, Backend& backend,
                                       const InstructionSet& instr);
Result<SceneGraph> describe(const Observation& obs, Backend& backend,
                            const InstructionSet& instr);
Result<PerceptionTargets> perceive(const AtomicInstruction& subtask, const SceneGraph& graph,
                                   Backend& backend, const InstructionSet& instr);
Result<ActionPlan> think(const AtomicInstruction& subtask, const std::vector<ThinkObject>& objects,
                         const SceneGraph& graph, const std::optional<ActionPlan>& prior_plan,
                         Backend& backend, const InstructionSet& instr);
Result<ReflectionResult> reflect(const ReflectContext& ctx, Backend& backend,
                                 const InstructionSet& instr);
Result<std::vector<ActionPlan>> single_agent_plan(const std::string& prompt,
                                                  const std::vector<ThinkObject>& objects,
                                                  Backend& backend, const InstructionSet& instr);

}  // namespace tabletop
