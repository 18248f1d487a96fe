#pragma once

#include <nlohmann/json.hpp>

#include "tabletop/backends/backend.hpp"
#include "tabletop/sim/simulator.hpp"

namespace tabletop {

// Deterministic stand-ins for the model-backed roles. Every rule except the
// descriptor is a pure function of the request payload, so the same logic
// can sit behind an in-process backend or a mock completions server.

nlohmann::json oracle_perceive_response(const nlohmann::json& payload);
nlohmann::json oracle_think_response(const nlohmann::json& payload);
nlohmann::json oracle_reflect_response(const nlohmann::json& payload);
nlohmann::json oracle_single_agent_response(const nlohmann::json& payload,
                                            const nlohmann::json& plan);

/// Scene graph built from simulator ground truth: nodes for every object,
/// relations from projected image-plane centroids plus physical stacking
/// and containment.
nlohmann::json oracle_describe_response(const Simulator& sim);

/// Scenario-bound deterministic backend serving all roles: the scripted
/// decomposition comes from the scenario, the scene graph from the simulator
/// and everything else from the payload rules.
class OracleBackend : public Backend {
public:
    OracleBackend(Simulator& sim, nlohmann::json plan);

    Result<AgentResponse> complete(const AgentRequest& req) override;

private:
    Simulator& sim_;
    nlohmann::json plan_;
};

}  // namespace tabletop
