#pragma once

#include <map>

#include "tabletop/backends/backend.hpp"

namespace tabletop {

/// Deterministic backend answering from a fixture table keyed by
/// (role, canonical request hash). A missing key is a hard miss error,
/// never a fallback.
class FixtureBackend : public Backend {
public:
    FixtureBackend() = default;

    static Result<FixtureBackend> load(const std::string& fixture_path);

    void add(Role role, const std::string& request_hash, std::string response_text);

    /// Convenience for fixture authoring: registers the response under the
    /// hash the request would produce.
    void add_for(const AgentRequest& req, std::string response_text);

    Result<AgentResponse> complete(const AgentRequest& req) override;

    nlohmann::json to_json() const;
    Status save(const std::string& fixture_path) const;

private:
    std::map<std::string, std::string> entries_;  // "role:hash" -> response
};

}  // namespace tabletop
