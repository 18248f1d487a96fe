#pragma once

#include "tabletop/backends/backend.hpp"

namespace tabletop {

/// Chat-completions client over HTTP. One POST per call; the system message
/// carries the role instruction, the user message carries the canonical
/// payload plus an optional inline base64 image part. Transport failures get
/// `transport_retries` immediate retries before backend-unavailable.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig cfg);

    Result<AgentResponse> complete(const AgentRequest& req) override;

    /// Request body exactly as posted; exposed so tests can pin the wire shape.
    static nlohmann::json build_request_body(const AgentRequest& req, const BackendConfig& cfg);

    /// Env overrides: TABLETOP_API_KEY, TABLETOP_ENDPOINT.
    static BackendConfig apply_env_overrides(BackendConfig cfg);

private:
    BackendConfig cfg_;
    std::string host_;
    int port_ = 80;
    std::string base_path_;
};

}  // namespace tabletop
