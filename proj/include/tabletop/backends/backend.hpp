#pragma once

#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "tabletop/core/result.hpp"

namespace tabletop {

enum class Role { decomposer, descriptor, perceptor, thinker, reflector, single_agent };

const char* to_string(Role role);
std::optional<Role> role_from_string(const std::string& name);

/// One structured exchange with a model backend. The payload is a JSON
/// document; images ride along as raw raster bytes and are replaced by
/// their digest for hashing.
struct AgentRequest {
    Role role = Role::decomposer;
    std::string instruction_version;  // e.g. "v1"
    std::string system_instruction;
    nlohmann::json user_payload;
    std::optional<std::string> image_attachment;  // raw PPM bytes
};

struct AgentResponse {
    std::string raw_text;
    nlohmann::json parsed;  // filled by the role schema layer after validation
};

enum class BackendKind { http, scripted, replay, record };

const char* to_string(BackendKind kind);
std::optional<BackendKind> backend_kind_from_string(const std::string& name);

struct BackendConfig {
    BackendKind kind = BackendKind::scripted;
    std::string endpoint_url;  // http/record, e.g. "http://127.0.0.1:8080/v1"
    std::string model_name = "local-model";
    std::string api_key;
    double timeout_s = 30.0;
    int transport_retries = 1;
    double temperature = 0.0;
    std::string cassette_path;  // replay/record
    std::string fixture_path;   // scripted

    bool operator==(const BackendConfig&) const = default;
};

Status validate_backend_config(const BackendConfig& cfg);

class Backend {
public:
    virtual ~Backend() = default;
    virtual Result<AgentResponse> complete(const AgentRequest& req) = 0;
};

/// Stable digest over (role, instruction version, canonicalized payload).
/// Key order never matters; image bytes are replaced by their own digest;
/// timestamps are not part of any payload by construction.
std::string canonical_request_hash(const AgentRequest& req);

}  // namespace tabletop
