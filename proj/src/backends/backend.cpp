#include "tabletop/backends/backend.hpp"

#include "tabletop/core/encoding.hpp"

namespace tabletop {

const char* to_string(Role role) {
    switch (role) {
        case Role::decomposer: return "decomposer";
        case Role::descriptor: return "descriptor";
        case Role::perceptor: return "perceptor";
        case Role::thinker: return "thinker";
        case Role::reflector: return "reflector";
        case Role::single_agent: return "single_agent";
    }
    return "decomposer";
}

std::optional<Role> role_from_string(const std::string& name) {
    for (const Role r : {Role::decomposer, Role::descriptor, Role::perceptor, Role::thinker,
                         Role::reflector, Role::single_agent}) {
        if (name == to_string(r)) return r;
    }
    return std::nullopt;
}

const char* to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::http: return "http";
        case BackendKind::scripted: return "scripted";
        case BackendKind::replay: return "replay";
        case BackendKind::record: return "record";
    }
    return "scripted";
}

std::optional<BackendKind> backend_kind_from_string(const std::string& name) {
    for (const BackendKind k :
         {BackendKind::http, BackendKind::scripted, BackendKind::replay, BackendKind::record}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

Status validate_backend_config(const BackendConfig& cfg) {
    if (!(cfg.timeout_s > 0.0)) {
        return make_error(Errc::config_error, "backend timeout must be positive");
    }
    if (cfg.transport_retries < 0) {
        return make_error(Errc::config_error, "transport retries must be non-negative");
    }
    switch (cfg.kind) {
        case BackendKind::http:
            if (cfg.endpoint_url.empty()) {
                return make_error(Errc::config_error, "http backend requires endpoint_url");
            }
            break;
        case BackendKind::record:
            if (cfg.endpoint_url.empty() || cfg.cassette_path.empty()) {
                return make_error(Errc::config_error,
                                  "record backend requires endpoint_url and cassette_path");
            }
            break;
        case BackendKind::replay:
            if (cfg.cassette_path.empty()) {
                return make_error(Errc::config_error, "replay backend requires cassette_path");
            }
            break;
        case BackendKind::scripted:
            break;  // fixture_path optional; scenario-bound oracles need none
    }
    return ok_status();
}

std::string canonical_request_hash(const AgentRequest& req) {
    nlohmann::json payload = req.user_payload;
    if (req.image_attachment) {
        payload["__image_digest"] = hex64(fnv1a64(*req.image_attachment));
    }
    // nlohmann objects iterate in sorted key order, so dump() is canonical.
    const std::string material = std::string(to_string(req.role)) + "\x1f" +
                                 req.instruction_version + "\x1f" + payload.dump();
    return hex64(fnv1a64(material));
}

}  // namespace tabletop
