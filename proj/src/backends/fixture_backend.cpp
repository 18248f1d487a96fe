#include "tabletop/backends/fixture_backend.hpp"

#include "tabletop/geometry/raster_io.hpp"

namespace tabletop {

Result<FixtureBackend> FixtureBackend::load(const std::string& fixture_path) {
    auto bytes = read_file(fixture_path);
    if (!bytes.ok()) {
        return make_error(Errc::config_error, "cannot read fixture: " + fixture_path);
    }
    FixtureBackend backend;
    try {
        const auto j = nlohmann::json::parse(bytes.value());
        for (const auto& entry : j.at("entries")) {
            const std::string key = entry.at("role").get<std::string>() + ":" +
                                    entry.at("hash").get<std::string>();
            backend.entries_[key] = entry.at("response").get<std::string>();
        }
    } catch (const std::exception& e) {
        return make_error(Errc::config_error, std::string("fixture parse: ") + e.what());
    }
    return backend;
}

void FixtureBackend::add(Role role, const std::string& request_hash, std::string response_text) {
    entries_[std::string(to_string(role)) + ":" + request_hash] = std::move(response_text);
}

void FixtureBackend::add_for(const AgentRequest& req, std::string response_text) {
    add(req.role, canonical_request_hash(req), std::move(response_text));
}

Result<AgentResponse> FixtureBackend::complete(const AgentRequest& req) {
    const std::string key =
        std::string(to_string(req.role)) + ":" + canonical_request_hash(req);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return make_error(Errc::fixture_miss, "fixture has no entry for " + key);
    }
    AgentResponse out;
    out.raw_text = it->second;
    return out;
}

nlohmann::json FixtureBackend::to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, response] : entries_) {
        const auto colon = key.find(':');
        entries.push_back({{"role", key.substr(0, colon)},
                           {"hash", key.substr(colon + 1)},
                           {"response", response}});
    }
    return nlohmann::json{{"entries", entries}};
}

Status FixtureBackend::save(const std::string& fixture_path) const {
    return write_file(fixture_path, to_json().dump(2) + "\n");
}

}  // namespace tabletop
