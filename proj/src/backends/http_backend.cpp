#include "tabletop/backends/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>

#include "tabletop/core/encoding.hpp"

namespace tabletop {

namespace {

// Splits "http://host:port/base" into host, port and base path.
void parse_endpoint(const std::string& url, std::string& host, int& port, std::string& base) {
    std::string rest = url;
    port = 80;
    if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
    const auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    base = slash == std::string::npos ? "" : rest.substr(slash);
    const auto colon = hostport.find(':');
    if (colon != std::string::npos) {
        host = hostport.substr(0, colon);
        port = std::atoi(hostport.c_str() + colon + 1);
    } else {
        host = hostport;
    }
    while (!base.empty() && base.back() == '/') base.pop_back();
}

}  // namespace

BackendConfig HttpBackend::apply_env_overrides(BackendConfig cfg) {
    if (const char* key = std::getenv("TABLETOP_API_KEY"); key != nullptr && *key != '\0') {
        cfg.api_key = key;
    }
    if (const char* url = std::getenv("TABLETOP_ENDPOINT"); url != nullptr && *url != '\0') {
        cfg.endpoint_url = url;
    }
    return cfg;
}

HttpBackend::HttpBackend(BackendConfig cfg) : cfg_(apply_env_overrides(std::move(cfg))) {
    parse_endpoint(cfg_.endpoint_url, host_, port_, base_path_);
}

nlohmann::json HttpBackend::build_request_body(const AgentRequest& req,
                                               const BackendConfig& cfg) {
    nlohmann::json user_content = nlohmann::json::array();
    user_content.push_back({{"type", "text"}, {"text", req.user_payload.dump()}});
    if (req.image_attachment) {
        user_content.push_back(
            {{"type", "image_url"},
             {"image_url",
              {{"url", "data:image/x-portable-pixmap;base64," +
                           base64_encode(*req.image_attachment)}}}});
    }
    return nlohmann::json{
        {"model", cfg.model_name},
        {"temperature", cfg.temperature},
        {"messages",
         nlohmann::json::array({{{"role", "system"}, {"content", req.system_instruction}},
                                {{"role", "user"}, {"content", user_content}}})}};
}

Result<AgentResponse> HttpBackend::complete(const AgentRequest& req) {
    const nlohmann::json body = build_request_body(req, cfg_);
    const std::string path = base_path_ + "/chat/completions";
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.transport_retries; ++attempt) {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(static_cast<time_t>(cfg_.timeout_s),
                                      static_cast<time_t>(cfg_.timeout_s * 1e6) % 1000000);
        client.set_read_timeout(static_cast<time_t>(cfg_.timeout_s), 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        }
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            const auto parsed = nlohmann::json::parse(res->body);
            AgentResponse out;
            out.raw_text =
                parsed.at("choices").at(0).at("message").at("content").get<std::string>();
            return out;
        } catch (const std::exception& e) {
            last_error = std::string("malformed completion body: ") + e.what();
        }
    }
    return make_error(Errc::backend_unavailable,
                      "backend unavailable after " + std::to_string(cfg_.transport_retries + 1) +
                          " attempts: " + last_error);
}

}  // namespace tabletop
