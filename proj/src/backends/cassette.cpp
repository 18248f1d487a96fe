#include "tabletop/backends/cassette.hpp"

#include <fstream>
#include <sstream>

namespace tabletop {

RecordingBackend::RecordingBackend(std::unique_ptr<Backend> inner, std::string cassette_path)
    : inner_(std::move(inner)), cassette_path_(std::move(cassette_path)) {}

Result<AgentResponse> RecordingBackend::complete(const AgentRequest& req) {
    auto response = inner_->complete(req);
    if (!response.ok()) return response;

    nlohmann::json record{
        {"hash", canonical_request_hash(req)},
        {"request",
         {{"role", to_string(req.role)}, {"instruction_version", req.instruction_version}}},
        {"response", response.value().raw_text}};
    {
        std::lock_guard<std::mutex> lock(append_mutex_);
        std::ofstream out(cassette_path_, std::ios::app);
        if (!out) {
            return make_error(Errc::config_error, "cannot append cassette: " + cassette_path_);
        }
        out << record.dump() << "\n";
    }
    return response;
}

Result<ReplayBackend> ReplayBackend::load(const std::string& cassette_path) {
    std::ifstream in(cassette_path);
    if (!in) {
        return make_error(Errc::config_error, "cannot read cassette: " + cassette_path);
    }
    ReplayBackend backend;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto record = nlohmann::json::parse(line);
            backend.responses_by_hash_[record.at("hash").get<std::string>()].push_back(
                record.at("response").get<std::string>());
        } catch (const std::exception& e) {
            return make_error(Errc::config_error, "cassette line " + std::to_string(line_no) +
                                                      ": " + e.what());
        }
    }
    return backend;
}

Result<AgentResponse> ReplayBackend::complete(const AgentRequest& req) {
    const std::string hash = canonical_request_hash(req);
    auto it = responses_by_hash_.find(hash);
    if (it == responses_by_hash_.end() || it->second.empty()) {
        return make_error(Errc::cassette_miss,
                          "no recorded response for request hash " + hash + " (role " +
                              to_string(req.role) + ")");
    }
    AgentResponse out;
    out.raw_text = it->second.front();
    it->second.pop_front();
    return out;
}

size_t ReplayBackend::remaining() const {
    size_t n = 0;
    for (const auto& [hash, queue] : responses_by_hash_) n += queue.size();
    return n;
}

}  // namespace tabletop
