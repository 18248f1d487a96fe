#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>

#include "tabletop/backends/backend.hpp"

namespace tabletop {

/// Wraps a live backend and appends (hash, request summary, response) records
/// to a line-delimited cassette file. Appends are serialized.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::unique_ptr<Backend> inner, std::string cassette_path);

    Result<AgentResponse> complete(const AgentRequest& req) override;

private:
    std::unique_ptr<Backend> inner_;
    std::string cassette_path_;
    std::mutex append_mutex_;
};

/// Replays a recorded cassette: each request pops the next recorded response
/// for its hash, byte-identical. A hash with no remaining responses is a
/// deterministic miss that aborts the run; no network is ever touched.
class ReplayBackend : public Backend {
public:
    static Result<ReplayBackend> load(const std::string& cassette_path);

    Result<AgentResponse> complete(const AgentRequest& req) override;

    size_t remaining() const;

private:
    std::map<std::string, std::deque<std::string>> responses_by_hash_;
};

}  // namespace tabletop
