#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/core/result.hpp"

namespace tabletop {

inline constexpr int kTraceSchemaVersion = 1;

/// One line of the run trace: a stage invocation, a recovery action, or an
/// episode boundary. (run_id, episode, step_index) is unique and step_index
/// increases monotonically within an episode.
struct TraceEvent {
    std::string run_id;
    int episode = 0;
    int step_index = 0;
    std::string kind;   // model | compute | env | ladder | episode | run
    std::string stage;  // decompose, describe, ..., recovery, episode_end
    std::string subtask_id;
    nlohmann::json payload;
    double wall_time = 0.0;  // seconds since epoch

    bool operator==(const TraceEvent&) const = default;
};

void to_json(nlohmann::json& j, const TraceEvent& e);
void from_json(const nlohmann::json& j, TraceEvent& e);

/// Equality helper for replay checks: the same event modulo wall_time.
bool same_modulo_wall_time(const TraceEvent& a, const TraceEvent& b);

/// Per-episode collector assigning monotonic step indices.
class EpisodeTrace {
public:
    EpisodeTrace(std::string run_id, int episode)
        : run_id_(std::move(run_id)), episode_(episode) {}

    void append(std::string_view kind, std::string_view stage, const std::string& subtask_id,
                nlohmann::json payload);

    const std::vector<TraceEvent>& events() const { return events_; }
    std::vector<TraceEvent> take() { return std::move(events_); }

private:
    std::string run_id_;
    int episode_ = 0;
    int next_step_ = 0;
    std::vector<TraceEvent> events_;
};

Status write_trace(const std::string& path, const std::vector<TraceEvent>& events);

struct TraceReadResult {
    std::vector<TraceEvent> events;
    int warnings = 0;  // corrupt lines skipped
};

Result<TraceReadResult> read_trace(const std::string& path);

}  // namespace tabletop
