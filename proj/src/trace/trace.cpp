#include "tabletop/trace/trace.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace tabletop {

void to_json(nlohmann::json& j, const TraceEvent& e) {
    j = nlohmann::json{{"run_id", e.run_id},     {"episode", e.episode},
                       {"step_index", e.step_index}, {"kind", e.kind},
                       {"stage", e.stage},       {"subtask_id", e.subtask_id},
                       {"payload", e.payload},   {"wall_time", e.wall_time},
                       {"schema", kTraceSchemaVersion}};
}

void from_json(const nlohmann::json& j, TraceEvent& e) {
    e.run_id = j.at("run_id").get<std::string>();
    e.episode = j.at("episode").get<int>();
    e.step_index = j.at("step_index").get<int>();
    e.kind = j.at("kind").get<std::string>();
    e.stage = j.at("stage").get<std::string>();
    e.subtask_id = j.at("subtask_id").get<std::string>();
    e.payload = j.at("payload");
    e.wall_time = j.at("wall_time").get<double>();
}

bool same_modulo_wall_time(const TraceEvent& a, const TraceEvent& b) {
    return a.run_id == b.run_id && a.episode == b.episode && a.step_index == b.step_index &&
           a.kind == b.kind && a.stage == b.stage && a.subtask_id == b.subtask_id &&
           a.payload == b.payload;
}

void EpisodeTrace::append(std::string_view kind, std::string_view stage,
                          const std::string& subtask_id, nlohmann::json payload) {
    TraceEvent event;
    event.run_id = run_id_;
    event.episode = episode_;
    event.step_index = next_step_++;
    event.kind = std::string(kind);
    event.stage = std::string(stage);
    event.subtask_id = subtask_id;
    event.payload = std::move(payload);
    event.wall_time =
        std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    events_.push_back(std::move(event));
}

Status write_trace(const std::string& path, const std::vector<TraceEvent>& events) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        return make_error(Errc::trace_error, "cannot open trace for writing: " + path);
    }
    for (const auto& event : events) {
        out << nlohmann::json(event).dump() << "\n";
    }
    if (!out) {
        return make_error(Errc::trace_error, "trace write failed: " + path);
    }
    return ok_status();
}

Result<TraceReadResult> read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        return make_error(Errc::trace_error, "cannot open trace: " + path);
    }
    TraceReadResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            result.events.push_back(nlohmann::json::parse(line).get<TraceEvent>());
        } catch (const std::exception&) {
            ++result.warnings;
        }
    }
    return result;
}

}  // namespace tabletop
