#include "tabletop/trace/summarize.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace tabletop {

namespace {

struct Accumulator {
    int episodes = 0;
    int successes = 0;
    long attempts_total = 0;
    long subtasks_total = 0;
    std::map<std::string, int> recovery;
};

}  // namespace

Summary summarize_events(const std::vector<TraceEvent>& events, int carried_warnings) {
    std::map<std::string, std::string> scenario_by_run;  // run_id -> scenario name
    std::map<std::string, Accumulator> by_scenario;
    int warnings = carried_warnings;

    for (const auto& event : events) {
        if (event.stage == "run_start") {
            scenario_by_run[event.run_id] =
                event.payload.value("scenario", std::string("unknown"));
        }
    }
    const auto scenario_of = [&](const TraceEvent& e) {
        const auto it = scenario_by_run.find(e.run_id);
        return it == scenario_by_run.end() ? std::string("unknown") : it->second;
    };

    for (const auto& event : events) {
        if (event.stage == "episode_end") {
            auto& acc = by_scenario[scenario_of(event)];
            ++acc.episodes;
            bool success = false;
            if (event.payload.contains("goal_achieved")) {
                success = event.payload.at("goal_achieved").get<bool>();
            } else {
                success = event.payload.value("task_outcome", std::string()) == "success";
            }
            if (success) ++acc.successes;
            if (event.payload.contains("subtasks")) {
                for (const auto& rec : event.payload.at("subtasks")) {
                    const std::string outcome = rec.value("outcome", std::string());
                    if (outcome == "skipped") continue;
                    acc.attempts_total += rec.value("attempts", 0);
                    ++acc.subtasks_total;
                }
            }
        } else if (event.kind == "ladder") {
            auto& acc = by_scenario[scenario_of(event)];
            const std::string action =
                event.payload.contains("action")
                    ? event.payload.at("action").value("kind", std::string("unknown"))
                    : std::string("unknown");
            ++acc.recovery[action];
        }
    }

    Summary summary;
    summary.warnings = warnings;
    for (const auto& [scenario, acc] : by_scenario) {
        ScenarioSummary row;
        row.scenario = scenario;
        row.episodes = acc.episodes;
        row.successes = acc.successes;
        row.success_rate = acc.episodes > 0
                               ? static_cast<double>(acc.successes) / acc.episodes
                               : 0.0;
        row.mean_attempts = acc.subtasks_total > 0
                                ? static_cast<double>(acc.attempts_total) / acc.subtasks_total
                                : 0.0;
        row.recovery_histogram = acc.recovery;
        summary.rows.push_back(std::move(row));
    }
    if (summary.rows.empty()) ++summary.warnings;
    return summary;
}

Result<Summary> summarize(const std::vector<std::string>& trace_paths) {
    std::vector<TraceEvent> events;
    int warnings = 0;
    for (const auto& path : trace_paths) {
        auto loaded = read_trace(path);
        if (!loaded.ok()) {
            ++warnings;  // unreadable shard: warn and keep going
            continue;
        }
        warnings += loaded.value().warnings;
        auto batch = std::move(loaded).value().events;
        events.insert(events.end(), batch.begin(), batch.end());
    }
    return summarize_events(events, warnings);
}

std::string summary_table(const Summary& summary) {
    std::ostringstream out;
    out << std::left << std::setw(22) << "scenario" << std::right << std::setw(10) << "episodes"
        << std::setw(10) << "success%" << std::setw(15) << "mean_attempts" << std::setw(8)
        << "retry" << std::setw(12) << "reactivate" << std::setw(8) << "rescan" << std::setw(11)
        << "terminate" << "\n";
    for (const auto& row : summary.rows) {
        const auto count = [&](const char* key) {
            const auto it = row.recovery_histogram.find(key);
            return it == row.recovery_histogram.end() ? 0 : it->second;
        };
        out << std::left << std::setw(22) << row.scenario << std::right << std::setw(10)
            << row.episodes << std::setw(10) << std::fixed << std::setprecision(2)
            << 100.0 * row.success_rate << std::setw(15) << std::setprecision(3)
            << row.mean_attempts << std::setw(8) << count("retry_subtask") << std::setw(12)
            << count("reactivate") << std::setw(8) << count("rescan_scene") << std::setw(11)
            << count("terminate_failure") << "\n";
    }
    if (summary.warnings > 0) {
        out << "warnings: " << summary.warnings << "\n";
    }
    return out.str();
}

nlohmann::json summary_json(const Summary& summary) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : summary.rows) {
        rows.push_back({{"scenario", row.scenario},
                        {"episodes", row.episodes},
                        {"successes", row.successes},
                        {"success_rate", row.success_rate},
                        {"mean_attempts", row.mean_attempts},
                        {"recovery", row.recovery_histogram}});
    }
    return nlohmann::json{{"rows", rows}, {"warnings", summary.warnings}};
}

}  // namespace tabletop
