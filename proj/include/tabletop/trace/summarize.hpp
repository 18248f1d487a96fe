#pragma once

#include <map>

#include "tabletop/trace/trace.hpp"

namespace tabletop {

struct ScenarioSummary {
    std::string scenario;
    int episodes = 0;
    int successes = 0;  // goal-achieved episodes
    double success_rate = 0.0;
    double mean_attempts = 0.0;  // per executed subtask
    std::map<std::string, int> recovery_histogram;

    bool operator==(const ScenarioSummary&) const = default;
};

struct Summary {
    std::vector<ScenarioSummary> rows;  // sorted by scenario name
    int warnings = 0;

    bool operator==(const Summary&) const = default;
};

/// Aggregates one or more trace files; traces are self-contained so no
/// scenario or config files are consulted. Corrupt lines are skipped and
/// counted as warnings; an empty trace set yields an empty table plus a
/// warning.
Result<Summary> summarize(const std::vector<std::string>& trace_paths);

Summary summarize_events(const std::vector<TraceEvent>& events, int carried_warnings = 0);

/// Fixed-width text table, one row per scenario.
std::string summary_table(const Summary& summary);

nlohmann::json summary_json(const Summary& summary);

}  // namespace tabletop
