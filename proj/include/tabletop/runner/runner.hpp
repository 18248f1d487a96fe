#pragma once

#include "tabletop/backends/backend.hpp"
#include "tabletop/orchestrator/orchestrator.hpp"
#include "tabletop/trace/trace.hpp"

namespace tabletop {

/// Everything needed to execute a batch of episodes for one scenario.
struct RunnerConfig {
    Scenario scenario;
    RecoveryConfig recovery;
    BackendConfig backend;
    int episodes = 1;
    uint64_t seed = 1;
    std::string run_id;  // empty -> derived from (scenario, seed, episodes)
    std::string trace_out;
    std::string prompts_dir;
    int jobs = 1;  // record/replay runs are forced sequential
};

struct EpisodeBrief {
    int episode = 0;
    TaskOutcome task_outcome = TaskOutcome::failure;
    bool goal_achieved = false;
    RunReport report;

    bool operator==(const EpisodeBrief&) const = default;
};

struct RunSummary {
    std::string run_id;
    int episodes_completed = 0;
    int goal_successes = 0;
    bool backend_unavailable = false;
    std::vector<EpisodeBrief> episodes;
    std::vector<TraceEvent> events;  // merged by (episode, step_index)

    double goal_rate() const {
        return episodes_completed > 0
                   ? static_cast<double>(goal_successes) / episodes_completed
                   : 0.0;
    }
};

std::string derive_run_id(const Scenario& scenario, uint64_t seed, int episodes);

/// Runs the configured episodes, merges the per-episode trace shards
/// deterministically and optionally writes the trace file. Stops early only
/// when a backend becomes unavailable.
Result<RunSummary> run_episodes(const RunnerConfig& cfg);

}  // namespace tabletop
