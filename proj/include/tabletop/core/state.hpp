#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tabletop/core/types.hpp"
#include "tabletop/geometry/raster.hpp"

namespace tabletop {

/// One environment snapshot: rgb + depth rasters plus per-object masks.
struct Observation {
    RgbImage rgb;
    DepthMap depth;
    std::map<std::string, BinaryMask> masks;  // object id -> visible mask
    int step_index = 0;

    bool operator==(const Observation&) const = default;
};

enum class SubtaskOutcome { success, failed, skipped };

const char* to_string(SubtaskOutcome outcome);

struct SubtaskRecord {
    std::string id;
    int attempts = 0;
    SubtaskOutcome outcome = SubtaskOutcome::failed;

    bool operator==(const SubtaskRecord&) const = default;
};

/// The shared blackboard every agent reads and writes. Owned by one task
/// run's control flow; never mutated from two contexts at once.
struct TaskState {
    std::string task_name;
    std::string original_prompt;
    bool initial_decomposition_done = false;
    std::vector<AtomicInstruction> decomposed_prompts;
    std::vector<AtomicInstruction> queue;  // pending, in plan order
    std::optional<AtomicInstruction> current;
    bool should_terminate = false;
    bool multi_object = false;

    std::string object_of_interest;
    std::string not_object_of_interest;
    std::vector<std::string> all_objects;

    std::optional<SceneGraph> scene_graph;
    std::optional<Observation> observation;
    CameraModel camera;

    std::vector<Detection> grounder_output;
    std::vector<GraspPoint2D> grasp_points_2d;
    std::vector<GraspPoint3D> grasp_points_3d;
    std::map<std::string, ActionPlan> thinker_output;
    std::map<std::string, ActuationResult> actor_output;
    std::map<std::string, ReflectionResult> reflection_output;

    std::map<std::string, int> attempt_counts;
    std::map<std::string, int> reactivation_counts;
    int rescan_count = 0;
    std::map<std::string, SubtaskRecord> results;

    bool operator==(const TaskState&) const = default;
};

/// Fresh state for one task run: empty queue, no termination flag, empty
/// per-subtask maps. The camera must satisfy its invariants up front.
Result<TaskState> new_task_state(std::string task_name, std::string prompt,
                                 const CameraModel& camera);

}  // namespace tabletop
