#include "tabletop/core/state.hpp"

namespace tabletop {

const char* to_string(SubtaskOutcome outcome) {
    switch (outcome) {
        case SubtaskOutcome::success: return "success";
        case SubtaskOutcome::failed: return "failed";
        case SubtaskOutcome::skipped: return "skipped";
    }
    return "failed";
}

Result<TaskState> new_task_state(std::string task_name, std::string prompt,
                                 const CameraModel& camera) {
    if (prompt.empty()) {
        return make_error(Errc::invalid_input, "task prompt must be non-empty");
    }
    if (auto st = validate_camera(camera); !st.ok()) {
        return st.error();
    }
    TaskState state;
    state.task_name = std::move(task_name);
    state.original_prompt = std::move(prompt);
    state.camera = camera;
    return state;
}

}  // namespace tabletop
