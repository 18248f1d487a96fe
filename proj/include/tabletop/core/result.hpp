#pragma once

#include <string>
#include <utility>
#include <variant>

namespace tabletop {

// Pipeline stages an error or a reflection verdict can be charged to.
enum class Stage {
    decomposer,
    descriptor,
    perceptor,
    grounder,
    projector,
    thinker,
    actor,
    reflector,
    none,
};

enum class Errc {
    invalid_input,
    camera_invariant,
    empty_mask,
    ray_miss,
    behind_camera,
    invalid_disparity,
    depth_hole,
    schema_violation,
    decomposition_error,
    descriptor_error,
    perception_miss,
    grounding_failure,
    projector_error,
    thinker_error,
    actuation_error,
    scenario_error,
    goal_error,
    backend_unavailable,
    fixture_miss,
    cassette_miss,
    config_error,
    trace_error,
};

const char* to_string(Stage stage);
const char* to_string(Errc code);
Stage stage_from_string(const std::string& name);

struct Error {
    Errc code = Errc::invalid_input;
    std::string message;
    Stage stage = Stage::none;

    bool operator==(const Error&) const = default;
};

/// Value-or-error carrier used by every fallible operation. Stage failures
/// are data for the recovery ladder, not exceptions.
template <typename T>
class Result {
public:
    Result(T value) : value_(std::move(value)) {}
    Result(Error error) : value_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(value_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(value_); }
    T& value() & { return std::get<T>(value_); }
    T&& value() && { return std::get<T>(std::move(value_)); }

    const Error& error() const { return std::get<Error>(value_); }

private:
    std::variant<T, Error> value_;
};

struct Unit {
    bool operator==(const Unit&) const = default;
};

using Status = Result<Unit>;

inline Status ok_status() { return Status(Unit{}); }

inline Error make_error(Errc code, std::string message, Stage stage = Stage::none) {
    return Error{code, std::move(message), stage};
}

}  // namespace tabletop
