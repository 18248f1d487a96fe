#include "tabletop/agents/prompts.hpp"

#include "tabletop/geometry/raster_io.hpp"

namespace tabletop {

namespace {

const char* kDecomposer = R"PROMPT(You are the task decomposition agent of a tabletop manipulation pipeline.
Input: a JSON document {"prompt": <high-level instruction>}.
Break the instruction into the shortest sequence of atomic subtasks a robot
arm can execute. Allowed verbs: pick_place, move, reach, push, rotate.
Each subtask may carry memory tags (object_ref / position_ref / context_ref)
holding parameters such as object identities, positions, or context.
Respond with JSON only:
{"subtasks": [{"verb": "...", "object_query": "...", "target_query": "...",
  "raw_text": "...", "memory_tags": [{"key": "...", "kind": "...", "value": "..."}]}]}
Order matters; emit nothing but the JSON document.
)PROMPT";

const char* kDescriptor = R"PROMPT(You are the scene description agent. You receive an overhead image of a
tabletop. Identify every object, then the pairwise spatial relations between
them (left_of, right_of, above, below, near, on_top_of, inside).
Respond with JSON only:
{"nodes": [{"id": "...", "label": "...", "color": "...", "size_class": "...",
  "geometry_class": "round|rimmed|flat|irregular"}],
 "edges": [{"subject": "<node id>", "relation": "...", "object": "<node id>"}]}
Node ids must be unique; edges must reference declared nodes and never relate
a node to itself.
)PROMPT";

const char* kPerceptor = R"PROMPT(You are the perception targeting agent. Input: a JSON document with the
current subtask and the scene graph. Name the object the subtask manipulates
(object_of_interest), list the scene labels that must be avoided as
distractors (not_object_of_interest, comma separated), and enumerate all
known object labels.
Respond with JSON only:
{"object_of_interest": "...", "not_object_of_interest": "...",
 "all_objects": ["...", "..."]}
The object of interest must be one of the scene graph labels; leave it empty
if the subtask's object is not present in the scene.
)PROMPT";

const char* kThinker = R"PROMPT(You are the motion parameter agent. Input: a JSON document with the subtask,
per-object grasp data ({"label", "node_id", "grasp": {x, y, z}, "height",
"interior_depth", "extent_half", "geometry_class"}), the scene graph, and
optionally the prior plan for this subtask.
Rules:
- pick pose: the grasp point of the subtask's object; yaw 0 unless the
  subtask specifies a rotation.
- place pose for pick_place: the target's support plane (grasp z minus
  interior_depth) plus the carried object's height; x, y at the target.
  A position_ref memory tag "(x, y, z)" overrides the target: place exactly
  there plus the height rule. If a prior plan is provided, keep its place
  pose and re-derive only the pick from the fresh grasp data.
- rotate: pick equals place at the object's grasp, yaw from the subtask tags
  (key "yaw_degrees" in degrees or "yaw" in radians).
- push / move / reach: place at the target point, keep pick z.
Respond with JSON only:
{"primitive": "...", "pick": {"x":0,"y":0,"z":0,"yaw":0},
 "place": {"x":0,"y":0,"z":0,"yaw":0}}
)PROMPT";

const char* kReflector = R"PROMPT(You are the verification agent. Input: a JSON document with the subtask, the
executed plan, the actuation result, estimated object positions before and
after the action, per-label half extents, and the success tolerance in
meters.
Judge whether the subtask succeeded: the manipulated object must have moved
and now rest within tolerance of the planned place position, consistent with
the subtask's target. On failure name the faulty stage:
- actor: the object did not move or nothing was grasped,
- grounder: the object ended up on or at a different object than the target,
- thinker: the object moved but landed at a wrong offset.
Respond with JSON only:
{"verdict": "success|failure", "failing_stage":
 "decomposer|descriptor|perceptor|grounder|projector|thinker|actor|none",
 "explanation": "..."}
Use failing_stage "none" and an empty explanation only for success.
)PROMPT";

const char* kSingleAgent = R"PROMPT(You are a single agent controlling the full tabletop pipeline alone. Input:
a JSON document {"prompt": ..., "objects": [{"label", "grasp": {x, y, z},
"height", "interior_depth", "extent_half", "geometry_class"}]} describing the
initial scene. Plan every action up front; there is no feedback, no retry,
and no re-observation. Account for stacking heights yourself.
Respond with JSON only:
{"actions": [{"primitive": "...", "pick": {"x":0,"y":0,"z":0,"yaw":0},
  "place": {"x":0,"y":0,"z":0,"yaw":0}}]}
)PROMPT";

}  // namespace

const std::string& InstructionSet::text(Role role) const {
    static const std::string empty;
    const auto it = texts.find(role);
    return it == texts.end() ? empty : it->second;
}

InstructionSet default_instructions() {
    InstructionSet set;
    set.texts[Role::decomposer] = kDecomposer;
    set.texts[Role::descriptor] = kDescriptor;
    set.texts[Role::perceptor] = kPerceptor;
    set.texts[Role::thinker] = kThinker;
    set.texts[Role::reflector] = kReflector;
    set.texts[Role::single_agent] = kSingleAgent;
    return set;
}

InstructionSet load_instructions(const std::string& dir, const std::string& version) {
    InstructionSet set = default_instructions();
    set.version = version;
    for (const Role role : {Role::decomposer, Role::descriptor, Role::perceptor, Role::thinker,
                            Role::reflector, Role::single_agent}) {
        const std::string path =
            dir + "/" + to_string(role) + "_" + version + ".txt";
        if (auto bytes = read_file(path); bytes.ok()) {
            set.texts[role] = bytes.value();
        }
    }
    return set;
}

}  // namespace tabletop
