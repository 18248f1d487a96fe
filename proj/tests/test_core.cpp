#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tabletop/core/encoding.hpp"
#include "tabletop/core/json_io.hpp"
#include "tabletop/core/state.hpp"

using namespace tabletop;

namespace {

CameraModel test_camera() {
    Mat3 rot;
    rot.m = {1, 0, 0, 0, -1, 0, 0, 0, -1};  // overhead, looking down
    auto cam = make_camera(420, 420, 0, 160, 120, rot, Vec3{0, 0, 1.0}, 0.1);
    REQUIRE(cam.ok());
    return cam.value();
}

SceneGraph two_block_graph() {
    SceneGraph g;
    REQUIRE(g.add_node({"n0", "red block", "red", "small", GeometryClass::flat}).ok());
    REQUIRE(g.add_node({"n1", "green pad", "green", "medium", GeometryClass::flat}).ok());
    REQUIRE(g.add_edge("n0", RelationKind::left_of, "n1").ok());
    return g;
}

}  // namespace

TEST_CASE("new task state starts empty and running") {
    const auto state = new_task_state("stack", "stack the blocks", test_camera());
    REQUIRE(state.ok());
    CHECK(state.value().queue.empty());
    CHECK_FALSE(state.value().should_terminate);
    CHECK_FALSE(state.value().initial_decomposition_done);
    CHECK(state.value().results.empty());
    CHECK(state.value().attempt_counts.empty());
}

TEST_CASE("empty prompt is rejected") {
    const auto state = new_task_state("x", "", test_camera());
    REQUIRE(!state.ok());
    CHECK(state.error().code == Errc::invalid_input);
}

TEST_CASE("non-orthonormal rotation is rejected by the camera gate") {
    Mat3 bad;
    bad.m = {1, 0, 0, 0, 1, 0, 0, 0, 2};
    const auto cam = make_camera(500, 500, 0, 320, 240, bad, Vec3{}, 0.1);
    REQUIRE(!cam.ok());
    CHECK(cam.error().code == Errc::camera_invariant);

    CameraModel direct = test_camera();
    direct.rotation = bad;
    const auto state = new_task_state("t", "p", direct);
    REQUIRE(!state.ok());
    CHECK(state.error().code == Errc::camera_invariant);
}

TEST_CASE("unknown verbs never construct") {
    std::mt19937_64 rng(5);
    const char* junk[] = {"teleport", "fly", "PICK_PLACE", "moveto", "", "pick place"};
    for (const char* verb : junk) {
        const auto instr = make_atomic_instruction("s0", verb, "a", "b", {}, verb);
        CHECK(!instr.ok());
    }
    // Random strings outside the vocabulary fail too.
    for (int i = 0; i < 200; ++i) {
        std::string v;
        for (int k = 0; k < 6; ++k) v += static_cast<char>('a' + rng() % 26);
        if (verb_from_string(v)) continue;
        CHECK(!make_atomic_instruction("s0", v, "a", "", {}, v).ok());
    }
}

TEST_CASE("pick_place requires an object query") {
    const auto instr = make_atomic_instruction("s0", "pick_place", "", "pad", {}, "place it");
    REQUIRE(!instr.ok());
    CHECK(instr.error().code == Errc::schema_violation);
}

TEST_CASE("scene graph keeps symmetric closure after every insertion") {
    std::mt19937_64 rng(17);
    SceneGraph g;
    for (int i = 0; i < 8; ++i) {
        ObjectNode n;
        n.id = "n" + std::to_string(i);
        n.label = "object " + std::to_string(i);
        n.geometry_class = GeometryClass::irregular;
        REQUIRE(g.add_node(n).ok());
    }
    const RelationKind kinds[] = {RelationKind::left_of, RelationKind::right_of,
                                  RelationKind::above,   RelationKind::below,
                                  RelationKind::near,    RelationKind::on_top_of};
    for (int i = 0; i < 100; ++i) {
        const auto a = "n" + std::to_string(rng() % 8);
        const auto b = "n" + std::to_string(rng() % 8);
        const RelationKind k = kinds[rng() % 6];
        const auto st = g.add_edge(a, k, b);
        if (a == b) {
            CHECK(!st.ok());
            continue;
        }
        REQUIRE(st.ok());
        for (const auto& e : g.edges()) {
            if (const auto inv = mirrored(e.relation)) {
                CHECK(g.has_edge(e.object_id, *inv, e.subject_id));
            }
        }
    }
}

TEST_CASE("scene graph rejects unknown endpoints and self loops") {
    SceneGraph g = two_block_graph();
    CHECK(!g.add_edge("n0", RelationKind::near, "ghost").ok());
    CHECK(!g.add_edge("n0", RelationKind::near, "n0").ok());
    CHECK(g.has_edge("n1", RelationKind::right_of, "n0"));  // mirror of the fixture edge
}

TEST_CASE("reflection results enforce the verdict/stage invariant") {
    CHECK(!make_reflection_result("s0", Verdict::success, Stage::actor, "").ok());
    CHECK(!make_reflection_result("s0", Verdict::failure, Stage::none, "why").ok());
    CHECK(!make_reflection_result("s0", Verdict::failure, Stage::actor, "").ok());
    CHECK(make_reflection_result("s0", Verdict::success, Stage::none, "").ok());
    CHECK(make_reflection_result("s0", Verdict::failure, Stage::actor, "dropped").ok());
}

TEST_CASE("detections validate corner order and confidence range") {
    Detection d{"red block", 10, 20, 50, 60, 0.8, "oracle"};
    CHECK(validate_detection(d).ok());
    d.u_max = 5;
    CHECK(!validate_detection(d).ok());
    d.u_max = 50;
    d.confidence = 1.5;
    CHECK(!validate_detection(d).ok());
}

TEST_CASE("task state round trips through its snapshot schema") {
    auto made = new_task_state("stack", "stack the blocks in order", test_camera());
    REQUIRE(made.ok());
    TaskState s = std::move(made).value();

    auto instr = make_atomic_instruction(
        "s0", "pick_place", "blue block", "red block",
        {MemoryTag{"target", MemoryTagKind::object_ref, "n1"}}, "place blue on red");
    REQUIRE(instr.ok());
    s.decomposed_prompts.push_back(instr.value());
    auto instr2 = make_atomic_instruction("s1", "rotate", "green block", "", {}, "rotate green");
    REQUIRE(instr2.ok());
    s.decomposed_prompts.push_back(instr2.value());
    s.queue.push_back(instr2.value());
    s.current = instr.value();
    s.initial_decomposition_done = true;
    s.multi_object = true;
    s.object_of_interest = "blue block";
    s.not_object_of_interest = "wooden block";
    s.all_objects = {"blue block", "red block", "wooden block"};
    s.scene_graph = two_block_graph();

    Observation obs;
    obs.rgb = RgbImage::filled(6, 4, 1, 2, 3);
    obs.depth = DepthMap::filled(6, 4, 1.25);
    BinaryMask m = BinaryMask::blank(6, 4);
    m.set(2, 2);
    obs.masks["n0"] = m;
    obs.step_index = 3;
    s.observation = obs;

    s.grounder_output.push_back(Detection{"blue block", 1, 2, 5, 6, 0.9, "oracle-a"});
    s.grasp_points_2d.push_back(GraspPoint2D{3.5, 2.5, "n0", true});
    s.grasp_points_3d.push_back(GraspPoint3D{0.1, -0.2, 0.04, "n0", 0.0});
    s.thinker_output["s0"] =
        ActionPlan{"s0", Verb::pick_place, Pose{0.1, -0.2, 0.04, 0}, Pose{0.3, 0.1, 0.08, 0}};
    s.actor_output["s0"] = ActuationResult{"s0", true, false, Pose{0.3, 0.1, 0.08, 0}};
    s.reflection_output["s0"] = ReflectionResult{"s0", Verdict::success, Stage::none, ""};
    s.attempt_counts["s0"] = 1;
    s.reactivation_counts["s0"] = 0;
    s.rescan_count = 1;
    s.results["s0"] = SubtaskRecord{"s0", 1, SubtaskOutcome::success};

    const json j = s;
    const TaskState back = j.get<TaskState>();
    CHECK(back == s);

    // Text form is stable too.
    const json j2 = back;
    CHECK(j.dump() == j2.dump());
}

TEST_CASE("base64 round trips binary payloads") {
    std::mt19937_64 rng(42);
    for (int len = 0; len < 80; ++len) {
        std::string bytes;
        for (int i = 0; i < len; ++i) bytes += static_cast<char>(rng() & 0xFF);
        CHECK(base64_decode(base64_encode(bytes)) == bytes);
    }
}

TEST_CASE("yaw normalization wraps into [-pi, pi)") {
    CHECK(normalize_yaw(0.0) == doctest::Approx(0.0));
    CHECK(normalize_yaw(kPi) == doctest::Approx(-kPi));
    CHECK(normalize_yaw(-kPi) == doctest::Approx(-kPi));
    CHECK(normalize_yaw(2.5 * kPi) == doctest::Approx(0.5 * kPi));
    CHECK(normalize_yaw(-7.5 * kPi) == doctest::Approx(0.5 * kPi));
}
