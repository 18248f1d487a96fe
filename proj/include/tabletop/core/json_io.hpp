#pragma once

#include <nlohmann/json.hpp>

#include "tabletop/core/state.hpp"
#include "tabletop/core/types.hpp"
#include "tabletop/geometry/raster.hpp"

namespace tabletop {

using json = nlohmann::json;

void to_json(json& j, const Vec3& v);
void from_json(const json& j, Vec3& v);
void to_json(json& j, const Mat3& m);
void from_json(const json& j, Mat3& m);
void to_json(json& j, const Pose& p);
void from_json(const json& j, Pose& p);

void to_json(json& j, const MemoryTag& t);
void from_json(const json& j, MemoryTag& t);
void to_json(json& j, const AtomicInstruction& a);
void from_json(const json& j, AtomicInstruction& a);

void to_json(json& j, const ObjectNode& n);
void from_json(const json& j, ObjectNode& n);
void to_json(json& j, const Relation& r);
void from_json(const json& j, Relation& r);
void to_json(json& j, const SceneGraph& g);
void from_json(const json& j, SceneGraph& g);

void to_json(json& j, const Detection& d);
void from_json(const json& j, Detection& d);
void to_json(json& j, const CameraModel& c);
void from_json(const json& j, CameraModel& c);

void to_json(json& j, const GraspPoint2D& g);
void from_json(const json& j, GraspPoint2D& g);
void to_json(json& j, const GraspPoint3D& g);
void from_json(const json& j, GraspPoint3D& g);

void to_json(json& j, const ActionPlan& p);
void from_json(const json& j, ActionPlan& p);
void to_json(json& j, const ActuationResult& r);
void from_json(const json& j, ActuationResult& r);
void to_json(json& j, const ReflectionResult& r);
void from_json(const json& j, ReflectionResult& r);
void to_json(json& j, const RecoveryAction& a);
void from_json(const json& j, RecoveryAction& a);

void to_json(json& j, const BinaryMask& m);
void from_json(const json& j, BinaryMask& m);
void to_json(json& j, const DepthMap& d);
void from_json(const json& j, DepthMap& d);
void to_json(json& j, const RgbImage& img);
void from_json(const json& j, RgbImage& img);
void to_json(json& j, const Observation& o);
void from_json(const json& j, Observation& o);

void to_json(json& j, const SubtaskRecord& r);
void from_json(const json& j, SubtaskRecord& r);
void to_json(json& j, const TaskState& s);
void from_json(const json& j, TaskState& s);

}  // namespace tabletop
