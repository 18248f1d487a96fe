#pragma once

#include <map>
#include <string>
#include <vector>

#include "tabletop/core/types.hpp"

namespace tabletop {

struct PerceptionTargets {
    std::string object_of_interest;
    std::string not_object_of_interest;  // comma separated labels
    std::vector<std::string> all_objects;

    bool operator==(const PerceptionTargets&) const = default;
};

double bbox_iou(const Detection& a, const Detection& b);

inline constexpr double kFusionIouMatch = 0.5;
inline constexpr double kNearDiagonalFraction = 0.2;

/// Counts scene-graph relation predicates satisfied by placing `candidate`
/// at its bbox centroid, using the highest-confidence raw detection of each
/// other label as that label's reference point. left/right compare centroid
/// u, above/below compare centroid v, near compares pixel distance against
/// 0.2 x image diagonal.
int graph_consistency_score(const Detection& candidate, const SceneGraph& graph,
                            const std::map<std::string, Detection>& references,
                            double image_width, double image_height);

/// Confidence-based multi-detector fusion. Per label: candidates agreeing by
/// IoU >= 0.5 merge into one detection (confidence-weighted corner average,
/// noisy-or confidence); conflicting groups are resolved by scene-graph
/// consistency, then confidence. Permutation-invariant in the sources and
/// the identity on a single source. Missing object_of_interest is a
/// grounding failure.
Result<std::vector<Detection>> fuse_detections(
    const std::map<std::string, std::vector<Detection>>& per_source,
    const PerceptionTargets& targets, const SceneGraph& graph, double image_width,
    double image_height);

}  // namespace tabletop
