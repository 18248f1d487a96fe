#include "tabletop/agents/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace tabletop {

double bbox_iou(const Detection& a, const Detection& b) {
    const double iu = std::max(0.0, std::min(a.u_max, b.u_max) - std::max(a.u_min, b.u_min));
    const double iv = std::max(0.0, std::min(a.v_max, b.v_max) - std::max(a.v_min, b.v_min));
    const double inter = iu * iv;
    const double area_a = (a.u_max - a.u_min) * (a.v_max - a.v_min);
    const double area_b = (b.u_max - b.u_min) * (b.v_max - b.v_min);
    const double uni = area_a + area_b - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

int graph_consistency_score(const Detection& candidate, const SceneGraph& graph,
                            const std::map<std::string, Detection>& references,
                            double image_width, double image_height) {
    const ObjectNode* node = graph.find_by_label(candidate.label);
    if (node == nullptr) return 0;
    const double diag = std::hypot(image_width, image_height);
    const double cu = candidate.center_u();
    const double cv = candidate.center_v();

    int score = 0;
    for (const auto& edge : graph.edges()) {
        const bool as_subject = edge.subject_id == node->id;
        const bool as_object = edge.object_id == node->id;
        if (!as_subject && !as_object) continue;
        const std::string& other_id = as_subject ? edge.object_id : edge.subject_id;
        const ObjectNode* other = graph.find_node(other_id);
        if (other == nullptr) continue;
        const auto ref = references.find(other->label);
        if (ref == references.end()) continue;
        const double ou = ref->second.center_u();
        const double ov = ref->second.center_v();

        // Evaluate the predicate with the candidate in the subject slot.
        const double su = as_subject ? cu : ou;
        const double sv = as_subject ? cv : ov;
        const double tu = as_subject ? ou : cu;
        const double tv = as_subject ? ov : cv;
        bool holds = false;
        switch (edge.relation) {
            case RelationKind::left_of: holds = su < tu; break;
            case RelationKind::right_of: holds = su > tu; break;
            case RelationKind::above: holds = sv < tv; break;
            case RelationKind::below: holds = sv > tv; break;
            case RelationKind::near:
                holds = std::hypot(su - tu, sv - tv) < kNearDiagonalFraction * diag;
                break;
            case RelationKind::on_top_of:
            case RelationKind::inside:
                continue;  // not decidable from centroids
        }
        if (holds) ++score;
    }
    return score;
}

namespace {

Detection merge_cluster(const std::vector<Detection>& cluster, const std::string& label) {
    Detection out;
    out.label = label;
    double weight = 0.0;
    double miss = 1.0;
    std::vector<std::string> sources;
    for (const auto& det : cluster) {
        out.u_min += det.confidence * det.u_min;
        out.v_min += det.confidence * det.v_min;
        out.u_max += det.confidence * det.u_max;
        out.v_max += det.confidence * det.v_max;
        weight += det.confidence;
        miss *= 1.0 - det.confidence;
        sources.push_back(det.source);
    }
    if (weight > 0.0) {
        out.u_min /= weight;
        out.v_min /= weight;
        out.u_max /= weight;
        out.v_max /= weight;
    } else {
        out = cluster.front();
    }
    out.confidence = 1.0 - miss;
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    std::string joined;
    for (const auto& s : sources) joined += (joined.empty() ? "" : "+") + s;
    out.source = joined;
    return out;
}

bool detection_order(const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.u_min != b.u_min) return a.u_min < b.u_min;
    if (a.v_min != b.v_min) return a.v_min < b.v_min;
    return a.source < b.source;
}

}  // namespace

Result<std::vector<Detection>> fuse_detections(
    const std::map<std::string, std::vector<Detection>>& per_source,
    const PerceptionTargets& targets, const SceneGraph& graph, double image_width,
    double image_height) {
    if (per_source.empty()) {
        return make_error(Errc::grounding_failure, "no detection sources responded",
                          Stage::grounder);
    }

    // Highest-confidence raw detection per label, used as the reference point
    // when scoring conflicting candidates against the scene graph.
    std::map<std::string, Detection> references;
    for (const auto& [source, dets] : per_source) {
        for (const auto& det : dets) {
            const auto it = references.find(det.label);
            if (it == references.end() || detection_order(det, it->second)) {
                references[det.label] = det;
            }
        }
    }

    std::vector<Detection> fused;
    for (const auto& label : targets.all_objects) {
        std::vector<Detection> candidates;
        for (const auto& [source, dets] : per_source) {
            for (const auto& det : dets) {
                if (det.label == label) candidates.push_back(det);
            }
        }
        if (candidates.empty()) continue;
        std::sort(candidates.begin(), candidates.end(), detection_order);

        std::vector<std::vector<Detection>> clusters;
        for (const auto& det : candidates) {
            bool placed = false;
            for (auto& cluster : clusters) {
                if (bbox_iou(cluster.front(), det) >= kFusionIouMatch) {
                    cluster.push_back(det);
                    placed = true;
                    break;
                }
            }
            if (!placed) clusters.push_back({det});
        }

        std::vector<Detection> merged;
        merged.reserve(clusters.size());
        for (const auto& cluster : clusters) merged.push_back(merge_cluster(cluster, label));

        size_t best = 0;
        if (merged.size() > 1) {
            int best_score = -1;
            for (size_t i = 0; i < merged.size(); ++i) {
                const int score = graph_consistency_score(merged[i], graph, references,
                                                          image_width, image_height);
                const bool better =
                    score > best_score ||
                    (score == best_score && detection_order(merged[i], merged[best]));
                if (i == 0 || better) {
                    best = i;
                    best_score = score;
                }
            }
            // A conflict survivor keeps its own confidence.
        }
        fused.push_back(merged[best]);
    }

    const bool interest_grounded =
        std::any_of(fused.begin(), fused.end(), [&](const Detection& d) {
            return d.label == targets.object_of_interest;
        });
    if (!targets.object_of_interest.empty() && !interest_grounded) {
        return make_error(Errc::grounding_failure,
                          "no detections for object of interest: " + targets.object_of_interest,
                          Stage::grounder);
    }
    return fused;
}

}  // namespace tabletop
