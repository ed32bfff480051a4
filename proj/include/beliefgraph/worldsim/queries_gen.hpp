#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "beliefgraph/pg/graphs.hpp"
#include "beliefgraph/queries/query.hpp"
#include "beliefgraph/worldsim/scenario.hpp"
#include "beliefgraph/worldsim/simulate.hpp"

namespace beliefgraph::worldsim {

/// Rules the ground-truth belief construction shares with inference.
struct TruthRules {
    int confirm_frames = 2;        // an entity enters beliefs once seen on this many frames
    int fill_gap = 3;              // see PipelineParams::belief_fill_gap
    double match_radius = 1.0;     // believed location -> current object matching radius
    double false_belief_tolerance = 0.1;
    double ambiguity = 0.5;        // query boxes closer than this many diagonals to another box are skipped
};

/// Belief versions of every (camera, agent) pair computed from true states and
/// true visibility. Entries are keyed by world object id.
std::vector<pg::BeliefPG> ground_truth_beliefs(const GroundTruthLog& gt, const TruthRules& rules = {});

/// Latest belief of `agent` that mentions `object` at time t: greatest
/// last-seen frame, ties to the smallest camera id.
const pg::BeliefEntry* believed_entry(std::span<const pg::BeliefPG> beliefs, int agent, int object, int t,
                                      int* camera = nullptr);

/// Every (view, box) in which a world object at frame t is a correct answer:
/// the views that see it, or when it is hidden the views whose frustum holds it.
std::vector<std::pair<int, Box>> answer_views(const GroundTruthLog& gt, const Calibration& calib, int object, int t);

queries::QuerySet gen_queries(const GroundTruthLog& gt, const Calibration& calib, queries::QueryKind kind, int count,
                              std::uint64_t seed, const TruthRules& rules = {});

}  // namespace beliefgraph::worldsim
