#pragma once

#include <cstdint>
#include <optional>

#include "beliefgraph/pg/graphs.hpp"
#include "beliefgraph/queries/query.hpp"
#include "beliefgraph/worldsim/scenario.hpp"

namespace beliefgraph::queries {

/// Intersection over union; 0 for disjoint or degenerate boxes.
double iou(const Box& a, const Box& b);

/// Node of `pg` whose box centre is nearest to `box`, within twice its diagonal.
std::optional<int> ground_object(const pg::RobotPG& pg, const Box& box);
std::optional<int> ground_agent(const pg::RobotPG& pg, const Box& box);

struct Located {
    int view = 0;
    Box box;
};

/// Where track `id` is reported at frame t: its highest-score view when
/// observed, otherwise a view whose frustum holds the coasted position with a
/// box rendered from the footprint estimated at the last observation.
std::optional<Located> locate_track(const pg::PgSet& pgs, const worldsim::Calibration& calib, int id, int t);

/// Belief entry of `agent` about `object` at t: latest last-seen frame, ties to
/// the smallest camera. `camera` < 0 scans every camera.
const pg::BeliefEntry* believed(const pg::PgSet& pgs, int agent, int object, int t, int camera = -1,
                                int* belief_camera = nullptr);

struct AnswerParams {
    double match_radius = 1.0;          // believed location -> current object
    double false_belief_tolerance = 0.1;
};

Answer answer_localization(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib);
Answer answer_belief_multiview(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                               const AnswerParams& params = {});
Answer answer_belief_singleview(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                                const AnswerParams& params = {});
/// Returns an object (track) id; see resolve_object.
Answer answer_helping(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                      const AnswerParams& params = {});
Answer answer_query(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                    const AnswerParams& params = {});

/// Uniform pick among joint-PG objects at t_q sharing the query object's attributes.
Answer random_baseline(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib, std::uint64_t seed);

/// Turns an object-id answer into a (view, box) answer at t_q.
Answer resolve_object(const Answer& a, const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib);

}  // namespace beliefgraph::queries
