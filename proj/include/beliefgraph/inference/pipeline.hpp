#pragma once

#include <array>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefgraph/assignment/hungarian.hpp"
#include "beliefgraph/energy/energy.hpp"
#include "beliefgraph/pg/graphs.hpp"
#include "beliefgraph/worldsim/scenario.hpp"
#include "beliefgraph/worldsim/simulate.hpp"

namespace beliefgraph::inference {

/// Observation log cannot be parsed as a sequence (gaps, unknown cameras).
class InferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PipelineParams {
    energy::EnergyParams energy;
    double score_threshold = 0.2;
    int hold_frames = 2;
    double hold_release_move = 0.2;  // holder hand travel that marks a vanished object as carried
    bool holding = true;             // false = interaction-blind ablation
    int confirm_hits = 2;
    int tentative_max_missing = 2;
    int belief_fill_gap = 3;         // frames; longer absences keep the believed fill state
    double fusion_gate = 0.35;       // metres; cross-view pairs farther apart never fuse
    double association_gate = 1.0;   // metres from the predicted position; farther proposals never continue a track

    void validate() const;
};

PipelineParams pipeline_from_json(const nlohmann::json& j, PipelineParams base = {});
nlohmann::ordered_json pipeline_to_json(const PipelineParams& p);

struct ObjectTrackState {
    pg::ObjectTrack track;
    int hits = 0;
    bool confirmed = false;
    Point2 seen_position;   // position at the last detection
    std::vector<double> feat_sum;
    Point2 seen_hand;       // holder's hand when seen_position was recorded
    int candidate = 0;      // agent currently within the hold radius
    int candidate_count = 0;
    int anchor_agent = 0;   // agent near the object at its last detection
    Point2 anchor_hand;
    std::array<std::vector<int>, 3> votes;  // attribute votes per slot
    double width_m = 0.12;
    double aspect = 1.2;
    int empty_streak = 0;   // consecutive observations disagreeing with track.empty
};

struct AgentTrackState {
    pg::AgentTrack track;
    int hits = 0;
    bool confirmed = false;
    Point2 previous_hand;
    std::vector<double> feat_sum;  // appearance is the normalized running sum
};

/// Everything carried from one frame to the next.
struct TrackState {
    int time = 0;
    std::vector<ObjectTrackState> objects;
    std::vector<AgentTrackState> agents;
    int next_object_id = 1;
    int next_agent_id = 1;
    int births = 0;
    int deaths = 0;

    const ObjectTrackState* object(int id) const;
    const AgentTrackState* agent(int id) const;
};

struct Member {
    std::size_t view = 0;  // index into the frame's robot PGs
    std::size_t node = 0;  // index into that PG's node list
};

struct FusedObject {
    Point2 position;
    std::vector<double> feature;
    Attributes attributes;
    double empty_prob = 0.0;
    std::map<int, Box> boxes;
    std::map<int, double> scores;
    std::vector<Member> members;
    double width_m = 0.12;
    double aspect = 1.2;
    double likelihood = 0.0;
};

struct FusedAgent {
    Point2 position;
    Point2 hand;
    std::vector<double> feature;
    std::optional<Point2> reach;
    std::map<int, worldsim::Keypoints> keypoints;
    std::map<int, Box> boxes;
    std::map<int, double> scores;
    std::vector<Member> members;
    double likelihood = 0.0;
};

struct Proposals {
    int time = 0;
    std::vector<FusedObject> objects;
    std::vector<FusedAgent> agents;
    double cost = 0.0;
};

/// One solved assignment, exposed for inspection by tests and tooling.
struct AssociationTrace {
    int time = 0;
    std::string stage;
    assignment::CostMatrix real;
    double row_virtual = 0.0;
    double col_virtual = 0.0;
    assignment::PaddedResult result;
};
using TraceHook = std::function<void(const AssociationTrace&)>;

/// Detections above the score threshold and lifted agents of one camera frame.
/// Node ids are provisional indices 0..n-1.
pg::RobotPG build_robot_pg(const worldsim::FrameObservation& obs, const worldsim::Calibration& calib,
                           const PipelineParams& params);

/// Sequential fusion of same-time robot PGs in camera-id order.
Proposals associate_cross_view(std::span<const pg::RobotPG> robot_pgs, const worldsim::Calibration& calib,
                               const PipelineParams& params, const TraceHook& trace = {});

/// Proposal index -> track id for the frame just associated.
struct Grounding {
    std::vector<int> objects;
    std::vector<int> agents;
};

/// Matches proposals to tracks (agents first), coasting unmatched tracks and
/// opening tentative tracks for unmatched proposals.
Grounding associate_temporal(const Proposals& proposals, TrackState& tracks, const PipelineParams& params,
                             const TraceHook& trace = {});

/// Updates holder states and the positions of unseen held objects. An object
/// that vanishes inside a container is taken as put away there.
void infer_holding(TrackState& tracks, const PipelineParams& params,
                   std::span<const worldsim::Container> containers = {});

/// Rewrites provisional node ids into track ids and copies holder states.
void ground_robot_pgs(std::span<pg::RobotPG> robot_pgs, const Proposals& proposals, const Grounding& grounding,
                      const TrackState& tracks);

using BeliefMap = std::map<std::pair<int, int>, pg::BeliefPG>;  // (camera, agent) -> belief

/// Refreshes belief(k, j) for every confirmed agent j grounded in camera k's
/// PG. Returns the refreshed beliefs.
std::vector<pg::BeliefPG> update_belief_pgs(std::span<const pg::RobotPG> robot_pgs, const TrackState& tracks,
                                            BeliefMap& beliefs, const PipelineParams& params);

pg::JointPG joint_pg(const TrackState& tracks);

struct RunSummary {
    int frames = 0;
    int object_tracks = 0;
    int agent_tracks = 0;
    int births = 0;
    int deaths = 0;
    double mean_frame_energy = 0.0;  // mean prior energy over consecutive joint PGs
};

struct ParseResult {
    pg::PgSet pgs;
    TrackState tracks;
    RunSummary summary;
};

ParseResult parse_sequence(const worldsim::ObservationLog& obs, const worldsim::Calibration& calib,
                           const PipelineParams& params, const TraceHook& trace = {});

/// Prior energy restricted to tracks present in both frames.
double common_transition_energy(const pg::JointPG& next, const pg::JointPG& prev, const energy::EnergyParams& params);

}  // namespace beliefgraph::inference
