#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "beliefgraph/attributes.hpp"
#include "beliefgraph/geometry.hpp"
#include "beliefgraph/worldsim/simulate.hpp"

namespace beliefgraph::pg {

using worldsim::Keypoints;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Object tuple. `id` is a provisional per-frame index inside a fresh RobotPG
/// and a track id once association has grounded it.
struct ObjectNode {
    int id = 0;
    std::map<int, Box> boxes;      // camera id -> box, only where observed
    std::map<int, double> scores;  // camera id -> detection score
    Point2 position;
    std::vector<double> feature;
    int holder = 0;
    Attributes attributes;
    bool empty = false;
    double likelihood = 0.0;

    bool operator==(const ObjectNode&) const = default;
};

struct AgentNode {
    int id = 0;
    std::map<int, Keypoints> keypoints;
    std::map<int, Box> boxes;
    std::map<int, double> scores;
    Point2 position;
    Point2 hand;
    std::vector<double> feature;
    std::optional<Point2> reach;
    double likelihood = 0.0;

    bool operator==(const AgentNode&) const = default;
};

/// What one camera grounds in one frame.
struct RobotPG {
    int camera = 0;
    int time = 0;
    std::vector<ObjectNode> objects;
    std::vector<AgentNode> agents;

    const ObjectNode* object(int id) const;
    const AgentNode* agent(int id) const;
    bool operator==(const RobotPG&) const = default;
};

enum class TrackStatus { live, exited_view };

struct ObjectTrack : ObjectNode {
    TrackStatus status = TrackStatus::live;
    int last_seen = 0;
    bool operator==(const ObjectTrack&) const = default;
};

struct AgentTrack : AgentNode {
    TrackStatus status = TrackStatus::live;
    int last_seen = 0;
    bool operator==(const AgentTrack&) const = default;
};

/// Fused cross-view, cross-time knowledge at one frame. Tracks ordered by id.
struct JointPG {
    int time = 0;
    std::vector<ObjectTrack> objects;
    std::vector<AgentTrack> agents;

    const ObjectTrack* object(int id) const;
    const AgentTrack* agent(int id) const;
    bool operator==(const JointPG&) const = default;
};

struct BeliefEntry {
    int object = 0;
    Point2 position;
    Box box;  // in the belief's camera
    Attributes attributes;
    bool empty = false;
    bool operator==(const BeliefEntry&) const = default;
};

/// What camera `camera` last saw agent `agent` being able to see, frozen at
/// `last_seen`. Entries ordered by object id.
struct BeliefPG {
    int camera = 0;
    int agent = 0;
    int last_seen = 0;
    std::vector<BeliefEntry> objects;

    const BeliefEntry* object(int id) const;
    bool operator==(const BeliefPG&) const = default;
};

/// Belief of `agent_id` formed from a grounded robot PG. Throws GraphError when
/// the agent is not in the graph.
BeliefPG snapshot_belief(const RobotPG& robot_pg, int agent_id);

/// Entries of `fresh` override those of `previous`; objects missing from
/// `fresh` keep their previous entry. Camera, agent and time come from `fresh`.
BeliefPG merge_belief(const BeliefPG& previous, const BeliefPG& fresh);

/// Every graph produced by one inference run.
struct PgSet {
    std::vector<RobotPG> robot;    // ordered by (time, camera)
    std::vector<JointPG> joint;    // joint[t - 1] is frame t
    std::vector<BeliefPG> beliefs; // every belief version, ordered by (last_seen, camera, agent)

    const RobotPG* robot_pg(int camera, int time) const;
    const JointPG* joint_pg(int time) const;
    /// Latest version of every (camera, agent) belief with last_seen <= time.
    std::vector<const BeliefPG*> beliefs_at(int time) const;

    bool operator==(const PgSet&) const = default;
};

}  // namespace beliefgraph::pg
