#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "beliefgraph/attributes.hpp"
#include "beliefgraph/geometry.hpp"
#include "beliefgraph/worldsim/scenario.hpp"

namespace beliefgraph::worldsim {

/// Script cannot be executed; `event_index` points into Scenario::script.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::size_t event_index, const std::string& what)
        : std::runtime_error("script[" + std::to_string(event_index) + "]: " + what),
          event_index_(event_index) {}
    std::size_t event_index() const { return event_index_; }

private:
    std::size_t event_index_;
};

struct Detection {
    Box box;
    double score = 1.0;
    std::vector<double> feature;
    AttributeScores attributes;
};

struct Keypoints {
    Point2 foot;
    Point2 hand;
    Point2 shoulder;
    bool operator==(const Keypoints&) const = default;
};

struct AgentObservation {
    Keypoints keypoints;
    Box box;
    double score = 1.0;
    std::vector<double> feature;
    std::optional<Point2> reach;  // ground-plane unit direction of a reach gesture
};

struct FrameObservation {
    int time = 1;
    int camera = 0;
    std::vector<Detection> detections;
    std::vector<AgentObservation> agents;
};

/// One record per (frame, camera), ordered by time then camera id.
using ObservationLog = std::vector<FrameObservation>;

struct ObjectTruth {
    int id = 0;
    Point2 position;
    int holder = 0;
    bool empty = false;
    bool hidden = false;
    int room = -1;
};

struct AgentTruth {
    int id = 0;
    bool present = true;
    Point2 position;
    Point2 hand;
    int room = -1;
    std::optional<Point2> reach;
};

struct ViewTruth {
    int camera = 0;
    std::vector<std::pair<int, Box>> objects;  // visible objects and their noiseless boxes
    std::vector<std::pair<int, Box>> agents;
    std::vector<int> detection_sources;        // object id per emitted detection, -1 = false positive
    std::vector<int> agent_sources;            // agent id per emitted agent observation
};

struct FrameTruth {
    int time = 1;
    std::vector<ObjectTruth> objects;  // ordered as GroundTruthLog::objects
    std::vector<AgentTruth> agents;    // ordered as GroundTruthLog::agents
    std::vector<ViewTruth> views;      // ordered as GroundTruthLog::cameras

    const ObjectTruth* object(int id) const;
    const AgentTruth* agent(int id) const;
    const ViewTruth* view(int camera) const;
};

struct InteractionRecord {
    int object = 0;
    int time = 0;
    EventKind kind = EventKind::pick_up;
    int actor = 0;
};

struct ReachRecord {
    int agent = 0;
    int time = 0;       // first frame of the gesture
    int last_time = 0;  // last frame of the gesture
    int target = 0;     // object id, 0 when aimed at a position
};

struct GroundTruthLog {
    std::string scenario;
    int horizon = 0;
    std::vector<int> cameras;
    std::vector<ObjectSpec> objects;
    std::vector<int> agents;
    std::vector<InteractionRecord> interactions;
    std::vector<ReachRecord> reaches;
    std::vector<FrameTruth> frames;  // frames[t - 1] is frame t

    const FrameTruth& frame(int t) const { return frames.at(static_cast<std::size_t>(t - 1)); }
    const ObjectSpec* object(int id) const;
    /// Interaction events on `object` with time in (from, to].
    int interactions_between(int object, int from, int to) const;
};

struct SimulationResult {
    GroundTruthLog truth;
    ObservationLog observations;
};

/// Runs the script and renders every (frame, camera) observation. A pure
/// function of (scenario, seed).
SimulationResult simulate(const Scenario& scenario, std::uint64_t seed);

/// Rounds to 9 significant decimal digits (the serialized feature precision).
double round_significant(double v);

}  // namespace beliefgraph::worldsim
