#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beliefgraph/worldsim/scenario.hpp"

namespace beliefgraph::worldsim {

/// Plans agent actions frame by frame so that every scripted event is
/// feasible (reach, holder, presence) when the simulator replays it.
class ScriptBuilder {
public:
    explicit ScriptBuilder(Scenario& s);

    Point2 body(int agent) const;
    Point2 hand(int agent) const;
    Point2 object_position(int object) const;

    /// walk-to; returns the arrival frame.
    int walk(int agent, Point2 to, int t);
    /// Walks so that the hand ends on `target`; returns the arrival frame.
    int approach(int agent, Point2 target, int t);
    /// carry-to issued at t (hand must be at the object); returns the frame
    /// at which the objects are free again.
    int carry(int agent, std::vector<int> objects, Point2 dest, int t);
    int pick_up(int agent, int object, int t);
    /// put-down at the hand.
    int put_down(int agent, int object, int t);
    /// Swap two free objects within reach of the hand; returns the frame the swap ends.
    int swap(int agent, int a, int b, int t);
    int empty(int agent, int object, int t);
    int reach(int agent, int object, int t);
    int exit(int agent, int t);
    int enter(int agent, Point2 at, int t);

    /// Sorts the script by time (stable) and stores it in the scenario.
    void finish();

private:
    struct AgentPlan {
        Point2 position;
        Point2 facing{1.0, 0.0};
        bool present = true;
    };
    void push(int t, EventKind kind, int actor, std::vector<int> objects, std::optional<Point2> position);
    int steps(double d) const;

    Scenario& s_;
    std::vector<std::pair<int, AgentPlan>> agents_;
    std::vector<std::pair<int, Point2>> objects_;
    std::vector<Event> events_;

    AgentPlan& agent(int id);
    Point2& object(int id);
};

/// Camera in a room corner looking at the room centre.
Camera corner_camera(int id, const Room& room, int corner);

/// Cameras whose rendered box of an object at `p` lies inside the image by
/// `margin` pixels.
int views_covering(const Calibration& calib, Point2 p, double width, double aspect, double margin = 24.0);

struct TrackingOptions {
    int horizon = 100;
    int min_objects = 12;
    int max_objects = 16;
    int agents = 3;
    double cross_room_share = 0.3;
    NoiseModel noise = tracking_noise();

    static NoiseModel tracking_noise();
};

/// Two rooms joined by an unobserved corridor, two cameras per room,
/// identical-looking cups, three agents moving them about.
Scenario tracking_scenario(std::uint64_t seed, const TrackingOptions& options = {});

struct BeliefOptions {
    bool single_view = false;
    int horizon = 70;
    NoiseModel noise = belief_noise();

    static NoiseModel belief_noise();
};

/// One room with containers; an agent leaves while another rearranges, empties
/// or swaps same-looking objects, then returns and reaches for something.
Scenario belief_scenario(std::uint64_t seed, const BeliefOptions& options = {});

/// Two scenarios identical up to and including the departure of agent 2 and
/// different afterwards. Returns the departure frame as well.
struct InertiaPair {
    Scenario first;
    Scenario second;
    int departed_agent = 2;
    int departure = 0;
};
InertiaPair inertia_pair(std::uint64_t seed);

std::vector<std::string> bundled_fixture_names();
/// Noise-free fixture by name; throws std::invalid_argument for unknown names.
Scenario bundled_fixture(std::string_view name);

}  // namespace beliefgraph::worldsim
