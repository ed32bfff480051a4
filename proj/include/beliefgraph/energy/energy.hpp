#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "beliefgraph/attributes.hpp"
#include "beliefgraph/geometry.hpp"
#include "beliefgraph/pg/graphs.hpp"
#include "beliefgraph/worldsim/camera.hpp"
#include "beliefgraph/worldsim/simulate.hpp"

namespace beliefgraph::energy {

class EnergyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kHeld = 0;
inline constexpr int kFree = 1;

/// Holder-state index used by the transition matrix: 0 = held, 1 = free.
inline int state_index(int holder) { return holder == 0 ? kFree : kHeld; }

/// 2x2 holder-state transition matrix, p[from][to] with indices from state_index.
struct TransitionMatrix {
    std::array<std::array<double, 2>, 2> p{{{0.5, 0.5}, {0.5, 0.5}}};
    double alpha = 0.0;
    long frames = 0;          // consecutive-frame pairs counted
    bool degenerate = false;  // learned from nothing

    static TransitionMatrix uniform() { return {}; }
    void validate() const;
    bool operator==(const TransitionMatrix&) const = default;
};

struct EnergyParams {
    double tau = 1.5;  // meters per frame
    TransitionMatrix transition;
    double w_L = 1.0;
    double w_ST = 1.0;
    double w_A = 1.0;
    double w_S = 1.0;
    double w_Attr = 1.0;
    double w_D = 1.0;
    double w_C = 1.0;
    double theta_hold = 0.5;  // meters
    double c_birth = 4.0;
    double c_death = 4.0;
    double spatial_penalty = 10.0;  // meters, for grounding points outside the frustum
    double score_floor = 1e-6;

    void validate() const;
};

EnergyParams params_from_json(const nlohmann::json& j, EnergyParams base = {});
nlohmann::ordered_json params_to_json(const EnergyParams& p);
nlohmann::ordered_json transition_to_json(const TransitionMatrix& m);
TransitionMatrix transition_from_json(const nlohmann::json& j);

/// Value with a flag set when a degenerate input was clamped or penalized.
struct Flagged {
    double value = 0.0;
    int flagged = 0;
};

/// Indicator of implausible motion. Free objects use their own displacement;
/// held objects (s_prev != 0) use the holder's hand displacement instead.
double motion_energy_object(const Point2& next, const Point2& prev, int s_prev, std::optional<Point2> holder_hand_prev,
                            std::optional<Point2> holder_hand_next, const EnergyParams& params);

/// Indicator of implausible motion of an agent's ground keypoints (centroid displacement).
double motion_energy_agent(std::span<const Point2> next, std::span<const Point2> prev, const EnergyParams& params);

double state_transition_energy(int s_next, int s_prev, const TransitionMatrix& p);

/// Smoothed counts of consecutive-frame holder-state pairs over every object.
TransitionMatrix learn_state_transition(std::span<const worldsim::GroundTruthLog> logs, double alpha);

std::vector<double> pool_features(std::span<const std::vector<double>> features);

double feature_distance(std::span<const double> a, std::span<const double> b);

/// Robot-node id -> joint-track id, separately for objects and agents.
struct Correspondence {
    std::map<int, int> objects;
    std::map<int, int> agents;
};

double appearance_energy(const pg::JointPG& joint, const pg::RobotPG& robot, const Correspondence& c);

/// Sum of ground-plane distances between joint positions and lifted robot
/// grounding points (box bottom-center, foot keypoint).
Flagged spatial_energy(const pg::JointPG& joint, const pg::RobotPG& robot, const worldsim::Camera& camera,
                       const Correspondence& c, const EnergyParams& params);

int attribute_energy(const Attributes& a, const Attributes& b);

/// w_D * -log(detection score) + w_C * -log(score of each asserted attribute value).
Flagged likelihood_energy(double detection_score, const AttributeScores* attributes, const EnergyParams& params);

/// Full per-frame prior: sum over objects of w_L * motion + w_ST * state
/// transition, plus w_L * motion over agents. Track ids must match.
double transition_energy(const pg::JointPG& next, const pg::JointPG& prev, const EnergyParams& params);

double compatibility_energy(const pg::JointPG& joint, const pg::RobotPG& robot, const worldsim::Camera& camera,
                            const Correspondence& c, const EnergyParams& params);

}  // namespace beliefgraph::energy
