#include "beliefgraph/energy/energy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace beliefgraph::energy {

using nlohmann::json;
using nlohmann::ordered_json;

void TransitionMatrix::validate() const {
    for (const auto& row : p) {
        if (!(row[0] > 0.0) || !(row[1] > 0.0)) throw EnergyError("transition matrix entries must be positive");
        if (std::abs(row[0] + row[1] - 1.0) > 1e-9) throw EnergyError("transition matrix rows must sum to 1");
    }
}

void EnergyParams::validate() const {
    if (!(tau > 0.0)) throw EnergyError("tau must be positive");
    for (double w : {w_L, w_ST, w_A, w_S, w_Attr, w_D, w_C}) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw EnergyError("energy weights must be finite and nonnegative");
    }
    if (!(theta_hold > 0.0)) throw EnergyError("theta_hold must be positive");
    if (!(c_birth >= 0.0) || !(c_death >= 0.0)) throw EnergyError("birth/death costs must be nonnegative");
    if (!(score_floor > 0.0 && score_floor < 1.0)) throw EnergyError("score floor must lie in (0, 1)");
    transition.validate();
}

ordered_json transition_to_json(const TransitionMatrix& m) {
    return ordered_json{{"held_held", m.p[kHeld][kHeld]}, {"held_free", m.p[kHeld][kFree]},
                        {"free_held", m.p[kFree][kHeld]}, {"free_free", m.p[kFree][kFree]},
                        {"alpha", m.alpha},               {"frames", m.frames},
                        {"degenerate", m.degenerate}};
}

TransitionMatrix transition_from_json(const json& j) {
    TransitionMatrix m;
    m.p[kHeld][kHeld] = j.at("held_held").get<double>();
    m.p[kHeld][kFree] = j.at("held_free").get<double>();
    m.p[kFree][kHeld] = j.at("free_held").get<double>();
    m.p[kFree][kFree] = j.at("free_free").get<double>();
    m.alpha = j.value("alpha", 0.0);
    m.frames = j.value("frames", 0L);
    m.degenerate = j.value("degenerate", false);
    m.validate();
    return m;
}

EnergyParams params_from_json(const json& j, EnergyParams p) {
    if (!j.is_object()) throw EnergyError("energy parameters: expected an object");
    static const std::set<std::string> known{"tau", "w_L", "w_ST", "w_A", "w_S", "w_Attr", "w_D",
                                             "w_C", "theta_hold", "c_birth", "c_death", "spatial_penalty",
                                             "score_floor", "transition"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw EnergyError("energy parameters: unknown field '" + key + "'");
    }
    auto read = [&](const char* key, double& dst) {
        if (j.contains(key)) dst = j.at(key).get<double>();
    };
    read("tau", p.tau);
    read("w_L", p.w_L);
    read("w_ST", p.w_ST);
    read("w_A", p.w_A);
    read("w_S", p.w_S);
    read("w_Attr", p.w_Attr);
    read("w_D", p.w_D);
    read("w_C", p.w_C);
    read("theta_hold", p.theta_hold);
    read("c_birth", p.c_birth);
    read("c_death", p.c_death);
    read("spatial_penalty", p.spatial_penalty);
    read("score_floor", p.score_floor);
    if (j.contains("transition")) p.transition = transition_from_json(j.at("transition"));
    p.validate();
    return p;
}

ordered_json params_to_json(const EnergyParams& p) {
    return ordered_json{{"tau", p.tau},
                        {"w_L", p.w_L},
                        {"w_ST", p.w_ST},
                        {"w_A", p.w_A},
                        {"w_S", p.w_S},
                        {"w_Attr", p.w_Attr},
                        {"w_D", p.w_D},
                        {"w_C", p.w_C},
                        {"theta_hold", p.theta_hold},
                        {"c_birth", p.c_birth},
                        {"c_death", p.c_death},
                        {"spatial_penalty", p.spatial_penalty},
                        {"score_floor", p.score_floor},
                        {"transition", transition_to_json(p.transition)}};
}

double motion_energy_object(const Point2& next, const Point2& prev, int s_prev, std::optional<Point2> holder_hand_prev,
                            std::optional<Point2> holder_hand_next, const EnergyParams& params) {
    if (s_prev != 0) {
        if (!holder_hand_prev || !holder_hand_next) {
            throw EnergyError("held object needs both poses of agent " + std::to_string(s_prev));
        }
        return distance(*holder_hand_next, *holder_hand_prev) > params.tau ? 1.0 : 0.0;
    }
    return distance(next, prev) > params.tau ? 1.0 : 0.0;
}

namespace {
Point2 centroid(std::span<const Point2> pts) {
    Point2 c;
    for (const auto& p : pts) c = c + p;
    return c * (1.0 / static_cast<double>(pts.size()));
}
}  // namespace

double motion_energy_agent(std::span<const Point2> next, std::span<const Point2> prev, const EnergyParams& params) {
    if (next.empty() || prev.empty()) throw EnergyError("agent motion needs nonempty keypoint sets");
    return distance(centroid(next), centroid(prev)) > params.tau ? 1.0 : 0.0;
}

double state_transition_energy(int s_next, int s_prev, const TransitionMatrix& p) {
    return -std::log(p.p[static_cast<std::size_t>(state_index(s_prev))][static_cast<std::size_t>(state_index(s_next))]);
}

TransitionMatrix learn_state_transition(std::span<const worldsim::GroundTruthLog> logs, double alpha) {
    if (!(alpha > 0.0)) throw EnergyError("smoothing alpha must be positive");
    TransitionMatrix m;
    m.alpha = alpha;
    if (logs.empty()) {
        m.degenerate = true;
        return m;
    }
    std::array<std::array<double, 2>, 2> counts{};
    for (const auto& log : logs) {
        for (std::size_t f = 1; f < log.frames.size(); ++f) {
            const auto& prev = log.frames[f - 1].objects;
            const auto& next = log.frames[f].objects;
            for (std::size_t i = 0; i < prev.size() && i < next.size(); ++i) {
                counts[static_cast<std::size_t>(state_index(prev[i].holder))][static_cast<std::size_t>(state_index(next[i].holder))] += 1.0;
                ++m.frames;
            }
        }
    }
    for (std::size_t r = 0; r < 2; ++r) {
        const double total = counts[r][0] + counts[r][1] + 2.0 * alpha;
        m.p[r][0] = (counts[r][0] + alpha) / total;
        m.p[r][1] = (counts[r][1] + alpha) / total;
    }
    return m;
}

std::vector<double> pool_features(std::span<const std::vector<double>> features) {
    if (features.empty()) throw EnergyError("cannot pool an empty feature list");
    const std::size_t dim = features.front().size();
    for (const auto& f : features) {
        if (f.size() != dim) throw EnergyError("feature dimensions differ");
    }
    // Summing each coordinate in sorted order makes the result exactly
    // independent of the input order.
    std::vector<double> mean(dim, 0.0);
    std::vector<double> column(features.size());
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t k = 0; k < features.size(); ++k) column[k] = features[k][i];
        std::sort(column.begin(), column.end());
        for (double x : column) mean[i] += x;
    }
    double norm = 0.0;
    for (double x : mean) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return mean;
    for (auto& x : mean) x /= norm;
    return mean;
}

double feature_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw EnergyError("feature dimensions differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double appearance_energy(const pg::JointPG& joint, const pg::RobotPG& robot, const Correspondence& c) {
    double e = 0.0;
    for (const auto& [node, track] : c.objects) {
        const auto* n = robot.object(node);
        const auto* t = joint.object(track);
        if (n == nullptr || t == nullptr) throw EnergyError("dangling object correspondence");
        e += feature_distance(t->feature, n->feature);
    }
    for (const auto& [node, track] : c.agents) {
        const auto* n = robot.agent(node);
        const auto* t = joint.agent(track);
        if (n == nullptr || t == nullptr) throw EnergyError("dangling agent correspondence");
        e += feature_distance(t->feature, n->feature);
    }
    return e;
}

Flagged spatial_energy(const pg::JointPG& joint, const pg::RobotPG& robot, const worldsim::Camera& camera,
                       const Correspondence& c, const EnergyParams& params) {
    Flagged out;
    auto term = [&](const Point2& world, const Point2& pixel) {
        const auto lifted = camera.lift(pixel);
        if (!lifted) {
            out.value += params.spatial_penalty;
            ++out.flagged;
            return;
        }
        out.value += distance(world, *lifted);
    };
    for (const auto& [node, track] : c.objects) {
        const auto* n = robot.object(node);
        const auto* t = joint.object(track);
        if (n == nullptr || t == nullptr) throw EnergyError("dangling object correspondence");
        const auto box = n->boxes.find(robot.camera);
        if (box == n->boxes.end()) throw EnergyError("robot node without a box in its own view");
        term(t->position, box->second.bottom_center());
    }
    for (const auto& [node, track] : c.agents) {
        const auto* n = robot.agent(node);
        const auto* t = joint.agent(track);
        if (n == nullptr || t == nullptr) throw EnergyError("dangling agent correspondence");
        const auto kp = n->keypoints.find(robot.camera);
        if (kp == n->keypoints.end()) throw EnergyError("robot agent node without keypoints in its own view");
        term(t->position, kp->second.foot);
    }
    return out;
}

int attribute_energy(const Attributes& a, const Attributes& b) { return attribute_mismatches(a, b); }

Flagged likelihood_energy(double detection_score, const AttributeScores* attributes, const EnergyParams& params) {
    Flagged out;
    auto neg_log = [&](double s) {
        if (s < params.score_floor) {
            s = params.score_floor;
            ++out.flagged;
        }
        return -std::log(s);
    };
    out.value = params.w_D * neg_log(detection_score);
    if (attributes != nullptr) {
        double c = 0.0;
        for (const auto* slot : {&attributes->color, &attributes->material, &attributes->category}) {
            if (slot->empty()) throw EnergyError("attribute score table has an empty slot");
            c += neg_log((*slot)[argmax(*slot)]);
        }
        out.value += params.w_C * c;
    }
    return out;
}

double transition_energy(const pg::JointPG& next, const pg::JointPG& prev, const EnergyParams& params) {
    if (next.objects.size() != prev.objects.size() || next.agents.size() != prev.agents.size()) {
        throw EnergyError("track sets differ between frames");
    }
    auto hand = [](const pg::JointPG& g, int agent) -> std::optional<Point2> {
        const auto* a = g.agent(agent);
        if (a == nullptr) return std::nullopt;
        return a->hand;
    };
    double e = 0.0;
    for (const auto& o : next.objects) {
        const auto* p = prev.object(o.id);
        if (p == nullptr) throw EnergyError("object track " + std::to_string(o.id) + " missing in previous frame");
        const double motion = motion_energy_object(o.position, p->position, p->holder, hand(prev, p->holder),
                                                   hand(next, p->holder), params);
        e += params.w_L * motion + params.w_ST * state_transition_energy(o.holder, p->holder, params.transition);
    }
    for (const auto& a : next.agents) {
        const auto* p = prev.agent(a.id);
        if (p == nullptr) throw EnergyError("agent track " + std::to_string(a.id) + " missing in previous frame");
        const Point2 n_pos[] = {a.position};
        const Point2 p_pos[] = {p->position};
        e += params.w_L * motion_energy_agent(n_pos, p_pos, params);
    }
    return e;
}

double compatibility_energy(const pg::JointPG& joint, const pg::RobotPG& robot, const worldsim::Camera& camera,
                            const Correspondence& c, const EnergyParams& params) {
    double attr = 0.0;
    for (const auto& [node, track] : c.objects) {
        const auto* n = robot.object(node);
        const auto* t = joint.object(track);
        if (n == nullptr || t == nullptr) throw EnergyError("dangling object correspondence");
        attr += attribute_energy(t->attributes, n->attributes);
    }
    return params.w_A * appearance_energy(joint, robot, c) + params.w_S * spatial_energy(joint, robot, camera, c, params).value +
           params.w_Attr * attr;
}

}  // namespace beliefgraph::energy
