#include "beliefgraph/inference/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

namespace beliefgraph::inference {

using energy::feature_distance;
using pg::AgentNode;
using pg::ObjectNode;
using pg::RobotPG;

void PipelineParams::validate() const {
    energy.validate();
    if (score_threshold < 0.0 || score_threshold >= 1.0) throw InferenceError("score threshold must lie in [0, 1)");
    if (hold_frames < 1) throw InferenceError("hold_frames must be at least 1");
    if (confirm_hits < 1) throw InferenceError("confirm_hits must be at least 1");
    if (tentative_max_missing < 0) throw InferenceError("tentative_max_missing must be nonnegative");
    if (belief_fill_gap < 0) throw InferenceError("belief_fill_gap must be nonnegative");
    if (hold_release_move < 0.0) throw InferenceError("hold_release_move must be nonnegative");
    if (!(fusion_gate > 0.0)) throw InferenceError("fusion_gate must be positive");
    if (!(association_gate > 0.0)) throw InferenceError("association_gate must be positive");
}

PipelineParams pipeline_from_json(const nlohmann::json& j, PipelineParams p) {
    if (!j.is_object()) throw InferenceError("pipeline parameters: expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!pipeline_to_json(p).contains(key)) throw InferenceError("pipeline parameters: unknown field '" + key + "'");
    }
    if (j.contains("energy")) p.energy = energy::params_from_json(j.at("energy"), p.energy);
    p.score_threshold = j.value("score_threshold", p.score_threshold);
    p.hold_frames = j.value("hold_frames", p.hold_frames);
    p.hold_release_move = j.value("hold_release_move", p.hold_release_move);
    p.holding = j.value("holding", p.holding);
    p.confirm_hits = j.value("confirm_hits", p.confirm_hits);
    p.tentative_max_missing = j.value("tentative_max_missing", p.tentative_max_missing);
    p.belief_fill_gap = j.value("belief_fill_gap", p.belief_fill_gap);
    p.fusion_gate = j.value("fusion_gate", p.fusion_gate);
    p.association_gate = j.value("association_gate", p.association_gate);
    p.validate();
    return p;
}

nlohmann::ordered_json pipeline_to_json(const PipelineParams& p) {
    return nlohmann::ordered_json{{"energy", energy::params_to_json(p.energy)},
                                  {"score_threshold", p.score_threshold},
                                  {"hold_frames", p.hold_frames},
                                  {"hold_release_move", p.hold_release_move},
                                  {"holding", p.holding},
                                  {"confirm_hits", p.confirm_hits},
                                  {"tentative_max_missing", p.tentative_max_missing},
                                  {"belief_fill_gap", p.belief_fill_gap},
                                  {"fusion_gate", p.fusion_gate},
                                  {"association_gate", p.association_gate}};
}

const ObjectTrackState* TrackState::object(int id) const {
    for (const auto& o : objects) {
        if (o.track.id == id) return &o;
    }
    return nullptr;
}

const AgentTrackState* TrackState::agent(int id) const {
    for (const auto& a : agents) {
        if (a.track.id == id) return &a;
    }
    return nullptr;
}

pg::RobotPG build_robot_pg(const worldsim::FrameObservation& obs, const worldsim::Calibration& calib,
                           const PipelineParams& params) {
    const worldsim::Camera* cam = calib.camera(obs.camera);
    if (cam == nullptr) throw InferenceError("no calibration for camera " + std::to_string(obs.camera));
    RobotPG g;
    g.camera = obs.camera;
    g.time = obs.time;
    int next = 0;
    for (const auto& d : obs.detections) {
        if (!(d.score > params.score_threshold)) continue;
        const auto ground = cam->lift(d.box.bottom_center());
        if (!ground) continue;
        ObjectNode n;
        n.id = next++;
        n.boxes[g.camera] = d.box;
        n.scores[g.camera] = d.score;
        n.position = *ground;
        n.feature = d.feature;
        n.attributes = asserted_attributes(d.attributes);
        n.empty = d.attributes.empty > 0.5;
        n.likelihood = energy::likelihood_energy(d.score, &d.attributes, params.energy).value;
        g.objects.push_back(std::move(n));
    }
    next = 0;
    for (const auto& a : obs.agents) {
        if (!(a.score > params.score_threshold)) continue;
        const auto foot = cam->lift(a.keypoints.foot);
        const auto hand = cam->lift(a.keypoints.hand);
        if (!foot || !hand) continue;
        AgentNode n;
        n.id = next++;
        n.keypoints[g.camera] = a.keypoints;
        n.boxes[g.camera] = a.box;
        n.scores[g.camera] = a.score;
        n.position = *foot;
        n.hand = *hand;
        n.feature = a.feature;
        n.reach = a.reach;
        n.likelihood = energy::likelihood_energy(a.score, nullptr, params.energy).value;
        g.agents.push_back(std::move(n));
    }
    return g;
}

namespace {

std::vector<double> normalized(std::vector<double> v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0.0) {
        for (auto& x : v) x /= n;
    }
    return v;
}

void accumulate(std::vector<double>& sum, const std::vector<double>& f) {
    if (sum.empty()) sum.assign(f.size(), 0.0);
    if (sum.size() != f.size()) throw InferenceError("feature dimensions differ across detections");
    for (std::size_t i = 0; i < f.size(); ++i) sum[i] += f[i];
}

template <std::size_t N>
std::size_t majority(const std::vector<std::size_t>& values) {
    std::array<int, N> counts{};
    for (auto v : values) ++counts[v];
    std::size_t best = values.front();
    for (auto v : values) {
        if (counts[v] > counts[best]) best = v;
    }
    return best;
}

Attributes vote(const std::vector<Attributes>& attrs) {
    std::vector<std::size_t> c, m, k;
    for (const auto& a : attrs) {
        c.push_back(static_cast<std::size_t>(a.color));
        m.push_back(static_cast<std::size_t>(a.material));
        k.push_back(static_cast<std::size_t>(a.category));
    }
    return {static_cast<Color>(majority<kColorNames.size()>(c)), static_cast<Material>(majority<kMaterialNames.size()>(m)),
            static_cast<Category>(majority<kCategoryNames.size()>(k))};
}

struct ObjectAcc {
    Point2 pos_sum;
    std::vector<double> feat_sum;
    std::vector<Attributes> attrs;
    double empty_sum = 0.0;
    double width_sum = 0.0;
    double aspect_sum = 0.0;
    double likelihood = 0.0;
    FusedObject out;

    Point2 position() const { return pos_sum * (1.0 / static_cast<double>(out.members.size())); }
};

struct AgentAcc {
    Point2 pos_sum;
    Point2 hand_sum;
    std::vector<double> feat_sum;
    double likelihood = 0.0;
    FusedAgent out;

    Point2 position() const { return pos_sum * (1.0 / static_cast<double>(out.members.size())); }
};

std::vector<std::size_t> camera_order(std::span<const RobotPG> pgs) {
    std::vector<std::size_t> order(pgs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pgs[a].camera < pgs[b].camera; });
    return order;
}

// Whether a fused entity at `p` could have been seen by `cam` at all. Pairings
// with views that cannot contain the entity are forbidden.
bool could_see(const worldsim::Calibration& calib, const worldsim::Camera& cam, const Point2& p, double width_m,
               double aspect) {
    constexpr double kMarginPx = 16.0;
    const int room = calib.room_of(p);
    if (room >= 0 && room != calib.camera_room(cam)) return false;
    double depth = 0.0;
    cam.project_unchecked(p, &depth);
    if (depth <= 0.0) return false;
    const Box b = cam.render_box(p, width_m, aspect);
    return b.x1 >= -kMarginPx && b.y1 >= -kMarginPx && b.x2 <= cam.width + kMarginPx && b.y2 <= cam.height + kMarginPx;
}

void emit(const TraceHook& trace, int time, std::string stage, const assignment::CostMatrix& real, double rv, double cv,
          const assignment::PaddedResult& r) {
    if (trace) trace(AssociationTrace{time, std::move(stage), real, rv, cv, r});
}

}  // namespace

Proposals associate_cross_view(std::span<const RobotPG> robot_pgs, const worldsim::Calibration& calib,
                               const PipelineParams& params, const TraceHook& trace) {
    Proposals out;
    if (robot_pgs.empty()) return out;
    out.time = robot_pgs.front().time;
    for (const auto& g : robot_pgs) {
        if (g.time != out.time) throw InferenceError("robot PGs from different frames passed to cross-view fusion");
    }
    const auto& w = params.energy;
    std::vector<ObjectAcc> objects;
    std::vector<AgentAcc> agents;

    for (std::size_t v : camera_order(robot_pgs)) {
        const RobotPG& g = robot_pgs[v];
        const worldsim::Camera* cam = calib.camera(g.camera);
        if (cam == nullptr) throw InferenceError("no calibration for camera " + std::to_string(g.camera));

        assignment::CostMatrix oc(g.objects.size(), objects.size());
        for (std::size_t n = 0; n < g.objects.size(); ++n) {
            const auto& node = g.objects[n];
            for (std::size_t f = 0; f < objects.size(); ++f) {
                const auto& acc = objects[f];
                const double k = static_cast<double>(acc.out.members.size());
                if (distance(node.position, acc.position()) > params.fusion_gate ||
                    !could_see(calib, *cam, acc.position(), acc.width_sum / k, acc.aspect_sum / k)) {
                    oc(n, f) = assignment::kForbidden;
                    continue;
                }
                oc(n, f) = w.w_A * feature_distance(node.feature, normalized(acc.feat_sum)) +
                           w.w_S * distance(node.position, acc.position()) +
                           w.w_Attr * attribute_mismatches(node.attributes, acc.attrs.front());
            }
        }
        const auto om = assignment::solve_padded(oc, w.c_birth, 0.0);
        emit(trace, out.time, "cross-view objects camera " + std::to_string(g.camera), oc, w.c_birth, 0.0, om);
        out.cost += om.cost;
        auto add_object = [&](ObjectAcc& acc, std::size_t n) {
            const auto& node = g.objects[n];
            const Box& box = node.boxes.at(g.camera);
            acc.out.members.push_back({v, n});
            acc.pos_sum = acc.pos_sum + node.position;
            accumulate(acc.feat_sum, node.feature);
            acc.attrs.push_back(node.attributes);
            acc.empty_sum += node.empty ? 1.0 : 0.0;
            const double ppm = cam->pixels_per_meter(node.position);
            acc.width_sum += ppm > 0.0 ? box.width() / ppm : 0.0;
            acc.aspect_sum += box.width() > 0.0 ? box.height() / box.width() : 1.0;
            acc.likelihood += node.likelihood;
            acc.out.boxes[g.camera] = box;
            acc.out.scores[g.camera] = node.scores.at(g.camera);
        };
        for (const auto& [n, f] : om.matches) add_object(objects[f], n);
        for (std::size_t n : om.unmatched_rows) {
            objects.emplace_back();
            add_object(objects.back(), n);
        }

        assignment::CostMatrix ac(g.agents.size(), agents.size());
        for (std::size_t n = 0; n < g.agents.size(); ++n) {
            for (std::size_t f = 0; f < agents.size(); ++f) {
                if (distance(g.agents[n].position, agents[f].position()) > params.fusion_gate) {
                    ac(n, f) = assignment::kForbidden;
                    continue;
                }
                ac(n, f) = w.w_A * feature_distance(g.agents[n].feature, normalized(agents[f].feat_sum)) +
                           w.w_S * distance(g.agents[n].position, agents[f].position());
            }
        }
        const auto am = assignment::solve_padded(ac, w.c_birth, 0.0);
        emit(trace, out.time, "cross-view agents camera " + std::to_string(g.camera), ac, w.c_birth, 0.0, am);
        out.cost += am.cost;
        auto add_agent = [&](AgentAcc& acc, std::size_t n) {
            const auto& node = g.agents[n];
            acc.out.members.push_back({v, n});
            acc.pos_sum = acc.pos_sum + node.position;
            acc.hand_sum = acc.hand_sum + node.hand;
            accumulate(acc.feat_sum, node.feature);
            acc.likelihood += node.likelihood;
            acc.out.keypoints[g.camera] = node.keypoints.at(g.camera);
            acc.out.boxes[g.camera] = node.boxes.at(g.camera);
            acc.out.scores[g.camera] = node.scores.at(g.camera);
            if (!acc.out.reach && node.reach) acc.out.reach = node.reach;
        };
        for (const auto& [n, f] : am.matches) add_agent(agents[f], n);
        for (std::size_t n : am.unmatched_rows) {
            agents.emplace_back();
            add_agent(agents.back(), n);
        }
    }

    for (auto& acc : objects) {
        const double k = static_cast<double>(acc.out.members.size());
        acc.out.position = acc.position();
        acc.out.feature = normalized(acc.feat_sum);
        acc.out.attributes = vote(acc.attrs);
        acc.out.empty_prob = acc.empty_sum / k;
        acc.out.width_m = acc.width_sum / k;
        acc.out.aspect = acc.aspect_sum / k;
        acc.out.likelihood = acc.likelihood;
        out.objects.push_back(std::move(acc.out));
    }
    for (auto& acc : agents) {
        const double k = static_cast<double>(acc.out.members.size());
        acc.out.position = acc.position();
        acc.out.hand = acc.hand_sum * (1.0 / k);
        acc.out.feature = normalized(acc.feat_sum);
        acc.out.likelihood = acc.likelihood;
        out.agents.push_back(std::move(acc.out));
    }
    return out;
}

namespace {

/// Nearest confirmed agent observed this frame whose hand is within the hold radius.
int nearest_holder(const Point2& p, const TrackState& tracks, const PipelineParams& params) {
    int best = 0;
    double best_d = params.energy.theta_hold;
    for (const auto& a : tracks.agents) {
        if (!a.confirmed || a.track.last_seen != tracks.time) continue;
        const double d = distance(p, a.track.hand);
        if (d < best_d) {
            best_d = d;
            best = a.track.id;
        }
    }
    return best;
}

void update_votes(ObjectTrackState& o, const Attributes& a) {
    const std::size_t sizes[3] = {kColorNames.size(), kMaterialNames.size(), kCategoryNames.size()};
    const std::size_t vals[3] = {static_cast<std::size_t>(a.color), static_cast<std::size_t>(a.material),
                                 static_cast<std::size_t>(a.category)};
    std::size_t best[3];
    for (std::size_t s = 0; s < 3; ++s) {
        if (o.votes[s].empty()) o.votes[s].assign(sizes[s], 0);
        ++o.votes[s][vals[s]];
        best[s] = vals[s];
        for (std::size_t i = 0; i < sizes[s]; ++i) {
            if (o.votes[s][i] > o.votes[s][best[s]]) best[s] = i;
        }
    }
    o.track.attributes = {static_cast<Color>(best[0]), static_cast<Material>(best[1]), static_cast<Category>(best[2])};
}

void observe_object(ObjectTrackState& o, const FusedObject& p, int t) {
    o.track.position = p.position;
    accumulate(o.feat_sum, p.feature);
    o.track.feature = normalized(o.feat_sum);
    o.track.boxes = p.boxes;
    o.track.scores = p.scores;
    o.track.likelihood = p.likelihood;
    o.track.status = pg::TrackStatus::live;
    o.track.last_seen = t;
    o.seen_position = p.position;
    o.width_m = p.width_m;
    o.aspect = p.aspect;
    update_votes(o, p.attributes);
    const bool empty = p.empty_prob > 0.5;
    if (o.hits == 0) {
        o.track.empty = empty;
    } else if (empty != o.track.empty) {
        if (++o.empty_streak >= 2) {
            o.track.empty = empty;
            o.empty_streak = 0;
        }
    } else {
        o.empty_streak = 0;
    }
    ++o.hits;
}

void observe_agent(AgentTrackState& a, const FusedAgent& p, int t) {
    a.track.position = p.position;
    a.track.hand = p.hand;
    accumulate(a.feat_sum, p.feature);
    a.track.feature = normalized(a.feat_sum);
    a.track.reach = p.reach;
    a.track.keypoints = p.keypoints;
    a.track.boxes = p.boxes;
    a.track.scores = p.scores;
    a.track.likelihood = p.likelihood;
    a.track.status = pg::TrackStatus::live;
    a.track.last_seen = t;
    ++a.hits;
}

}  // namespace

Grounding associate_temporal(const Proposals& proposals, TrackState& tracks, const PipelineParams& params,
                             const TraceHook& trace) {
    const int t = proposals.time;
    const auto& w = params.energy;
    tracks.time = t;
    Grounding grounding;
    grounding.agents.assign(proposals.agents.size(), 0);
    grounding.objects.assign(proposals.objects.size(), 0);

    // Agents first: object costs depend on where the hands are now.
    for (auto& a : tracks.agents) a.previous_hand = a.track.hand;
    assignment::CostMatrix ac(tracks.agents.size(), proposals.agents.size());
    for (std::size_t r = 0; r < tracks.agents.size(); ++r) {
        const auto& a = tracks.agents[r];
        const double gap = std::max(1, t - a.track.last_seen);
        for (std::size_t c = 0; c < proposals.agents.size(); ++c) {
            const auto& p = proposals.agents[c];
            const double d = distance(p.position, a.track.position);
            const double motion = d / gap > w.tau ? 1.0 : 0.0;
            ac(r, c) = w.w_L * motion + w.w_A * feature_distance(a.track.feature, p.feature) + w.w_S * d;
        }
    }
    const auto am = assignment::solve_padded(ac, w.c_death, w.c_birth);
    emit(trace, t, "temporal agents", ac, w.c_death, w.c_birth, am);
    std::vector<bool> agent_seen(tracks.agents.size(), false);
    for (const auto& [r, c] : am.matches) {
        auto& a = tracks.agents[r];
        observe_agent(a, proposals.agents[c], t);
        if (!a.confirmed && a.hits >= params.confirm_hits) {
            a.confirmed = true;
            ++tracks.births;
        }
        agent_seen[r] = true;
        grounding.agents[c] = a.track.id;
    }
    std::vector<AgentTrackState> kept_agents;
    for (std::size_t r = 0; r < tracks.agents.size(); ++r) {
        auto& a = tracks.agents[r];
        if (!agent_seen[r]) {
            a.track.status = pg::TrackStatus::exited_view;
            a.track.keypoints.clear();
            a.track.boxes.clear();
            a.track.scores.clear();
            a.track.reach.reset();
            if (!a.confirmed && t - a.track.last_seen > params.tentative_max_missing) {
                ++tracks.deaths;
                continue;
            }
        }
        kept_agents.push_back(std::move(a));
    }
    tracks.agents = std::move(kept_agents);
    for (std::size_t c : am.unmatched_cols) {
        AgentTrackState a;
        a.track.id = tracks.next_agent_id++;
        observe_agent(a, proposals.agents[c], t);
        a.previous_hand = a.track.hand;
        if (a.hits >= params.confirm_hits) {
            a.confirmed = true;
            ++tracks.births;
        }
        grounding.agents[c] = a.track.id;
        tracks.agents.push_back(std::move(a));
    }

    std::vector<int> provisional(proposals.objects.size(), 0);
    if (params.holding) {
        for (std::size_t c = 0; c < proposals.objects.size(); ++c) {
            provisional[c] = nearest_holder(proposals.objects[c].position, tracks, params);
        }
    }
    assignment::CostMatrix oc(tracks.objects.size(), proposals.objects.size());
    for (std::size_t r = 0; r < tracks.objects.size(); ++r) {
        const auto& o = tracks.objects[r];
        const double gap = std::max(1, t - o.track.last_seen);
        const AgentTrackState* holder = o.track.holder != 0 ? tracks.agent(o.track.holder) : nullptr;
        for (std::size_t c = 0; c < proposals.objects.size(); ++c) {
            const auto& p = proposals.objects[c];
            const double d_free = distance(p.position, o.seen_position);
            double spatial = d_free;
            double motion = d_free / gap > w.tau ? 1.0 : 0.0;
            if (holder != nullptr) {
                const Point2 predicted = o.seen_position + (holder->track.hand - o.seen_hand);
                spatial = std::min(d_free, distance(p.position, predicted));
                motion = energy::motion_energy_object(p.position, o.seen_position, o.track.holder, holder->previous_hand,
                                                      holder->track.hand, w);
            }
            // A holder out of sight may have carried the object anywhere within walking range.
            const double gate = params.association_gate +
                                (holder != nullptr ? w.tau * std::max(0, t - holder->track.last_seen) : 0.0);
            if (spatial > gate) {
                oc(r, c) = assignment::kForbidden;
                continue;
            }
            oc(r, c) = w.w_L * motion + w.w_ST * energy::state_transition_energy(provisional[c], o.track.holder, w.transition) +
                       w.w_A * feature_distance(o.track.feature, p.feature) + w.w_S * spatial +
                       w.w_Attr * attribute_mismatches(o.track.attributes, p.attributes);
        }
    }
    const auto om = assignment::solve_padded(oc, w.c_death, w.c_birth);
    emit(trace, t, "temporal objects", oc, w.c_death, w.c_birth, om);
    std::vector<bool> object_seen(tracks.objects.size(), false);
    for (const auto& [r, c] : om.matches) {
        auto& o = tracks.objects[r];
        observe_object(o, proposals.objects[c], t);
        if (!o.confirmed && o.hits >= params.confirm_hits) {
            o.confirmed = true;
            ++tracks.births;
        }
        object_seen[r] = true;
        grounding.objects[c] = o.track.id;
    }
    std::vector<ObjectTrackState> kept_objects;
    for (std::size_t r = 0; r < tracks.objects.size(); ++r) {
        auto& o = tracks.objects[r];
        if (!object_seen[r]) {
            o.track.status = pg::TrackStatus::exited_view;
            o.track.boxes.clear();
            o.track.scores.clear();
            if (!o.confirmed && t - o.track.last_seen > params.tentative_max_missing) {
                ++tracks.deaths;
                continue;
            }
        }
        kept_objects.push_back(std::move(o));
    }
    tracks.objects = std::move(kept_objects);
    for (std::size_t c : om.unmatched_cols) {
        ObjectTrackState o;
        o.track.id = tracks.next_object_id++;
        observe_object(o, proposals.objects[c], t);
        if (o.hits >= params.confirm_hits) {
            o.confirmed = true;
            ++tracks.births;
        }
        grounding.objects[c] = o.track.id;
        tracks.objects.push_back(std::move(o));
    }

    // Observed held objects anchor their prediction at the holder's current hand.
    for (auto& o : tracks.objects) {
        if (o.track.last_seen != t || o.track.holder == 0) continue;
        if (const auto* h = tracks.agent(o.track.holder)) o.seen_hand = h->track.hand;
    }
    return grounding;
}

void infer_holding(TrackState& tracks, const PipelineParams& params, std::span<const worldsim::Container> containers) {
    const int t = tracks.time;
    const double theta = params.energy.theta_hold;
    for (auto& o : tracks.objects) {
        const bool observed = o.track.last_seen == t;
        if (!params.holding) {
            o.track.holder = 0;
            if (!observed) o.track.position = o.seen_position;
            continue;
        }
        int holder = o.track.holder;
        if (holder != 0 && tracks.agent(holder) == nullptr) holder = 0;
        if (observed) {
            const int near = nearest_holder(o.track.position, tracks, params);
            if (near != 0) {
                if (o.candidate == near) {
                    ++o.candidate_count;
                } else {
                    o.candidate = near;
                    o.candidate_count = 1;
                }
                o.anchor_agent = near;
                o.anchor_hand = tracks.agent(near)->track.hand;
                if (o.candidate_count >= params.hold_frames) holder = near;
            } else {
                o.candidate = 0;
                o.candidate_count = 0;
                o.anchor_agent = 0;
                if (holder != 0 && distance(o.track.position, tracks.agent(holder)->track.hand) > theta) holder = 0;
            }
            if (holder != 0) o.seen_hand = tracks.agent(holder)->track.hand;
        } else {
            const bool stowed = std::any_of(containers.begin(), containers.end(), [&](const worldsim::Container& k) {
                return distance(k.position, o.seen_position) <= k.radius;
            });
            if (stowed) {
                holder = 0;
                o.anchor_agent = 0;
            }
            if (holder == 0 && o.anchor_agent != 0) {
                const auto* a = tracks.agent(o.anchor_agent);
                if (a != nullptr && distance(a->track.hand, o.anchor_hand) > params.hold_release_move) {
                    holder = o.anchor_agent;
                    o.seen_hand = o.anchor_hand;
                }
            }
            if (holder != 0) {
                o.track.position = o.seen_position + (tracks.agent(holder)->track.hand - o.seen_hand);
            } else {
                o.track.position = o.seen_position;
            }
        }
        o.track.holder = holder;
    }
}

void ground_robot_pgs(std::span<RobotPG> robot_pgs, const Proposals& proposals, const Grounding& grounding,
                      const TrackState& tracks) {
    for (std::size_t p = 0; p < proposals.objects.size(); ++p) {
        const int id = grounding.objects.at(p);
        const auto* track = tracks.object(id);
        for (const auto& m : proposals.objects[p].members) {
            auto& node = robot_pgs[m.view].objects[m.node];
            node.id = id;
            node.holder = track != nullptr ? track->track.holder : 0;
        }
    }
    for (std::size_t p = 0; p < proposals.agents.size(); ++p) {
        for (const auto& m : proposals.agents[p].members) robot_pgs[m.view].agents[m.node].id = grounding.agents.at(p);
    }
}

std::vector<pg::BeliefPG> update_belief_pgs(std::span<const RobotPG> robot_pgs, const TrackState& tracks, BeliefMap& beliefs,
                                            const PipelineParams& params) {
    std::vector<pg::BeliefPG> refreshed;
    for (const auto& g : robot_pgs) {
        RobotPG known = g;
        std::erase_if(known.objects, [&](const ObjectNode& n) {
            const auto* o = tracks.object(n.id);
            return o == nullptr || !o->confirmed;
        });
        for (const auto& a : g.agents) {
            const auto* track = tracks.agent(a.id);
            if (track == nullptr || !track->confirmed) continue;
            pg::BeliefPG fresh = pg::snapshot_belief(known, a.id);
            const auto key = std::pair(g.camera, a.id);
            const auto prev = beliefs.find(key);
            if (prev != beliefs.end()) {
                // The fill state of a container is only visible while it is
                // being handled; a returning agent keeps what they knew.
                if (g.time - prev->second.last_seen > params.belief_fill_gap) {
                    for (auto& e : fresh.objects) {
                        if (const auto* old = prev->second.object(e.object)) e.empty = old->empty;
                    }
                }
                fresh = pg::merge_belief(prev->second, fresh);
            }
            beliefs[key] = fresh;
            refreshed.push_back(std::move(fresh));
        }
    }
    std::sort(refreshed.begin(), refreshed.end(), [](const pg::BeliefPG& a, const pg::BeliefPG& b) {
        return std::pair(a.camera, a.agent) < std::pair(b.camera, b.agent);
    });
    return refreshed;
}

pg::JointPG joint_pg(const TrackState& tracks) {
    pg::JointPG g;
    g.time = tracks.time;
    for (const auto& o : tracks.objects) g.objects.push_back(o.track);
    for (const auto& a : tracks.agents) g.agents.push_back(a.track);
    std::sort(g.objects.begin(), g.objects.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(g.agents.begin(), g.agents.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return g;
}

double common_transition_energy(const pg::JointPG& next, const pg::JointPG& prev, const energy::EnergyParams& params) {
    pg::JointPG n = next, p = prev;
    std::erase_if(n.objects, [&](const auto& o) { return prev.object(o.id) == nullptr; });
    std::erase_if(p.objects, [&](const auto& o) { return next.object(o.id) == nullptr; });
    std::erase_if(n.agents, [&](const auto& a) { return prev.agent(a.id) == nullptr; });
    std::erase_if(p.agents, [&](const auto& a) { return next.agent(a.id) == nullptr; });
    // A held object whose holder is not tracked in both frames has no usable pose pair.
    std::erase_if(n.objects, [&](const auto& o) {
        const auto* q = prev.object(o.id);
        return q->holder != 0 && (n.agent(q->holder) == nullptr || p.agent(q->holder) == nullptr);
    });
    std::erase_if(p.objects, [&](const auto& o) { return n.object(o.id) == nullptr; });
    return energy::transition_energy(n, p, params);
}

ParseResult parse_sequence(const worldsim::ObservationLog& obs, const worldsim::Calibration& calib,
                           const PipelineParams& params, const TraceHook& trace) {
    params.validate();
    ParseResult result;
    if (obs.empty()) return result;

    std::set<int> cameras;
    for (const auto& c : calib.cameras) cameras.insert(c.id);
    int horizon = 0;
    std::map<int, std::vector<const worldsim::FrameObservation*>> by_time;
    for (const auto& f : obs) {
        if (!cameras.contains(f.camera)) throw InferenceError("observation for uncalibrated camera " + std::to_string(f.camera));
        if (f.time < 1) throw InferenceError("frame index " + std::to_string(f.time) + " is not positive");
        horizon = std::max(horizon, f.time);
        by_time[f.time].push_back(&f);
    }
    std::string missing;
    for (int t = 1; t <= horizon; ++t) {
        std::set<int> seen;
        for (const auto* f : by_time[t]) {
            if (!seen.insert(f->camera).second) {
                throw InferenceError("duplicate record for frame " + std::to_string(t) + " camera " + std::to_string(f->camera));
            }
        }
        for (int c : cameras) {
            if (!seen.contains(c)) missing += (missing.empty() ? "" : ", ") + std::to_string(t) + "/" + std::to_string(c);
        }
    }
    if (!missing.empty()) throw InferenceError("missing frames (time/camera): " + missing);

    TrackState tracks;
    BeliefMap beliefs;
    double energy_sum = 0.0;
    for (int t = 1; t <= horizon; ++t) {
        auto frame = by_time[t];
        std::sort(frame.begin(), frame.end(), [](const auto* a, const auto* b) { return a->camera < b->camera; });
        std::vector<RobotPG> robot_pgs(frame.size());
        for (std::size_t k = 0; k < frame.size(); ++k) robot_pgs[k] = build_robot_pg(*frame[k], calib, params);

        const Proposals proposals = associate_cross_view(robot_pgs, calib, params, trace);
        const Grounding grounding = associate_temporal(proposals, tracks, params, trace);
        infer_holding(tracks, params, calib.containers);
        ground_robot_pgs(robot_pgs, proposals, grounding, tracks);
        auto refreshed = update_belief_pgs(robot_pgs, tracks, beliefs, params);

        auto& out = result.pgs;
        for (auto& g : robot_pgs) out.robot.push_back(std::move(g));
        out.joint.push_back(joint_pg(tracks));
        if (out.joint.size() > 1) {
            energy_sum += common_transition_energy(out.joint.back(), out.joint[out.joint.size() - 2], params.energy);
        }
        for (auto& b : refreshed) out.beliefs.push_back(std::move(b));
        spdlog::trace("frame {}: {} object tracks, {} agent tracks", t, tracks.objects.size(), tracks.agents.size());
    }

    auto& s = result.summary;
    s.frames = horizon;
    for (const auto& o : tracks.objects) s.object_tracks += o.confirmed ? 1 : 0;
    for (const auto& a : tracks.agents) s.agent_tracks += a.confirmed ? 1 : 0;
    s.births = tracks.births;
    s.deaths = tracks.deaths;
    s.mean_frame_energy = horizon > 1 ? energy_sum / (horizon - 1) : 0.0;
    result.tracks = std::move(tracks);
    return result;
}

}  // namespace beliefgraph::inference
