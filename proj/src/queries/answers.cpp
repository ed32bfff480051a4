#include "beliefgraph/queries/answers.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <variant>

namespace beliefgraph::queries {

double iou(const Box& a, const Box& b) {
    const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

struct Candidate {
    int id = 0;
    double d = 0.0;
};

template <typename Node>
std::optional<Candidate> nearest_node(const std::vector<Node>& nodes, int camera, const Box& box) {
    std::optional<Candidate> best;
    const double gate = 2.0 * box.diagonal();
    for (const auto& n : nodes) {
        const auto it = n.boxes.find(camera);
        if (it == n.boxes.end()) continue;
        const double d = distance(it->second.center(), box.center());
        if (d <= gate && (!best || d < best->d || (d == best->d && n.id < best->id))) best = Candidate{n.id, d};
    }
    return best;
}

/// Tracks the view missed at that frame, projected with the query box's footprint.
template <typename Track>
std::optional<Candidate> nearest_projected(const std::vector<Track>& tracks, const worldsim::Calibration& calib,
                                           int camera, const Box& box) {
    const worldsim::Camera* cam = calib.camera(camera);
    if (cam == nullptr || box.width() <= 0.0) return std::nullopt;
    std::optional<Candidate> best;
    const double gate = 2.0 * box.diagonal();
    for (const auto& t : tracks) {
        if (t.boxes.contains(camera) || !calib.sees_point(*cam, t.position)) continue;
        const double ppm = cam->pixels_per_meter(t.position);
        if (ppm <= 0.0) continue;
        const Box b = cam->render_box(t.position, box.width() / ppm, box.height() / box.width());
        const double d = distance(b.center(), box.center());
        if (d <= gate && (!best || d < best->d)) best = Candidate{t.id, d};
    }
    return best;
}

std::optional<int> pick(std::optional<Candidate> detected, std::optional<Candidate> projected) {
    if (projected && (!detected || projected->d < detected->d)) return projected->id;
    if (detected) return detected->id;
    return std::nullopt;
}

Answer located(const Query& q, const std::optional<Located>& loc) {
    if (!loc) return Answer::abstention(q, "no view contains the track");
    Answer a;
    a.id = q.id;
    a.kind = q.kind;
    a.view = loc->view;
    a.box = loc->box;
    return a;
}

std::optional<int> ground_object_at(const pg::PgSet& pgs, const worldsim::Calibration& calib, int camera, int time,
                                    const Box& box) {
    const pg::RobotPG* r = pgs.robot_pg(camera, time);
    const pg::JointPG* joint = pgs.joint_pg(time);
    return pick(r ? nearest_node(r->objects, camera, box) : std::nullopt,
                joint ? nearest_projected(joint->objects, calib, camera, box) : std::nullopt);
}

std::optional<int> ground_agent_at(const pg::PgSet& pgs, const worldsim::Calibration& calib, int camera, int time,
                                   const Box& box) {
    const pg::RobotPG* r = pgs.robot_pg(camera, time);
    const pg::JointPG* joint = pgs.joint_pg(time);
    return pick(r ? nearest_node(r->agents, camera, box) : std::nullopt,
                joint ? nearest_projected(joint->agents, calib, camera, box) : std::nullopt);
}

/// Attributes of track `id`: at t when it exists there, else at its latest
/// earlier appearance.
std::optional<Attributes> track_attributes(const pg::PgSet& pgs, int id, int t) {
    for (int u = std::min<int>(t, static_cast<int>(pgs.joint.size())); u >= 1; --u) {
        if (const auto* o = pgs.joint_pg(u)->object(id)) return o->attributes;
    }
    return std::nullopt;
}

bool has_beliefs(const pg::PgSet& pgs, int agent, int t, int camera) {
    return std::any_of(pgs.beliefs.begin(), pgs.beliefs.end(), [&](const pg::BeliefPG& b) {
        return b.agent == agent && b.last_seen <= t && (camera < 0 || b.camera == camera);
    });
}

Answer answer_belief(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib, const AnswerParams& params,
                     int camera) {
    if (!q.object_box || !q.agent_box) return Answer::abstention(q, "malformed query");
    const auto object = ground_object_at(pgs, calib, q.object_camera, q.object_time, *q.object_box);
    if (!object) return Answer::abstention(q, "ungrounded query");
    const auto agent = ground_agent_at(pgs, calib, q.agent_camera, q.agent_time, *q.agent_box);
    if (!agent) return Answer::abstention(q, "ungrounded agent");
    if (!has_beliefs(pgs, *agent, q.t_q, camera)) return Answer::abstention(q, "no belief state");
    int belief_camera = 0;
    const pg::BeliefEntry* e = believed(pgs, *agent, *object, q.t_q, camera, &belief_camera);
    if (e == nullptr) return Answer::abstention(q, "object absent from the agent's belief");

    const Attributes attrs = track_attributes(pgs, *object, q.t_q).value_or(e->attributes);
    const pg::JointPG* joint = pgs.joint_pg(q.t_q);
    int best = 0;
    double best_d = params.match_radius;
    if (joint != nullptr) {
        for (const auto& o : joint->objects) {
            if (o.attributes != attrs) continue;
            const double d = distance(o.position, e->position);
            if (d <= best_d && (best == 0 || d < best_d)) {
                best = o.id;
                best_d = d;
            }
        }
    }
    if (best != 0) {
        if (auto loc = locate_track(pgs, calib, best, q.t_q)) return located(q, loc);
    }
    // Nothing like it stands where the agent thinks: point at the remembered spot.
    return located(q, Located{belief_camera, e->box});
}

/// Latest entry per object over every belief of `agent` valid at t.
std::map<int, const pg::BeliefEntry*> merged_belief(const pg::PgSet& pgs, int agent, int t) {
    std::map<int, std::pair<int, const pg::BeliefEntry*>> best;  // object -> (last_seen, entry)
    for (const pg::BeliefPG* b : pgs.beliefs_at(t)) {
        if (b->agent != agent) continue;
        for (const auto& e : b->objects) {
            auto it = best.find(e.object);
            if (it == best.end() || b->last_seen > it->second.first) best[e.object] = {b->last_seen, &e};
        }
    }
    std::map<int, const pg::BeliefEntry*> out;
    for (const auto& [id, v] : best) out[id] = v.second;
    return out;
}

struct Intent {
    int agent = 0;
    Point2 body;
    const pg::BeliefEntry* target = nullptr;
};

/// The agent and the believed object its reach points at, or an abstention reason.
std::variant<Intent, std::string> helping_intent(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib) {
    if (!q.agent_box) return std::string("malformed query");
    const auto agent = ground_agent_at(pgs, calib, q.agent_camera, q.agent_time, *q.agent_box);
    if (!agent) return std::string("ungrounded agent");
    const pg::JointPG* joint = pgs.joint_pg(q.t_q);
    const pg::AgentTrack* track = joint ? joint->agent(*agent) : nullptr;
    std::optional<Point2> reach = track ? track->reach : std::nullopt;
    Point2 hand = track ? track->hand : Point2{};
    Point2 body = track ? track->position : Point2{};
    if (!reach) {
        if (const pg::RobotPG* r = pgs.robot_pg(q.agent_camera, q.agent_time)) {
            if (const auto* n = r->agent(*agent); n && n->reach) {
                reach = n->reach;
                hand = n->hand;
                body = n->position;
            }
        }
    }
    if (!reach) return std::string("no intent signal");
    const auto belief = merged_belief(pgs, *agent, q.t_q);
    if (belief.empty()) return std::string("no belief state");
    const Point2 dir = normalized(*reach);
    const pg::BeliefEntry* target = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [id, e] : belief) {
        const Point2 rel = e->position - hand;
        const double along = rel.dot(dir);
        const double off = along >= 0.0 ? std::abs(rel.x * dir.y - rel.y * dir.x) : rel.norm();
        if (off < best) {
            best = off;
            target = e;
        }
    }
    return Intent{*agent, body, target};
}

}  // namespace

std::optional<int> ground_object(const pg::RobotPG& pg, const Box& box) {
    const auto c = nearest_node(pg.objects, pg.camera, box);
    return c ? std::optional(c->id) : std::nullopt;
}

std::optional<int> ground_agent(const pg::RobotPG& pg, const Box& box) {
    const auto c = nearest_node(pg.agents, pg.camera, box);
    return c ? std::optional(c->id) : std::nullopt;
}

std::optional<Located> locate_track(const pg::PgSet& pgs, const worldsim::Calibration& calib, int id, int t) {
    const pg::JointPG* joint = pgs.joint_pg(t);
    const pg::ObjectTrack* o = joint ? joint->object(id) : nullptr;
    if (o == nullptr) return std::nullopt;
    if (!o->boxes.empty()) {
        int view = o->boxes.begin()->first;
        double score = -1.0;
        for (const auto& [cam, s] : o->scores) {
            if (s > score) {
                score = s;
                view = cam;
            }
        }
        return Located{view, o->boxes.at(view)};
    }
    // Footprint from the most recent observation.
    std::optional<std::pair<double, double>> footprint;
    for (int u = t - 1; u >= 1 && !footprint; --u) {
        const pg::ObjectTrack* past = pgs.joint_pg(u)->object(id);
        if (past == nullptr || past->boxes.empty()) continue;
        const auto& [cam, box] = *past->boxes.begin();
        const worldsim::Camera* c = calib.camera(cam);
        if (c == nullptr || box.width() <= 0.0) continue;
        footprint = std::pair(box.width() / c->pixels_per_meter(past->position), box.height() / box.width());
    }
    if (!footprint) return std::nullopt;
    std::vector<const worldsim::Camera*> cams;
    for (const auto& c : calib.cameras) cams.push_back(&c);
    std::sort(cams.begin(), cams.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const worldsim::Camera* c : cams) {
        if (!calib.sees_point(*c, o->position)) continue;
        const Box b = c->render_box(o->position, footprint->first, footprint->second);
        if (c->in_image(b)) return Located{c->id, b};
    }
    return std::nullopt;
}

const pg::BeliefEntry* believed(const pg::PgSet& pgs, int agent, int object, int t, int camera, int* belief_camera) {
    const pg::BeliefPG* best = nullptr;
    for (const pg::BeliefPG* b : pgs.beliefs_at(t)) {
        if (b->agent != agent || (camera >= 0 && b->camera != camera) || b->object(object) == nullptr) continue;
        if (best == nullptr || b->last_seen > best->last_seen ||
            (b->last_seen == best->last_seen && b->camera < best->camera)) {
            best = b;
        }
    }
    if (best == nullptr) return nullptr;
    if (belief_camera != nullptr) *belief_camera = best->camera;
    return best->object(object);
}

Answer answer_localization(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib) {
    if (!q.object_box) return Answer::abstention(q, "malformed query");
    const auto object = ground_object_at(pgs, calib, q.object_camera, q.object_time, *q.object_box);
    if (!object) return Answer::abstention(q, "ungrounded query");
    return located(q, locate_track(pgs, calib, *object, q.t_q));
}

Answer answer_belief_multiview(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                               const AnswerParams& params) {
    return answer_belief(q, pgs, calib, params, -1);
}

Answer answer_belief_singleview(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                                const AnswerParams& params) {
    return answer_belief(q, pgs, calib, params, q.agent_camera);
}

Answer answer_helping(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib, const AnswerParams& params) {
    auto intent = helping_intent(q, pgs, calib);
    if (auto* reason = std::get_if<std::string>(&intent)) return Answer::abstention(q, *reason);
    const Intent& in = std::get<Intent>(intent);
    const pg::BeliefEntry* e = in.target;
    const pg::JointPG* joint = pgs.joint_pg(q.t_q);
    const pg::ObjectTrack* now = joint ? joint->object(e->object) : nullptr;
    const bool false_belief = now == nullptr || distance(now->position, e->position) > params.false_belief_tolerance ||
                              now->attributes != e->attributes || now->empty != e->empty;
    Answer a;
    a.id = q.id;
    a.kind = q.kind;
    if (!false_belief) {
        a.object = e->object;
        return a;
    }
    int best = 0;
    double best_d = 0.0;
    if (joint != nullptr) {
        for (const auto& o : joint->objects) {
            if (o.id == e->object || o.attributes != e->attributes || o.empty != e->empty) continue;
            const double d = distance(o.position, in.body);
            if (best == 0 || d < best_d) {
                best = o.id;
                best_d = d;
            }
        }
    }
    if (best == 0) return Answer::abstention(q, "no suitable object");
    a.object = best;
    return a;
}

Answer answer_query(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib, const AnswerParams& params) {
    switch (q.kind) {
        case QueryKind::localization:
            return answer_localization(q, pgs, calib);
        case QueryKind::belief_multiview:
            return answer_belief_multiview(q, pgs, calib, params);
        case QueryKind::belief_singleview:
            return answer_belief_singleview(q, pgs, calib, params);
        case QueryKind::helping:
            return answer_helping(q, pgs, calib, params);
    }
    return Answer::abstention(q, "unknown query kind");
}

Answer random_baseline(const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib, std::uint64_t seed) {
    std::optional<Attributes> attrs;
    if (q.kind == QueryKind::helping) {
        auto intent = helping_intent(q, pgs, calib);
        if (auto* in = std::get_if<Intent>(&intent)) attrs = in->target->attributes;
    } else if (q.object_box) {
        if (auto object = ground_object_at(pgs, calib, q.object_camera, q.object_time, *q.object_box)) {
            attrs = track_attributes(pgs, *object, q.t_q);
        }
    }
    if (!attrs) return Answer::abstention(q, "ungrounded query");
    std::vector<int> candidates;
    if (const pg::JointPG* joint = pgs.joint_pg(q.t_q)) {
        for (const auto& o : joint->objects) {
            if (o.attributes == *attrs) candidates.push_back(o.id);
        }
    }
    if (candidates.empty()) return Answer::abstention(q, "no same-attribute object");
    std::mt19937_64 rng(seed);
    const int pick = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    return located(q, locate_track(pgs, calib, pick, q.t_q));
}

Answer resolve_object(const Answer& a, const Query& q, const pg::PgSet& pgs, const worldsim::Calibration& calib) {
    if (a.abstained() || !a.object || a.view) return a;
    return located(q, locate_track(pgs, calib, *a.object, q.t_q));
}

}  // namespace beliefgraph::queries
