#include "beliefgraph/worldsim/queries_gen.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace beliefgraph::worldsim {

using queries::Query;
using queries::QueryKind;
using queries::QuerySet;
using queries::QueryTruth;

std::vector<pg::BeliefPG> ground_truth_beliefs(const GroundTruthLog& gt, const TruthRules& rules) {
    std::map<int, int> object_frames, agent_frames;
    std::map<std::pair<int, int>, pg::BeliefPG> current;
    std::vector<pg::BeliefPG> versions;
    for (const auto& f : gt.frames) {
        std::set<int> objs, agents;
        for (const auto& v : f.views) {
            for (const auto& [id, box] : v.objects) objs.insert(id);
            for (const auto& [id, box] : v.agents) agents.insert(id);
        }
        for (int id : objs) ++object_frames[id];
        for (int id : agents) ++agent_frames[id];

        std::vector<pg::BeliefPG> refreshed;
        for (const auto& v : f.views) {
            for (const auto& [agent, abox] : v.agents) {
                if (agent_frames[agent] < rules.confirm_frames) continue;
                pg::BeliefPG fresh;
                fresh.camera = v.camera;
                fresh.agent = agent;
                fresh.last_seen = f.time;
                for (const auto& [id, box] : v.objects) {
                    if (object_frames[id] < rules.confirm_frames) continue;
                    const ObjectTruth* o = f.object(id);
                    fresh.objects.push_back({id, o->position, box, gt.object(id)->attributes, o->empty});
                }
                std::sort(fresh.objects.begin(), fresh.objects.end(),
                          [](const auto& a, const auto& b) { return a.object < b.object; });
                const auto key = std::pair(v.camera, agent);
                if (const auto prev = current.find(key); prev != current.end()) {
                    if (f.time - prev->second.last_seen > rules.fill_gap) {
                        for (auto& e : fresh.objects) {
                            if (const auto* old = prev->second.object(e.object)) e.empty = old->empty;
                        }
                    }
                    fresh = pg::merge_belief(prev->second, fresh);
                }
                current[key] = fresh;
                refreshed.push_back(std::move(fresh));
            }
        }
        std::sort(refreshed.begin(), refreshed.end(), [](const auto& a, const auto& b) {
            return std::pair(a.camera, a.agent) < std::pair(b.camera, b.agent);
        });
        for (auto& b : refreshed) versions.push_back(std::move(b));
    }
    return versions;
}

const pg::BeliefEntry* believed_entry(std::span<const pg::BeliefPG> beliefs, int agent, int object, int t, int* camera) {
    std::map<int, const pg::BeliefPG*> latest;  // camera -> latest version for this agent
    for (const auto& b : beliefs) {
        if (b.last_seen > t) break;
        if (b.agent == agent) latest[b.camera] = &b;
    }
    const pg::BeliefPG* best = nullptr;
    for (const auto& [cam, b] : latest) {
        if (b->object(object) == nullptr) continue;
        if (best == nullptr || b->last_seen > best->last_seen) best = b;
    }
    if (best == nullptr) return nullptr;
    if (camera != nullptr) *camera = best->camera;
    return best->object(object);
}

namespace {

std::vector<std::pair<int, Box>> rendered_views(const Calibration& calib, const Point2& p, const ObjectSpec& spec) {
    std::vector<std::pair<int, Box>> out;
    std::vector<const Camera*> cams;
    for (const auto& c : calib.cameras) cams.push_back(&c);
    std::sort(cams.begin(), cams.end(), [](const Camera* a, const Camera* b) { return a->id < b->id; });
    for (const Camera* c : cams) {
        if (!calib.sees_point(*c, p)) continue;
        const Box b = c->render_box(p, spec.width, spec.aspect);
        if (c->in_image(b)) out.emplace_back(c->id, b);
    }
    return out;
}

bool ambiguous(const ViewTruth& v, int object, const Box& box, double ambiguity) {
    for (const auto& [id, other] : v.objects) {
        if (id != object && distance(other.center(), box.center()) < ambiguity * box.diagonal()) return true;
    }
    return false;
}

std::optional<Box> box_in(const std::vector<std::pair<int, Box>>& list, int id) {
    for (const auto& [i, b] : list) {
        if (i == id) return b;
    }
    return std::nullopt;
}

bool object_visible(const FrameTruth& f, int id) {
    return std::any_of(f.views.begin(), f.views.end(), [&](const ViewTruth& v) { return box_in(v.objects, id).has_value(); });
}

struct Sighting {
    int camera = 0;
    int time = 0;
    Box box;
};

/// Unambiguous views of an object at frame t.
std::vector<Sighting> object_sightings(const GroundTruthLog& gt, int id, int t, double ambiguity, std::optional<int> camera) {
    std::vector<Sighting> out;
    for (const auto& v : gt.frame(t).views) {
        if (camera && v.camera != *camera) continue;
        if (auto b = box_in(v.objects, id); b && !ambiguous(v, id, *b, ambiguity)) out.push_back({v.camera, t, *b});
    }
    return out;
}

std::vector<Sighting> agent_sightings(const GroundTruthLog& gt, int id, int t, std::optional<int> camera) {
    std::vector<Sighting> out;
    for (const auto& v : gt.frame(t).views) {
        if (camera && v.camera != *camera) continue;
        if (auto b = box_in(v.agents, id)) out.push_back({v.camera, t, *b});
    }
    return out;
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
}

/// Where the agent's belief about `object` points at frame t, resolved the same
/// way the answering procedure resolves it.
std::vector<std::pair<int, Box>> believed_answer(const GroundTruthLog& gt, const Calibration& calib,
                                                 std::span<const pg::BeliefPG> beliefs, int agent, int object, int t,
                                                 const TruthRules& rules) {
    int belief_camera = 0;
    const pg::BeliefEntry* e = believed_entry(beliefs, agent, object, t, &belief_camera);
    if (e == nullptr) return {};
    const ObjectSpec* spec = gt.object(object);
    const FrameTruth& f = gt.frame(t);
    int best = 0;
    double best_d = rules.match_radius;
    for (const auto& o : f.objects) {
        if (gt.object(o.id)->attributes != spec->attributes) continue;
        const double d = distance(o.position, e->position);
        if (d <= best_d && (best == 0 || d < best_d)) {
            best = o.id;
            best_d = d;
        }
    }
    if (best != 0) return answer_views(gt, calib, best, t);
    std::vector<std::pair<int, Box>> out{{belief_camera, e->box}};
    for (const auto& vb : rendered_views(calib, e->position, *spec)) {
        if (vb.first != belief_camera) out.push_back(vb);
    }
    return out;
}

std::vector<int> visible_frames(const GroundTruthLog& gt, int id) {
    std::vector<int> out;
    for (const auto& f : gt.frames) {
        if (object_visible(f, id)) out.push_back(f.time);
    }
    return out;
}

QuerySet localization(const GroundTruthLog& gt, const Calibration& calib, int count, std::mt19937_64& rng,
                      const TruthRules& rules) {
    struct Pair {
        int object;
        int time;
    };
    std::vector<Pair> pairs;
    std::map<int, std::vector<int>> frames;
    for (const auto& o : gt.objects) {
        frames[o.id] = visible_frames(gt, o.id);
        for (int t : frames[o.id]) {
            if (!object_sightings(gt, o.id, t, rules.ambiguity, std::nullopt).empty()) pairs.push_back({o.id, t});
        }
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    QuerySet out;
    if (static_cast<int>(pairs.size()) < count) out.truncated = true;
    pairs.resize(std::min(pairs.size(), static_cast<std::size_t>(std::max(count, 0))));
    for (const auto& p : pairs) {
        const auto s = pick(object_sightings(gt, p.object, p.time, rules.ambiguity, std::nullopt), rng);
        const int t_q = pick(frames[p.object], rng);
        Query q;
        q.id = static_cast<int>(out.queries.size());
        q.kind = QueryKind::localization;
        q.object_camera = s.camera;
        q.object_time = s.time;
        q.object_box = s.box;
        q.t_q = t_q;
        QueryTruth truth;
        truth.id = q.id;
        truth.kind = q.kind;
        truth.answers = answer_views(gt, calib, p.object, t_q);
        truth.object = p.object;
        truth.interactions = gt.interactions_between(p.object, s.time, t_q);
        out.queries.push_back(q);
        out.truth.push_back(std::move(truth));
    }
    return out;
}

std::optional<int> single_camera(const GroundTruthLog& gt, QueryKind kind) {
    if (kind == QueryKind::belief_multiview || gt.cameras.empty()) return std::nullopt;
    return *std::min_element(gt.cameras.begin(), gt.cameras.end());
}

QuerySet beliefs(const GroundTruthLog& gt, const Calibration& calib, QueryKind kind, int count, std::mt19937_64& rng,
                 const TruthRules& rules) {
    const auto versions = ground_truth_beliefs(gt, rules);
    const auto camera = single_camera(gt, kind);
    struct Candidate {
        int agent;
        int object;
        int t_q;
        bool false_belief;
    };
    std::vector<Candidate> fb, tb;
    std::map<int, std::vector<int>> agent_frames;
    for (int a : gt.agents) {
        for (const auto& f : gt.frames) {
            if (!agent_sightings(gt, a, f.time, camera).empty()) agent_frames[a].push_back(f.time);
        }
    }
    std::map<int, std::vector<int>> object_frames;
    for (const auto& o : gt.objects) {
        for (const auto& f : gt.frames) {
            if (!object_sightings(gt, o.id, f.time, rules.ambiguity, camera).empty()) object_frames[o.id].push_back(f.time);
        }
    }
    for (int a : gt.agents) {
        if (agent_frames[a].empty()) continue;
        for (const auto& o : gt.objects) {
            if (object_frames[o.id].empty()) continue;
            for (const auto& f : gt.frames) {
                if (f.time < agent_frames[a].front()) continue;
                const pg::BeliefEntry* e = believed_entry(versions, a, o.id, f.time);
                if (e == nullptr) continue;
                const ObjectTruth* truth = f.object(o.id);
                const bool false_belief =
                    distance(e->position, truth->position) > rules.false_belief_tolerance || e->empty != truth->empty;
                (false_belief ? fb : tb).push_back({a, o.id, f.time, false_belief});
            }
        }
    }
    std::shuffle(fb.begin(), fb.end(), rng);
    std::shuffle(tb.begin(), tb.end(), rng);
    const std::size_t want = static_cast<std::size_t>(std::max(count, 0));
    std::size_t n_fb = std::min(fb.size(), (want + 1) / 2);
    std::size_t n_tb = std::min(tb.size(), want - n_fb);
    n_fb = std::min(fb.size(), want - n_tb);
    std::vector<Candidate> chosen(fb.begin(), fb.begin() + static_cast<std::ptrdiff_t>(n_fb));
    chosen.insert(chosen.end(), tb.begin(), tb.begin() + static_cast<std::ptrdiff_t>(n_tb));
    std::shuffle(chosen.begin(), chosen.end(), rng);

    QuerySet out;
    out.truncated = chosen.size() < want;
    for (const auto& c : chosen) {
        auto answers = believed_answer(gt, calib, versions, c.agent, c.object, c.t_q, rules);
        if (answers.empty()) continue;
        std::vector<int> before;
        for (int t : object_frames[c.object]) {
            if (t <= c.t_q) before.push_back(t);
        }
        const int t_o = pick(before.empty() ? object_frames[c.object] : before, rng);
        std::vector<int> seen;
        for (int t : agent_frames[c.agent]) {
            if (t <= c.t_q) seen.push_back(t);
        }
        const int t_h = pick(seen, rng);
        const auto so = pick(object_sightings(gt, c.object, t_o, rules.ambiguity, camera), rng);
        const auto sh = pick(agent_sightings(gt, c.agent, t_h, camera), rng);
        Query q;
        q.id = static_cast<int>(out.queries.size());
        q.kind = kind;
        q.object_camera = so.camera;
        q.object_time = so.time;
        q.object_box = so.box;
        q.agent_camera = sh.camera;
        q.agent_time = sh.time;
        q.agent_box = sh.box;
        q.t_q = c.t_q;
        QueryTruth truth;
        truth.id = q.id;
        truth.kind = kind;
        truth.answers = std::move(answers);
        truth.object = c.object;
        truth.interactions = gt.interactions_between(c.object, t_o, c.t_q);
        truth.false_belief = c.false_belief;
        out.queries.push_back(q);
        out.truth.push_back(std::move(truth));
    }
    return out;
}

QuerySet helping(const GroundTruthLog& gt, const Calibration& calib, int count, std::mt19937_64& rng, const TruthRules& rules) {
    const auto versions = ground_truth_beliefs(gt, rules);
    const auto camera = single_camera(gt, QueryKind::helping);
    struct Candidate {
        int agent;
        int target;
        int time;
    };
    std::vector<Candidate> candidates;
    for (const auto& r : gt.reaches) {
        if (r.target == 0) continue;
        for (int t = r.time; t <= std::min(r.last_time, gt.horizon); ++t) {
            if (agent_sightings(gt, r.agent, t, camera).empty()) continue;
            if (believed_entry(versions, r.agent, r.target, t) == nullptr) continue;
            candidates.push_back({r.agent, r.target, t});
        }
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    QuerySet out;
    const std::size_t want = static_cast<std::size_t>(std::max(count, 0));
    out.truncated = candidates.size() < want;
    candidates.resize(std::min(candidates.size(), want));
    for (const auto& c : candidates) {
        const FrameTruth& f = gt.frame(c.time);
        int belief_camera = 0;
        const pg::BeliefEntry* e = believed_entry(versions, c.agent, c.target, c.time, &belief_camera);
        const ObjectTruth* target = f.object(c.target);
        const bool false_belief = distance(e->position, target->position) > rules.false_belief_tolerance ||
                                  e->empty != target->empty || e->attributes != gt.object(c.target)->attributes;
        int correct = c.target;
        if (false_belief) {
            correct = 0;
            double best_d = 0.0;
            const Point2 at = f.agent(c.agent)->position;
            for (const auto& o : f.objects) {
                if (o.id == c.target || gt.object(o.id)->attributes != e->attributes || o.empty != e->empty) continue;
                const double d = distance(o.position, at);
                if (correct == 0 || d < best_d) {
                    correct = o.id;
                    best_d = d;
                }
            }
            if (correct == 0) continue;
        }
        auto answers = answer_views(gt, calib, correct, c.time);
        if (answers.empty()) continue;
        const auto sh = pick(agent_sightings(gt, c.agent, c.time, camera), rng);
        Query q;
        q.id = static_cast<int>(out.queries.size());
        q.kind = QueryKind::helping;
        q.agent_camera = sh.camera;
        q.agent_time = sh.time;
        q.agent_box = sh.box;
        q.t_q = c.time;
        QueryTruth truth;
        truth.id = q.id;
        truth.kind = q.kind;
        truth.answers = std::move(answers);
        truth.object = correct;
        truth.interactions = gt.interactions_between(c.target, 0, c.time);
        truth.false_belief = false_belief;
        out.queries.push_back(q);
        out.truth.push_back(std::move(truth));
    }
    return out;
}

}  // namespace

std::vector<std::pair<int, Box>> answer_views(const GroundTruthLog& gt, const Calibration& calib, int object, int t) {
    std::vector<std::pair<int, Box>> out;
    const FrameTruth& f = gt.frame(t);
    for (const auto& v : f.views) {
        if (auto b = box_in(v.objects, object)) out.emplace_back(v.camera, *b);
    }
    if (!out.empty()) return out;
    const ObjectTruth* o = f.object(object);
    if (o == nullptr) return out;
    return rendered_views(calib, o->position, *gt.object(object));
}

queries::QuerySet gen_queries(const GroundTruthLog& gt, const Calibration& calib, QueryKind kind, int count,
                              std::uint64_t seed, const TruthRules& rules) {
    if (gt.frames.empty()) throw std::invalid_argument("ground-truth log has no frames");
    std::mt19937_64 rng(seed);
    switch (kind) {
        case QueryKind::localization:
            return localization(gt, calib, count, rng, rules);
        case QueryKind::belief_multiview:
        case QueryKind::belief_singleview:
            return beliefs(gt, calib, kind, count, rng, rules);
        case QueryKind::helping:
            return helping(gt, calib, count, rng, rules);
    }
    return {};
}

}  // namespace beliefgraph::worldsim
