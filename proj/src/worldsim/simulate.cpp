#include "beliefgraph/worldsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>

namespace beliefgraph::worldsim {

double round_significant(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

const ObjectTruth* FrameTruth::object(int id) const {
    for (const auto& o : objects) {
        if (o.id == id) return &o;
    }
    return nullptr;
}

const AgentTruth* FrameTruth::agent(int id) const {
    for (const auto& a : agents) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

const ViewTruth* FrameTruth::view(int camera) const {
    for (const auto& v : views) {
        if (v.camera == camera) return &v;
    }
    return nullptr;
}

const ObjectSpec* GroundTruthLog::object(int id) const {
    for (const auto& o : objects) {
        if (o.id == id) return &o;
    }
    return nullptr;
}

int GroundTruthLog::interactions_between(int object, int from, int to) const {
    if (from > to) std::swap(from, to);
    return static_cast<int>(std::count_if(interactions.begin(), interactions.end(), [&](const InteractionRecord& r) {
        return r.object == object && r.time > from && r.time <= to;
    }));
}

namespace {

struct AgentState {
    int id = 0;
    bool present = true;
    Point2 position;
    Point2 facing{1.0, 0.0};
    std::optional<Point2> walk_target;
    std::vector<int> carrying;
    Point2 carry_destination;
    bool carry_arrived = false;
    std::optional<int> reach_object;
    std::optional<Point2> reach_point;
    int reach_until = 0;
};

struct ObjectState {
    int id = 0;
    Point2 position;
    int holder = 0;
    bool empty = false;
    bool hidden = false;
};

struct SwapState {
    int actor = 0;
    int a = 0;
    int b = 0;
    Point2 start_a;
    Point2 start_b;
    int start_time = 0;
};

std::vector<double> random_unit(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm = 0.0;
    for (auto& x : v) {
        x = n(rng);
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<double> noisy_feature(const std::vector<double>& latent, double sigma, std::mt19937_64& rng) {
    std::vector<double> f = latent;
    if (sigma > 0.0) {
        std::normal_distribution<double> n(0.0, sigma);
        for (auto& x : f) x += n(rng);
    }
    double norm = 0.0;
    for (double x : f) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : f) x = round_significant(x / norm);
    return f;
}

std::vector<double> slot_scores(std::size_t truth, std::size_t count, const NoiseModel& noise, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t shown = truth;
    if (noise.attribute_confusion > 0.0 && u(rng) < noise.attribute_confusion) {
        std::uniform_int_distribution<std::size_t> other(0, count - 2);
        shown = other(rng);
        if (shown >= truth) ++shown;
    }
    std::vector<double> scores(count, 0.0);
    const bool noisy = noise.attribute_confusion > 0.0 || noise.score_spread > 0.0;
    const double peak = noisy ? 0.6 + 0.35 * u(rng) : 1.0;
    for (std::size_t i = 0; i < count; ++i) {
        scores[i] = i == shown ? peak : (1.0 - peak) / static_cast<double>(count - 1);
    }
    return scores;
}

AttributeScores attribute_scores(const Attributes& a, bool empty, const NoiseModel& noise, std::mt19937_64& rng) {
    AttributeScores s;
    s.color = slot_scores(static_cast<std::size_t>(a.color), kColorNames.size(), noise, rng);
    s.material = slot_scores(static_cast<std::size_t>(a.material), kMaterialNames.size(), noise, rng);
    s.category = slot_scores(static_cast<std::size_t>(a.category), kCategoryNames.size(), noise, rng);
    const auto fill = slot_scores(empty ? 1 : 0, 2, noise, rng);
    s.empty = fill[1];
    return s;
}

double detection_score(const NoiseModel& noise, std::mt19937_64& rng) {
    if (noise.score_spread <= 0.0) return 1.0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return 1.0 - noise.score_spread * u(rng);
}

Box jitter_box(const Box& b, double sigma, const Camera& cam, std::mt19937_64& rng) {
    if (sigma <= 0.0) return b;
    std::normal_distribution<double> n(0.0, sigma);
    Box j{b.x1 + n(rng), b.y1 + n(rng), b.x2 + n(rng), b.y2 + n(rng)};
    if (j.x2 < j.x1 + 1.0) j.x2 = j.x1 + 1.0;
    if (j.y2 < j.y1 + 1.0) j.y2 = j.y1 + 1.0;
    return clip_box(j, cam.width, cam.height);
}

Point2 clip_point(const Point2& p, const Camera& cam) {
    return {std::clamp(p.x, 0.0, static_cast<double>(cam.width)), std::clamp(p.y, 0.0, static_cast<double>(cam.height))};
}

// Swapped objects travel on opposite arcs so they never coincide mid-swap.
Point2 arc(const Point2& from, const Point2& to, double progress) {
    const Point2 d = to - from;
    const Point2 side{-d.y, d.x};
    return from + d * progress + side * (0.25 * std::sin(progress * 3.14159265358979323846));
}

class Simulator {
public:
    Simulator(const Scenario& s, std::uint64_t seed) : s_(s), calib_(Calibration::from(s)), rng_(seed) {
        for (const auto& a : s.agents) {
            AgentState st;
            st.id = a.id;
            st.present = a.present;
            st.position = a.position;
            agents_.push_back(st);
        }
        for (const auto& o : s.objects) {
            objects_.push_back({o.id, o.position, 0, o.empty, calib_.hidden(o.position)});
        }
        const int dim = s.world.feature_dim;
        std::map<std::tuple<int, int, int>, std::vector<double>> shared;
        for (const auto& o : s.objects) {
            if (s.noise.identical_appearance) {
                const auto key = std::make_tuple(static_cast<int>(o.attributes.color), static_cast<int>(o.attributes.material),
                                                 static_cast<int>(o.attributes.category));
                auto it = shared.find(key);
                if (it == shared.end()) it = shared.emplace(key, random_unit(rng_, dim)).first;
                object_latent_[o.id] = it->second;
            } else {
                object_latent_[o.id] = random_unit(rng_, dim);
            }
        }
        for (const auto& a : s.agents) agent_latent_[a.id] = random_unit(rng_, dim);
    }

    SimulationResult run() {
        SimulationResult out;
        GroundTruthLog& gt = out.truth;
        gt.scenario = s_.name;
        gt.horizon = s_.horizon;
        for (const auto& c : s_.cameras) gt.cameras.push_back(c.id);
        gt.objects = s_.objects;
        for (const auto& a : s_.agents) gt.agents.push_back(a.id);

        std::vector<const Camera*> cams;
        for (const auto& c : s_.cameras) cams.push_back(&c);
        std::sort(cams.begin(), cams.end(), [](const Camera* a, const Camera* b) { return a->id < b->id; });
        std::sort(gt.cameras.begin(), gt.cameras.end());

        std::size_t next_event = 0;
        for (int t = 1; t <= s_.horizon; ++t) {
            if (t > 1) advance(t);
            while (next_event < s_.script.size() && s_.script[next_event].time == t) {
                apply(s_.script[next_event], next_event, gt);
                ++next_event;
            }
            FrameTruth ft = record(t);
            for (const Camera* cam : cams) {
                ViewTruth vt;
                out.observations.push_back(render(t, *cam, ft, vt));
                ft.views.push_back(std::move(vt));
            }
            gt.frames.push_back(std::move(ft));
        }
        return out;
    }

private:
    Point2 hand(const AgentState& a) const { return a.position + a.facing * s_.world.hand_offset; }

    AgentState& agent(int id) {
        return *std::find_if(agents_.begin(), agents_.end(), [&](const AgentState& a) { return a.id == id; });
    }
    ObjectState& object(int id) {
        return *std::find_if(objects_.begin(), objects_.end(), [&](const ObjectState& o) { return o.id == id; });
    }
    bool swapping(int object_id) const {
        return std::any_of(swaps_.begin(), swaps_.end(), [&](const SwapState& w) { return w.a == object_id || w.b == object_id; });
    }

    void advance(int t) {
        for (auto& a : agents_) {
            if (!a.present) continue;
            if (a.carry_arrived) {
                // Objects are released the frame after arrival, so their last
                // visible position is the destination itself.
                for (int id : a.carrying) {
                    ObjectState& o = object(id);
                    o.holder = 0;
                    o.position = a.carry_destination;
                    o.hidden = calib_.hidden(o.position);
                }
                a.carrying.clear();
                a.carry_arrived = false;
                continue;
            }
            if (!a.walk_target) continue;
            const Point2 delta = *a.walk_target - a.position;
            const double d = delta.norm();
            if (d > 0.0) a.facing = delta * (1.0 / d);
            if (d <= s_.world.walk_speed) {
                a.position = *a.walk_target;
                a.walk_target.reset();
            } else {
                a.position = a.position + a.facing * s_.world.walk_speed;
            }
            for (auto& o : objects_) {
                if (o.holder == a.id && !swapping(o.id)) o.position = hand(a);
            }
            if (!a.walk_target && !a.carrying.empty()) {
                for (int id : a.carrying) object(id).position = a.carry_destination;
                a.carry_arrived = true;
            }
        }
        for (auto it = swaps_.begin(); it != swaps_.end();) {
            const double progress = std::min(1.0, static_cast<double>(t - it->start_time) / s_.world.swap_frames);
            ObjectState& a = object(it->a);
            ObjectState& b = object(it->b);
            a.position = arc(it->start_a, it->start_b, progress);
            b.position = arc(it->start_b, it->start_a, progress);
            if (progress >= 1.0) {
                a.holder = 0;
                b.holder = 0;
                a.hidden = calib_.hidden(a.position);
                b.hidden = calib_.hidden(b.position);
                it = swaps_.erase(it);
            } else {
                ++it;
            }
        }
    }

    void require_reach(const AgentState& a, const ObjectState& o, std::size_t index) const {
        const double d = distance(hand(a), o.position);
        if (d > s_.world.reach_radius + 1e-9) {
            throw SimulationError(index, "object " + std::to_string(o.id) + " is " + std::to_string(d) +
                                             " m from the hand of agent " + std::to_string(a.id) + ", beyond reach");
        }
    }

    void take(AgentState& a, ObjectState& o, std::size_t index) {
        if (o.holder != 0 && o.holder != a.id) {
            throw SimulationError(index, "object " + std::to_string(o.id) + " is held by agent " + std::to_string(o.holder));
        }
        if (o.holder != a.id) require_reach(a, o, index);
        o.holder = a.id;
        o.position = hand(a);
        o.hidden = false;
    }

    void apply(const Event& e, std::size_t index, GroundTruthLog& gt) {
        AgentState& a = agent(e.actor);
        if (e.kind != EventKind::enter_room && !a.present) {
            throw SimulationError(index, "agent " + std::to_string(a.id) + " is not in the scene");
        }
        auto note = [&](int object_id) { gt.interactions.push_back({object_id, e.time, e.kind, a.id}); };
        switch (e.kind) {
            case EventKind::enter_room:
                if (a.present) throw SimulationError(index, "agent " + std::to_string(a.id) + " is already in the scene");
                a.present = true;
                a.position = *e.position;
                a.walk_target.reset();
                break;
            case EventKind::exit_view:
                a.present = false;
                a.walk_target.reset();
                break;
            case EventKind::walk_to:
                a.walk_target = *e.position;
                break;
            case EventKind::pick_up:
                for (int id : e.objects) {
                    take(a, object(id), index);
                    note(id);
                }
                break;
            case EventKind::put_down:
                for (int id : e.objects) {
                    ObjectState& o = object(id);
                    if (o.holder != a.id) {
                        throw SimulationError(index, "object " + std::to_string(id) + " is not held by agent " + std::to_string(a.id));
                    }
                    const Point2 target = e.position.value_or(hand(a));
                    if (distance(target, hand(a)) > s_.world.reach_radius + 1e-9) {
                        throw SimulationError(index, "put-down position beyond reach");
                    }
                    o.holder = 0;
                    o.position = target;
                    o.hidden = calib_.hidden(target);
                    std::erase(a.carrying, id);
                    note(id);
                }
                break;
            case EventKind::carry_to: {
                for (int id : e.objects) {
                    take(a, object(id), index);
                    note(id);
                }
                const Point2 dest = *e.position;
                const Point2 delta = dest - a.position;
                const double d = delta.norm();
                a.walk_target = d > s_.world.hand_offset ? dest - delta * (s_.world.hand_offset / d) : a.position;
                a.carrying = e.objects;
                a.carry_arrived = false;
                a.carry_destination = dest;
                break;
            }
            case EventKind::swap: {
                ObjectState& x = object(e.objects[0]);
                ObjectState& y = object(e.objects[1]);
                for (ObjectState* o : {&x, &y}) {
                    if (o->holder != 0) throw SimulationError(index, "swap target " + std::to_string(o->id) + " is held");
                    require_reach(a, *o, index);
                    o->holder = a.id;
                    o->hidden = false;
                    note(o->id);
                }
                swaps_.push_back({a.id, x.id, y.id, x.position, y.position, e.time});
                break;
            }
            case EventKind::empty_object:
                for (int id : e.objects) {
                    ObjectState& o = object(id);
                    require_reach(a, o, index);
                    o.empty = true;
                    note(id);
                }
                break;
            case EventKind::reach_toward:
                a.reach_object.reset();
                a.reach_point.reset();
                if (!e.objects.empty()) {
                    a.reach_object = e.objects.front();
                } else {
                    a.reach_point = *e.position;
                }
                a.reach_until = e.time + s_.world.reach_frames - 1;
                gt.reaches.push_back({a.id, e.time, a.reach_until, e.objects.empty() ? 0 : e.objects.front()});
                break;
        }
    }

    std::optional<Point2> reach_direction(const AgentState& a, int t) {
        if (!a.present || t > a.reach_until || (!a.reach_object && !a.reach_point)) return std::nullopt;
        const Point2 target = a.reach_object ? object(*a.reach_object).position : *a.reach_point;
        const Point2 dir = target - hand(a);
        if (dir.norm() <= 0.0) return std::nullopt;
        return normalized(dir);
    }

    FrameTruth record(int t) {
        FrameTruth ft;
        ft.time = t;
        for (const auto& o : objects_) {
            ft.objects.push_back({o.id, o.position, o.holder, o.empty, o.hidden, calib_.room_of(o.position)});
        }
        for (auto& a : agents_) {
            AgentTruth at;
            at.id = a.id;
            at.present = a.present;
            at.position = a.position;
            at.hand = hand(a);
            at.room = a.present ? calib_.room_of(a.position) : -1;
            at.reach = reach_direction(a, t);
            ft.agents.push_back(at);
        }
        return ft;
    }

    bool object_visible_anywhere(const ObjectState& o) {
        if (o.hidden) return false;
        if (o.holder != 0 && !agent(o.holder).present) return false;
        return true;
    }

    FrameObservation render(int t, const Camera& cam, const FrameTruth& ft, ViewTruth& vt) {
        const NoiseModel& noise = s_.noise;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        FrameObservation obs;
        obs.time = t;
        obs.camera = cam.id;
        vt.camera = cam.id;

        std::vector<std::pair<int, Detection>> dets;
        for (std::size_t i = 0; i < objects_.size(); ++i) {
            const ObjectState& o = objects_[i];
            const ObjectSpec& spec = s_.objects[i];
            if (!object_visible_anywhere(o)) continue;
            const auto box = calib_.visible_box(cam, o.position, spec.width, spec.aspect);
            if (!box) continue;
            vt.objects.emplace_back(o.id, *box);
            const double miss = o.holder != 0 ? noise.miss_held : noise.miss_base;
            if (miss > 0.0 && u(rng_) < miss) continue;
            Detection d;
            d.box = jitter_box(*box, noise.box_jitter_px, cam, rng_);
            d.score = detection_score(noise, rng_);
            d.feature = noisy_feature(object_latent_.at(o.id), noise.feature_noise, rng_);
            d.attributes = attribute_scores(spec.attributes, o.empty, noise, rng_);
            dets.emplace_back(o.id, std::move(d));
        }
        if (noise.false_positive_rate > 0.0) {
            std::poisson_distribution<int> count(noise.false_positive_rate);
            const int n = count(rng_);
            for (int k = 0; k < n; ++k) {
                Detection d;
                const double w = 8.0 + 22.0 * u(rng_);
                const double h = w * (0.8 + 0.8 * u(rng_));
                const double x = u(rng_) * (cam.width - w);
                const double y = u(rng_) * (cam.height - h);
                d.box = {x, y, x + w, y + h};
                d.score = 0.05 + 0.4 * u(rng_);
                d.feature = noisy_feature(random_unit(rng_, s_.world.feature_dim), 0.0, rng_);
                Attributes a{static_cast<Color>(static_cast<int>(u(rng_) * kColorNames.size()) % kColorNames.size()),
                             static_cast<Material>(static_cast<int>(u(rng_) * kMaterialNames.size()) % kMaterialNames.size()),
                             static_cast<Category>(static_cast<int>(u(rng_) * kCategoryNames.size()) % kCategoryNames.size())};
                d.attributes = attribute_scores(a, false, noise, rng_);
                dets.emplace_back(-1, std::move(d));
            }
        }
        std::shuffle(dets.begin(), dets.end(), rng_);
        for (auto& [src, d] : dets) {
            vt.detection_sources.push_back(src);
            obs.detections.push_back(std::move(d));
        }

        for (const auto& at : ft.agents) {
            if (!at.present || !calib_.sees_point(cam, at.position)) continue;
            const auto foot = cam.project(at.position);
            const auto hand_px = cam.project(at.hand);
            if (!foot || !hand_px) continue;
            const Box raw = cam.render_box(at.position, s_.world.agent_width, s_.world.agent_aspect);
            const Box box = clip_box(raw, cam.width, cam.height);
            vt.agents.emplace_back(at.id, box);
            if (noise.miss_base > 0.0 && u(rng_) < noise.miss_base) continue;
            AgentObservation ao;
            auto jitter = [&](Point2 p) {
                if (noise.box_jitter_px > 0.0) {
                    std::normal_distribution<double> n(0.0, noise.box_jitter_px);
                    p = p + Point2{n(rng_), n(rng_)};
                }
                return clip_point(p, cam);
            };
            ao.keypoints.foot = jitter(*foot);
            ao.keypoints.hand = jitter(*hand_px);
            ao.keypoints.shoulder = jitter({foot->x, raw.y1 + 0.18 * raw.height()});
            ao.box = jitter_box(box, noise.box_jitter_px, cam, rng_);
            ao.score = detection_score(noise, rng_);
            ao.feature = noisy_feature(agent_latent_.at(at.id), noise.feature_noise, rng_);
            if (at.reach) {
                Point2 dir = *at.reach;
                if (noise.reach_jitter_rad > 0.0) {
                    std::normal_distribution<double> n(0.0, noise.reach_jitter_rad);
                    const double ang = n(rng_);
                    dir = {dir.x * std::cos(ang) - dir.y * std::sin(ang), dir.x * std::sin(ang) + dir.y * std::cos(ang)};
                }
                ao.reach = Point2{round_significant(dir.x), round_significant(dir.y)};
            }
            vt.agent_sources.push_back(at.id);
            obs.agents.push_back(std::move(ao));
        }
        return obs;
    }

    const Scenario& s_;
    Calibration calib_;
    std::mt19937_64 rng_;
    std::vector<AgentState> agents_;
    std::vector<ObjectState> objects_;
    std::vector<SwapState> swaps_;
    std::map<int, std::vector<double>> object_latent_;
    std::map<int, std::vector<double>> agent_latent_;
};

}  // namespace

SimulationResult simulate(const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    return Simulator(scenario, seed).run();
}

}  // namespace beliefgraph::worldsim
