#include "beliefgraph/worldsim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

namespace beliefgraph::worldsim {

// ---------------------------------------------------------------------------
// ScriptBuilder

ScriptBuilder::ScriptBuilder(Scenario& s) : s_(s) {
    for (const auto& a : s.agents) agents_.push_back({a.id, AgentPlan{a.position, {1.0, 0.0}, a.present}});
    for (const auto& o : s.objects) objects_.emplace_back(o.id, o.position);
}

ScriptBuilder::AgentPlan& ScriptBuilder::agent(int id) {
    for (auto& [i, a] : agents_) {
        if (i == id) return a;
    }
    throw std::invalid_argument("unknown agent " + std::to_string(id));
}

Point2& ScriptBuilder::object(int id) {
    for (auto& [i, p] : objects_) {
        if (i == id) return p;
    }
    throw std::invalid_argument("unknown object " + std::to_string(id));
}

Point2 ScriptBuilder::body(int id) const { return const_cast<ScriptBuilder*>(this)->agent(id).position; }

Point2 ScriptBuilder::hand(int id) const {
    const AgentPlan& a = const_cast<ScriptBuilder*>(this)->agent(id);
    return a.position + a.facing * s_.world.hand_offset;
}

Point2 ScriptBuilder::object_position(int id) const { return const_cast<ScriptBuilder*>(this)->object(id); }

int ScriptBuilder::steps(double d) const {
    if (d <= 0.0) return 0;
    // One spare frame when d is an exact multiple of the stride, so float
    // round-off in the simulator cannot make the planner optimistic.
    return static_cast<int>(std::floor(d / s_.world.walk_speed + 1e-6)) + 1;
}

void ScriptBuilder::push(int t, EventKind kind, int actor, std::vector<int> objects, std::optional<Point2> position) {
    events_.push_back({t, kind, actor, std::move(objects), position});
}

int ScriptBuilder::walk(int id, Point2 to, int t) {
    AgentPlan& a = agent(id);
    const double d = distance(a.position, to);
    push(t, EventKind::walk_to, id, {}, to);
    if (d > 0.0) a.facing = (to - a.position) * (1.0 / d);
    a.position = to;
    return t + std::max(1, steps(d));
}

int ScriptBuilder::approach(int id, Point2 target, int t) {
    const double off = s_.world.hand_offset;
    if (distance(hand(id), target) < 0.05) return t;
    AgentPlan& a = agent(id);
    if (distance(a.position, target) < off + 0.5) {
        Point2 away = normalized(a.position - target);
        if (away.norm() == 0.0) away = a.facing * -1.0;
        t = walk(id, target + away * 1.2, t);
    }
    const Point2 u = normalized(target - agent(id).position);
    return walk(id, target - u * off, t);
}

int ScriptBuilder::carry(int id, std::vector<int> objects, Point2 dest, int t) {
    for (int o : objects) {
        if (distance(hand(id), object(o)) > s_.world.reach_radius) {
            throw std::logic_error("carry planned with object " + std::to_string(o) + " out of reach");
        }
    }
    AgentPlan& a = agent(id);
    const Point2 delta = dest - a.position;
    const double d = delta.norm();
    double travel = 0.0;
    if (d > s_.world.hand_offset) {
        a.facing = delta * (1.0 / d);
        a.position = dest - a.facing * s_.world.hand_offset;
        travel = d - s_.world.hand_offset;
    }
    for (int o : objects) object(o) = dest;
    push(t, EventKind::carry_to, id, std::move(objects), dest);
    return t + std::max(1, steps(travel)) + 1;
}

int ScriptBuilder::pick_up(int id, int o, int t) {
    push(t, EventKind::pick_up, id, {o}, std::nullopt);
    return t + 1;
}

int ScriptBuilder::put_down(int id, int o, int t) {
    object(o) = hand(id);
    push(t, EventKind::put_down, id, {o}, std::nullopt);
    return t + 1;
}

int ScriptBuilder::swap(int id, int a, int b, int t) {
    std::swap(object(a), object(b));
    push(t, EventKind::swap, id, {a, b}, std::nullopt);
    return t + s_.world.swap_frames + 1;
}

int ScriptBuilder::empty(int id, int o, int t) {
    push(t, EventKind::empty_object, id, {o}, std::nullopt);
    return t + 1;
}

int ScriptBuilder::reach(int id, int o, int t) {
    push(t, EventKind::reach_toward, id, {o}, std::nullopt);
    return t + s_.world.reach_frames;
}

int ScriptBuilder::exit(int id, int t) {
    agent(id).present = false;
    push(t, EventKind::exit_view, id, {}, std::nullopt);
    return t + 1;
}

int ScriptBuilder::enter(int id, Point2 at, int t) {
    AgentPlan& a = agent(id);
    a.present = true;
    a.position = at;
    push(t, EventKind::enter_room, id, {}, at);
    return t + 1;
}

void ScriptBuilder::finish() {
    std::stable_sort(events_.begin(), events_.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    s_.script = events_;
}

// ---------------------------------------------------------------------------
// Helpers

Camera corner_camera(int id, const Room& room, int corner) {
    constexpr double inset = 0.1;
    const std::array<Point2, 4> corners{Point2{room.min.x + inset, room.min.y + inset},
                                        Point2{room.max.x - inset, room.min.y + inset},
                                        Point2{room.max.x - inset, room.max.y - inset},
                                        Point2{room.min.x + inset, room.max.y - inset}};
    const Point2 pos = corners.at(static_cast<std::size_t>(corner % 4));
    const Point2 centre = (room.min + room.max) * 0.5;
    const double yaw = std::atan2(centre.y - pos.y, centre.x - pos.x);
    return Camera::from_pose(id, pos, yaw, 1.2, 640, 480, 2.8, 0.6);
}

int views_covering(const Calibration& calib, Point2 p, double width, double aspect, double margin) {
    int n = 0;
    for (const auto& c : calib.cameras) {
        if (!calib.sees_point(c, p)) continue;
        const Box b = c.render_box(p, width, aspect);
        if (b.x1 >= margin && b.y1 >= margin && b.x2 <= c.width - margin && b.y2 <= c.height - margin) ++n;
    }
    return n;
}

namespace {

constexpr ObjectSpec kCup{0, {Color::red, Material::plastic, Category::cup}, {}, 0.18, 1.2, false};

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v.at(static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1)));
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// A point of `room` seen by at least `min_views` cameras, at least `spacing`
/// from every point in `avoid`.
std::optional<Point2> free_spot(Sampler& rng, const Calibration& calib, const Room& room, const std::vector<Point2>& avoid,
                                double spacing, int min_views, double width = 0.18, double aspect = 1.2) {
    for (int attempt = 0; attempt < 400; ++attempt) {
        const Point2 p{rng.uniform(room.min.x + 0.3, room.max.x - 0.3), rng.uniform(room.min.y + 0.3, room.max.y - 0.3)};
        if (views_covering(calib, p, width, aspect) < min_views) continue;
        if (calib.hidden(p)) continue;
        const bool clear = std::none_of(avoid.begin(), avoid.end(), [&](const Point2& q) { return distance(p, q) < spacing; });
        if (clear) return p;
    }
    return std::nullopt;
}

Room make_room(std::string name, Point2 min, Point2 max) { return {std::move(name), min, max}; }

}  // namespace

// ---------------------------------------------------------------------------
// Tracking scenarios

NoiseModel TrackingOptions::tracking_noise() {
    NoiseModel n;
    n.miss_base = 0.08;
    n.miss_held = 0.35;
    n.false_positive_rate = 0.15;
    n.box_jitter_px = 1.0;
    n.feature_noise = 0.15;
    n.attribute_confusion = 0.05;
    n.identical_appearance = true;
    n.score_spread = 0.3;
    n.reach_jitter_rad = 0.05;
    return n;
}

Scenario tracking_scenario(std::uint64_t seed, const TrackingOptions& opt) {
    Sampler rng(seed);
    Scenario s;
    s.name = "tracking-" + std::to_string(seed);
    s.horizon = opt.horizon;
    s.noise = opt.noise;
    s.rooms = {make_room("room-1", {0, 0}, {6, 6}), make_room("room-2", {10, 0}, {16, 6})};
    s.cameras = {corner_camera(1, s.rooms[0], 0), corner_camera(2, s.rooms[0], 2), corner_camera(3, s.rooms[1], 0),
                 corner_camera(4, s.rooms[1], 2)};
    const Calibration calib = Calibration::from(s);

    const int n = rng.integer(opt.min_objects, opt.max_objects);
    std::vector<Point2> taken;
    for (int i = 0; i < n; ++i) {
        const Room& room = s.rooms[static_cast<std::size_t>(i % 2)];
        auto p = free_spot(rng, calib, room, taken, 0.9, 2);
        if (!p) p = free_spot(rng, calib, room, taken, 0.9, 1);
        if (!p) break;
        ObjectSpec o = kCup;
        o.id = i + 1;
        o.position = *p;
        o.attributes.color = rng.chance(0.5) ? Color::red : Color::blue;
        s.objects.push_back(o);
        taken.push_back(*p);
    }
    for (int j = 1; j <= opt.agents; ++j) {
        const Room& room = s.rooms[static_cast<std::size_t>(j == opt.agents ? 1 : 0)];
        auto p = free_spot(rng, calib, room, taken, 1.0, 1, 0.5, 3.4);
        AgentSpec a;
        a.id = j;
        a.position = p.value_or((room.min + room.max) * 0.5);
        s.agents.push_back(a);
    }

    ScriptBuilder b(s);
    std::map<int, int> busy_until;   // object id -> first frame it is free
    std::map<int, Point2> planned;   // object id -> final planned position
    for (const auto& o : s.objects) {
        busy_until[o.id] = 1;
        planned[o.id] = o.position;
    }
    auto planned_points = [&](std::initializer_list<int> skip) {
        std::vector<Point2> pts;
        for (const auto& [id, p] : planned) {
            if (std::find(skip.begin(), skip.end(), id) == skip.end()) pts.push_back(p);
        }
        return pts;
    };
    auto room_of = [&](Point2 p) { return std::max(0, calib.room_of(p)); };

    std::map<int, int> free_at;
    for (const auto& a : s.agents) free_at[a.id] = 1 + a.id;
    const int last = s.horizon - 2;

    while (true) {
        int id = 0;
        for (const auto& [j, t] : free_at) {
            if (t < last && (id == 0 || t < free_at[id])) id = j;
        }
        if (id == 0) break;
        const int t = free_at[id];
        std::vector<int> available;
        for (const auto& [o, until] : busy_until) {
            if (until <= t) available.push_back(o);
        }
        if (available.size() < 2) {
            free_at[id] = t + 3;
            continue;
        }
        // Candidates close to the agent are preferred so work concentrates.
        std::sort(available.begin(), available.end(), [&](int x, int y) {
            return distance(planned[x], b.body(id)) < distance(planned[y], b.body(id));
        });
        available.resize(std::min<std::size_t>(available.size(), 4));
        const int target = rng.pick(available);
        const double r = rng.uniform(0.0, 1.0);
        int end = t;
        if (r < 0.55) {
            const bool cross = rng.chance(opt.cross_room_share);
            const int here = room_of(planned[target]);
            const Room& room = s.rooms[static_cast<std::size_t>(cross ? 1 - here : here)];
            const auto dest = free_spot(rng, calib, room, planned_points({target}), 0.9, 1);
            if (!dest) {
                free_at[id] = t + 2;
                continue;
            }
            const int at = b.approach(id, planned[target], t);
            end = b.carry(id, {target}, *dest, at);
            planned[target] = *dest;
            busy_until[target] = end;
        } else if (r < 0.8) {
            // Bring the target next to a partner, then swap the two.
            std::vector<int> partners;
            for (int o : available) {
                if (o != target && room_of(planned[o]) == room_of(planned[target])) partners.push_back(o);
            }
            if (partners.empty()) {
                free_at[id] = t + 2;
                continue;
            }
            const int partner = rng.pick(partners);
            std::optional<Point2> dest;
            for (int attempt = 0; attempt < 40 && !dest; ++attempt) {
                const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
                const Point2 p = planned[partner] + Point2{std::cos(ang), std::sin(ang)} * 0.7;
                if (calib.room_of(p) != room_of(planned[partner]) || views_covering(calib, p, 0.18, 1.2) < 1) continue;
                const auto others = planned_points({target, partner});
                if (std::any_of(others.begin(), others.end(), [&](const Point2& q) { return distance(p, q) < 0.9; })) continue;
                dest = p;
            }
            if (!dest) {
                free_at[id] = t + 2;
                continue;
            }
            int at = b.approach(id, planned[target], t);
            at = b.carry(id, {target}, *dest, at);
            at = b.approach(id, (*dest + planned[partner]) * 0.5, at);
            end = b.swap(id, target, partner, at);
            planned[target] = b.object_position(target);
            planned[partner] = b.object_position(partner);
            busy_until[target] = end;
            busy_until[partner] = end;
        } else {
            const Room& room = s.rooms[static_cast<std::size_t>(room_of(planned[target]))];
            const auto dest = free_spot(rng, calib, room, planned_points({target}), 0.9, 1);
            if (!dest) {
                free_at[id] = t + 2;
                continue;
            }
            int at = b.approach(id, planned[target], t);
            at = b.pick_up(id, target, at);
            at = b.approach(id, *dest, at);
            end = b.put_down(id, target, at);
            planned[target] = b.object_position(target);
            busy_until[target] = end;
        }
        free_at[id] = end + rng.integer(0, 3);
    }
    b.finish();
    std::erase_if(s.script, [&](const Event& e) { return e.time > last; });
    return s;
}

// ---------------------------------------------------------------------------
// Belief scenarios

NoiseModel BeliefOptions::belief_noise() {
    NoiseModel n;
    n.miss_base = 0.05;
    n.miss_held = 0.25;
    n.false_positive_rate = 0.1;
    n.box_jitter_px = 1.0;
    n.feature_noise = 0.15;
    n.attribute_confusion = 0.03;
    n.identical_appearance = true;
    n.score_spread = 0.3;
    n.reach_jitter_rad = 0.05;
    return n;
}

namespace {

const Room kBeliefRoom{"room", {0, 0}, {6, 6}};

/// Room, cameras, containers, same-looking object pairs and two or three agents.
Scenario belief_world(Sampler& rng, bool single_view, const NoiseModel& noise, int horizon) {
    Scenario s;
    s.horizon = horizon;
    s.noise = noise;
    s.rooms = {kBeliefRoom};
    s.cameras = {corner_camera(1, kBeliefRoom, 0)};
    if (!single_view) s.cameras.push_back(corner_camera(2, kBeliefRoom, 2));
    const Calibration bare = Calibration::from(s);

    std::vector<Point2> taken;
    const int containers = rng.integer(1, 2);
    for (int k = 0; k < containers; ++k) {
        if (auto p = free_spot(rng, bare, kBeliefRoom, taken, 1.4, 1)) {
            s.containers.push_back({k == 0 ? "basket" : "box", *p, 0.25});
            taken.push_back(*p);
        }
    }
    const Calibration calib = Calibration::from(s);

    std::vector<Attributes> kinds;
    const int n_kinds = rng.integer(2, 3);
    while (static_cast<int>(kinds.size()) < n_kinds) {
        Attributes a{static_cast<Color>(rng.integer(0, 5)), static_cast<Material>(rng.integer(0, 4)),
                     static_cast<Category>(rng.integer(0, 4))};
        if (std::find(kinds.begin(), kinds.end(), a) == kinds.end()) kinds.push_back(a);
    }
    int id = 1;
    for (const auto& kind : kinds) {
        for (int copy = 0; copy < 2; ++copy) {
            auto p = free_spot(rng, calib, kBeliefRoom, taken, 1.3, single_view ? 1 : 2, 0.2, 1.2);
            if (!p) continue;
            ObjectSpec o;
            o.id = id++;
            o.attributes = kind;
            o.position = *p;
            o.width = 0.2;
            o.aspect = 1.2;
            s.objects.push_back(o);
            taken.push_back(*p);
        }
    }
    const int n_agents = rng.chance(0.5) ? 3 : 2;
    for (int j = 1; j <= n_agents; ++j) {
        auto p = free_spot(rng, calib, kBeliefRoom, taken, 1.0, 1, 0.5, 3.4);
        s.agents.push_back({j, p.value_or(Point2{3, 3}), true});
        if (p) taken.push_back(*p);
    }
    return s;
}

struct BeliefPlan {
    int t = 2;
    std::vector<int> emptied;
};

/// Agent 1 carries one object in plain sight; agent 2 then walks off and leaves.
void belief_opening(Sampler& rng, ScriptBuilder& b, const Scenario& s, BeliefPlan& plan) {
    const Calibration calib = Calibration::from(s);
    std::vector<Point2> avoid;
    for (const auto& o : s.objects) avoid.push_back(b.object_position(o.id));
    for (const auto& k : s.containers) avoid.push_back(k.position);
    const int target = s.objects.at(static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.objects.size()) - 1))).id;
    if (auto dest = free_spot(rng, calib, kBeliefRoom, avoid, 1.3, 1, 0.2, 1.2)) {
        plan.t = b.approach(1, b.object_position(target), plan.t);
        plan.t = b.carry(1, {target}, *dest, plan.t);
    }
    plan.t = b.exit(2, plan.t + 2);
}

/// Changes made by agent 1 while agent 2 is away.
void belief_rearrange(Sampler& rng, ScriptBuilder& b, const Scenario& s, BeliefPlan& plan) {
    const Calibration calib = Calibration::from(s);
    auto avoid_all = [&](int skip) {
        std::vector<Point2> pts;
        for (const auto& o : s.objects) {
            if (o.id != skip) pts.push_back(b.object_position(o.id));
        }
        for (const auto& k : s.containers) pts.push_back(k.position);
        return pts;
    };
    auto random_object = [&] {
        return s.objects.at(static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.objects.size()) - 1))).id;
    };
    const int changes = rng.integer(1, 3);
    for (int c = 0; c < changes; ++c) {
        const double r = rng.uniform(0.0, 1.0);
        const int target = random_object();
        if (r < 0.3 && !s.containers.empty()) {
            const auto& box = s.containers.at(static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.containers.size()) - 1)));
            bool occupied = false;
            for (const auto& o : s.objects) occupied = occupied || distance(b.object_position(o.id), box.position) < 0.3;
            if (occupied) continue;
            plan.t = b.approach(1, b.object_position(target), plan.t);
            plan.t = b.carry(1, {target}, box.position, plan.t);
        } else if (r < 0.55) {
            // Substitution: move the target away and put its twin where it stood.
            int twin = 0;
            for (const auto& o : s.objects) {
                if (o.id != target && o.attributes == s.object(target)->attributes) twin = o.id;
            }
            if (twin == 0 || calib.hidden(b.object_position(twin))) continue;
            const Point2 spot = b.object_position(target);
            if (calib.hidden(spot)) continue;
            auto dest = free_spot(rng, calib, kBeliefRoom, avoid_all(target), 1.3, 1, 0.2, 1.2);
            if (!dest) continue;
            plan.t = b.approach(1, spot, plan.t);
            plan.t = b.carry(1, {target}, *dest, plan.t);
            plan.t = b.approach(1, b.object_position(twin), plan.t);
            plan.t = b.carry(1, {twin}, spot, plan.t);
        } else if (r < 0.8) {
            if (calib.hidden(b.object_position(target))) continue;
            plan.t = b.approach(1, b.object_position(target), plan.t);
            plan.t = b.empty(1, target, plan.t);
            plan.emptied.push_back(target);
        } else {
            auto dest = free_spot(rng, calib, kBeliefRoom, avoid_all(target), 1.3, 1, 0.2, 1.2);
            if (!dest) continue;
            plan.t = b.approach(1, b.object_position(target), plan.t);
            plan.t = b.carry(1, {target}, *dest, plan.t);
        }
    }
}

}  // namespace

Scenario belief_scenario(std::uint64_t seed, const BeliefOptions& opt) {
    Sampler rng(seed);
    Scenario s = belief_world(rng, opt.single_view, opt.noise, opt.horizon);
    s.name = std::string(opt.single_view ? "belief-single-" : "belief-multi-") + std::to_string(seed);
    ScriptBuilder b(s);
    BeliefPlan plan;
    belief_opening(rng, b, s, plan);
    const Point2 gone_from = b.body(2);
    belief_rearrange(rng, b, s, plan);

    // Agent 2 comes back, walks towards an object and reaches for it.
    const Calibration calib = Calibration::from(s);
    plan.t = b.enter(2, gone_from, plan.t + 2);
    int target = 0;
    if (!plan.emptied.empty() && rng.chance(0.6)) {
        target = rng.pick(plan.emptied);
    } else {
        std::vector<int> seen;
        for (const auto& o : s.objects) {
            if (!calib.hidden(b.object_position(o.id))) seen.push_back(o.id);
        }
        if (!seen.empty()) target = rng.pick(seen);
    }
    if (target != 0) {
        const Point2 goal = b.object_position(target);
        const Point2 u = normalized(goal - b.body(2));
        plan.t = b.walk(2, goal - u * 1.2, plan.t);
        plan.t = b.reach(2, target, plan.t);
    }
    s.horizon = std::max(s.horizon, plan.t + 4);
    b.finish();
    return s;
}

InertiaPair inertia_pair(std::uint64_t seed) {
    InertiaPair out;
    std::array<Scenario*, 2> sides{&out.first, &out.second};
    for (std::size_t side = 0; side < 2; ++side) {
        Sampler rng(seed);
        Scenario s = belief_world(rng, false, BeliefOptions::belief_noise(), 60);
        s.name = "inertia-" + std::to_string(seed) + (side == 0 ? "-a" : "-b");
        ScriptBuilder b(s);
        BeliefPlan plan;
        belief_opening(rng, b, s, plan);
        out.departure = plan.t - 1;
        Sampler after(seed * 2654435761ULL + side + 1);
        belief_rearrange(after, b, s, plan);
        s.horizon = std::max(s.horizon, plan.t + 4);
        b.finish();
        *sides[side] = std::move(s);
    }
    // Horizons must agree for the pair to differ only in the script.
    const int horizon = std::max(out.first.horizon, out.second.horizon);
    out.first.horizon = out.second.horizon = horizon;
    out.second.name = out.first.name;
    return out;
}

// ---------------------------------------------------------------------------
// Bundled noise-free fixtures

namespace {

ObjectSpec item(int id, Attributes a, Point2 p, double width = 0.2, double aspect = 1.2) {
    ObjectSpec o;
    o.id = id;
    o.attributes = a;
    o.position = p;
    o.width = width;
    o.aspect = aspect;
    return o;
}

Scenario one_room(std::string name, int cameras) {
    Scenario s;
    s.name = std::move(name);
    s.rooms = {kBeliefRoom};
    s.cameras = {corner_camera(1, kBeliefRoom, 0)};
    if (cameras > 1) s.cameras.push_back(corner_camera(2, kBeliefRoom, 2));
    s.noise = NoiseModel::zero();
    return s;
}

constexpr Attributes kRedCup{Color::red, Material::plastic, Category::cup};
constexpr Attributes kBlueCup{Color::blue, Material::ceramic, Category::cup};
constexpr Attributes kMarble{Color::green, Material::glass, Category::marble};
constexpr Attributes kNoodle{Color::yellow, Material::paper, Category::noodle};
constexpr Attributes kMilk{Color::white, Material::cardboard, Category::box};
constexpr Attributes kBottle{Color::black, Material::glass, Category::bottle};

Scenario static_single() {
    Scenario s = one_room("static_single", 1);
    s.objects = {item(1, kRedCup, {3.0, 3.0})};
    s.horizon = 10;
    return s;
}

Scenario sally_anne() {
    Scenario s = one_room("sally-anne", 2);
    s.containers = {{"box", {2.2, 3.8}, 0.25}, {"basket", {3.8, 2.2}, 0.25}};
    s.objects = {item(1, kMarble, {2.6, 2.4}, 0.15, 1.0)};
    s.agents = {{1, {1.4, 1.6}, true}, {2, {4.6, 4.4}, true}};
    ScriptBuilder b(s);
    int t = b.approach(1, {2.6, 2.4}, 3);
    t = b.carry(1, {1}, {2.2, 3.8}, t);
    t = b.walk(1, {1.0, 3.0}, t + 1);
    t = b.exit(1, t);
    t = b.approach(2, {2.2, 3.8}, t + 1);
    t = b.carry(2, {1}, {3.8, 2.2}, t);
    t = b.walk(2, {4.6, 4.4}, t);
    t = b.enter(1, {1.0, 3.0}, t + 2);
    t = b.walk(1, {1.5, 2.0}, t);
    s.horizon = t + 6;
    b.finish();
    return s;
}

Scenario cup_substitution() {
    Scenario s = one_room("cup_substitution", 2);
    s.objects = {item(1, kRedCup, {2.2, 2.8}), item(2, kRedCup, {4.0, 3.8}), item(3, kBlueCup, {3.6, 1.8})};
    s.agents = {{1, {4.6, 2.6}, true}, {2, {1.6, 4.4}, true}};
    ScriptBuilder b(s);
    int t = b.exit(2, 5);
    t = b.approach(1, {2.2, 2.8}, t);
    t = b.carry(1, {1}, {4.4, 4.6}, t);
    t = b.approach(1, {4.0, 3.8}, t);
    t = b.carry(1, {2}, {2.2, 2.8}, t);
    t = b.walk(1, {4.6, 1.4}, t);
    t = b.enter(2, {1.6, 4.4}, t + 2);
    s.horizon = t + 8;
    b.finish();
    return s;
}

Scenario carry_across_rooms() {
    Scenario s;
    s.name = "carry_across_rooms";
    s.rooms = {make_room("room-1", {0, 0}, {6, 6}), make_room("room-2", {10, 0}, {16, 6})};
    s.cameras = {corner_camera(1, s.rooms[0], 0), corner_camera(2, s.rooms[0], 2), corner_camera(3, s.rooms[1], 0),
                 corner_camera(4, s.rooms[1], 2)};
    s.objects = {item(1, kRedCup, {3.0, 3.0}), item(2, kBlueCup, {2.0, 4.0}), item(3, kRedCup, {13.8, 3.6})};
    s.agents = {{1, {2.0, 2.0}, true}, {2, {4.2, 4.4}, true}, {3, {12.4, 2.0}, true}};
    ScriptBuilder b(s);
    int t = b.approach(1, {3.0, 3.0}, 3);
    t = b.carry(1, {1}, {12.6, 3.4}, t);
    t = b.walk(1, {14.6, 1.6}, t);
    s.horizon = t + 6;
    b.finish();
    return s;
}

Scenario swap_cups() {
    Scenario s = one_room("swap_cups", 2);
    s.objects = {item(1, kRedCup, {2.7, 3.2}), item(2, kRedCup, {3.4, 3.2}), item(3, kBottle, {4.2, 1.8})};
    s.agents = {{1, {3.0, 1.6}, true}, {2, {1.6, 4.6}, true}};
    ScriptBuilder b(s);
    int t = b.approach(1, {3.05, 3.2}, 3);
    t = b.swap(1, 1, 2, t);
    t = b.walk(1, {4.8, 3.0}, t + 1);
    s.horizon = t + 6;
    b.finish();
    return s;
}

Scenario pick_put() {
    Scenario s = one_room("pick_put", 2);
    s.objects = {item(1, kBottle, {2.4, 2.6}, 0.15, 2.2), item(2, kBlueCup, {4.0, 4.0})};
    s.agents = {{1, {1.4, 4.0}, true}, {2, {4.6, 1.8}, true}};
    ScriptBuilder b(s);
    int t = b.approach(1, {2.4, 2.6}, 3);
    t = b.pick_up(1, 1, t);
    t = b.approach(1, {3.6, 2.2}, t);
    t = b.put_down(1, 1, t);
    t = b.walk(1, {1.4, 4.0}, t + 1);
    s.horizon = t + 6;
    b.finish();
    return s;
}

Scenario cup_noodle(bool false_belief) {
    Scenario s = one_room(false_belief ? "cup_noodle_false_belief" : "cup_noodle_no_false_belief", 1);
    s.containers = {{"microwave", {3.4, 3.4}, 0.25}, {"cabinet", {4.2, 1.6}, 0.25}};
    s.objects = {item(1, kNoodle, {2.2, 2.2}), item(2, kRedCup, {2.0, 3.8})};
    s.agents = {{1, {1.6, 1.4}, true}, {2, {3.4, 1.0}, true}};
    ScriptBuilder b(s);
    int t = b.approach(1, {2.2, 2.2}, 3);
    t = b.carry(1, {1}, {3.4, 3.4}, t);
    t = b.walk(1, {1.4, 2.6}, t + 1);
    if (false_belief) t = b.exit(1, t);
    t = b.approach(2, {3.4, 3.4}, t + 1);
    t = b.carry(2, {1}, {4.2, 1.6}, t);
    t = b.walk(2, {2.8, 1.2}, t);
    if (false_belief) t = b.enter(1, {1.4, 2.6}, t + 2);
    t = b.walk(1, {1.8, 2.2}, t);
    s.horizon = t + 6;
    b.finish();
    return s;
}

Scenario helping(bool false_belief) {
    Scenario s = one_room(false_belief ? "helping_false_belief" : "helping_true_belief", 1);
    s.objects = {item(1, kMilk, {2.2, 3.2}, 0.2, 1.6), item(2, kMilk, {3.6, 1.6}, 0.2, 1.6),
                 item(3, kBlueCup, {3.8, 3.8})};
    s.agents = {{1, {1.4, 1.8}, true}, {2, {4.6, 2.6}, true}};
    ScriptBuilder b(s);
    int t = 4;
    if (false_belief) t = b.exit(1, t);
    t = b.approach(2, {2.2, 3.2}, t);
    t = b.empty(2, 1, t);
    t = b.walk(2, {4.6, 2.6}, t);
    if (false_belief) t = b.enter(1, {1.4, 1.8}, t + 4);
    t = b.walk(1, {1.6, 2.2}, t + 1);
    t = b.reach(1, 1, t);
    s.horizon = t + 4;
    b.finish();
    return s;
}

}  // namespace

std::vector<std::string> bundled_fixture_names() {
    return {"static_single",      "sally-anne",          "cup_substitution",        "carry_across_rooms",
            "swap_cups",          "pick_put",            "cup_noodle_false_belief", "cup_noodle_no_false_belief",
            "helping_false_belief", "helping_true_belief"};
}

Scenario bundled_fixture(std::string_view name) {
    if (name == "static_single") return static_single();
    if (name == "sally-anne") return sally_anne();
    if (name == "cup_substitution") return cup_substitution();
    if (name == "carry_across_rooms") return carry_across_rooms();
    if (name == "swap_cups") return swap_cups();
    if (name == "pick_put") return pick_put();
    if (name == "cup_noodle_false_belief") return cup_noodle(true);
    if (name == "cup_noodle_no_false_belief") return cup_noodle(false);
    if (name == "helping_false_belief") return helping(true);
    if (name == "helping_true_belief") return helping(false);
    throw std::invalid_argument("unknown fixture '" + std::string(name) + "'");
}

}  // namespace beliefgraph::worldsim
