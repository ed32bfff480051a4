#include "beliefgraph/pg/archive.hpp"

#include "beliefgraph/worldsim/logs.hpp"
#include "beliefgraph/worldsim/scenario.hpp"

namespace beliefgraph::pg {

using nlohmann::json;
using nlohmann::ordered_json;
using worldsim::box_from_json;
using worldsim::box_to_json;
using worldsim::point_from_json;
using worldsim::point_to_json;

namespace {

template <typename T, typename Fn>
ordered_json per_camera(const std::map<int, T>& m, Fn&& fn) {
    ordered_json out = ordered_json::array();
    for (const auto& [cam, v] : m) out.push_back({cam, fn(v)});
    return out;
}

template <typename T, typename Fn>
std::map<int, T> per_camera_from(const json& j, Fn&& fn) {
    std::map<int, T> out;
    for (const auto& e : j) out.emplace(e.at(0).get<int>(), fn(e.at(1)));
    return out;
}

ordered_json keypoints_json(const Keypoints& k) {
    return ordered_json::array({point_to_json(k.foot), point_to_json(k.hand), point_to_json(k.shoulder)});
}

Keypoints keypoints_from(const json& j) {
    return {point_from_json(j.at(0)), point_from_json(j.at(1)), point_from_json(j.at(2))};
}

double num(const json& v) { return v.get<double>(); }

ordered_json object_json(const ObjectNode& o) {
    return ordered_json{{"id", o.id},
                        {"boxes", per_camera(o.boxes, box_to_json)},
                        {"scores", per_camera(o.scores, [](double s) { return s; })},
                        {"position", point_to_json(o.position)},
                        {"feature", o.feature},
                        {"holder", o.holder},
                        {"attributes", worldsim::attributes_to_json(o.attributes)},
                        {"empty", o.empty},
                        {"likelihood", o.likelihood}};
}

ObjectNode object_from(const json& j) {
    ObjectNode o;
    o.id = j.at("id").get<int>();
    o.boxes = per_camera_from<Box>(j.at("boxes"), box_from_json);
    o.scores = per_camera_from<double>(j.at("scores"), num);
    o.position = point_from_json(j.at("position"));
    o.feature = j.at("feature").get<std::vector<double>>();
    o.holder = j.at("holder").get<int>();
    o.attributes = worldsim::attributes_from_json(j.at("attributes"));
    o.empty = j.at("empty").get<bool>();
    o.likelihood = j.at("likelihood").get<double>();
    return o;
}

ordered_json agent_json(const AgentNode& a) {
    ordered_json r{{"id", a.id},
                   {"keypoints", per_camera(a.keypoints, keypoints_json)},
                   {"boxes", per_camera(a.boxes, box_to_json)},
                   {"scores", per_camera(a.scores, [](double s) { return s; })},
                   {"position", point_to_json(a.position)},
                   {"hand", point_to_json(a.hand)},
                   {"feature", a.feature},
                   {"likelihood", a.likelihood}};
    if (a.reach) r["reach"] = point_to_json(*a.reach);
    return r;
}

AgentNode agent_from(const json& j) {
    AgentNode a;
    a.id = j.at("id").get<int>();
    a.keypoints = per_camera_from<Keypoints>(j.at("keypoints"), keypoints_from);
    a.boxes = per_camera_from<Box>(j.at("boxes"), box_from_json);
    a.scores = per_camera_from<double>(j.at("scores"), num);
    a.position = point_from_json(j.at("position"));
    a.hand = point_from_json(j.at("hand"));
    a.feature = j.at("feature").get<std::vector<double>>();
    a.likelihood = j.at("likelihood").get<double>();
    if (j.contains("reach")) a.reach = point_from_json(j.at("reach"));
    return a;
}

std::string_view status_name(TrackStatus s) { return s == TrackStatus::live ? "live" : "exited-view"; }

TrackStatus status_from(const json& j) {
    const auto s = j.get<std::string>();
    if (s == "live") return TrackStatus::live;
    if (s == "exited-view") return TrackStatus::exited_view;
    throw std::invalid_argument("unknown track status '" + s + "'");
}

}  // namespace

ordered_json robot_to_json(const RobotPG& g) {
    ordered_json objs = ordered_json::array();
    for (const auto& o : g.objects) objs.push_back(object_json(o));
    ordered_json agents = ordered_json::array();
    for (const auto& a : g.agents) agents.push_back(agent_json(a));
    return ordered_json{{"kind", "robot"}, {"time", g.time}, {"camera", g.camera}, {"objects", objs}, {"agents", agents}};
}

RobotPG robot_from_json(const json& j) {
    RobotPG g;
    g.time = j.at("time").get<int>();
    g.camera = j.at("camera").get<int>();
    for (const auto& o : j.at("objects")) g.objects.push_back(object_from(o));
    for (const auto& a : j.at("agents")) g.agents.push_back(agent_from(a));
    return g;
}

ordered_json joint_to_json(const JointPG& g) {
    ordered_json objs = ordered_json::array();
    for (const auto& o : g.objects) {
        auto r = object_json(o);
        r["status"] = status_name(o.status);
        r["last_seen"] = o.last_seen;
        objs.push_back(std::move(r));
    }
    ordered_json agents = ordered_json::array();
    for (const auto& a : g.agents) {
        auto r = agent_json(a);
        r["status"] = status_name(a.status);
        r["last_seen"] = a.last_seen;
        agents.push_back(std::move(r));
    }
    return ordered_json{{"kind", "joint"}, {"time", g.time}, {"objects", objs}, {"agents", agents}};
}

JointPG joint_from_json(const json& j) {
    JointPG g;
    g.time = j.at("time").get<int>();
    for (const auto& o : j.at("objects")) {
        ObjectTrack t;
        static_cast<ObjectNode&>(t) = object_from(o);
        t.status = status_from(o.at("status"));
        t.last_seen = o.at("last_seen").get<int>();
        g.objects.push_back(std::move(t));
    }
    for (const auto& a : j.at("agents")) {
        AgentTrack t;
        static_cast<AgentNode&>(t) = agent_from(a);
        t.status = status_from(a.at("status"));
        t.last_seen = a.at("last_seen").get<int>();
        g.agents.push_back(std::move(t));
    }
    return g;
}

ordered_json belief_to_json(const BeliefPG& b) {
    ordered_json objs = ordered_json::array();
    for (const auto& e : b.objects) {
        objs.push_back({{"object", e.object},
                        {"position", point_to_json(e.position)},
                        {"box", box_to_json(e.box)},
                        {"attributes", worldsim::attributes_to_json(e.attributes)},
                        {"empty", e.empty}});
    }
    return ordered_json{{"kind", "belief"}, {"time", b.last_seen}, {"camera", b.camera}, {"agent", b.agent}, {"objects", objs}};
}

BeliefPG belief_from_json(const json& j) {
    BeliefPG b;
    b.last_seen = j.at("time").get<int>();
    b.camera = j.at("camera").get<int>();
    b.agent = j.at("agent").get<int>();
    for (const auto& e : j.at("objects")) {
        b.objects.push_back({e.at("object").get<int>(), point_from_json(e.at("position")), box_from_json(e.at("box")),
                             worldsim::attributes_from_json(e.at("attributes")), e.at("empty").get<bool>()});
    }
    return b;
}

std::string encode_pgs(const PgSet& set) {
    ordered_json header{{"schema", kArchiveSchema},
                        {"version", kArchiveVersion},
                        {"robot", set.robot.size()},
                        {"joint", set.joint.size()},
                        {"belief", set.beliefs.size()}};
    std::string out = header.dump() + "\n";
    for (const auto& g : set.robot) out += robot_to_json(g).dump() + "\n";
    for (const auto& g : set.joint) out += joint_to_json(g).dump() + "\n";
    for (const auto& b : set.beliefs) out += belief_to_json(b).dump() + "\n";
    return out;
}

std::string encode_beliefs_of(const PgSet& set, int agent) {
    std::string out;
    for (const auto& b : set.beliefs) {
        if (b.agent == agent) out += belief_to_json(b).dump() + "\n";
    }
    return out;
}

PgSet decode_pgs(std::string_view text) {
    PgSet set;
    bool have_header = false;
    std::size_t expect_robot = 0, expect_joint = 0, expect_belief = 0;
    worldsim::for_each_line(text, [&](std::size_t n, std::string_view line) {
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ArchiveError(n, std::string("invalid JSON: ") + e.what());
        }
        try {
            if (!have_header) {
                if (!j.contains("schema") || j.at("schema").get<std::string>() != kArchiveSchema) {
                    throw ArchiveError(n, "missing archive header");
                }
                const int version = j.at("version").get<int>();
                if (version != kArchiveVersion) {
                    throw ArchiveError(n, "schema version " + std::to_string(version) + " is not supported (expected " +
                                              std::to_string(kArchiveVersion) + ")");
                }
                expect_robot = j.at("robot").get<std::size_t>();
                expect_joint = j.at("joint").get<std::size_t>();
                expect_belief = j.at("belief").get<std::size_t>();
                have_header = true;
                return;
            }
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "robot") {
                set.robot.push_back(robot_from_json(j));
            } else if (kind == "joint") {
                set.joint.push_back(joint_from_json(j));
            } else if (kind == "belief") {
                set.beliefs.push_back(belief_from_json(j));
            } else {
                throw ArchiveError(n, "unknown record kind '" + kind + "'");
            }
        } catch (const ArchiveError&) {
            throw;
        } catch (const std::exception& e) {
            throw ArchiveError(n, e.what());
        }
    });
    if (!have_header) throw ArchiveError(0, "empty document");
    if (set.robot.size() != expect_robot || set.joint.size() != expect_joint || set.beliefs.size() != expect_belief) {
        throw ArchiveError(0, "record counts do not match the header (truncated archive?)");
    }
    for (std::size_t i = 0; i < set.joint.size(); ++i) {
        if (set.joint[i].time != static_cast<int>(i) + 1) throw ArchiveError(0, "joint records out of frame order");
    }
    return set;
}

}  // namespace beliefgraph::pg
