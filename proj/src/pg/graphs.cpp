#include "beliefgraph/pg/graphs.hpp"

#include <algorithm>
#include <string>

namespace beliefgraph::pg {

namespace {
template <typename T>
const T* find_id(const std::vector<T>& v, int id) {
    for (const auto& x : v) {
        if (x.id == id) return &x;
    }
    return nullptr;
}
}  // namespace

const ObjectNode* RobotPG::object(int id) const { return find_id(objects, id); }
const AgentNode* RobotPG::agent(int id) const { return find_id(agents, id); }
const ObjectTrack* JointPG::object(int id) const { return find_id(objects, id); }
const AgentTrack* JointPG::agent(int id) const { return find_id(agents, id); }

const BeliefEntry* BeliefPG::object(int id) const {
    for (const auto& e : objects) {
        if (e.object == id) return &e;
    }
    return nullptr;
}

BeliefPG snapshot_belief(const RobotPG& robot_pg, int agent_id) {
    if (robot_pg.agent(agent_id) == nullptr) {
        throw GraphError("agent " + std::to_string(agent_id) + " is not observed by camera " +
                         std::to_string(robot_pg.camera) + " at frame " + std::to_string(robot_pg.time));
    }
    BeliefPG b;
    b.camera = robot_pg.camera;
    b.agent = agent_id;
    b.last_seen = robot_pg.time;
    for (const auto& o : robot_pg.objects) {
        const auto box = o.boxes.find(robot_pg.camera);
        if (box == o.boxes.end()) {
            throw GraphError("object node " + std::to_string(o.id) + " has no box in camera " +
                             std::to_string(robot_pg.camera));
        }
        b.objects.push_back({o.id, o.position, box->second, o.attributes, o.empty});
    }
    std::sort(b.objects.begin(), b.objects.end(), [](const BeliefEntry& a, const BeliefEntry& c) { return a.object < c.object; });
    return b;
}

BeliefPG merge_belief(const BeliefPG& previous, const BeliefPG& fresh) {
    BeliefPG out = fresh;
    for (const auto& e : previous.objects) {
        if (fresh.object(e.object) == nullptr) out.objects.push_back(e);
    }
    std::sort(out.objects.begin(), out.objects.end(), [](const BeliefEntry& a, const BeliefEntry& c) { return a.object < c.object; });
    return out;
}

const RobotPG* PgSet::robot_pg(int camera, int time) const {
    const auto it = std::lower_bound(robot.begin(), robot.end(), std::pair(time, camera), [](const RobotPG& g, const std::pair<int, int>& key) {
        return std::pair(g.time, g.camera) < key;
    });
    if (it == robot.end() || it->time != time || it->camera != camera) return nullptr;
    return &*it;
}

const JointPG* PgSet::joint_pg(int time) const {
    if (time < 1 || time > static_cast<int>(joint.size())) return nullptr;
    return &joint[static_cast<std::size_t>(time - 1)];
}

std::vector<const BeliefPG*> PgSet::beliefs_at(int time) const {
    std::map<std::pair<int, int>, const BeliefPG*> latest;
    for (const auto& b : beliefs) {
        if (b.last_seen > time) break;
        latest[{b.camera, b.agent}] = &b;
    }
    std::vector<const BeliefPG*> out;
    for (const auto& [key, b] : latest) out.push_back(b);
    return out;
}

}  // namespace beliefgraph::pg
