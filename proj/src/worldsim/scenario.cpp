#include "beliefgraph/worldsim/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace beliefgraph::worldsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 9> kEventNames{
    "enter-room", "exit-view", "walk-to", "pick-up", "put-down",
    "carry-to", "swap", "empty-object", "reach-toward"};

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ScenarioParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioParseError(path + "." + key, "missing field");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ScenarioParseError(path, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ScenarioParseError(path, "expected an integer");
    return v.get<int>();
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) throw ScenarioParseError(path, "expected a string");
    return v.get<std::string>();
}

Point2 point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw ScenarioParseError(path, "expected [x, y]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

const json& array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ScenarioParseError(path, "expected an array");
    return v;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, path + "." + key);
}

ordered_json point_json(const Point2& p) { return ordered_json::array({p.x, p.y}); }

Camera camera_from_json(const json& c, const std::string& path) {
    const int id = integer(field(c, "id", path), path + ".id");
    const Point2 position = point(field(c, "position", path), path + ".position");
    const double yaw = number(field(c, "yaw", path), path + ".yaw");
    const double hfov = number(field(c, "hfov", path), path + ".hfov");
    const json& size = field(c, "image_size", path);
    if (!size.is_array() || size.size() != 2) throw ScenarioParseError(path + ".image_size", "expected [w, h]");
    const int width = integer(size[0], path + ".image_size[0]");
    const int height = integer(size[1], path + ".image_size[1]");
    try {
        if (auto h = c.find("homography"); h != c.end()) {
            if (!h->is_array() || h->size() != 3) throw ScenarioParseError(path + ".homography", "expected 3x3");
            Eigen::Matrix3d m;
            for (int r = 0; r < 3; ++r) {
                const json& row = (*h)[r];
                if (!row.is_array() || row.size() != 3) throw ScenarioParseError(path + ".homography", "expected 3x3");
                for (int k = 0; k < 3; ++k) m(r, k) = number(row[k], path + ".homography");
            }
            return Camera::from_homography(id, position, yaw, hfov, width, height, m);
        }
        const double mount = number_or(c, "height", 2.8, path);
        const double pitch = number_or(c, "pitch", 0.6, path);
        return Camera::from_pose(id, position, yaw, hfov, width, height, mount, pitch);
    } catch (const CalibrationError& e) {
        throw ScenarioValidationError(std::string("camera invariant: ") + e.what());
    }
}

Event event_from_json(const json& e, const std::string& path) {
    Event ev;
    ev.time = integer(field(e, "time", path), path + ".time");
    try {
        ev.kind = event_kind_from_string(text(field(e, "kind", path), path + ".kind"));
    } catch (const std::invalid_argument& ex) {
        throw ScenarioParseError(path + ".kind", ex.what());
    }
    ev.actor = integer(field(e, "actor", path), path + ".actor");
    if (auto it = e.find("objects"); it != e.end()) {
        for (std::size_t i = 0; i < array(*it, path + ".objects").size(); ++i) {
            ev.objects.push_back(integer((*it)[i], path + ".objects[" + std::to_string(i) + "]"));
        }
    }
    if (auto it = e.find("position"); it != e.end()) ev.position = point(*it, path + ".position");
    return ev;
}

}  // namespace

std::string_view to_string(EventKind kind) { return kEventNames.at(static_cast<std::size_t>(kind)); }

EventKind event_kind_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kEventNames.size(); ++i) {
        if (kEventNames[i] == name) return static_cast<EventKind>(i);
    }
    throw std::invalid_argument("unknown event kind '" + std::string(name) + "'");
}

bool is_interaction(EventKind kind) {
    switch (kind) {
        case EventKind::pick_up:
        case EventKind::put_down:
        case EventKind::carry_to:
        case EventKind::swap:
        case EventKind::empty_object:
            return true;
        default:
            return false;
    }
}

void NoiseModel::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ScenarioValidationError(std::string("noise.") + name + " must lie in [0, 1]");
        }
    };
    prob(miss_base, "miss_base");
    prob(miss_held, "miss_held");
    prob(attribute_confusion, "attribute_confusion");
    prob(score_spread, "score_spread");
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0)) throw ScenarioValidationError(std::string("noise.") + name + " must be >= 0");
    };
    nonneg(false_positive_rate, "false_positive_rate");
    nonneg(box_jitter_px, "box_jitter_px");
    nonneg(feature_noise, "feature_noise");
    nonneg(reach_jitter_rad, "reach_jitter_rad");
}

const Camera& Scenario::camera(int id) const {
    for (const auto& c : cameras) {
        if (c.id == id) return c;
    }
    throw ScenarioValidationError("unknown camera id " + std::to_string(id));
}

const ObjectSpec* Scenario::object(int id) const {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const ObjectSpec& o) { return o.id == id; });
    return it == objects.end() ? nullptr : &*it;
}

const AgentSpec* Scenario::agent(int id) const {
    auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentSpec& a) { return a.id == id; });
    return it == agents.end() ? nullptr : &*it;
}

void Scenario::validate() const {
    if (horizon < 1) throw ScenarioValidationError("horizon must be >= 1");
    if (!(fps > 0.0)) throw ScenarioValidationError("fps must be > 0");
    if (rooms.empty()) throw ScenarioValidationError("at least one room is required");
    if (cameras.empty()) throw ScenarioValidationError("at least one camera is required");
    noise.validate();

    std::set<int> camera_ids, object_ids, agent_ids;
    for (const auto& c : cameras) {
        if (!camera_ids.insert(c.id).second) {
            throw ScenarioValidationError("duplicate camera id " + std::to_string(c.id));
        }
    }
    for (const auto& r : rooms) {
        if (!(r.max.x > r.min.x && r.max.y > r.min.y)) {
            throw ScenarioValidationError("room '" + r.name + "' has empty extent");
        }
    }
    for (const auto& o : objects) {
        if (!object_ids.insert(o.id).second) {
            throw ScenarioValidationError("duplicate object id " + std::to_string(o.id));
        }
        const bool in_room = std::any_of(rooms.begin(), rooms.end(), [&](const Room& r) { return r.contains(o.position); });
        if (!in_room) {
            throw ScenarioValidationError("object " + std::to_string(o.id) + " initial position lies outside every room");
        }
        if (!(o.width > 0.0 && o.aspect > 0.0)) {
            throw ScenarioValidationError("object " + std::to_string(o.id) + " footprint must be positive");
        }
    }
    for (const auto& a : agents) {
        if (a.id < 1) throw ScenarioValidationError("agent ids must be >= 1 (0 denotes a free object)");
        if (!agent_ids.insert(a.id).second) {
            throw ScenarioValidationError("duplicate agent id " + std::to_string(a.id));
        }
    }
    int prev_time = 0;
    for (std::size_t i = 0; i < script.size(); ++i) {
        const Event& e = script[i];
        const std::string where = "script[" + std::to_string(i) + "]";
        if (e.time < 1 || e.time > horizon) {
            throw ScenarioValidationError(where + ": event time outside [1, horizon]");
        }
        if (e.time < prev_time) throw ScenarioValidationError(where + ": script is not time-ordered");
        prev_time = e.time;
        if (!agent_ids.count(e.actor)) {
            throw ScenarioValidationError(where + ": undeclared agent id " + std::to_string(e.actor));
        }
        for (int o : e.objects) {
            if (!object_ids.count(o)) {
                throw ScenarioValidationError(where + ": undeclared object id " + std::to_string(o));
            }
        }
        switch (e.kind) {
            case EventKind::swap:
                if (e.objects.size() != 2 || e.objects[0] == e.objects[1]) {
                    throw ScenarioValidationError(where + ": swap requires two distinct object ids");
                }
                break;
            case EventKind::pick_up:
            case EventKind::put_down:
            case EventKind::empty_object:
                if (e.objects.empty()) throw ScenarioValidationError(where + ": event requires an object id");
                break;
            case EventKind::carry_to:
                if (e.objects.empty() || !e.position) {
                    throw ScenarioValidationError(where + ": carry-to requires objects and a position");
                }
                break;
            case EventKind::walk_to:
            case EventKind::enter_room:
                if (!e.position) throw ScenarioValidationError(where + ": event requires a position");
                break;
            case EventKind::reach_toward:
                if (e.objects.empty() && !e.position) {
                    throw ScenarioValidationError(where + ": reach-toward requires a target");
                }
                break;
            case EventKind::exit_view:
                break;
        }
    }
}

const Camera* Calibration::camera(int id) const {
    for (const auto& c : cameras) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

int Calibration::room_of(const Point2& p) const {
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        if (rooms[i].contains(p)) return static_cast<int>(i);
    }
    return -1;
}

bool Calibration::sees_point(const Camera& c, const Point2& p) const {
    const int room = room_of(p);
    if (room < 0 || room != camera_room(c)) return false;
    return c.project(p).has_value();
}

std::optional<Box> Calibration::visible_box(const Camera& c, const Point2& p, double width_m, double aspect) const {
    if (!sees_point(c, p)) return std::nullopt;
    const Box b = c.render_box(p, width_m, aspect);
    if (!c.in_image(b)) return std::nullopt;
    return b;
}

bool Calibration::hidden(const Point2& p) const {
    return std::any_of(containers.begin(), containers.end(),
                       [&](const Container& k) { return distance(k.position, p) <= k.radius; });
}

Attributes attributes_from_json(const json& j) {
    Attributes a;
    a.color = enum_from_name<Color>(j.at("color").get<std::string>(), kColorNames);
    a.material = enum_from_name<Material>(j.at("material").get<std::string>(), kMaterialNames);
    a.category = enum_from_name<Category>(j.at("category").get<std::string>(), kCategoryNames);
    return a;
}

ordered_json attributes_to_json(const Attributes& a) {
    ordered_json j;
    j["color"] = std::string(to_string(a.color));
    j["material"] = std::string(to_string(a.material));
    j["category"] = std::string(to_string(a.category));
    return j;
}

NoiseModel noise_from_json(const json& j, NoiseModel n) {
    if (!j.is_object()) throw ScenarioParseError("noise", "expected an object");
    n.miss_base = number_or(j, "miss_base", n.miss_base, "noise");
    n.miss_held = number_or(j, "miss_held", n.miss_held, "noise");
    n.false_positive_rate = number_or(j, "false_positive_rate", n.false_positive_rate, "noise");
    n.box_jitter_px = number_or(j, "box_jitter_px", n.box_jitter_px, "noise");
    n.feature_noise = number_or(j, "feature_noise", n.feature_noise, "noise");
    n.attribute_confusion = number_or(j, "attribute_confusion", n.attribute_confusion, "noise");
    n.score_spread = number_or(j, "score_spread", n.score_spread, "noise");
    n.reach_jitter_rad = number_or(j, "reach_jitter_rad", n.reach_jitter_rad, "noise");
    if (auto it = j.find("identical_appearance"); it != j.end()) {
        if (!it->is_boolean()) throw ScenarioParseError("noise.identical_appearance", "expected a boolean");
        n.identical_appearance = it->get<bool>();
    }
    return n;
}

ordered_json noise_to_json(const NoiseModel& n) {
    ordered_json j;
    j["miss_base"] = n.miss_base;
    j["miss_held"] = n.miss_held;
    j["false_positive_rate"] = n.false_positive_rate;
    j["box_jitter_px"] = n.box_jitter_px;
    j["feature_noise"] = n.feature_noise;
    j["attribute_confusion"] = n.attribute_confusion;
    j["identical_appearance"] = n.identical_appearance;
    j["score_spread"] = n.score_spread;
    j["reach_jitter_rad"] = n.reach_jitter_rad;
    return j;
}

Scenario scenario_from_json(const json& doc) {
    Scenario s;
    if (!doc.is_object()) throw ScenarioParseError("<root>", "expected a JSON object");
    if (auto it = doc.find("name"); it != doc.end()) s.name = text(*it, "name");
    s.horizon = integer(field(doc, "horizon", "<root>"), "horizon");
    s.fps = number(field(doc, "fps", "<root>"), "fps");

    const json& rooms = array(field(doc, "rooms", "<root>"), "rooms");
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        const std::string path = "rooms[" + std::to_string(i) + "]";
        Room r;
        if (auto it = rooms[i].find("name"); it != rooms[i].end()) r.name = text(*it, path + ".name");
        r.min = point(field(rooms[i], "min", path), path + ".min");
        r.max = point(field(rooms[i], "max", path), path + ".max");
        s.rooms.push_back(r);
    }
    if (auto it = doc.find("containers"); it != doc.end()) {
        for (std::size_t i = 0; i < array(*it, "containers").size(); ++i) {
            const std::string path = "containers[" + std::to_string(i) + "]";
            Container k;
            const json& c = (*it)[i];
            if (auto n = c.find("name"); n != c.end()) k.name = text(*n, path + ".name");
            k.position = point(field(c, "position", path), path + ".position");
            k.radius = number_or(c, "radius", k.radius, path);
            s.containers.push_back(k);
        }
    }
    const json& cams = array(field(doc, "cameras", "<root>"), "cameras");
    for (std::size_t i = 0; i < cams.size(); ++i) {
        s.cameras.push_back(camera_from_json(cams[i], "cameras[" + std::to_string(i) + "]"));
    }
    const json& objs = array(field(doc, "objects", "<root>"), "objects");
    for (std::size_t i = 0; i < objs.size(); ++i) {
        const std::string path = "objects[" + std::to_string(i) + "]";
        ObjectSpec o;
        o.id = integer(field(objs[i], "id", path), path + ".id");
        try {
            o.attributes = attributes_from_json(field(objs[i], "attributes", path));
        } catch (const json::exception& e) {
            throw ScenarioParseError(path + ".attributes", e.what());
        } catch (const std::invalid_argument& e) {
            throw ScenarioParseError(path + ".attributes", e.what());
        }
        o.position = point(field(objs[i], "position", path), path + ".position");
        o.width = number_or(objs[i], "width", o.width, path);
        o.aspect = number_or(objs[i], "aspect", o.aspect, path);
        if (auto it = objs[i].find("empty"); it != objs[i].end()) o.empty = it->get<bool>();
        s.objects.push_back(o);
    }
    const json& agents = array(field(doc, "agents", "<root>"), "agents");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        AgentSpec a;
        a.id = integer(field(agents[i], "id", path), path + ".id");
        a.position = point(field(agents[i], "position", path), path + ".position");
        if (auto it = agents[i].find("present"); it != agents[i].end()) a.present = it->get<bool>();
        s.agents.push_back(a);
    }
    const json& script = array(field(doc, "script", "<root>"), "script");
    for (std::size_t i = 0; i < script.size(); ++i) {
        s.script.push_back(event_from_json(script[i], "script[" + std::to_string(i) + "]"));
    }
    s.noise = noise_from_json(field(doc, "noise", "<root>"));
    if (auto it = doc.find("world"); it != doc.end()) {
        const json& w = *it;
        s.world.walk_speed = number_or(w, "walk_speed", s.world.walk_speed, "world");
        s.world.reach_radius = number_or(w, "reach_radius", s.world.reach_radius, "world");
        s.world.hand_offset = number_or(w, "hand_offset", s.world.hand_offset, "world");
        s.world.swap_frames = static_cast<int>(number_or(w, "swap_frames", s.world.swap_frames, "world"));
        s.world.reach_frames = static_cast<int>(number_or(w, "reach_frames", s.world.reach_frames, "world"));
        s.world.feature_dim = static_cast<int>(number_or(w, "feature_dim", s.world.feature_dim, "world"));
    }
    s.validate();
    return s;
}

Scenario load_scenario(std::string_view text_doc) {
    json doc;
    try {
        doc = json::parse(text_doc);
    } catch (const json::parse_error& e) {
        const std::size_t offset = std::min<std::size_t>(e.byte, text_doc.size());
        const auto line = 1 + std::count(text_doc.begin(), text_doc.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
        throw ScenarioParseError("line " + std::to_string(line), e.what());
    }
    return scenario_from_json(doc);
}

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json doc;
    doc["name"] = s.name;
    ordered_json rooms = ordered_json::array();
    for (const auto& r : s.rooms) {
        rooms.push_back({{"name", r.name}, {"min", point_json(r.min)}, {"max", point_json(r.max)}});
    }
    doc["rooms"] = rooms;
    ordered_json containers = ordered_json::array();
    for (const auto& k : s.containers) {
        containers.push_back({{"name", k.name}, {"position", point_json(k.position)}, {"radius", k.radius}});
    }
    doc["containers"] = containers;
    ordered_json cams = ordered_json::array();
    for (const auto& c : s.cameras) {
        ordered_json h = ordered_json::array();
        for (int r = 0; r < 3; ++r) {
            h.push_back({c.image_to_world()(r, 0), c.image_to_world()(r, 1), c.image_to_world()(r, 2)});
        }
        cams.push_back({{"id", c.id},
                        {"position", point_json(c.position)},
                        {"yaw", c.yaw},
                        {"hfov", c.hfov},
                        {"image_size", {c.width, c.height}},
                        {"homography", h}});
    }
    doc["cameras"] = cams;
    ordered_json objs = ordered_json::array();
    for (const auto& o : s.objects) {
        objs.push_back({{"id", o.id},
                        {"attributes", attributes_to_json(o.attributes)},
                        {"position", point_json(o.position)},
                        {"width", o.width},
                        {"aspect", o.aspect},
                        {"empty", o.empty}});
    }
    doc["objects"] = objs;
    ordered_json agents = ordered_json::array();
    for (const auto& a : s.agents) {
        agents.push_back({{"id", a.id}, {"position", point_json(a.position)}, {"present", a.present}});
    }
    doc["agents"] = agents;
    ordered_json script = ordered_json::array();
    for (const auto& e : s.script) {
        ordered_json ev;
        ev["time"] = e.time;
        ev["kind"] = std::string(to_string(e.kind));
        ev["actor"] = e.actor;
        if (!e.objects.empty()) ev["objects"] = e.objects;
        if (e.position) ev["position"] = point_json(*e.position);
        script.push_back(ev);
    }
    doc["script"] = script;
    doc["horizon"] = s.horizon;
    doc["fps"] = s.fps;
    doc["noise"] = noise_to_json(s.noise);
    doc["world"] = {{"walk_speed", s.world.walk_speed},
                    {"reach_radius", s.world.reach_radius},
                    {"hand_offset", s.world.hand_offset},
                    {"swap_frames", s.world.swap_frames},
                    {"reach_frames", s.world.reach_frames},
                    {"feature_dim", s.world.feature_dim}};
    return doc;
}

std::string dump_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

}  // namespace beliefgraph::worldsim
