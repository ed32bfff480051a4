#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "beliefgraph/attributes.hpp"
#include "beliefgraph/geometry.hpp"
#include "beliefgraph/worldsim/camera.hpp"

namespace beliefgraph::worldsim {

/// Malformed scenario document; `where` names the line/field.
class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

/// Well-formed document that violates a scenario invariant.
class ScenarioValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Room {
    std::string name;
    Point2 min;
    Point2 max;
    bool contains(const Point2& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
};

/// Opaque receptacle (box, basket, microwave). Objects resting within
/// `radius` of its position are hidden from every camera.
struct Container {
    std::string name;
    Point2 position;
    double radius = 0.25;
};

struct ObjectSpec {
    int id = 0;
    Attributes attributes;
    Point2 position;
    double width = 0.12;   // physical footprint width, meters
    double aspect = 1.2;   // height / width
    bool empty = false;
};

struct AgentSpec {
    int id = 0;  // >= 1; holder index 0 means "free"
    Point2 position;
    bool present = true;
};

enum class EventKind {
    enter_room,
    exit_view,
    walk_to,
    pick_up,
    put_down,
    carry_to,
    swap,
    empty_object,
    reach_toward,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);
/// Events that count as an agent interacting with the target objects.
bool is_interaction(EventKind kind);

struct Event {
    int time = 1;
    EventKind kind = EventKind::walk_to;
    int actor = 0;
    std::vector<int> objects;
    std::optional<Point2> position;
    bool operator==(const Event&) const = default;
};

/// Stand-in for perception noise. All-zero means perfect perception.
struct NoiseModel {
    double miss_base = 0.0;
    double miss_held = 0.0;
    double false_positive_rate = 0.0;  // expected spurious detections per frame and camera
    double box_jitter_px = 0.0;
    double feature_noise = 0.0;
    double attribute_confusion = 0.0;
    bool identical_appearance = false;
    double score_spread = 0.0;         // detection scores drawn from [1 - spread, 1]
    double reach_jitter_rad = 0.0;

    static NoiseModel zero() { return {}; }
    void validate() const;
    bool operator==(const NoiseModel&) const = default;
};

/// World constants shared by the simulator and the scenario generators.
struct WorldConstants {
    double walk_speed = 0.4;    // meters per frame
    double reach_radius = 0.5;  // meters
    double hand_offset = 0.3;   // hand ground point ahead of the body, meters
    int swap_frames = 4;
    int reach_frames = 3;
    int feature_dim = 16;
    double agent_width = 0.5;
    double agent_aspect = 3.4;
};

struct Scenario {
    std::string name;
    std::vector<Room> rooms;
    std::vector<Container> containers;
    std::vector<Camera> cameras;
    std::vector<ObjectSpec> objects;
    std::vector<AgentSpec> agents;
    std::vector<Event> script;
    int horizon = 1;
    double fps = 5.0;
    NoiseModel noise;
    WorldConstants world;

    /// Checks every invariant; throws ScenarioValidationError naming the violation.
    void validate() const;

    const Camera& camera(int id) const;
    const ObjectSpec* object(int id) const;
    const AgentSpec* agent(int id) const;
};

/// Rooms, containers and cameras: everything the inference side may know.
struct Calibration {
    std::vector<Room> rooms;
    std::vector<Container> containers;
    std::vector<Camera> cameras;

    static Calibration from(const Scenario& s) { return {s.rooms, s.containers, s.cameras}; }

    const Camera* camera(int id) const;
    /// Index of the first room containing `p`, or -1.
    int room_of(const Point2& p) const;
    int camera_room(const Camera& c) const { return room_of(c.position); }
    /// True when a ground point lies in the camera's room and in its image.
    bool sees_point(const Camera& c, const Point2& p) const;
    /// Box of an upright footprint at `p` if it is fully visible to the camera.
    std::optional<Box> visible_box(const Camera& c, const Point2& p, double width_m, double aspect) const;
    bool hidden(const Point2& p) const;
};

Scenario load_scenario(std::string_view text);
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::ordered_json scenario_to_json(const Scenario& s);
std::string dump_scenario(const Scenario& s);

NoiseModel noise_from_json(const nlohmann::json& j, NoiseModel base = {});
nlohmann::ordered_json noise_to_json(const NoiseModel& n);

Attributes attributes_from_json(const nlohmann::json& j);
nlohmann::ordered_json attributes_to_json(const Attributes& a);

}  // namespace beliefgraph::worldsim
