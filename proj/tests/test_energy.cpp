#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "beliefgraph/energy/energy.hpp"

using namespace beliefgraph;
using namespace beliefgraph::energy;
using doctest::Approx;

namespace {

worldsim::Camera test_camera() { return worldsim::Camera::from_pose(1, {0.0, 0.0}, 0.0, 1.2, 640, 480, 2.8, 0.6); }

// Box whose bottom-centre projects exactly onto `ground`.
Box box_at(const worldsim::Camera& cam, Point2 ground) { return cam.render_box(ground, 0.2, 1.2); }

pg::JointPG joint_with(Point2 p, std::vector<double> feature, Attributes a = {}) {
    pg::JointPG j;
    j.time = 1;
    pg::ObjectTrack t;
    t.id = 10;
    t.position = p;
    t.feature = std::move(feature);
    t.attributes = a;
    j.objects.push_back(t);
    return j;
}

pg::RobotPG robot_with(const worldsim::Camera& cam, Point2 p, std::vector<double> feature, Attributes a = {}) {
    pg::RobotPG r;
    r.camera = cam.id;
    r.time = 1;
    pg::ObjectNode n;
    n.id = 0;
    n.boxes[cam.id] = box_at(cam, p);
    n.position = p;
    n.feature = std::move(feature);
    n.attributes = a;
    r.objects.push_back(n);
    return r;
}

}  // namespace

TEST_CASE("object motion indicator") {
    EnergyParams p;
    p.tau = 0.5;
    CHECK(motion_energy_object({1, 1}, {1, 1}, 0, std::nullopt, std::nullopt, p) == 0.0);
    CHECK(motion_energy_object({6, 1}, {1, 1}, 0, std::nullopt, std::nullopt, p) == 1.0);
    // Held: the object box jumps 10 tau but the holder's hand stays put.
    CHECK(motion_energy_object({6, 1}, {1, 1}, 2, Point2{3, 3}, Point2{3, 3}, p) == 0.0);
    CHECK(motion_energy_object({1, 1}, {1, 1}, 2, Point2{3, 3}, Point2{9, 3}, p) == 1.0);
    CHECK_THROWS_AS(motion_energy_object({1, 1}, {1, 1}, 2, std::nullopt, Point2{}, p), EnergyError);
}

TEST_CASE("agent motion indicator with a strict threshold") {
    EnergyParams p;
    p.tau = 1.0;
    const Point2 a[] = {{0, 0}};
    const Point2 same[] = {{0, 0}};
    const Point2 far[] = {{10, 0}};
    const Point2 exact[] = {{1.0, 0}};
    CHECK(motion_energy_agent(same, a, p) == 0.0);
    CHECK(motion_energy_agent(far, a, p) == 1.0);
    CHECK(motion_energy_agent(exact, a, p) == 0.0);
}

TEST_CASE("state transition energy") {
    TransitionMatrix m;
    m.p[kFree] = {0.05, 0.95};
    m.p[kHeld] = {0.9, 0.1};
    CHECK(state_transition_energy(0, 0, m) == Approx(0.0513).epsilon(1e-3));
    CHECK(state_transition_energy(2, 2, m) == Approx(0.105).epsilon(1e-2));
    const auto u = TransitionMatrix::uniform();
    for (int a : {0, 1}) {
        for (int b : {0, 3}) CHECK(state_transition_energy(a, b, u) == Approx(std::log(2.0)));
    }
}

TEST_CASE("learning the transition matrix") {
    SUBCASE("no transitions at all gives the uniform matrix") {
        const auto m = learn_state_transition({}, 1.0);
        CHECK(m.degenerate);
        CHECK(m.p[0][0] == 0.5);
        CHECK(m.p[1][1] == 0.5);
    }
    SUBCASE("direct counting in the small-alpha limit") {
        worldsim::GroundTruthLog log;
        // Object 1 is free throughout; object 2 is free then picked up at the end.
        for (int t = 1; t <= 6; ++t) {
            worldsim::FrameTruth f;
            f.time = t;
            f.objects.push_back({.id = 1});
            f.objects.push_back({.id = 2, .holder = t == 6 ? 1 : 0});
            log.frames.push_back(f);
        }
        // 5 + 4 free->free, 1 free->held.
        const std::vector<worldsim::GroundTruthLog> logs{log};
        const auto m = learn_state_transition(logs, 1e-9);
        CHECK(m.p[kFree][kFree] == Approx(0.9));
        CHECK(m.p[kFree][kHeld] == Approx(0.1));
        CHECK(m.frames == 10);
    }
    SUBCASE("an all-held log makes held->held dominant") {
        worldsim::GroundTruthLog log;
        for (int t = 1; t <= 20; ++t) {
            worldsim::FrameTruth f;
            f.objects.push_back({.id = 1, .holder = 1});
            log.frames.push_back(f);
        }
        const std::vector<worldsim::GroundTruthLog> logs{log};
        const auto m = learn_state_transition(logs, 1.0);
        CHECK(m.p[kHeld][kHeld] > 0.9);
        CHECK(m.p[kHeld][kHeld] + m.p[kHeld][kFree] == Approx(1.0));
    }
    CHECK_THROWS_AS(learn_state_transition({}, 0.0), EnergyError);
}

TEST_CASE("feature pooling") {
    const std::vector<std::vector<double>> one{{0.6, 0.8}};
    CHECK(pool_features(one) == one[0]);
    const std::vector<std::vector<double>> twin{{0.6, 0.8}, {0.6, 0.8}};
    CHECK(pool_features(twin)[0] == Approx(0.6));
    CHECK(pool_features(twin)[1] == Approx(0.8));
    const std::vector<std::vector<double>> ortho{{1, 0}, {0, 1}};
    const auto p = pool_features(ortho);
    CHECK(p[0] == Approx(1 / std::sqrt(2.0)));
    CHECK(p[1] == Approx(1 / std::sqrt(2.0)));
    const std::vector<std::vector<double>> a{{0.1, 0.7, -0.2}, {0.3, -0.4, 0.9}, {-0.5, 0.2, 0.1}};
    const std::vector<std::vector<double>> b{a[2], a[0], a[1]};
    CHECK(pool_features(a) == pool_features(b));
    CHECK_THROWS_AS(pool_features({}), EnergyError);
}

TEST_CASE("appearance energy") {
    const auto cam = test_camera();
    Correspondence c;
    c.objects[0] = 10;
    CHECK(appearance_energy(joint_with({3, 0}, {1, 0}), robot_with(cam, {3, 0}, {1, 0}), c) == 0.0);
    CHECK(appearance_energy(joint_with({3, 0}, {1, 0}), robot_with(cam, {3, 0}, {0, 1}), c) == Approx(std::sqrt(2.0)));
    CHECK(appearance_energy(joint_with({3, 0}, {1, 0}), robot_with(cam, {3, 0}, {0, 1}), {}) == 0.0);
}

TEST_CASE("spatial energy sums lift errors") {
    const auto cam = test_camera();
    EnergyParams p;
    Correspondence c;
    c.objects[0] = 10;
    CHECK(spatial_energy(joint_with({3, 0}, {1}), robot_with(cam, {3, 0}, {1}), cam, c, p).value == Approx(0.0).epsilon(1e-9));
    CHECK(spatial_energy(joint_with({4, 0}, {1}), robot_with(cam, {3, 0}, {1}), cam, c, p).value == Approx(1.0));

    auto joint = joint_with({4, 0}, {1});
    auto second = joint.objects[0];
    second.id = 11;
    second.position = {3, 2.5};
    joint.objects.push_back(second);
    auto robot = robot_with(cam, {3, 0}, {1});
    auto node = robot.objects[0];
    node.id = 1;
    node.boxes[cam.id] = box_at(cam, {3, 0.5});
    robot.objects.push_back(node);
    c.objects[1] = 11;
    CHECK(spatial_energy(joint, robot, cam, c, p).value == Approx(3.0));
}

TEST_CASE("attribute energy counts mismatched slots") {
    const Attributes red_cup{Color::red, Material::plastic, Category::cup};
    CHECK(attribute_energy(red_cup, red_cup) == 0);
    CHECK(attribute_energy(red_cup, {Color::red, Material::paper, Category::cup}) == 1);
    CHECK(attribute_energy(red_cup, {Color::blue, Material::paper, Category::box}) == 3);
}

TEST_CASE("likelihood energy") {
    EnergyParams p;
    AttributeScores certain{{1.0, 0.0}, {1.0}, {1.0}, 0.0};
    CHECK(likelihood_energy(1.0, &certain, p).value == Approx(0.0));
    CHECK(likelihood_energy(0.5, &certain, p).value == Approx(0.693).epsilon(1e-3));
    const auto floor = likelihood_energy(0.0, nullptr, p);
    CHECK(floor.value == Approx(13.8155).epsilon(1e-4));
    CHECK(floor.flagged == 1);
}

TEST_CASE("transition energy") {
    EnergyParams p;
    p.transition.p[kFree] = {0.1, 0.9};
    p.transition.p[kHeld] = {0.8, 0.2};
    pg::JointPG empty;
    CHECK(transition_energy(empty, empty, p) == 0.0);

    pg::JointPG prev;
    for (int id = 1; id <= 3; ++id) {
        pg::ObjectTrack t;
        t.id = id;
        t.position = {static_cast<double>(id), 0.0};
        prev.objects.push_back(t);
    }
    auto next = prev;
    const double stay = transition_energy(next, prev, p);
    CHECK(stay == Approx(-3.0 * std::log(0.9)));
    next.objects[1].position = {50.0, 0.0};
    CHECK(transition_energy(next, prev, p) == Approx(stay + p.w_L));

    next.objects.pop_back();
    CHECK_THROWS_AS(transition_energy(next, prev, p), EnergyError);
}

TEST_CASE("compatibility energy composes its terms") {
    const auto cam = test_camera();
    EnergyParams p;
    p.w_A = 2.0;
    p.w_Attr = 3.0;
    Correspondence c;
    c.objects[0] = 10;
    const Attributes red_cup{Color::red, Material::plastic, Category::cup};
    CHECK(compatibility_energy(joint_with({3, 0}, {1, 0}, red_cup), robot_with(cam, {3, 0}, {1, 0}, red_cup), cam, c, p) ==
          Approx(0.0).epsilon(1e-9));
    CHECK(compatibility_energy(joint_with({3, 0}, {1, 0}, red_cup), robot_with(cam, {3, 0}, {0, 1}, red_cup), cam, c, p) ==
          Approx(2.0 * std::sqrt(2.0)));
    const Attributes red_paper{Color::red, Material::paper, Category::cup};
    CHECK(compatibility_energy(joint_with({3, 0}, {1, 0}, red_cup), robot_with(cam, {3, 0}, {1, 0}, red_paper), cam, c,
                               p) == Approx(3.0));
}

TEST_CASE("parameter validation and json round trip") {
    EnergyParams p;
    p.tau = 0.75;
    p.transition.p[kFree] = {0.2, 0.8};
    const auto back = params_from_json(params_to_json(p));
    CHECK(back.tau == 0.75);
    CHECK(back.transition.p[kFree][kFree] == 0.8);
    nlohmann::json bad = params_to_json(p);
    bad["tau"] = -1.0;
    CHECK_THROWS(params_from_json(bad));
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"tua", 1.0}}), EnergyError);
}
