#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "beliefgraph/worldsim/generators.hpp"
#include "beliefgraph/worldsim/logs.hpp"
#include "beliefgraph/worldsim/queries_gen.hpp"
#include "beliefgraph/worldsim/scenario.hpp"
#include "beliefgraph/worldsim/simulate.hpp"

using namespace beliefgraph;
using namespace beliefgraph::worldsim;
using doctest::Approx;
using nlohmann::json;

namespace {

json minimal_doc() {
    return json::parse(R"({
      "name": "minimal",
      "rooms": [{"name": "r", "min": [0, 0], "max": [6, 6]}],
      "cameras": [{"id": 1, "position": [0.1, 0.1], "yaw": 0.785398, "hfov": 1.2, "image_size": [640, 480]}],
      "objects": [{"id": 1, "attributes": {"color": "red", "material": "plastic", "category": "cup"},
                   "position": [3, 3], "width": 0.2}],
      "agents": [{"id": 1, "position": [2, 2]}],
      "script": [{"time": 2, "kind": "walk-to", "actor": 1, "position": [2.5, 2.0]}],
      "horizon": 8,
      "fps": 5,
      "noise": {}
    })");
}

}  // namespace

TEST_CASE("a minimal scenario document loads") {
    const auto s = load_scenario(minimal_doc().dump());
    CHECK(s.name == "minimal");
    CHECK(s.horizon == 8);
    REQUIRE(s.cameras.size() == 1);
    CHECK(s.cameras[0].width == 640);
    CHECK(s.objects[0].attributes.color == Color::red);
    CHECK(s.noise == NoiseModel::zero());
    REQUIRE(s.script.size() == 1);
    CHECK(s.script[0].kind == EventKind::walk_to);

    // Serialization round trip is stable.
    const auto text = dump_scenario(s);
    CHECK(dump_scenario(load_scenario(text)) == text);
}

TEST_CASE("scenario errors") {
    SUBCASE("script naming an undeclared object") {
        auto doc = minimal_doc();
        doc["script"].push_back({{"time", 3}, {"kind", "pick-up"}, {"actor", 1}, {"objects", {7}}});
        CHECK_THROWS_AS(scenario_from_json(doc), ScenarioValidationError);
    }
    SUBCASE("undeclared agent") {
        auto doc = minimal_doc();
        doc["script"][0]["actor"] = 9;
        CHECK_THROWS_AS(scenario_from_json(doc), ScenarioValidationError);
    }
    SUBCASE("event past the horizon") {
        auto doc = minimal_doc();
        doc["script"][0]["time"] = 9;
        CHECK_THROWS_AS(scenario_from_json(doc), ScenarioValidationError);
    }
    SUBCASE("unknown event kind") {
        auto doc = minimal_doc();
        doc["script"][0]["kind"] = "teleport";
        CHECK_THROWS_AS(scenario_from_json(doc), ScenarioParseError);
    }
    SUBCASE("missing field names its path") {
        auto doc = minimal_doc();
        doc["objects"][0].erase("position");
        try {
            scenario_from_json(doc);
            FAIL("expected a parse error");
        } catch (const ScenarioParseError& e) {
            CHECK(e.where() == "objects[0].position");
        }
    }
    SUBCASE("malformed JSON reports the line") {
        try {
            load_scenario("{\n\"name\": \"x\",\n  oops\n}");
            FAIL("expected a parse error");
        } catch (const ScenarioParseError& e) {
            CHECK(e.where() == "line 3");
        }
    }
    SUBCASE("object outside every room") {
        auto doc = minimal_doc();
        doc["objects"][0]["position"] = {20, 20};
        CHECK_THROWS_AS(scenario_from_json(doc), ScenarioValidationError);
    }
}

TEST_CASE("camera projection") {
    const auto cam = Camera::from_pose(1, {0, 0}, 0.0, 1.2, 640, 480, 2.8, 0.6);
    const auto px = cam.project({4.0, 0.0});
    REQUIRE(px);
    // Straight ahead lands on the image's vertical centre line.
    CHECK(px->x == Approx(320.0));
    const auto back = cam.lift(*px);
    REQUIRE(back);
    CHECK(back->x == Approx(4.0));
    CHECK(back->y == Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(cam.project({-3.0, 0.0}));  // behind
    const auto level = Camera::from_pose(2, {0, 0}, 0.0, 1.2, 640, 480, 2.8, 0.1);
    CHECK_FALSE(level.lift({320.0, 0.0}));  // above the horizon
    // Farther objects render smaller.
    const auto near = cam.render_box({2.5, 0}, 0.2, 1.2);
    const auto far = cam.render_box({5.0, 0}, 0.2, 1.2);
    CHECK(near.width() > far.width());
    CHECK(near.bottom_center().y > far.bottom_center().y);
}

TEST_CASE("noise-free static scene renders the same box every frame") {
    const auto s = bundled_fixture("static_single");
    const auto sim = simulate(s, 3);
    CHECK(sim.truth.frames.size() == static_cast<std::size_t>(s.horizon));
    CHECK(sim.observations.size() == static_cast<std::size_t>(s.horizon) * s.cameras.size());
    REQUIRE(sim.observations[0].detections.size() == 1);
    const Box first = sim.observations[0].detections[0].box;
    for (const auto& o : sim.observations) {
        REQUIRE(o.detections.size() == 1);
        CHECK(o.detections[0].box == first);
        CHECK(o.detections[0].score == 1.0);
    }
}

TEST_CASE("simulation is a pure function of scenario and seed") {
    const auto s = tracking_scenario(5);
    const auto a = simulate(s, 17);
    const auto b = simulate(s, 17);
    CHECK(dump_observations(a.observations) == dump_observations(b.observations));
    CHECK(dump_ground_truth(a.truth) == dump_ground_truth(b.truth));
    CHECK(dump_observations(simulate(s, 18).observations) != dump_observations(a.observations));
}

TEST_CASE("logs round trip") {
    const auto sim = simulate(bundled_fixture("sally-anne"), 1);
    const auto obs = dump_observations(sim.observations);
    CHECK(dump_observations(load_observations(obs)) == obs);
    const auto gt = dump_ground_truth(sim.truth);
    CHECK(dump_ground_truth(load_ground_truth(gt)) == gt);

    std::string broken = obs;
    const auto second_line = broken.find('\n') + 1;
    broken.insert(second_line, "{not json\n");
    try {
        load_observations(broken);
        FAIL("expected a format error");
    } catch (const LogFormatError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("sally-anne: the marble ends hidden in the basket while Sally is away") {
    const auto s = bundled_fixture("sally-anne");
    CHECK(s.agents.size() == 2);
    CHECK(s.containers.size() == 2);
    const auto sim = simulate(s, 0);
    const auto& last = sim.truth.frame(s.horizon);
    const auto* marble = last.object(1);
    REQUIRE(marble);
    CHECK(marble->hidden);
    CHECK(distance(marble->position, s.containers[1].position) < s.containers[1].radius);

    // Anne's carry happens while Sally is absent.
    bool anne_carried_while_away = false;
    for (const auto& f : sim.truth.frames) {
        if (f.object(1)->holder == 2 && !f.agent(1)->present) anne_carried_while_away = true;
    }
    CHECK(anne_carried_while_away);
    CHECK(sim.truth.frame(s.horizon).agent(1)->present);
}

TEST_CASE("carry across rooms moves the cup and its holder together") {
    const auto s = bundled_fixture("carry_across_rooms");
    const auto sim = simulate(s, 0);
    const auto& start = sim.truth.frame(1).object(1);
    CHECK(start->room == 0);
    CHECK(start->holder == 0);
    bool held = false;
    for (const auto& f : sim.truth.frames) {
        const auto* o = f.object(1);
        if (o->holder == 1) {
            held = true;
            CHECK(distance(o->position, f.agent(1)->hand) < 1e-9);
        }
    }
    CHECK(held);
    const auto& end = sim.truth.frame(s.horizon).object(1);
    CHECK(end->room == 1);
    CHECK(end->holder == 0);
    CHECK(sim.truth.interactions_between(1, 0, s.horizon) == 1);  // one carry-to
}

TEST_CASE("localization queries on a static scene") {
    const auto s = bundled_fixture("static_single");
    const auto sim = simulate(s, 0);
    const auto calib = Calibration::from(s);
    const auto qs = gen_queries(sim.truth, calib, queries::QueryKind::localization, 5, 1);
    REQUIRE(qs.queries.size() == 5);
    CHECK_FALSE(qs.truncated);
    for (std::size_t i = 0; i < qs.queries.size(); ++i) {
        const auto& q = qs.queries[i];
        const auto& t = qs.truth[i];
        CHECK(q.id == static_cast<int>(i));
        CHECK(q.object_camera == 1);
        REQUIRE(q.object_box);
        CHECK(t.object == 1);
        CHECK(t.interactions == 0);
        REQUIRE(t.answers.size() == 1);
        CHECK(t.answers[0].second == *q.object_box);
    }
    // Only ten (object, frame) pairs exist.
    const auto many = gen_queries(sim.truth, calib, queries::QueryKind::localization, 50, 1);
    CHECK(many.truncated);
    CHECK(many.queries.size() == 10);
    // No agents: nothing to ask about beliefs.
    CHECK(gen_queries(sim.truth, calib, queries::QueryKind::belief_multiview, 5, 1).queries.empty());
}

TEST_CASE("belief queries on sally-anne include a false belief") {
    const auto s = bundled_fixture("sally-anne");
    const auto sim = simulate(s, 0);
    const auto qs = gen_queries(sim.truth, Calibration::from(s), queries::QueryKind::belief_multiview, 20, 2);
    REQUIRE_FALSE(qs.queries.empty());
    bool any_false = false;
    for (const auto& t : qs.truth) {
        REQUIRE(t.false_belief);
        any_false = any_false || *t.false_belief;
        CHECK_FALSE(t.answers.empty());
    }
    CHECK(any_false);
}

TEST_CASE("generators are deterministic and valid") {
    CHECK(dump_scenario(tracking_scenario(3)) == dump_scenario(tracking_scenario(3)));
    CHECK(dump_scenario(belief_scenario(3)) == dump_scenario(belief_scenario(3)));
    const auto pair = inertia_pair(4);
    CHECK(pair.departure > 0);
    CHECK_NOTHROW(pair.first.validate());
    CHECK_NOTHROW(pair.second.validate());
    for (const auto& name : bundled_fixture_names()) {
        const auto f = bundled_fixture(name);
        CHECK(f.name == name);
        CHECK(f.noise == NoiseModel::zero());
    }
    CHECK_THROWS_AS(bundled_fixture("nope"), std::invalid_argument);
}
