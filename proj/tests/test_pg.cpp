#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "beliefgraph/inference/pipeline.hpp"
#include "beliefgraph/pg/archive.hpp"
#include "beliefgraph/pg/graphs.hpp"
#include "beliefgraph/worldsim/generators.hpp"

using namespace beliefgraph;
using namespace beliefgraph::pg;

namespace {

RobotPG two_object_pg() {
    RobotPG g;
    g.camera = 2;
    g.time = 7;
    for (int id : {5, 3}) {
        ObjectNode n;
        n.id = id;
        n.boxes[2] = {10.0 * id, 10, 10.0 * id + 8, 20};
        n.position = {static_cast<double>(id), 1.0};
        n.attributes = {Color::red, Material::plastic, Category::cup};
        g.objects.push_back(n);
    }
    AgentNode a;
    a.id = 1;
    a.boxes[2] = {0, 0, 30, 90};
    g.agents.push_back(a);
    return g;
}

PgSet parsed(const std::string& fixture) {
    const auto s = worldsim::bundled_fixture(fixture);
    const auto sim = worldsim::simulate(s, 0);
    return inference::parse_sequence(sim.observations, worldsim::Calibration::from(s), {}).pgs;
}

}  // namespace

TEST_CASE("belief snapshot copies what the camera grounds") {
    const auto g = two_object_pg();
    const auto b = snapshot_belief(g, 1);
    CHECK(b.camera == 2);
    CHECK(b.agent == 1);
    CHECK(b.last_seen == 7);
    REQUIRE(b.objects.size() == 2);
    CHECK(b.objects[0].object == 3);  // sorted by id
    CHECK(b.objects[1].object == 5);
    CHECK(b.objects[0].box == g.objects[1].boxes.at(2));
    CHECK(b.objects[1].position == Point2{5.0, 1.0});
    CHECK_THROWS_AS(snapshot_belief(g, 4), GraphError);

    RobotPG blind;
    blind.camera = 1;
    blind.agents.push_back({});
    CHECK(snapshot_belief(blind, 0).objects.empty());
}

TEST_CASE("merging beliefs keeps stale entries the fresh view lacks") {
    auto g = two_object_pg();
    const auto old = snapshot_belief(g, 1);
    g.time = 9;
    g.objects.erase(g.objects.begin());  // object 5 left the view
    g.objects[0].position = {0.0, 0.0};
    const auto merged = merge_belief(old, snapshot_belief(g, 1));
    CHECK(merged.last_seen == 9);
    REQUIRE(merged.objects.size() == 2);
    CHECK(merged.object(3)->position == Point2{0.0, 0.0});
    CHECK(merged.object(5)->position == Point2{5.0, 1.0});
}

TEST_CASE("archive round trip") {
    const auto pgs = parsed("sally-anne");
    REQUIRE_FALSE(pgs.beliefs.empty());
    const auto text = encode_pgs(pgs);
    const auto back = decode_pgs(text);
    CHECK(back == pgs);
    CHECK(encode_pgs(back) == text);
}

TEST_CASE("corrupted archive record names its line") {
    const auto text = encode_pgs(parsed("static_single"));
    std::string broken = text;
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) pos = broken.find('\n', pos) + 1;  // start of line 4
    broken.insert(pos, "{\"type\": \"robot\", \"camera\": \"x\"}\n");
    try {
        decode_pgs(broken);
        FAIL("expected an archive error");
    } catch (const ArchiveError& e) {
        CHECK(e.line() == 4);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    CHECK_THROWS_AS(decode_pgs(""), ArchiveError);
    CHECK_THROWS_AS(decode_pgs("{\"schema\": \"other\"}\n"), ArchiveError);
}

TEST_CASE("set lookups") {
    const auto pgs = parsed("sally-anne");
    const int horizon = static_cast<int>(pgs.joint.size());
    CHECK(pgs.joint_pg(1)->time == 1);
    CHECK(pgs.joint_pg(horizon)->time == horizon);
    CHECK(pgs.joint_pg(0) == nullptr);
    CHECK(pgs.joint_pg(horizon + 1) == nullptr);
    const auto* r = pgs.robot_pg(2, 5);
    REQUIRE(r);
    CHECK(r->camera == 2);
    CHECK(r->time == 5);
    CHECK(pgs.robot_pg(9, 5) == nullptr);

    for (const auto* b : pgs.beliefs_at(horizon / 2)) CHECK(b->last_seen <= horizon / 2);
    // The per-agent extract is a subset of the archive lines.
    const auto full = encode_pgs(pgs);
    const auto agent_lines = encode_beliefs_of(pgs, pgs.beliefs.front().agent);
    CHECK_FALSE(agent_lines.empty());
    std::size_t start = 0;
    while (start < agent_lines.size()) {
        const auto end = agent_lines.find('\n', start);
        CHECK(full.find(agent_lines.substr(start, end - start)) != std::string::npos);
        start = end == std::string::npos ? agent_lines.size() : end + 1;
    }
}
