#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <random>
#include <stdexcept>

#include "beliefgraph/parallel/batch.hpp"
#include "beliefgraph/pg/archive.hpp"
#include "beliefgraph/worldsim/generators.hpp"

using namespace beliefgraph;
using namespace beliefgraph::parallel;

TEST_CASE("for_each_index visits every index once") {
    for (auto exec : {Exec::serial, Exec::parallel}) {
        std::vector<std::atomic<int>> hits(257);
        for_each_index(hits.size(), [&](std::size_t i) { ++hits[i]; }, exec);
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("for_each_index rethrows the lowest failing index") {
    for (auto exec : {Exec::serial, Exec::parallel}) {
        std::atomic<int> ran{0};
        try {
            for_each_index(
                64,
                [&](std::size_t i) {
                    ++ran;
                    if (i == 7 || i == 40) throw std::runtime_error("task " + std::to_string(i));
                },
                exec);
            FAIL("expected a rethrow");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "task 7");
        }
        if (exec == Exec::parallel) CHECK(ran.load() == 64);
    }
}

TEST_CASE("feature distances agree across execution modes") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> rows(40, std::vector<double>(16)), cols(33, std::vector<double>(16));
    for (auto& v : rows)
        for (auto& x : v) x = g(rng);
    for (auto& v : cols)
        for (auto& x : v) x = g(rng);
    const auto a = feature_distances(rows, cols, Exec::serial);
    const auto b = feature_distances(rows, cols, Exec::parallel);
    CHECK(a.rows() == 40);
    CHECK(a.cols() == 33);
    CHECK(a == b);
    CHECK(a(3, 5) == doctest::Approx(energy::feature_distance(rows[3], cols[5])));
}

TEST_CASE("answers and whole cases agree across execution modes") {
    std::vector<CaseSpec> specs;
    for (std::uint64_t i = 0; i < 4; ++i) {
        CaseSpec s;
        s.scenario = i % 2 == 0 ? worldsim::tracking_scenario(100 + i) : worldsim::belief_scenario(100 + i);
        s.seed = 500 + i;
        s.requests = {{queries::QueryKind::localization, 30}, {queries::QueryKind::belief_multiview, 10}};
        specs.push_back(std::move(s));
    }
    const auto serial = run_cases(specs, 0.5, Exec::serial, true);
    const auto par = run_cases(specs, 0.5, Exec::parallel, true);
    REQUIRE(serial.size() == par.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].answers == par[i].answers);
        CHECK(serial[i].baseline == par[i].baseline);
        CHECK(serial[i].archive == par[i].archive);
        CHECK(serial[i].system.overall.correct == par[i].system.overall.correct);
    }

    // Answering on its own as well.
    const auto& spec = specs[0];
    const auto sim = worldsim::simulate(spec.scenario, spec.seed);
    const auto calib = worldsim::Calibration::from(spec.scenario);
    const auto pgs = pg::decode_pgs(serial[0].archive);
    const auto qs = generate_requests(sim.truth, calib, spec.requests, spec.seed);
    CHECK(answer_all(qs.queries, pgs, calib, {}, Exec::serial) == answer_all(qs.queries, pgs, calib, {}, Exec::parallel));
    CHECK(baseline_all(qs.queries, pgs, calib, 3, Exec::serial) ==
          baseline_all(qs.queries, pgs, calib, 3, Exec::parallel));
}

TEST_CASE("requests are numbered in order") {
    const auto s = worldsim::bundled_fixture("sally-anne");
    const auto sim = worldsim::simulate(s, 0);
    const std::vector<QueryRequest> req{{queries::QueryKind::localization, 5}, {queries::QueryKind::belief_multiview, 5}};
    const auto qs = generate_requests(sim.truth, worldsim::Calibration::from(s), req, 9);
    REQUIRE(qs.queries.size() == 10);
    for (std::size_t i = 0; i < qs.queries.size(); ++i) {
        CHECK(qs.queries[i].id == static_cast<int>(i));
        CHECK(qs.truth[i].id == static_cast<int>(i));
        CHECK(qs.queries[i].kind == (i < 5 ? queries::QueryKind::localization : queries::QueryKind::belief_multiview));
    }
    CHECK(baseline_seed(9, 1) != baseline_seed(9, 2));
    CHECK(baseline_seed(9, 1) == baseline_seed(9, 1));
}
