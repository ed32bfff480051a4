#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "beliefgraph/inference/pipeline.hpp"
#include "beliefgraph/queries/answers.hpp"
#include "beliefgraph/queries/eval.hpp"
#include "beliefgraph/queries/query.hpp"
#include "beliefgraph/worldsim/generators.hpp"
#include "beliefgraph/worldsim/queries_gen.hpp"

using namespace beliefgraph;
using namespace beliefgraph::queries;
using doctest::Approx;

namespace {

struct Fixture {
    worldsim::Scenario scenario;
    worldsim::Calibration calib;
    worldsim::SimulationResult sim;
    pg::PgSet pgs;
};

Fixture run(const std::string& name) {
    Fixture f;
    f.scenario = worldsim::bundled_fixture(name);
    f.calib = worldsim::Calibration::from(f.scenario);
    f.sim = worldsim::simulate(f.scenario, 0);
    f.pgs = inference::parse_sequence(f.sim.observations, f.calib, {}).pgs;
    return f;
}

QueryTruth truth_with(int view, Box box, int interactions = 0) {
    QueryTruth t;
    t.answers = {{view, box}};
    t.interactions = interactions;
    return t;
}

Answer answer_with(int view, Box box) {
    Answer a;
    a.view = view;
    a.box = box;
    return a;
}

}  // namespace

TEST_CASE("intersection over union") {
    const Box a{0, 0, 10, 10};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {20, 20, 30, 30}) == 0.0);
    CHECK(iou(a, {5, 0, 15, 10}) == Approx(50.0 / 150.0));
    CHECK(iou(a, {0, 0, 5, 10}) == Approx(0.5));
    CHECK(iou(a, {10, 0, 20, 10}) == 0.0);  // touching edges
    CHECK(iou({0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);
}

TEST_CASE("a verdict needs the right view and IoU strictly above xi") {
    const Box gt{0, 0, 10, 10};
    CHECK(judge(answer_with(1, gt), truth_with(1, gt), 0.5).correct);
    CHECK_FALSE(judge(answer_with(2, gt), truth_with(1, gt), 0.5).correct);
    const auto half = judge(answer_with(1, {0, 0, 5, 10}), truth_with(1, gt), 0.5);
    CHECK(half.iou == Approx(0.5));
    CHECK_FALSE(half.correct);
    CHECK(judge(answer_with(1, {0, 0, 5, 10}), truth_with(1, gt), 0.4).correct);
    CHECK_FALSE(judge(Answer::abstention({}, "no idea"), truth_with(1, gt), 0.5).correct);

    // Any listed view counts.
    auto two = truth_with(1, gt);
    two.answers.push_back({2, {100, 100, 110, 110}});
    const auto v = judge(answer_with(2, {100, 100, 110, 110}), two, 0.5);
    CHECK(v.correct);
    CHECK(v.gt_view == 2);
}

TEST_CASE("reports bucket by interaction count") {
    const Box gt{0, 0, 10, 10};
    std::vector<Answer> answers;
    std::vector<QueryTruth> truth;
    for (int i = 0; i < 6; ++i) {
        auto t = truth_with(1, gt, i);
        t.id = i;
        truth.push_back(t);
        auto a = answer_with(1, i % 2 == 0 ? gt : Box{50, 50, 60, 60});
        a.id = i;
        answers.push_back(a);
    }
    const auto r = eval_accuracy(answers, truth);
    CHECK(r.overall.total == 6);
    CHECK(r.overall.correct == 3);
    CHECK(r.buckets[0].total == 1);
    CHECK(r.buckets[3].total == 3);  // 3, 4 and 5 interactions
    CHECK(r.buckets[3].correct == 1);
    CHECK(interaction_bucket(-1) == 0);
    CHECK(interaction_bucket(7) == 3);

    const auto csv = report_to_csv(r);
    CHECK(csv.rfind("query-id,kind,verdict,iou,gt-view,answer-view,interactions-bucket\n", 0) == 0);
    CHECK(csv.find("5,localization,incorrect,0.0000,1,1,3+") != std::string::npos);
    CHECK(bucket_row(r).find("3+") != std::string::npos);
    CHECK(report_to_json(r)["overall"]["accuracy"].get<double>() == Approx(0.5));

    auto shifted = truth;
    shifted[2].id = 9;
    CHECK_THROWS_AS(eval_accuracy(answers, shifted), EvalMismatchError);
    shifted.pop_back();
    CHECK_THROWS_AS(eval_accuracy(answers, shifted), EvalMismatchError);
}

TEST_CASE("query files round trip and report bad lines") {
    Query q;
    q.id = 3;
    q.kind = QueryKind::belief_multiview;
    q.object_camera = 1;
    q.object_time = 4;
    q.object_box = Box{1, 2, 3, 4};
    q.agent_camera = 2;
    q.agent_time = 5;
    q.agent_box = Box{5, 6, 7, 8};
    q.t_q = 9;
    const auto text = dump_queries({q});
    const auto back = load_queries(text);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == q);
    try {
        load_queries(text + "{\"id\": 4}\n");
        FAIL("expected a format error");
    } catch (const QueryFormatError& e) {
        CHECK(e.line() == 2);
    }
    CHECK(query_kind_from_string("belief-singleview") == QueryKind::belief_singleview);
    CHECK_THROWS(query_kind_from_string("belief_singleview"));
}

TEST_CASE("noise-free fixtures are answered perfectly") {
    for (const char* name : {"static_single", "sally-anne", "carry_across_rooms", "swap_cups"}) {
        CAPTURE(name);
        const auto f = run(name);
        for (auto kind : {QueryKind::localization, QueryKind::belief_multiview}) {
            const auto qs = worldsim::gen_queries(f.sim.truth, f.calib, kind, 20, 5);
            std::vector<Answer> answers;
            for (const auto& q : qs.queries) answers.push_back(answer_query(q, f.pgs, f.calib));
            const auto r = eval_accuracy(answers, qs.truth);
            CHECK(r.overall.correct == r.overall.total);
        }
    }
}

TEST_CASE("sally-anne: Sally is pointed at the box, not the basket") {
    const auto f = run("sally-anne");
    const auto qs = worldsim::gen_queries(f.sim.truth, f.calib, QueryKind::belief_multiview, 40, 8);
    int false_beliefs = 0;
    for (std::size_t i = 0; i < qs.queries.size(); ++i) {
        if (!qs.truth[i].false_belief.value_or(false)) continue;
        const int t_q = qs.queries[i].t_q;
        if (!f.sim.truth.frame(t_q).object(1)->hidden) continue;  // marble already in the basket
        ++false_beliefs;
        const auto a = answer_query(qs.queries[i], f.pgs, f.calib);
        CHECK(judge(a, qs.truth[i], 0.5).correct);
        // The answer box is not where the marble really is at t_q.
        const auto now = worldsim::answer_views(f.sim.truth, f.calib, 1, t_q);
        for (const auto& [view, box] : now) {
            if (a.view && *a.view == view) CHECK(iou(*a.box, box) <= 0.5);
        }
    }
    CHECK(false_beliefs > 0);
}

TEST_CASE("random baseline picks uniformly among same-attribute objects") {
    const auto f = run("cup_substitution");  // two red cups, one blue
    const auto qs = worldsim::gen_queries(f.sim.truth, f.calib, QueryKind::localization, 40, 3);
    const Query* red = nullptr;
    for (std::size_t i = 0; i < qs.queries.size(); ++i) {
        if (qs.truth[i].object != 3) {
            red = &qs.queries[i];
            break;
        }
    }
    REQUIRE(red);
    std::map<std::pair<int, double>, int> picks;
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
        const auto a = random_baseline(*red, f.pgs, f.calib, static_cast<std::uint64_t>(s));
        REQUIRE_FALSE(a.abstained());
        ++picks[{*a.view, a.box->x1}];
    }
    REQUIRE(picks.size() == 2);
    for (const auto& [key, n] : picks) CHECK(static_cast<double>(n) / draws == Approx(0.5).epsilon(0.04));
    // Same seed, same draw.
    CHECK(random_baseline(*red, f.pgs, f.calib, 77) == random_baseline(*red, f.pgs, f.calib, 77));
}

TEST_CASE("helping points at the object the returning agent is after") {
    for (const char* name : {"helping_false_belief", "helping_true_belief"}) {
        CAPTURE(name);
        const auto f = run(name);
        const auto qs = worldsim::gen_queries(f.sim.truth, f.calib, QueryKind::helping, 5, 1);
        REQUIRE_FALSE(qs.queries.empty());
        for (std::size_t i = 0; i < qs.queries.size(); ++i) {
            const auto a = resolve_object(answer_helping(qs.queries[i], f.pgs, f.calib), qs.queries[i], f.pgs, f.calib);
            CHECK(judge(a, qs.truth[i], 0.5).correct);
        }
    }
}
