// Serial vs OpenMP on the three batch kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include <random>

#include "beliefgraph/parallel/batch.hpp"
#include "beliefgraph/worldsim/generators.hpp"

using namespace beliefgraph;
using parallel::Exec;

namespace {

Exec mode(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "openmp"); }

struct Answering {
    worldsim::Calibration calib;
    pg::PgSet pgs;
    queries::QuerySet qs;

    Answering() {
        const auto s = worldsim::tracking_scenario(7);
        calib = worldsim::Calibration::from(s);
        const auto sim = worldsim::simulate(s, 7);
        pgs = inference::parse_sequence(sim.observations, calib, {}).pgs;
        const std::vector<parallel::QueryRequest> req{{queries::QueryKind::localization, 400}};
        qs = parallel::generate_requests(sim.truth, calib, req, 7);
    }
};

const Answering& answering() {
    static const Answering a;
    return a;
}

void BM_AnswerAll(benchmark::State& state) {
    const auto& a = answering();
    for (auto _ : state) {
        auto out = parallel::answer_all(a.qs.queries, a.pgs, a.calib, {}, mode(state));
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.qs.queries.size()));
    label(state);
}

void BM_FeatureDistances(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> rows(300, std::vector<double>(16)), cols(300, std::vector<double>(16));
    for (auto* set : {&rows, &cols})
        for (auto& v : *set)
            for (auto& x : v) x = g(rng);
    for (auto _ : state) {
        auto d = parallel::feature_distances(rows, cols, mode(state));
        benchmark::DoNotOptimize(d);
    }
    state.SetItemsProcessed(state.iterations() * 300 * 300);
    label(state);
}

void BM_RunCases(benchmark::State& state) {
    std::vector<parallel::CaseSpec> specs;
    for (std::uint64_t i = 0; i < 8; ++i) {
        parallel::CaseSpec c;
        c.scenario = worldsim::tracking_scenario(1000 + i);
        c.seed = 1000 + i;
        c.requests = {{queries::QueryKind::localization, 20}};
        specs.push_back(std::move(c));
    }
    for (auto _ : state) {
        auto out = parallel::run_cases(specs, 0.5, mode(state));
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(specs.size()));
    label(state);
}

}  // namespace

BENCHMARK(BM_AnswerAll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FeatureDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_RunCases)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
