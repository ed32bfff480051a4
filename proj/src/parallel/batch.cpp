#include "beliefgraph/parallel/batch.hpp"

#include <omp.h>

#include "beliefgraph/pg/archive.hpp"

namespace beliefgraph::parallel {

using queries::Answer;
using queries::Query;

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn, Exec exec) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<Answer> answer_all(std::span<const Query> qs, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                               const queries::AnswerParams& params, Exec exec) {
    std::vector<Answer> out(qs.size());
    for_each_index(
        qs.size(),
        [&](std::size_t i) {
            out[i] = queries::resolve_object(queries::answer_query(qs[i], pgs, calib, params), qs[i], pgs, calib);
        },
        exec);
    return out;
}

std::uint64_t baseline_seed(std::uint64_t seed, int query_id) {
    // splitmix64 finaliser over (seed, id)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(query_id) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<Answer> baseline_all(std::span<const Query> qs, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                                 std::uint64_t seed, Exec exec) {
    std::vector<Answer> out(qs.size());
    for_each_index(
        qs.size(), [&](std::size_t i) { out[i] = queries::random_baseline(qs[i], pgs, calib, baseline_seed(seed, qs[i].id)); },
        exec);
    return out;
}

Eigen::MatrixXd feature_distances(std::span<const std::vector<double>> rows, std::span<const std::vector<double>> cols,
                                  Exec exec) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd d(n, m);
    auto fill = [&](Eigen::Index i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto& a = rows[static_cast<std::size_t>(i)];
            const auto& b = cols[static_cast<std::size_t>(j)];
            double s = 0.0;
            const std::size_t k = std::min(a.size(), b.size());
            for (std::size_t x = 0; x < k; ++x) s += (a[x] - b[x]) * (a[x] - b[x]);
            for (std::size_t x = k; x < a.size(); ++x) s += a[x] * a[x];
            for (std::size_t x = k; x < b.size(); ++x) s += b[x] * b[x];
            d(i, j) = std::sqrt(s);
        }
    };
    if (exec == Exec::serial) {
        for (Eigen::Index i = 0; i < n; ++i) fill(i);
    } else {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) fill(i);
    }
    return d;
}

CaseOutcome run_case(const CaseSpec& spec, double xi, bool keep_archive, Exec inner) {
    CaseOutcome out;
    out.name = spec.scenario.name;
    const auto sim = worldsim::simulate(spec.scenario, spec.seed);
    const auto calib = worldsim::Calibration::from(spec.scenario);
    auto parsed = inference::parse_sequence(sim.observations, calib, spec.params);
    out.summary = parsed.summary;
    if (keep_archive) out.archive = pg::encode_pgs(parsed.pgs);

    out.queries = generate_requests(sim.truth, calib, spec.requests, spec.seed);
    auto evaluated = evaluate(out.queries, parsed.pgs, calib, spec.seed, xi, inner);
    out.answers = std::move(evaluated.answers);
    out.baseline = std::move(evaluated.baseline);
    out.belief_truth = std::move(evaluated.belief_truth);
    out.system = std::move(evaluated.system);
    out.random = std::move(evaluated.random);
    return out;
}

queries::QuerySet generate_requests(const worldsim::GroundTruthLog& truth, const worldsim::Calibration& calib,
                                    std::span<const QueryRequest> requests, std::uint64_t seed) {
    queries::QuerySet out;
    std::uint64_t query_seed = seed;
    for (const auto& req : requests) {
        query_seed = baseline_seed(query_seed, static_cast<int>(req.kind));
        auto set = worldsim::gen_queries(truth, calib, req.kind, req.count, query_seed);
        for (std::size_t i = 0; i < set.queries.size(); ++i) {
            const int id = static_cast<int>(out.queries.size());
            set.queries[i].id = id;
            set.truth[i].id = id;
            out.queries.push_back(set.queries[i]);
            out.truth.push_back(set.truth[i]);
        }
        out.truncated = out.truncated || set.truncated;
    }
    return out;
}

Evaluation evaluate(const queries::QuerySet& qs, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                    std::uint64_t seed, double xi, Exec exec) {
    Evaluation out;
    out.answers = answer_all(qs.queries, pgs, calib, {}, exec);
    out.system = queries::eval_accuracy(out.answers, qs.truth, xi);

    std::vector<Query> belief_queries;
    for (std::size_t i = 0; i < qs.queries.size() && i < qs.truth.size(); ++i) {
        if (!queries::is_belief_kind(qs.queries[i].kind)) continue;
        belief_queries.push_back(qs.queries[i]);
        out.belief_truth.push_back(qs.truth[i]);
    }
    out.baseline = baseline_all(belief_queries, pgs, calib, seed, exec);
    out.random = queries::eval_accuracy(out.baseline, out.belief_truth, xi);
    return out;
}

std::vector<CaseOutcome> run_cases(std::span<const CaseSpec> specs, double xi, Exec exec, bool keep_archive) {
    std::vector<CaseOutcome> out(specs.size());
    for_each_index(specs.size(), [&](std::size_t i) { out[i] = run_case(specs[i], xi, keep_archive); }, exec);
    return out;
}

queries::EvalReport pooled(std::span<const CaseOutcome> outcomes, bool baseline) {
    queries::EvalReport r;
    if (!outcomes.empty()) r.xi = outcomes.front().system.xi;
    for (const auto& o : outcomes) queries::merge_report(r, baseline ? o.random : o.system);
    return r;
}

}  // namespace beliefgraph::parallel
