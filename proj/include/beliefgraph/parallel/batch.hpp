#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beliefgraph/inference/pipeline.hpp"
#include "beliefgraph/queries/answers.hpp"
#include "beliefgraph/queries/eval.hpp"
#include "beliefgraph/worldsim/queries_gen.hpp"

namespace beliefgraph::parallel {

enum class Exec { serial, parallel };

/// Runs fn(i) for i in [0, n). The parallel path uses OpenMP; the first
/// exception by index is rethrown after every task has finished.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn, Exec exec);

/// Answers every query independently.
std::vector<queries::Answer> answer_all(std::span<const queries::Query> qs, const pg::PgSet& pgs,
                                        const worldsim::Calibration& calib, const queries::AnswerParams& params, Exec exec);

/// Seed of the baseline draw for one query, derived from the run seed.
std::uint64_t baseline_seed(std::uint64_t seed, int query_id);

std::vector<queries::Answer> baseline_all(std::span<const queries::Query> qs, const pg::PgSet& pgs,
                                          const worldsim::Calibration& calib, std::uint64_t seed, Exec exec);

/// Pairwise Euclidean distances between two feature sets (rows x cols).
Eigen::MatrixXd feature_distances(std::span<const std::vector<double>> rows, std::span<const std::vector<double>> cols,
                                  Exec exec);

struct QueryRequest {
    queries::QueryKind kind = queries::QueryKind::localization;
    int count = 0;
};

struct CaseSpec {
    worldsim::Scenario scenario;
    std::uint64_t seed = 0;
    std::vector<QueryRequest> requests;
    inference::PipelineParams params;
};

struct CaseOutcome {
    std::string name;
    queries::QuerySet queries;
    std::vector<queries::Answer> answers;   // object answers already resolved to (view, box)
    std::vector<queries::Answer> baseline;  // belief kinds only, aligned with `belief_truth`
    std::vector<queries::QueryTruth> belief_truth;
    queries::EvalReport system;
    queries::EvalReport random;
    inference::RunSummary summary;
    std::string archive;  // encoded PG archive when requested
};

/// Queries for every request in order, ids renumbered from 0. Each request
/// draws from its own seed derived from `seed` and the kind.
queries::QuerySet generate_requests(const worldsim::GroundTruthLog& truth, const worldsim::Calibration& calib,
                                    std::span<const QueryRequest> requests, std::uint64_t seed);

struct Evaluation {
    std::vector<queries::Answer> answers;
    std::vector<queries::Answer> baseline;  // belief kinds only
    std::vector<queries::QueryTruth> belief_truth;
    queries::EvalReport system;
    queries::EvalReport random;
};

/// Answers every query, draws the random baseline for the belief kinds and
/// judges both. Throws EvalMismatchError when queries and truth disagree.
Evaluation evaluate(const queries::QuerySet& qs, const pg::PgSet& pgs, const worldsim::Calibration& calib,
                    std::uint64_t seed, double xi, Exec exec);

/// simulate -> infer -> generate queries -> answer -> evaluate for one scenario.
CaseOutcome run_case(const CaseSpec& spec, double xi, bool keep_archive = false, Exec inner = Exec::serial);

std::vector<CaseOutcome> run_cases(std::span<const CaseSpec> specs, double xi, Exec exec, bool keep_archive = false);

/// Pools per-case reports.
queries::EvalReport pooled(std::span<const CaseOutcome> outcomes, bool baseline = false);

}  // namespace beliefgraph::parallel
