#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefgraph/cli/config.hpp"
#include "beliefgraph/parallel/batch.hpp"
#include "beliefgraph/worldsim/generators.hpp"

namespace beliefgraph::cli {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    nlohmann::ordered_json thresholds = nlohmann::ordered_json::object();
    std::string note;
    double seconds = 0.0;  // wall time; never serialized

    /// "[PASS] 3 tracking-trend: ..." style line.
    std::string line() const;
};

nlohmann::ordered_json criterion_to_json(const CriterionResult& r);

/// solve vs brute_force on random square matrices, n in [1, 6], entries in [0, 10].
CriterionResult check_assignment(int matrices, std::uint64_t seed);

/// Accuracies of a noise-free suite already run through the pipeline.
struct SuiteCase {
    std::string name;
    bool noise_free = true;
    bool distinct_appearance = true;
    queries::EvalReport system;
};
CriterionResult judge_noiseless(std::span<const SuiteCase> cases);

/// Runs every scenario with its requests and judges the result.
CriterionResult check_noiseless(std::span<const parallel::CaseSpec> suite, double xi, parallel::Exec exec);

/// The bundled fixtures with their default query requests.
std::vector<parallel::CaseSpec> bundled_suite_specs(std::uint64_t seed);
std::vector<parallel::QueryRequest> default_requests(const worldsim::Scenario& s);

/// Joint parsing vs the holding-disabled ablation on noisy tracking scenarios.
CriterionResult check_tracking(const AcceptanceScale& scale, const inference::PipelineParams& params, double xi,
                               parallel::Exec exec);

/// System vs random baseline on multi-view and single-view belief scenarios.
CriterionResult check_belief(const AcceptanceScale& scale, const inference::PipelineParams& params, double xi,
                             parallel::Exec exec);

/// Track id the pipeline gave the departed agent: the robot-PG node built from
/// that agent's own observation at the latest frame it was detected.
int departed_track(const worldsim::SimulationResult& sim, const pg::PgSet& pgs, int agent, int departure);

/// Belief archives of the departed agent in scenario pairs that diverge after it leaves.
CriterionResult check_inertia(const AcceptanceScale& scale, const inference::PipelineParams& params,
                              parallel::Exec exec);

/// Randomized energy and geometry invariants.
CriterionResult check_invariants(int cases, std::uint64_t seed);

/// Output hashes of two runs compared file by file.
CriterionResult judge_determinism(const std::vector<std::pair<std::string, std::string>>& first,
                                  const std::vector<std::pair<std::string, std::string>>& second);

}  // namespace beliefgraph::cli
