#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefgraph/inference/pipeline.hpp"
#include "beliefgraph/parallel/batch.hpp"
#include "beliefgraph/worldsim/scenario.hpp"

namespace beliefgraph::cli {

/// Bad or missing configuration, flag or path. Exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unusable input data (logs, archives, query files). Exit code 3.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SuiteEntry {
    std::filesystem::path scenario;
    std::optional<std::uint64_t> seed;
    std::vector<parallel::QueryRequest> queries;  // empty = RunConfig::queries
};

/// Sizes and seeds of the acceptance experiments. Defaults are the full sizes.
struct AcceptanceScale {
    int assignment_matrices = 1000;
    int tracking_scenarios = 100;
    int tracking_queries = 2000;
    int belief_multiview_queries = 200;
    int belief_singleview_queries = 100;
    int helping_share_percent = 40;  // of the single-view queries
    int inertia_pairs = 50;
    int invariant_cases = 1000;
    std::uint64_t tracking_seed = 20000;
    std::uint64_t belief_seed = 40000;
    std::uint64_t inertia_seed = 60000;
    std::uint64_t invariant_seed = 80000;

    void validate() const;
};

AcceptanceScale scale_from_json(const nlohmann::json& j, AcceptanceScale base = {});
nlohmann::ordered_json scale_to_json(const AcceptanceScale& s);

struct RunConfig {
    std::filesystem::path scenario;
    std::optional<std::uint64_t> seed;
    std::optional<nlohmann::json> noise;  // overrides applied on top of the scenario's model
    inference::PipelineParams pipeline;
    std::vector<parallel::QueryRequest> queries;
    std::filesystem::path out = "out";
    double xi = 0.5;
    std::vector<SuiteEntry> suite;
    AcceptanceScale acceptance;

    std::uint64_t require_seed() const;
};

/// Relative paths are taken from `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const RunConfig& c);

std::vector<parallel::QueryRequest> requests_from_json(const nlohmann::json& j);
nlohmann::ordered_json requests_to_json(const std::vector<parallel::QueryRequest>& r);

/// Scenario file with the config's noise overrides applied.
worldsim::Scenario load_scenario_file(const std::filesystem::path& path, const std::optional<nlohmann::json>& noise);

std::string read_file(const std::filesystem::path& path);
/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace beliefgraph::cli
