#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "beliefgraph/cli/config.hpp"

namespace beliefgraph::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kMismatch = 4 };

/// In-memory stage output: file name -> contents.
using Files = std::map<std::string, std::string>;

/// Stages over in-memory text so that e2e chains exactly what the single
/// commands read and write.
Files stage_simulate(const worldsim::Scenario& scenario, std::uint64_t seed, std::ostream& log);
Files stage_infer(const std::string& observations, const worldsim::Calibration& calib,
                  const inference::PipelineParams& params, std::ostream& log);
Files stage_genq(const std::string& ground_truth, const worldsim::Calibration& calib,
                 const std::vector<parallel::QueryRequest>& requests, std::uint64_t seed, std::ostream& log);

struct EvalSummary {
    queries::EvalReport system;
    queries::EvalReport random;
};
Files stage_eval(const std::string& pgs, const std::string& queries, const std::string& truth,
                 const worldsim::Calibration& calib, std::uint64_t seed, double xi, std::ostream& log,
                 EvalSummary* summary = nullptr);

/// Writes every file under `dir` atomically.
void write_files(const std::filesystem::path& dir, const Files& files);

/// SHA-256 of `content` as lowercase hex.
std::string sha256_hex(std::string_view content);

int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_infer(const RunConfig& config, std::ostream& out);
int cmd_genq(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_e2e(const RunConfig& config, std::ostream& out);
/// Writes the bundled noise-free scenarios as JSON files into config.out.
int cmd_fixtures(const RunConfig& config, std::ostream& out);

/// Maps the exception in flight to an exit code and prints its message.
int report_exception(std::ostream& err);

/// Full command line: parses flags, loads the config and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beliefgraph::cli
