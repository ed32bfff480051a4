// Acceptance run at full scale. One line per criterion; exit status 1 when any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "beliefgraph/cli/acceptance.hpp"
#include "beliefgraph/cli/commands.hpp"
#include "beliefgraph/cli/config.hpp"

using namespace beliefgraph;
using namespace beliefgraph::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = BELIEFGRAPH_SOURCE_DIR;

template <typename Fn>
CriterionResult timed(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f s", s);
    return buf;
}

// Folds the wall-clock limit into the verdict and prints the line.
bool report(CriterionResult r, double limit) {
    const bool in_time = r.seconds < limit;
    if (!in_time) r.note += (r.note.empty() ? "" : "; ") + std::string("over time");
    r.pass = r.pass && in_time;
    std::cout << r.line() << " [" << seconds(r.seconds) << ", limit " << seconds(limit) << "]" << std::endl;
    return r.pass;
}

std::vector<std::pair<std::string, std::string>> read_hashes(const fs::path& p) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(read_file(p));
    std::string hash, file;
    while (in >> hash >> file) out.emplace_back(file, hash);
    return out;
}

}  // namespace

int main() {
    const auto config = load_config(kSource / "configs" / "acceptance_full.json");
    const auto& scale = config.acceptance;
    const auto exec = parallel::Exec::parallel;
    bool ok = true;

    ok &= report(timed([&] { return check_assignment(scale.assignment_matrices, scale.invariant_seed); }), 5.0);

    ok &= report(timed([&] {
                     std::vector<parallel::CaseSpec> specs;
                     for (const auto& e : config.suite) {
                         parallel::CaseSpec c;
                         c.scenario = load_scenario_file(e.scenario, config.noise);
                         c.seed = e.seed.value_or(config.require_seed());
                         c.requests = default_requests(c.scenario);
                         c.params = config.pipeline;
                         specs.push_back(std::move(c));
                     }
                     return check_noiseless(specs, config.xi, exec);
                 }),
                 60.0);

    const auto tracking = timed([&] { return check_tracking(scale, config.pipeline, config.xi, exec); });
    ok &= report(tracking, 600.0);

    ok &= report(timed([&] { return check_belief(scale, config.pipeline, config.xi, exec); }), 300.0);
    ok &= report(timed([&] { return check_inertia(scale, config.pipeline, exec); }), 120.0);
    ok &= report(timed([&] { return check_invariants(scale.invariant_cases, scale.invariant_seed); }), 10.0);

    // Two independent e2e runs over the bundled suite config; each must stay
    // under twice the tracking criterion's runtime.
    const fs::path scratch = fs::temp_directory_path() / ("beliefgraph-acceptance-" + std::to_string(::getpid()));
    const std::string suite_config = (kSource / "configs" / "bundled_suite.json").string();
    std::vector<std::vector<std::pair<std::string, std::string>>> hashes;
    double slowest = 0.0, total = 0.0;
    bool runs_ok = true;
    for (const char* tag : {"a", "b"}) {
        const auto dir = scratch / tag;
        std::ostringstream out, err;
        const auto start = std::chrono::steady_clock::now();
        const int code = run_cli({"e2e", "--config", suite_config, "--out", dir.string()}, out, err);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        slowest = std::max(slowest, s);
        total += s;
        if (code != kOk) {
            std::cerr << "e2e run " << tag << " exited " << code << ": " << err.str();
            runs_ok = false;
            hashes.emplace_back();
            continue;
        }
        hashes.push_back(read_hashes(dir / "hashes.txt"));
    }
    fs::remove_all(scratch);
    auto determinism = judge_determinism(hashes[0], hashes[1]);
    determinism.pass = determinism.pass && runs_ok;
    determinism.seconds = slowest;
    determinism.note += "; two runs took " + seconds(total) + " in total";
    ok &= report(determinism, 2.0 * tracking.seconds);

    std::cout << (ok ? "acceptance: all criteria pass" : "acceptance: FAILED") << std::endl;
    return ok ? 0 : 1;
}
