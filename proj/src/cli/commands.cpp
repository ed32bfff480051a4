#include "beliefgraph/cli/commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "beliefgraph/cli/acceptance.hpp"
#include "beliefgraph/pg/archive.hpp"
#include "beliefgraph/worldsim/logs.hpp"

namespace beliefgraph::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using queries::EvalReport;
using queries::QueryKind;

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// Re-labels a line-numbered format error with the file it came from.
template <typename Fn>
auto reading(const std::string& file, Fn&& fn) {
    try {
        return fn();
    } catch (const worldsim::LogFormatError& e) {
        throw DataError(file + " " + e.what());
    } catch (const queries::QueryFormatError& e) {
        throw DataError(file + " " + e.what());
    } catch (const pg::ArchiveError& e) {
        throw DataError(file + ": " + e.what());
    }
}

std::string input(const fs::path& dir, const std::string& name, const char* producer) {
    const auto path = dir / name;
    if (!fs::is_regular_file(path)) {
        throw ConfigError("missing input " + path.string() + " (run `" + producer + "` first)");
    }
    return read_file(path);
}

ordered_json summary_json(const inference::RunSummary& s) {
    return {{"frames", s.frames},
            {"object_tracks", s.object_tracks},
            {"agent_tracks", s.agent_tracks},
            {"births", s.births},
            {"deaths", s.deaths},
            {"mean_frame_energy", s.mean_frame_energy}};
}

EvalReport of_kind(const EvalReport& r, QueryKind k) {
    EvalReport out;
    out.xi = r.xi;
    EvalReport one;
    for (const auto& v : r.verdicts) {
        if (v.kind != k) continue;
        one.verdicts = {v};
        queries::merge_report(out, one);
    }
    return out;
}

constexpr QueryKind kKinds[] = {QueryKind::localization, QueryKind::belief_multiview, QueryKind::belief_singleview,
                                QueryKind::helping};

void print_eval(const EvalReport& sys, const EvalReport& rnd, std::ostream& out) {
    const auto loc = of_kind(sys, QueryKind::localization);
    if (loc.overall.total > 0) {
        out << "localization by interactions (" << loc.overall.total << " queries)\n" << queries::bucket_row(loc) << "\n";
    }
    char line[128];
    std::snprintf(line, sizeof line, "%-20s %7s %7s %7s\n", "kind", "queries", "system", "random");
    out << line;
    for (auto k : kKinds) {
        const auto s = of_kind(sys, k);
        if (s.overall.total == 0) continue;
        const auto r = of_kind(rnd, k);
        std::snprintf(line, sizeof line, "%-20s %7d %7s %7s\n", std::string(queries::to_string(k)).c_str(),
                      s.overall.total, fixed3(s.accuracy()).c_str(),
                      queries::is_belief_kind(k) ? fixed3(r.accuracy()).c_str() : "-");
        out << line;
    }
    if (rnd.overall.total > 0) {
        std::snprintf(line, sizeof line, "%-8s %12s %12s %12s\n", "belief", "true-belief", "false-belief", "overall");
        out << line;
        auto row = [&](const char* name, const EvalReport& r) {
            std::snprintf(line, sizeof line, "%-8s %12s %12s %12s\n", name,
                          r.true_belief.total ? fixed3(r.true_belief.accuracy()).c_str() : "-",
                          r.false_belief.total ? fixed3(r.false_belief.accuracy()).c_str() : "-",
                          fixed3(r.accuracy()).c_str());
            out << line;
        };
        EvalReport belief_sys;
        belief_sys.xi = sys.xi;
        for (auto k : kKinds) {
            if (queries::is_belief_kind(k)) queries::merge_report(belief_sys, of_kind(sys, k));
        }
        row("system", belief_sys);
        row("random", rnd);
    }
}

ordered_json eval_json(const EvalReport& sys, const EvalReport& rnd) {
    ordered_json kinds = ordered_json::object();
    for (auto k : kKinds) {
        const auto s = of_kind(sys, k);
        if (s.overall.total == 0) continue;
        ordered_json x{{"queries", s.overall.total}, {"system", s.accuracy()}};
        if (queries::is_belief_kind(k)) x["random"] = of_kind(rnd, k).accuracy();
        kinds[std::string(queries::to_string(k))] = std::move(x);
    }
    return {{"system", queries::report_to_json(sys)}, {"baseline", queries::report_to_json(rnd)}, {"kinds", kinds}};
}

std::uint64_t seed_of(const RunConfig& c) { return c.require_seed(); }

struct SuiteRun {
    std::string name;
    std::uint64_t seed = 0;
    worldsim::Scenario scenario;
    std::vector<parallel::QueryRequest> requests;
};

std::vector<SuiteRun> suite_runs(const RunConfig& config) {
    if (config.suite.empty()) throw ConfigError("e2e needs a non-empty suite");
    for (const auto& e : config.suite) {
        if (!fs::is_regular_file(e.scenario)) throw ConfigError("scenario file not found: " + e.scenario.string());
    }
    std::vector<SuiteRun> runs;
    std::set<std::string> names;
    for (const auto& e : config.suite) {
        SuiteRun r;
        r.scenario = load_scenario_file(e.scenario, config.noise);
        r.name = r.scenario.name.empty() ? e.scenario.stem().string() : r.scenario.name;
        if (!names.insert(r.name).second) throw ConfigError("suite lists scenario '" + r.name + "' twice");
        r.seed = e.seed.value_or(seed_of(config));
        r.requests = !e.queries.empty() ? e.queries : !config.queries.empty() ? config.queries : default_requests(r.scenario);
        runs.push_back(std::move(r));
    }
    return runs;
}

Files chain(const SuiteRun& run, const RunConfig& config, std::ostream& log, EvalSummary* summary) {
    const auto calib = worldsim::Calibration::from(run.scenario);
    Files files = stage_simulate(run.scenario, run.seed, log);
    files.merge(stage_infer(files.at("observations.jsonl"), calib, config.pipeline, log));
    files.merge(stage_genq(files.at("ground_truth.jsonl"), calib, run.requests, run.seed, log));
    files.merge(stage_eval(files.at("pgs.jsonl"), files.at("queries.jsonl"), files.at("truth.jsonl"), calib, run.seed,
                           config.xi, log, summary));
    return files;
}

std::vector<std::pair<std::string, std::string>> hash_all(const std::vector<std::pair<std::string, Files>>& dirs) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [dir, files] : dirs) {
        for (const auto& [name, content] : files) out.emplace_back(dir + "/" + name, sha256_hex(content));
    }
    return out;
}

bool is_noise_free(const worldsim::NoiseModel& n) {
    auto zero = worldsim::NoiseModel::zero();
    zero.identical_appearance = n.identical_appearance;
    return n == zero;
}

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

Files stage_simulate(const worldsim::Scenario& scenario, std::uint64_t seed, std::ostream& log) {
    spdlog::info("simulate {} (seed {})", scenario.name, seed);
    const auto sim = worldsim::simulate(scenario, seed);
    log << "simulated " << scenario.name << ": " << sim.truth.frames.size() << " frames, " << sim.observations.size()
        << " observation records, " << sim.truth.frames.size() << " ground-truth records\n";
    return {{"ground_truth.jsonl", worldsim::dump_ground_truth(sim.truth)},
            {"observations.jsonl", worldsim::dump_observations(sim.observations)}};
}

Files stage_infer(const std::string& observations, const worldsim::Calibration& calib,
                  const inference::PipelineParams& params, std::ostream& log) {
    const auto obs = reading("observations.jsonl", [&] { return worldsim::load_observations(observations); });
    spdlog::info("infer over {} observation records", obs.size());
    const auto parsed = inference::parse_sequence(obs, calib, params);
    const auto& s = parsed.summary;
    log << "tracks: " << s.object_tracks << " objects, " << s.agent_tracks << " agents; births " << s.births
        << ", deaths " << s.deaths << "; mean per-frame energy " << fixed3(s.mean_frame_energy) << " over " << s.frames
        << " frames\n";
    return {{"pgs.jsonl", pg::encode_pgs(parsed.pgs)}, {"summary.json", summary_json(s).dump(2) + "\n"}};
}

Files stage_genq(const std::string& ground_truth, const worldsim::Calibration& calib,
                 const std::vector<parallel::QueryRequest>& requests, std::uint64_t seed, std::ostream& log) {
    if (requests.empty()) throw ConfigError("no queries configured");
    const auto gt = reading("ground_truth.jsonl", [&] { return worldsim::load_ground_truth(ground_truth); });
    const auto qs = parallel::generate_requests(gt, calib, requests, seed);
    std::map<QueryKind, int> counts;
    for (const auto& q : qs.queries) ++counts[q.kind];
    log << "queries:";
    std::string short_kinds;
    for (const auto& r : requests) {
        log << " " << queries::to_string(r.kind) << " " << counts[r.kind] << "/" << r.count;
        if (counts[r.kind] < r.count) {
            short_kinds += (short_kinds.empty() ? "" : ", ") + std::string(queries::to_string(r.kind)) + " " +
                           std::to_string(counts[r.kind]) + "/" + std::to_string(r.count);
        }
    }
    log << "\n";
    if (qs.truncated) spdlog::warn("{}: fewer distinct query pairs than requested ({})", gt.scenario, short_kinds);
    return {{"queries.jsonl", queries::dump_queries(qs.queries)}, {"truth.jsonl", queries::dump_truth(qs.truth)}};
}

Files stage_eval(const std::string& pgs_text, const std::string& queries_text, const std::string& truth_text,
                 const worldsim::Calibration& calib, std::uint64_t seed, double xi, std::ostream& log,
                 EvalSummary* summary) {
    const auto pgs = reading("pgs.jsonl", [&] { return pg::decode_pgs(pgs_text); });
    queries::QuerySet qs;
    qs.queries = reading("queries.jsonl", [&] { return queries::load_queries(queries_text); });
    qs.truth = reading("truth.jsonl", [&] { return queries::load_truth(truth_text); });
    if (qs.queries.size() != qs.truth.size()) {
        throw queries::EvalMismatchError(std::to_string(qs.queries.size()) + " queries but " +
                                         std::to_string(qs.truth.size()) + " truth records");
    }
    for (std::size_t i = 0; i < qs.queries.size(); ++i) {
        if (qs.queries[i].id != qs.truth[i].id || qs.queries[i].kind != qs.truth[i].kind) {
            throw queries::EvalMismatchError("record " + std::to_string(i + 1) + ": query " +
                                             std::to_string(qs.queries[i].id) + " does not match truth " +
                                             std::to_string(qs.truth[i].id));
        }
    }
    auto e = parallel::evaluate(qs, pgs, calib, seed, xi, parallel::Exec::parallel);
    print_eval(e.system, e.random, log);
    Files files{{"answers.jsonl", queries::dump_answers(e.answers)},
                {"baseline.jsonl", queries::dump_answers(e.baseline)},
                {"report.json", eval_json(e.system, e.random).dump(2) + "\n"},
                {"report.csv", queries::report_to_csv(e.system)},
                {"baseline.csv", queries::report_to_csv(e.random)}};
    if (summary != nullptr) *summary = {std::move(e.system), std::move(e.random)};
    return files;
}

void write_files(const fs::path& dir, const Files& files) {
    for (const auto& [name, content] : files) write_atomic(dir / name, content);
}

std::string sha256_hex(std::string_view content) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(content.data(), content.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 15];
    }
    return out;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
    const auto scenario = load_scenario_file(config.scenario, config.noise);
    write_files(config.out, stage_simulate(scenario, seed_of(config), out));
    return kOk;
}

int cmd_infer(const RunConfig& config, std::ostream& out) {
    const auto scenario = load_scenario_file(config.scenario, config.noise);
    const auto obs = input(config.out, "observations.jsonl", "simulate");
    write_files(config.out, stage_infer(obs, worldsim::Calibration::from(scenario), config.pipeline, out));
    return kOk;
}

int cmd_genq(const RunConfig& config, std::ostream& out) {
    const auto scenario = load_scenario_file(config.scenario, config.noise);
    const auto gt = input(config.out, "ground_truth.jsonl", "simulate");
    write_files(config.out,
                stage_genq(gt, worldsim::Calibration::from(scenario), config.queries, seed_of(config), out));
    return kOk;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
    const auto scenario = load_scenario_file(config.scenario, config.noise);
    const auto pgs = input(config.out, "pgs.jsonl", "infer");
    const auto qs = input(config.out, "queries.jsonl", "genq");
    const auto truth = input(config.out, "truth.jsonl", "genq");
    write_files(config.out, stage_eval(pgs, qs, truth, worldsim::Calibration::from(scenario), seed_of(config),
                                       config.xi, out));
    return kOk;
}

int cmd_e2e(const RunConfig& config, std::ostream& out) {
    const auto runs = suite_runs(config);
    const std::uint64_t seed = seed_of(config);
    ordered_json timings = ordered_json::object();
    std::vector<CriterionResult> results;

    Stopwatch suite_clock;
    std::vector<std::pair<std::string, Files>> produced;
    std::vector<SuiteCase> cases;
    ordered_json suite = ordered_json::array();
    for (const auto& run : runs) {
        out << "== " << run.name << "\n";
        EvalSummary summary;
        produced.emplace_back(run.name, chain(run, config, out, &summary));
        write_files(config.out / run.name, produced.back().second);
        cases.push_back({run.name, is_noise_free(run.scenario.noise), !run.scenario.noise.identical_appearance,
                         summary.system});
        suite.push_back({{"scenario", run.name},
                         {"seed", run.seed},
                         {"queries", summary.system.overall.total},
                         {"system", summary.system.accuracy()},
                         {"random", summary.random.accuracy()}});
    }
    timings["suite"] = suite_clock.seconds();

    // Second pass over the same suite, kept in memory, for the determinism check.
    Stopwatch rerun_clock;
    std::vector<std::pair<std::string, Files>> again;
    std::ostringstream discard;
    for (const auto& run : runs) again.emplace_back(run.name, chain(run, config, discard, nullptr));
    timings["suite_rerun"] = rerun_clock.seconds();

    const auto& scale = config.acceptance;
    const auto exec = parallel::Exec::parallel;
    auto timed = [&](auto&& fn) {
        Stopwatch clock;
        auto r = fn();
        r.seconds = clock.seconds();
        timings[std::to_string(r.id)] = r.seconds;
        out << r.line() << "\n";
        results.push_back(std::move(r));
    };
    timed([&] { return check_assignment(scale.assignment_matrices, scale.invariant_seed); });
    timed([&] { return judge_noiseless(cases); });
    timed([&] { return check_tracking(scale, config.pipeline, config.xi, exec); });
    timed([&] { return check_belief(scale, config.pipeline, config.xi, exec); });
    timed([&] { return check_inertia(scale, config.pipeline, exec); });
    timed([&] { return check_invariants(scale.invariant_cases, scale.invariant_seed); });
    timed([&] { return judge_determinism(hash_all(produced), hash_all(again)); });

    int passed = 0;
    ordered_json criteria = ordered_json::array();
    for (const auto& r : results) {
        passed += r.pass ? 1 : 0;
        criteria.push_back(criterion_to_json(r));
    }
    ordered_json doc{{"schema", "beliefgraph-acceptance"},
                     {"version", 1},
                     {"seed", seed},
                     {"xi", config.xi},
                     {"pipeline", inference::pipeline_to_json(config.pipeline)},
                     {"scale", scale_to_json(scale)},
                     {"suite", suite},
                     {"criteria", criteria},
                     {"passed", passed},
                     {"pass", passed == static_cast<int>(results.size())}};
    const std::string doc_text = doc.dump(2) + "\n";
    write_atomic(config.out / "acceptance.json", doc_text);

    auto hashes = hash_all(produced);
    hashes.emplace_back("acceptance.json", sha256_hex(doc_text));
    std::sort(hashes.begin(), hashes.end());
    std::string listing;
    for (const auto& [file, hash] : hashes) listing += hash + "  " + file + "\n";
    write_atomic(config.out / "hashes.txt", listing);
    write_atomic(config.out / "timings.json", timings.dump(2) + "\n");

    out << "acceptance: " << passed << "/" << results.size() << " criteria pass; wrote "
        << (config.out / "acceptance.json").string() << "\n";
    return kOk;
}

int cmd_fixtures(const RunConfig& config, std::ostream& out) {
    for (const auto& name : worldsim::bundled_fixture_names()) {
        write_atomic(config.out / (name + ".json"), worldsim::dump_scenario(worldsim::bundled_fixture(name)));
        out << "wrote " << (config.out / (name + ".json")).string() << "\n";
    }
    return kOk;
}

int report_exception(std::ostream& err) {
    auto fail = [&](int code, const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return code;
    };
    try {
        throw;
    } catch (const ConfigError& e) {
        return fail(kConfig, e);
    } catch (const worldsim::ScenarioParseError& e) {
        return fail(kConfig, e);
    } catch (const worldsim::ScenarioValidationError& e) {
        return fail(kConfig, e);
    } catch (const fs::filesystem_error& e) {
        return fail(kConfig, e);
    } catch (const DataError& e) {
        return fail(kData, e);
    } catch (const worldsim::LogFormatError& e) {
        return fail(kData, e);
    } catch (const queries::QueryFormatError& e) {
        return fail(kData, e);
    } catch (const pg::ArchiveError& e) {
        return fail(kData, e);
    } catch (const inference::InferenceError& e) {
        return fail(kData, e);
    } catch (const worldsim::SimulationError& e) {
        return fail(kData, e);
    } catch (const energy::EnergyError& e) {
        return fail(kData, e);
    } catch (const queries::EvalMismatchError& e) {
        return fail(kMismatch, e);
    } catch (const std::exception& e) {
        return fail(kFailure, e);
    }
}

namespace {

void configure_logging() {
    const char* env = std::getenv("BELIEFGRAPH_LOG");
    const std::string level = env != nullptr ? env : "warn";
    static const std::set<std::string> known{"trace", "debug", "info", "warn", "warning", "error", "err", "critical", "off"};
    if (!known.contains(level)) {
        throw ConfigError("BELIEFGRAPH_LOG must be one of trace, debug, info, warn, error, critical, off (got '" + level +
                          "')");
    }
    auto logger = spdlog::get("beliefgraph");
    if (!logger) {
        logger = spdlog::stderr_color_mt("beliefgraph");
        spdlog::set_default_logger(logger);
    }
    spdlog::set_level(spdlog::level::from_str(level == "warning" ? "warn" : level == "error" ? "err" : level));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint parse-graph tracking and belief inference over simulated multi-camera scenes", "beliefgraph"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> xi;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path, "RunConfig JSON file");
        if (config_required) c->required();
        sub->add_option("--seed", seed, "Seed; overrides the config");
        sub->add_option("--out", out_dir, "Output directory; overrides the config");
        sub->add_option("--xi", xi, "IoU threshold; overrides the config");
        return sub;
    };
    auto* simulate = add_common(app.add_subcommand("simulate", "Simulate a scenario into ground-truth and observation logs"), true);
    auto* infer = add_common(app.add_subcommand("infer", "Parse observation logs into the PG archive"), true);
    auto* genq = add_common(app.add_subcommand("genq", "Sample queries and their ground truth"), true);
    auto* eval = add_common(app.add_subcommand("eval", "Answer queries, run the random baseline and write reports"), true);
    auto* e2e = add_common(app.add_subcommand("e2e", "Run every stage over a suite and write the acceptance document"), true);
    auto* fixtures = add_common(app.add_subcommand("fixtures", "Write the bundled noise-free scenarios as JSON"), false);

    std::vector<const char*> argv;
    argv.push_back("beliefgraph");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfig;
    }

    try {
        configure_logging();
        RunConfig config;
        if (!config_path.empty()) config = load_config(config_path);
        if (seed) config.seed = *seed;
        if (out_dir) config.out = *out_dir;
        if (xi) {
            if (!(*xi >= 0.0 && *xi < 1.0)) throw ConfigError("--xi must lie in [0, 1)");
            config.xi = *xi;
        }
        if (simulate->parsed()) return cmd_simulate(config, out);
        if (infer->parsed()) return cmd_infer(config, out);
        if (genq->parsed()) return cmd_genq(config, out);
        if (eval->parsed()) return cmd_eval(config, out);
        if (e2e->parsed()) return cmd_e2e(config, out);
        if (fixtures->parsed()) return cmd_fixtures(config, out);
        return kConfig;
    } catch (...) {
        return report_exception(err);
    }
}

}  // namespace beliefgraph::cli
