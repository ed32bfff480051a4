#include "beliefgraph/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace beliefgraph::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

fs::path resolve(const fs::path& p, const fs::path& base) { return (p.is_absolute() ? p : base / p).lexically_normal(); }

std::uint64_t read_seed(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        throw ConfigError(where + ": seed must be a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

}  // namespace

void AcceptanceScale::validate() const {
    auto positive = [](int v, const char* name) {
        if (v <= 0) throw ConfigError(std::string("acceptance.") + name + " must be positive");
    };
    positive(assignment_matrices, "assignment_matrices");
    positive(tracking_scenarios, "tracking_scenarios");
    positive(tracking_queries, "tracking_queries");
    positive(belief_multiview_queries, "belief_multiview_queries");
    positive(belief_singleview_queries, "belief_singleview_queries");
    positive(inertia_pairs, "inertia_pairs");
    positive(invariant_cases, "invariant_cases");
    if (helping_share_percent < 0 || helping_share_percent > 100) {
        throw ConfigError("acceptance.helping_share_percent must lie in [0, 100]");
    }
}

AcceptanceScale scale_from_json(const json& j, AcceptanceScale s) {
    check_keys(j,
               {"assignment_matrices", "tracking_scenarios", "tracking_queries", "belief_multiview_queries",
                "belief_singleview_queries", "helping_share_percent", "inertia_pairs", "invariant_cases",
                "tracking_seed", "belief_seed", "inertia_seed", "invariant_seed"},
               "acceptance");
    try {
        s.assignment_matrices = j.value("assignment_matrices", s.assignment_matrices);
        s.tracking_scenarios = j.value("tracking_scenarios", s.tracking_scenarios);
        s.tracking_queries = j.value("tracking_queries", s.tracking_queries);
        s.belief_multiview_queries = j.value("belief_multiview_queries", s.belief_multiview_queries);
        s.belief_singleview_queries = j.value("belief_singleview_queries", s.belief_singleview_queries);
        s.helping_share_percent = j.value("helping_share_percent", s.helping_share_percent);
        s.inertia_pairs = j.value("inertia_pairs", s.inertia_pairs);
        s.invariant_cases = j.value("invariant_cases", s.invariant_cases);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("acceptance: ") + e.what());
    }
    if (j.contains("tracking_seed")) s.tracking_seed = read_seed(j.at("tracking_seed"), "acceptance.tracking_seed");
    if (j.contains("belief_seed")) s.belief_seed = read_seed(j.at("belief_seed"), "acceptance.belief_seed");
    if (j.contains("inertia_seed")) s.inertia_seed = read_seed(j.at("inertia_seed"), "acceptance.inertia_seed");
    if (j.contains("invariant_seed")) s.invariant_seed = read_seed(j.at("invariant_seed"), "acceptance.invariant_seed");
    s.validate();
    return s;
}

ordered_json scale_to_json(const AcceptanceScale& s) {
    return {{"assignment_matrices", s.assignment_matrices},
            {"tracking_scenarios", s.tracking_scenarios},
            {"tracking_queries", s.tracking_queries},
            {"belief_multiview_queries", s.belief_multiview_queries},
            {"belief_singleview_queries", s.belief_singleview_queries},
            {"helping_share_percent", s.helping_share_percent},
            {"inertia_pairs", s.inertia_pairs},
            {"invariant_cases", s.invariant_cases},
            {"tracking_seed", s.tracking_seed},
            {"belief_seed", s.belief_seed},
            {"inertia_seed", s.inertia_seed},
            {"invariant_seed", s.invariant_seed}};
}

std::uint64_t RunConfig::require_seed() const {
    if (!seed) throw ConfigError("seed is mandatory: set \"seed\" in the config or pass --seed");
    return *seed;
}

std::vector<parallel::QueryRequest> requests_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("queries: expected an array of {kind, count}");
    std::vector<parallel::QueryRequest> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "queries[" + std::to_string(i) + "]";
        check_keys(j[i], {"kind", "count"}, where);
        parallel::QueryRequest r;
        try {
            r.kind = queries::query_kind_from_string(j[i].at("kind").get<std::string>());
            r.count = j[i].at("count").get<int>();
        } catch (const std::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
        if (r.count < 0) throw ConfigError(where + ": count must be non-negative");
        out.push_back(r);
    }
    return out;
}

ordered_json requests_to_json(const std::vector<parallel::QueryRequest>& r) {
    ordered_json out = ordered_json::array();
    for (const auto& q : r) out.push_back({{"kind", std::string(queries::to_string(q.kind))}, {"count", q.count}});
    return out;
}

RunConfig config_from_json(const json& j, const fs::path& base_dir) {
    check_keys(j, {"scenario", "seed", "noise", "pipeline", "queries", "out", "xi", "suite", "acceptance"}, "config");
    RunConfig c;
    try {
        if (j.contains("scenario")) c.scenario = resolve(j.at("scenario").get<std::string>(), base_dir);
        if (j.contains("out")) c.out = resolve(j.at("out").get<std::string>(), base_dir);
        if (j.contains("xi")) c.xi = j.at("xi").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (j.contains("seed")) c.seed = read_seed(j.at("seed"), "seed");
    if (j.contains("noise")) {
        if (!j.at("noise").is_object()) throw ConfigError("noise: expected an object");
        c.noise = j.at("noise");
    }
    if (j.contains("pipeline")) {
        try {
            c.pipeline = inference::pipeline_from_json(j.at("pipeline"));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("pipeline: ") + e.what());
        }
    }
    if (j.contains("queries")) c.queries = requests_from_json(j.at("queries"));
    if (j.contains("suite")) {
        const json& s = j.at("suite");
        if (!s.is_array()) throw ConfigError("suite: expected an array");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string where = "suite[" + std::to_string(i) + "]";
            SuiteEntry e;
            if (s[i].is_string()) {
                e.scenario = resolve(s[i].get<std::string>(), base_dir);
            } else {
                check_keys(s[i], {"scenario", "seed", "queries"}, where);
                if (!s[i].contains("scenario") || !s[i].at("scenario").is_string()) {
                    throw ConfigError(where + ": missing scenario path");
                }
                e.scenario = resolve(s[i].at("scenario").get<std::string>(), base_dir);
                if (s[i].contains("seed")) e.seed = read_seed(s[i].at("seed"), where + ".seed");
                if (s[i].contains("queries")) e.queries = requests_from_json(s[i].at("queries"));
            }
            c.suite.push_back(std::move(e));
        }
    }
    if (j.contains("acceptance")) c.acceptance = scale_from_json(j.at("acceptance"));
    if (!(c.xi >= 0.0 && c.xi < 1.0)) throw ConfigError("xi must lie in [0, 1)");
    return c;
}

RunConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    if (!c.scenario.empty()) j["scenario"] = c.scenario.string();
    if (c.seed) j["seed"] = *c.seed;
    if (c.noise) j["noise"] = *c.noise;
    j["pipeline"] = inference::pipeline_to_json(c.pipeline);
    j["queries"] = requests_to_json(c.queries);
    j["out"] = c.out.string();
    j["xi"] = c.xi;
    if (!c.suite.empty()) {
        ordered_json s = ordered_json::array();
        for (const auto& e : c.suite) {
            ordered_json x{{"scenario", e.scenario.string()}};
            if (e.seed) x["seed"] = *e.seed;
            if (!e.queries.empty()) x["queries"] = requests_to_json(e.queries);
            s.push_back(std::move(x));
        }
        j["suite"] = std::move(s);
    }
    j["acceptance"] = scale_to_json(c.acceptance);
    return j;
}

worldsim::Scenario load_scenario_file(const fs::path& path, const std::optional<json>& noise) {
    if (path.empty()) throw ConfigError("no scenario path configured");
    if (!fs::is_regular_file(path)) throw ConfigError("scenario file not found: " + path.string());
    auto s = worldsim::load_scenario(read_file(path));
    if (noise) {
        s.noise = worldsim::noise_from_json(*noise, s.noise);
        s.noise.validate();
    }
    return s;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) throw ConfigError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace beliefgraph::cli
