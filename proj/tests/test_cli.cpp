#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "beliefgraph/cli/commands.hpp"
#include "beliefgraph/cli/config.hpp"

using namespace beliefgraph;
using namespace beliefgraph::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kSource = BELIEFGRAPH_SOURCE_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("beliefgraph-test-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

json sally_config(const fs::path& out) {
    return {{"scenario", (kSource / "scenarios" / "sally-anne.json").string()},
            {"seed", 7},
            {"out", out.string()},
            {"queries", {{{"kind", "localization"}, {"count", 10}}, {{"kind", "belief-multiview"}, {"count", 10}}}}};
}

void chain(const std::string& config, std::initializer_list<const char*> commands) {
    for (const char* c : commands) REQUIRE(invoke({c, "--config", config}).code == kOk);
}

}  // namespace

TEST_CASE("the single-stage commands chain through the output directory") {
    TempDir tmp("chain");
    const auto config = write_config(tmp.path, sally_config(tmp.path / "out")).string();

    const auto sim = invoke({"simulate", "--config", config});
    REQUIRE(sim.code == kOk);
    CHECK(fs::exists(tmp.path / "out" / "observations.jsonl"));
    CHECK(fs::exists(tmp.path / "out" / "ground_truth.jsonl"));
    const int horizon = json::parse(read_file(kSource / "scenarios" / "sally-anne.json"))["horizon"];
    CHECK(sim.out.find(std::to_string(horizon) + " frames") != std::string::npos);

    const auto infer = invoke({"infer", "--config", config});
    REQUIRE(infer.code == kOk);
    CHECK(infer.out.find("tracks: 1 objects, 2 agents") != std::string::npos);
    CHECK(fs::exists(tmp.path / "out" / "pgs.jsonl"));

    REQUIRE(invoke({"genq", "--config", config}).code == kOk);
    const auto eval = invoke({"eval", "--config", config});
    REQUIRE(eval.code == kOk);
    CHECK(eval.out.find("interactions   0       1       2       3+      overall") != std::string::npos);
    CHECK(eval.out.find("random") != std::string::npos);
    for (const char* f : {"answers.jsonl", "baseline.jsonl", "report.json", "report.csv"}) {
        CHECK(fs::exists(tmp.path / "out" / f));
    }
    const auto report = json::parse(read_file(tmp.path / "out" / "report.json"));
    CHECK(report["system"]["overall"]["accuracy"].get<double>() == 1.0);
    // No temporaries left behind by the atomic writes.
    for (const auto& e : fs::directory_iterator(tmp.path / "out")) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("simulate is reproducible byte for byte") {
    TempDir tmp("repro");
    const auto config = write_config(tmp.path, sally_config(tmp.path / "out")).string();
    REQUIRE(invoke({"simulate", "--config", config}).code == kOk);
    const auto first = sha256_hex(read_file(tmp.path / "out" / "observations.jsonl"));
    REQUIRE(invoke({"simulate", "--config", config}).code == kOk);
    CHECK(sha256_hex(read_file(tmp.path / "out" / "observations.jsonl")) == first);
    REQUIRE(invoke({"simulate", "--config", config, "--seed", "8"}).code == kOk);
    CHECK(sha256_hex(read_file(tmp.path / "out" / "observations.jsonl")) != first);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("configuration and path problems exit with 2") {
    TempDir tmp("config");
    SUBCASE("missing scenario file") {
        auto j = sally_config(tmp.path / "out");
        j["scenario"] = (tmp.path / "nope.json").string();
        const auto r = invoke({"simulate", "--config", write_config(tmp.path, j).string()});
        CHECK(r.code == kConfig);
        CHECK(r.err.find("nope.json") != std::string::npos);
    }
    SUBCASE("missing seed") {
        auto j = sally_config(tmp.path / "out");
        j.erase("seed");
        const auto r = invoke({"simulate", "--config", write_config(tmp.path, j).string()});
        CHECK(r.code == kConfig);
        CHECK(r.err.find("seed") != std::string::npos);
    }
    SUBCASE("unknown config field") {
        auto j = sally_config(tmp.path / "out");
        j["sed"] = 3;
        CHECK(invoke({"simulate", "--config", write_config(tmp.path, j).string()}).code == kConfig);
    }
    SUBCASE("missing config file") {
        CHECK(invoke({"simulate", "--config", (tmp.path / "absent.json").string()}).code == kConfig);
    }
    SUBCASE("infer before simulate names the producer") {
        const auto r = invoke({"infer", "--config", write_config(tmp.path, sally_config(tmp.path / "out")).string()});
        CHECK(r.code == kConfig);
        CHECK(r.err.find("simulate") != std::string::npos);
    }
    SUBCASE("empty e2e suite") {
        auto j = sally_config(tmp.path / "out");
        j["suite"] = json::array();
        CHECK(invoke({"e2e", "--config", write_config(tmp.path, j).string()}).code == kConfig);
    }
    SUBCASE("bad command line") {
        CHECK(invoke({"frobnicate"}).code == kConfig);
        CHECK(invoke({"simulate"}).code == kConfig);
    }
}

TEST_CASE("a corrupted observation record exits with 3 and names its line") {
    TempDir tmp("corrupt");
    const auto config = write_config(tmp.path, sally_config(tmp.path / "out")).string();
    REQUIRE(invoke({"simulate", "--config", config}).code == kOk);
    const auto path = tmp.path / "out" / "observations.jsonl";
    std::string text = read_file(path);
    std::size_t pos = 0;
    for (int i = 0; i < 2; ++i) pos = text.find('\n', pos) + 1;
    text.insert(pos, "{\"time\": \"three\"}\n");
    write_atomic(path, text);
    const auto r = invoke({"infer", "--config", config});
    CHECK(r.code == kData);
    CHECK(r.err.find("observations.jsonl line 3") != std::string::npos);
}

TEST_CASE("misaligned ground truth exits with 4") {
    TempDir tmp("mismatch");
    const auto config = write_config(tmp.path, sally_config(tmp.path / "out")).string();
    chain(config, {"simulate", "infer", "genq"});
    const auto path = tmp.path / "out" / "truth.jsonl";
    std::string text = read_file(path);
    write_atomic(path, text.substr(text.find('\n') + 1));
    CHECK(invoke({"eval", "--config", config}).code == kMismatch);
}

TEST_CASE("the installed binary reports the same exit codes") {
    TempDir tmp("binary");
    const std::string bin = BELIEFGRAPH_CLI;
    REQUIRE(fs::exists(bin));
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(status(bin + " --help") == kOk);
    CHECK(status(bin + " simulate --config " + (tmp.path / "missing.json").string()) == kConfig);
    const auto config = write_config(tmp.path, sally_config(tmp.path / "out")).string();
    CHECK(status(bin + " simulate --config " + config) == kOk);
    CHECK(status("BELIEFGRAPH_LOG=loud " + bin + " simulate --config " + config) == kConfig);
    CHECK(status(bin + " fixtures --out " + (tmp.path / "fx").string()) == kOk);
    CHECK(fs::exists(tmp.path / "fx" / "sally-anne.json"));
}

TEST_CASE("config paths resolve relative to the config file") {
    TempDir tmp("paths");
    fs::create_directories(tmp.path / "cfg");
    std::ofstream(tmp.path / "cfg" / "c.json") << R"({"scenario": "../s.json", "seed": 1, "out": "o"})";
    const auto c = load_config(tmp.path / "cfg" / "c.json");
    CHECK(c.scenario == (tmp.path / "s.json").lexically_normal());
    CHECK(c.out == (tmp.path / "cfg" / "o").lexically_normal());
    CHECK(c.require_seed() == 1);
    CHECK_THROWS_AS(config_from_json(json{{"xi", 1.5}}, tmp.path), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"seed", -3}}, tmp.path), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"queries", {{{"kind", "gossip"}, {"count", 1}}}}}, tmp.path), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"acceptance", {{"tracking_queries", 0}}}}, tmp.path), ConfigError);
}
