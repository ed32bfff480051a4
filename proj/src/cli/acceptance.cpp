#include "beliefgraph/cli/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "beliefgraph/assignment/hungarian.hpp"
#include "beliefgraph/energy/energy.hpp"
#include "beliefgraph/pg/archive.hpp"

namespace beliefgraph::cli {

using nlohmann::ordered_json;
using parallel::CaseOutcome;
using parallel::CaseSpec;
using parallel::Exec;
using parallel::QueryRequest;
using queries::EvalReport;
using queries::QueryKind;

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6; }

ordered_json rate_json(const queries::Rate& r) {
    return {{"correct", r.correct}, {"total", r.total}, {"accuracy", round6(r.accuracy())}};
}

EvalReport filter(const EvalReport& r, const std::function<bool(const queries::Verdict&)>& keep) {
    EvalReport out;
    out.xi = r.xi;
    EvalReport picked;
    picked.xi = r.xi;
    for (const auto& v : r.verdicts) {
        if (keep(v)) picked.verdicts.push_back(v);
    }
    queries::merge_report(out, picked);
    return out;
}

EvalReport of_kind(const EvalReport& r, QueryKind k) {
    return filter(r, [k](const queries::Verdict& v) { return v.kind == k; });
}

struct Demand {
    QueryKind kind;
    int target = 0;
};

struct Collected {
    std::vector<CaseSpec> specs;
    std::vector<CaseOutcome> outcomes;
    int top_up_cases = 0;
};

int count_kind(std::span<const CaseOutcome> outcomes, QueryKind k) {
    int n = 0;
    for (const auto& o : outcomes) {
        for (const auto& q : o.queries.queries) n += q.kind == k ? 1 : 0;
    }
    return n;
}

// Spreads each demand over `cases` scenarios; when generation comes up short
// (too few distinct pairs in a scenario), further scenarios make up the rest.
Collected collect(const std::function<CaseSpec(int)>& make, int cases, const std::vector<Demand>& demands, double xi,
                  Exec exec) {
    Collected c;
    for (int i = 0; i < cases; ++i) {
        CaseSpec s = make(i);
        for (const auto& d : demands) {
            const int count = d.target / cases + (i < d.target % cases ? 1 : 0);
            if (count > 0) s.requests.push_back({d.kind, count});
        }
        c.specs.push_back(std::move(s));
    }
    c.outcomes = parallel::run_cases(c.specs, xi, exec);
    for (int next = cases; next < 5 * cases; ++next) {
        CaseSpec s = make(next);
        for (const auto& d : demands) {
            const int missing = d.target - count_kind(c.outcomes, d.kind);
            if (missing > 0) s.requests.push_back({d.kind, missing});
        }
        if (s.requests.empty()) break;
        c.outcomes.push_back(parallel::run_case(s, xi, false, exec));
        c.specs.push_back(std::move(s));
        ++c.top_up_cases;
    }
    return c;
}

std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace

std::string CriterionResult::line() const {
    char head[64];
    std::snprintf(head, sizeof head, "[%s] %d %s", pass ? "PASS" : "FAIL", id, name.c_str());
    std::string out = head;
    if (!note.empty()) out += ": " + note;
    return out;
}

ordered_json criterion_to_json(const CriterionResult& r) {
    ordered_json j{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"metrics", r.metrics}, {"thresholds", r.thresholds}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

CriterionResult check_assignment(int matrices, std::uint64_t seed) {
    CriterionResult r;
    r.id = 1;
    r.name = "assignment-oracle";
    auto rng = rng_for(seed);
    std::uniform_int_distribution<int> size(1, 6);
    std::uniform_real_distribution<double> entry(0.0, 10.0);
    int equal = 0;
    int same_mapping = 0;
    for (int k = 0; k < matrices; ++k) {
        const auto n = static_cast<std::size_t>(size(rng));
        assignment::CostMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(i, j) = entry(rng);
        }
        const auto a = assignment::solve(m);
        const auto b = assignment::brute_force(m);
        equal += a.cost == b.cost ? 1 : 0;
        same_mapping += a.row_to_col == b.row_to_col ? 1 : 0;
    }
    r.pass = equal == matrices;
    r.metrics = {{"matrices", matrices}, {"equal_cost", equal}, {"same_mapping", same_mapping}};
    r.thresholds = {{"equal_cost", matrices}, {"tolerance", 0.0}};
    r.note = std::to_string(equal) + "/" + std::to_string(matrices) + " optimal costs equal";
    return r;
}

CriterionResult judge_noiseless(std::span<const SuiteCase> cases) {
    CriterionResult r;
    r.id = 2;
    r.name = "noiseless-oracle";
    EvalReport loc, belief;
    bool clean = true;
    ordered_json per_case = ordered_json::array();
    for (const auto& c : cases) {
        clean = clean && c.noise_free && c.distinct_appearance;
        const auto l = of_kind(c.system, QueryKind::localization);
        const auto b = filter(c.system, [](const queries::Verdict& v) { return queries::is_belief_kind(v.kind); });
        queries::merge_report(loc, l);
        queries::merge_report(belief, b);
        per_case.push_back({{"scenario", c.name},
                            {"noise_free", c.noise_free && c.distinct_appearance},
                            {"localization", rate_json(l.overall)},
                            {"belief", rate_json(b.overall)}});
    }
    const bool loc_ok = loc.overall.total > 0 && loc.overall.correct == loc.overall.total;
    const bool belief_ok = belief.overall.total > 0 && belief.overall.correct == belief.overall.total;
    r.pass = !cases.empty() && clean && loc_ok && belief_ok;
    r.metrics = {{"scenarios", cases.size()},
                 {"all_noise_free", clean},
                 {"localization", rate_json(loc.overall)},
                 {"belief", rate_json(belief.overall)},
                 {"cases", per_case}};
    r.thresholds = {{"localization", 1.0}, {"belief", 1.0}};
    char buf[128];
    std::snprintf(buf, sizeof buf, "localization %.3f (%d), belief %.3f (%d) over %zu scenarios", loc.accuracy(),
                  loc.overall.total, belief.accuracy(), belief.overall.total, cases.size());
    r.note = buf;
    if (!clean) r.note += "; suite is not noise-free";
    return r;
}

std::vector<QueryRequest> default_requests(const worldsim::Scenario& s) {
    std::vector<QueryRequest> out{{QueryKind::localization, 20}};
    if (s.agents.empty()) return out;
    out.push_back({s.cameras.size() == 1 ? QueryKind::belief_singleview : QueryKind::belief_multiview, 20});
    if (s.name.rfind("helping", 0) == 0) out.push_back({QueryKind::helping, 5});
    return out;
}

std::vector<CaseSpec> bundled_suite_specs(std::uint64_t seed) {
    std::vector<CaseSpec> out;
    for (const auto& name : worldsim::bundled_fixture_names()) {
        CaseSpec c;
        c.scenario = worldsim::bundled_fixture(name);
        c.seed = seed;
        c.requests = default_requests(c.scenario);
        out.push_back(std::move(c));
    }
    return out;
}

CriterionResult check_noiseless(std::span<const CaseSpec> suite, double xi, Exec exec) {
    const auto outcomes = parallel::run_cases(suite, xi, exec);
    std::vector<SuiteCase> cases;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& n = suite[i].scenario.noise;
        auto zero = worldsim::NoiseModel::zero();
        zero.identical_appearance = n.identical_appearance;
        cases.push_back({outcomes[i].name, n == zero, !n.identical_appearance, outcomes[i].system});
    }
    return judge_noiseless(cases);
}

CriterionResult check_tracking(const AcceptanceScale& scale, const inference::PipelineParams& params, double xi,
                               Exec exec) {
    CriterionResult r;
    r.id = 3;
    r.name = "tracking-trend";
    auto make = [&](int i) {
        CaseSpec s;
        s.scenario = worldsim::tracking_scenario(scale.tracking_seed + static_cast<std::uint64_t>(i));
        s.seed = scale.tracking_seed + 10000 + static_cast<std::uint64_t>(i);
        s.params = params;
        s.params.holding = true;
        return s;
    };
    auto joint = collect(make, scale.tracking_scenarios, {{QueryKind::localization, scale.tracking_queries}}, xi, exec);
    auto blind_specs = joint.specs;
    for (auto& s : blind_specs) s.params.holding = false;
    const auto blind = parallel::run_cases(blind_specs, xi, exec);

    const auto rj = parallel::pooled(joint.outcomes);
    const auto rb = parallel::pooled(blind);
    const char* names[queries::kBuckets] = {"0", "1", "2", "3+"};
    ordered_json buckets = ordered_json::object();
    std::array<double, queries::kBuckets> gap{};
    bool each = true;
    bool monotone = true;
    for (std::size_t b = 0; b < queries::kBuckets; ++b) {
        gap[b] = rj.buckets[b].accuracy() - rb.buckets[b].accuracy();
        buckets[names[b]] = {{"queries", rj.buckets[b].total},
                             {"joint", round6(rj.buckets[b].accuracy())},
                             {"ablation", round6(rb.buckets[b].accuracy())},
                             {"gap", round6(gap[b])}};
        if (b >= 1) {
            each = each && rj.buckets[b].total > 0 && gap[b] >= 0.03;
            if (b >= 2) monotone = monotone && gap[b] >= gap[b - 1];
        }
    }
    queries::Rate j1, b1;
    for (std::size_t b = 1; b < queries::kBuckets; ++b) {
        j1.correct += rj.buckets[b].correct;
        j1.total += rj.buckets[b].total;
        b1.correct += rb.buckets[b].correct;
        b1.total += rb.buckets[b].total;
    }
    const int total = rj.overall.total;
    const bool enough = total == scale.tracking_queries;
    r.pass = enough && rj.accuracy() >= 0.80 && each && monotone;
    r.metrics = {{"scenarios", joint.specs.size()},
                 {"top_up_scenarios", joint.top_up_cases},
                 {"queries", total},
                 {"joint", round6(rj.accuracy())},
                 {"ablation", round6(rb.accuracy())},
                 {"buckets", buckets},
                 {"pooled_interaction_gap", round6(j1.accuracy() - b1.accuracy())},
                 {"gap_each_bucket_ok", each},
                 {"gap_non_decreasing", monotone}};
    r.thresholds = {{"queries", scale.tracking_queries}, {"joint_min", 0.80}, {"gap_min", 0.03}};
    char buf[200];
    std::snprintf(buf, sizeof buf, "joint %.3f vs ablation %.3f over %d queries; gaps 1/2/3+ = %.3f/%.3f/%.3f",
                  rj.accuracy(), rb.accuracy(), total, gap[1], gap[2], gap[3]);
    r.note = buf;
    return r;
}

CriterionResult check_belief(const AcceptanceScale& scale, const inference::PipelineParams& params, double xi,
                             Exec exec) {
    CriterionResult r;
    r.id = 4;
    r.name = "belief-trend";
    constexpr int kPerMulti = 10;
    constexpr int kPerSingle = 5;
    auto make = [&](bool single, std::uint64_t offset) {
        return [&, single, offset](int i) {
            CaseSpec s;
            worldsim::BeliefOptions o;
            o.single_view = single;
            s.scenario = worldsim::belief_scenario(scale.belief_seed + offset + static_cast<std::uint64_t>(i), o);
            s.seed = scale.belief_seed + offset + 100 + static_cast<std::uint64_t>(i);
            s.params = params;
            return s;
        };
    };
    const int mv_target = scale.belief_multiview_queries;
    const int help_target = scale.belief_singleview_queries * scale.helping_share_percent / 100;
    const int sv_target = scale.belief_singleview_queries - help_target;
    const auto mv = collect(make(false, 0), (mv_target + kPerMulti - 1) / kPerMulti,
                            {{QueryKind::belief_multiview, mv_target}}, xi, exec);
    const auto sv = collect(make(true, 5000), (scale.belief_singleview_queries + kPerSingle - 1) / kPerSingle,
                            {{QueryKind::belief_singleview, sv_target}, {QueryKind::helping, help_target}}, xi, exec);

    EvalReport sys = parallel::pooled(mv.outcomes);
    queries::merge_report(sys, parallel::pooled(sv.outcomes));
    EvalReport rnd = parallel::pooled(mv.outcomes, true);
    queries::merge_report(rnd, parallel::pooled(sv.outcomes, true));

    ordered_json kinds = ordered_json::object();
    for (auto k : {QueryKind::belief_multiview, QueryKind::belief_singleview, QueryKind::helping}) {
        kinds[std::string(queries::to_string(k))] = {{"system", rate_json(of_kind(sys, k).overall)},
                                                     {"random", rate_json(of_kind(rnd, k).overall)}};
    }
    const double gap = sys.accuracy() - rnd.accuracy();
    const bool counts = count_kind(mv.outcomes, QueryKind::belief_multiview) == mv_target &&
                        count_kind(sv.outcomes, QueryKind::belief_singleview) == sv_target &&
                        count_kind(sv.outcomes, QueryKind::helping) == help_target;
    r.pass = counts && sys.accuracy() >= 0.75 && rnd.accuracy() <= 0.60 && gap >= 0.25;
    r.metrics = {{"multiview_scenarios", mv.specs.size()},
                 {"singleview_scenarios", sv.specs.size()},
                 {"queries", sys.overall.total},
                 {"system", round6(sys.accuracy())},
                 {"random", round6(rnd.accuracy())},
                 {"gap", round6(gap)},
                 {"true_belief", {{"system", rate_json(sys.true_belief)}, {"random", rate_json(rnd.true_belief)}}},
                 {"false_belief", {{"system", rate_json(sys.false_belief)}, {"random", rate_json(rnd.false_belief)}}},
                 {"kinds", kinds}};
    r.thresholds = {{"multiview_queries", mv_target},
                    {"singleview_queries", sv_target},
                    {"helping_queries", help_target},
                    {"system_min", 0.75},
                    {"random_max", 0.60},
                    {"gap_min", 0.25}};
    char buf[160];
    std::snprintf(buf, sizeof buf, "system %.3f vs random %.3f (gap %.3f) over %d queries", sys.accuracy(),
                  rnd.accuracy(), gap, sys.overall.total);
    r.note = buf;
    return r;
}

int departed_track(const worldsim::SimulationResult& sim, const pg::PgSet& pgs, int agent, int departure) {
    // The simulator records which agent produced each observation; the robot-PG
    // node carrying that observation's box is the agent's own detection.
    for (int t = std::min(departure, sim.truth.horizon); t >= 1; --t) {
        for (const auto& v : sim.truth.frame(t).views) {
            const auto* robot = pgs.robot_pg(v.camera, t);
            if (robot == nullptr) continue;
            const worldsim::FrameObservation* obs = nullptr;
            for (const auto& o : sim.observations) {
                if (o.time == t && o.camera == v.camera) obs = &o;
            }
            if (obs == nullptr) continue;
            for (std::size_t i = 0; i < v.agent_sources.size() && i < obs->agents.size(); ++i) {
                if (v.agent_sources[i] != agent) continue;
                for (const auto& a : robot->agents) {
                    auto it = a.boxes.find(v.camera);
                    if (it != a.boxes.end() && it->second == obs->agents[i].box) return a.id;
                }
            }
        }
    }
    return -1;
}

CriterionResult check_inertia(const AcceptanceScale& scale, const inference::PipelineParams& params, Exec exec) {
    CriterionResult r;
    r.id = 5;
    r.name = "belief-inertia";
    const auto n = static_cast<std::size_t>(scale.inertia_pairs);
    std::vector<int> identical(n, 0), diverged(n, 0), nonempty(n, 0);
    parallel::for_each_index(
        n,
        [&](std::size_t i) {
            const auto seed = scale.inertia_seed + i;
            const auto pair = worldsim::inertia_pair(seed);
            std::string archive[2];
            int track[2];
            const worldsim::Scenario* s[2] = {&pair.first, &pair.second};
            for (int k = 0; k < 2; ++k) {
                const auto sim = worldsim::simulate(*s[k], seed + 1000);
                const auto parsed =
                    inference::parse_sequence(sim.observations, worldsim::Calibration::from(*s[k]), params);
                track[k] = departed_track(sim, parsed.pgs, pair.departed_agent, pair.departure);
                archive[k] = track[k] >= 0 ? pg::encode_beliefs_of(parsed.pgs, track[k]) : std::string();
            }
            identical[i] = track[0] >= 0 && track[0] == track[1] && archive[0] == archive[1] ? 1 : 0;
            nonempty[i] = !archive[0].empty() && !archive[1].empty() ? 1 : 0;
            diverged[i] = pair.first.script != pair.second.script ? 1 : 0;
        },
        exec);
    const int same = std::accumulate(identical.begin(), identical.end(), 0);
    const int full = std::accumulate(nonempty.begin(), nonempty.end(), 0);
    const int differ = std::accumulate(diverged.begin(), diverged.end(), 0);
    r.pass = same == scale.inertia_pairs && full == scale.inertia_pairs && differ == scale.inertia_pairs;
    r.metrics = {{"pairs", scale.inertia_pairs},
                 {"identical", same},
                 {"nonempty_archives", full},
                 {"scripts_diverge", differ}};
    r.thresholds = {{"identical", scale.inertia_pairs}};
    r.note = std::to_string(same) + "/" + std::to_string(scale.inertia_pairs) + " departed-agent archives identical";
    return r;
}

CriterionResult check_invariants(int cases, std::uint64_t seed) {
    CriterionResult r;
    r.id = 6;
    r.name = "energy-invariants";
    auto rng = rng_for(seed);
    std::uniform_real_distribution<double> coord(-8.0, 8.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int held_ok = 0;
    for (int k = 0; k < cases; ++k) {
        energy::EnergyParams p;
        p.tau = 0.2 + 2.0 * unit(rng);
        const int holder = 1 + static_cast<int>(unit(rng) * 3.0);
        const Point2 hand_prev{coord(rng), coord(rng)};
        const Point2 hand_next{hand_prev.x + (unit(rng) - 0.5) * 4.0 * p.tau, hand_prev.y + (unit(rng) - 0.5) * 4.0 * p.tau};
        const Point2 a_prev{coord(rng), coord(rng)}, a_next{coord(rng), coord(rng)};
        const Point2 b_prev{coord(rng), coord(rng)}, b_next{coord(rng), coord(rng)};
        const double ea = energy::motion_energy_object(a_next, a_prev, holder, hand_prev, hand_next, p);
        const double eb = energy::motion_energy_object(b_next, b_prev, holder, hand_prev, hand_next, p);
        held_ok += ea == eb ? 1 : 0;
    }

    int rows_ok = 0;
    double row_err = 0.0;
    for (int k = 0; k < cases; ++k) {
        worldsim::GroundTruthLog log;
        const int objects = 1 + static_cast<int>(unit(rng) * 5.0);
        const int frames = static_cast<int>(unit(rng) * 20.0);
        const double hold_rate = unit(rng);
        for (int t = 1; t <= frames; ++t) {
            worldsim::FrameTruth f;
            f.time = t;
            for (int o = 1; o <= objects; ++o) {
                worldsim::ObjectTruth x;
                x.id = o;
                x.holder = unit(rng) < hold_rate ? 1 + static_cast<int>(unit(rng) * 3.0) : 0;
                f.objects.push_back(x);
            }
            log.frames.push_back(std::move(f));
        }
        std::vector<worldsim::GroundTruthLog> logs;
        if (k % 50 != 0) logs.push_back(std::move(log));  // every 50th case learns from nothing
        const auto m = energy::learn_state_transition(logs, 1e-3 + 3.0 * unit(rng));
        bool ok = true;
        for (const auto& row : m.p) {
            const double err = std::abs(row[0] + row[1] - 1.0);
            row_err = std::max(row_err, err);
            ok = ok && err <= 1e-9 && row[0] >= 0.0 && row[1] >= 0.0;
        }
        rows_ok += ok ? 1 : 0;
    }

    int pool_ok = 0;
    for (int k = 0; k < cases; ++k) {
        const int n = 1 + static_cast<int>(unit(rng) * 8.0);
        std::vector<std::vector<double>> feats(static_cast<std::size_t>(n), std::vector<double>(16));
        for (auto& f : feats) {
            for (auto& x : f) x = unit(rng) * 2.0 - 1.0;
        }
        auto shuffled = feats;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        pool_ok += energy::pool_features(feats) == energy::pool_features(shuffled) ? 1 : 0;
    }

    auto random_attributes = [&] {
        return Attributes{static_cast<Color>(static_cast<int>(unit(rng) * 6.0) % 6),
                          static_cast<Material>(static_cast<int>(unit(rng) * 5.0) % 5),
                          static_cast<Category>(static_cast<int>(unit(rng) * 5.0) % 5)};
    };
    int metric_ok = 0;
    for (int k = 0; k < cases; ++k) {
        const auto a = random_attributes(), b = random_attributes(), c = random_attributes();
        const int ab = energy::attribute_energy(a, b);
        const bool ok = energy::attribute_energy(a, a) == 0 && ab >= 0 && ab == energy::attribute_energy(b, a) &&
                        (ab == 0) == (a == b) &&
                        energy::attribute_energy(a, c) <= ab + energy::attribute_energy(b, c);
        metric_ok += ok ? 1 : 0;
    }

    int proj_ok = 0;
    int proj_tested = 0;
    double proj_err = 0.0;
    for (int k = 0; k < cases; ++k) {
        const auto cam = worldsim::Camera::from_pose(0, {coord(rng), coord(rng)}, unit(rng) * 6.283185307179586,
                                                     0.8 + 0.8 * unit(rng), 640, 480, 2.0 + 2.0 * unit(rng),
                                                     0.3 + 0.6 * unit(rng));
        // Lower image half: always below the horizon for these pitches.
        const auto ground = cam.lift({unit(rng) * 640.0, 240.0 + unit(rng) * 240.0});
        if (!ground) continue;
        ++proj_tested;
        const auto px = cam.project(*ground);
        const auto back = px ? cam.lift(*px) : std::nullopt;
        if (!back) continue;
        const double err = std::hypot(back->x - ground->x, back->y - ground->y);
        proj_err = std::max(proj_err, err);
        proj_ok += err < 1e-6 ? 1 : 0;
    }

    r.pass = held_ok == cases && rows_ok == cases && pool_ok == cases && metric_ok == cases && proj_tested > 0 &&
             proj_ok == proj_tested;
    r.metrics = {{"cases", cases},
                 {"held_branch_independent", held_ok},
                 {"transition_rows_ok", rows_ok},
                 {"transition_max_row_error", row_err},
                 {"pooling_permutation_invariant", pool_ok},
                 {"attribute_metric_ok", metric_ok},
                 {"projection_tested", proj_tested},
                 {"projection_round_trip_ok", proj_ok},
                 {"projection_max_error_m", proj_err}};
    r.thresholds = {{"row_sum_tolerance", 1e-9}, {"projection_tolerance_m", 1e-6}};
    char buf[200];
    std::snprintf(buf, sizeof buf, "held %d, rows %d, pooling %d, metric %d, projection %d/%d of %d (max err %.1e m)",
                  held_ok, rows_ok, pool_ok, metric_ok, proj_ok, proj_tested, cases, proj_err);
    r.note = buf;
    return r;
}

CriterionResult judge_determinism(const std::vector<std::pair<std::string, std::string>>& first,
                                  const std::vector<std::pair<std::string, std::string>>& second) {
    CriterionResult r;
    r.id = 7;
    r.name = "determinism";
    int same = 0;
    ordered_json differing = ordered_json::array();
    std::map<std::string, std::string> other(second.begin(), second.end());
    for (const auto& [file, hash] : first) {
        auto it = other.find(file);
        if (it != other.end() && it->second == hash) {
            ++same;
        } else {
            differing.push_back(file);
        }
    }
    r.pass = !first.empty() && first.size() == second.size() && differing.empty();
    r.metrics = {{"files", first.size()}, {"identical", same}, {"differing", differing}};
    r.thresholds = {{"identical", first.size()}};
    r.note = std::to_string(same) + "/" + std::to_string(first.size()) + " output hashes identical";
    return r;
}

}  // namespace beliefgraph::cli
