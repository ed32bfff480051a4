#include <array>

#include "beliefgraph/queries/query.hpp"
#include "beliefgraph/worldsim/logs.hpp"

namespace beliefgraph::queries {

using nlohmann::json;
using nlohmann::ordered_json;
using worldsim::box_from_json;
using worldsim::box_to_json;

namespace {

constexpr std::array<std::string_view, 4> kKindNames{"localization", "belief-multiview", "belief-singleview", "helping"};

template <typename T, typename Parse>
std::vector<T> load_lines(std::string_view text, Parse&& parse) {
    std::vector<T> out;
    worldsim::for_each_line(text, [&](std::size_t n, std::string_view line) {
        try {
            out.push_back(parse(json::parse(line)));
        } catch (const std::exception& e) {
            throw QueryFormatError(n, e.what());
        }
    });
    return out;
}

ordered_json views_json(const std::vector<std::pair<int, Box>>& v) {
    ordered_json out = ordered_json::array();
    for (const auto& [k, b] : v) out.push_back({{"view", k}, {"box", box_to_json(b)}});
    return out;
}

}  // namespace

std::string_view to_string(QueryKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

QueryKind query_kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == s) return static_cast<QueryKind>(i);
    }
    throw std::invalid_argument("unknown query kind '" + std::string(s) + "'");
}

std::string dump_queries(const std::vector<Query>& qs) {
    std::string out;
    for (const auto& q : qs) {
        ordered_json j{{"id", q.id}, {"kind", to_string(q.kind)}};
        if (q.object_box) {
            j["object"] = {{"view", q.object_camera}, {"time", q.object_time}, {"box", box_to_json(*q.object_box)}};
        }
        if (q.agent_box) {
            j["agent"] = {{"view", q.agent_camera}, {"time", q.agent_time}, {"box", box_to_json(*q.agent_box)}};
        }
        j["t_q"] = q.t_q;
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<Query> load_queries(std::string_view text) {
    return load_lines<Query>(text, [](const json& j) {
        Query q;
        q.id = j.at("id").get<int>();
        q.kind = query_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("object")) {
            const auto& o = j.at("object");
            q.object_camera = o.at("view").get<int>();
            q.object_time = o.at("time").get<int>();
            q.object_box = box_from_json(o.at("box"));
        }
        if (j.contains("agent")) {
            const auto& a = j.at("agent");
            q.agent_camera = a.at("view").get<int>();
            q.agent_time = a.at("time").get<int>();
            q.agent_box = box_from_json(a.at("box"));
        }
        q.t_q = j.at("t_q").get<int>();
        if (q.kind != QueryKind::helping && !q.object_box) throw std::invalid_argument("query lacks its object part");
        if (q.kind != QueryKind::localization && !q.agent_box) throw std::invalid_argument("query lacks its agent part");
        return q;
    });
}

std::string dump_truth(const std::vector<QueryTruth>& ts) {
    std::string out;
    for (const auto& t : ts) {
        ordered_json j{{"id", t.id},
                       {"kind", to_string(t.kind)},
                       {"answers", views_json(t.answers)},
                       {"object", t.object},
                       {"interactions", t.interactions}};
        if (t.false_belief) j["false_belief"] = *t.false_belief;
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<QueryTruth> load_truth(std::string_view text) {
    return load_lines<QueryTruth>(text, [](const json& j) {
        QueryTruth t;
        t.id = j.at("id").get<int>();
        t.kind = query_kind_from_string(j.at("kind").get<std::string>());
        for (const auto& a : j.at("answers")) t.answers.emplace_back(a.at("view").get<int>(), box_from_json(a.at("box")));
        t.object = j.at("object").get<int>();
        t.interactions = j.at("interactions").get<int>();
        if (j.contains("false_belief")) t.false_belief = j.at("false_belief").get<bool>();
        return t;
    });
}

std::string dump_answers(const std::vector<Answer>& as) {
    std::string out;
    for (const auto& a : as) {
        ordered_json j{{"id", a.id}, {"kind", to_string(a.kind)}};
        if (a.abstained()) {
            j["abstain"] = a.abstain;
        } else {
            if (a.view) j["view"] = *a.view;
            if (a.box) j["box"] = box_to_json(*a.box);
            if (a.object) j["object"] = *a.object;
        }
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<Answer> load_answers(std::string_view text) {
    return load_lines<Answer>(text, [](const json& j) {
        Answer a;
        a.id = j.at("id").get<int>();
        a.kind = query_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("abstain")) a.abstain = j.at("abstain").get<std::string>();
        if (j.contains("view")) a.view = j.at("view").get<int>();
        if (j.contains("box")) a.box = box_from_json(j.at("box"));
        if (j.contains("object")) a.object = j.at("object").get<int>();
        return a;
    });
}

}  // namespace beliefgraph::queries
