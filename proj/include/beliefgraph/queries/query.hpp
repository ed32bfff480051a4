#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "beliefgraph/geometry.hpp"

namespace beliefgraph::queries {

enum class QueryKind { localization, belief_multiview, belief_singleview, helping };

std::string_view to_string(QueryKind k);
QueryKind query_kind_from_string(std::string_view s);
inline bool is_belief_kind(QueryKind k) { return k != QueryKind::localization; }

/// One query. Localization uses the object fields; belief queries add the
/// agent fields; helping uses only the agent fields.
struct Query {
    int id = 0;
    QueryKind kind = QueryKind::localization;
    int object_camera = 0;
    int object_time = 0;
    std::optional<Box> object_box;
    int agent_camera = 0;
    int agent_time = 0;
    std::optional<Box> agent_box;
    int t_q = 0;

    bool operator==(const Query&) const = default;
};

/// Ground truth kept apart from the query file. Any listed (view, box) is a
/// correct answer location.
struct QueryTruth {
    int id = 0;
    QueryKind kind = QueryKind::localization;
    std::vector<std::pair<int, Box>> answers;
    int object = 0;          // world object asked about; for helping, the object to hand over
    int interactions = 0;    // interactions on the object between the query frames
    std::optional<bool> false_belief;

    bool operator==(const QueryTruth&) const = default;
};

struct QuerySet {
    std::vector<Query> queries;
    std::vector<QueryTruth> truth;
    bool truncated = false;  // fewer distinct pairs than requested
};

struct Answer {
    int id = 0;
    QueryKind kind = QueryKind::localization;
    std::optional<int> view;
    std::optional<Box> box;
    std::optional<int> object;  // track id (helping)
    std::string abstain;        // reason; empty when answered

    bool abstained() const { return !abstain.empty(); }
    static Answer abstention(const Query& q, std::string reason) {
        Answer a;
        a.id = q.id;
        a.kind = q.kind;
        a.abstain = std::move(reason);
        return a;
    }
    bool operator==(const Answer&) const = default;
};

class QueryFormatError : public std::runtime_error {
public:
    QueryFormatError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

std::string dump_queries(const std::vector<Query>& qs);
std::vector<Query> load_queries(std::string_view text);
std::string dump_truth(const std::vector<QueryTruth>& ts);
std::vector<QueryTruth> load_truth(std::string_view text);
std::string dump_answers(const std::vector<Answer>& as);
std::vector<Answer> load_answers(std::string_view text);

}  // namespace beliefgraph::queries
