#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefgraph/queries/query.hpp"

namespace beliefgraph::queries {

/// Answers and ground truth do not line up query by query.
class EvalMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kBuckets = 4;  // 0, 1, 2, 3+ interactions
inline int interaction_bucket(int n) { return n >= kBuckets - 1 ? kBuckets - 1 : std::max(n, 0); }

struct Verdict {
    int id = 0;
    QueryKind kind = QueryKind::localization;
    bool correct = false;
    double iou = 0.0;
    std::optional<int> gt_view;
    std::optional<int> answer_view;
    int bucket = 0;
    std::optional<bool> false_belief;
};

struct Rate {
    int correct = 0;
    int total = 0;
    double accuracy() const { return total > 0 ? static_cast<double>(correct) / total : 0.0; }
    void add(bool ok) {
        ++total;
        correct += ok ? 1 : 0;
    }
};

struct EvalReport {
    double xi = 0.5;
    std::vector<Verdict> verdicts;
    Rate overall;
    std::array<Rate, kBuckets> buckets;
    Rate true_belief;
    Rate false_belief;

    double accuracy() const { return overall.accuracy(); }
};

/// Correct iff the answer view is one of the truth's views and the IoU with
/// that view's box exceeds xi. Abstentions are incorrect.
Verdict judge(const Answer& answer, const QueryTruth& truth, double xi);

/// Throws EvalMismatchError when ids or kinds disagree.
EvalReport eval_accuracy(const std::vector<Answer>& answers, const std::vector<QueryTruth>& truth, double xi = 0.5);

/// Adds another report's verdicts (ids are kept as given).
void merge_report(EvalReport& into, const EvalReport& other);

nlohmann::ordered_json report_to_json(const EvalReport& r);
/// query-id, kind, verdict, iou, gt-view, answer-view, interactions-bucket
std::string report_to_csv(const EvalReport& r);
/// Header plus one accuracy row: 0 / 1 / 2 / 3+ / overall.
std::string bucket_row(const EvalReport& r);

}  // namespace beliefgraph::queries
