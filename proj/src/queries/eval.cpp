#include "beliefgraph/queries/eval.hpp"

#include <cstdio>

#include "beliefgraph/queries/answers.hpp"

namespace beliefgraph::queries {

namespace {

void tally(EvalReport& r, const Verdict& v) {
    r.overall.add(v.correct);
    r.buckets[static_cast<std::size_t>(v.bucket)].add(v.correct);
    if (v.false_belief) (*v.false_belief ? r.false_belief : r.true_belief).add(v.correct);
}

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

nlohmann::ordered_json rate_json(const Rate& r) {
    return {{"correct", r.correct}, {"total", r.total}, {"accuracy", r.accuracy()}};
}

}  // namespace

Verdict judge(const Answer& answer, const QueryTruth& truth, double xi) {
    Verdict v;
    v.id = truth.id;
    v.kind = truth.kind;
    v.bucket = interaction_bucket(truth.interactions);
    v.false_belief = truth.false_belief;
    if (!truth.answers.empty()) v.gt_view = truth.answers.front().first;
    if (answer.abstained() || !answer.view || !answer.box) return v;
    v.answer_view = answer.view;
    for (const auto& [view, box] : truth.answers) {
        if (view != *answer.view) continue;
        const double overlap = iou(*answer.box, box);
        if (overlap >= v.iou) {
            v.iou = overlap;
            v.gt_view = view;
        }
    }
    v.correct = v.iou > xi;
    return v;
}

EvalReport eval_accuracy(const std::vector<Answer>& answers, const std::vector<QueryTruth>& truth, double xi) {
    if (answers.size() != truth.size()) {
        throw EvalMismatchError(std::to_string(answers.size()) + " answers for " + std::to_string(truth.size()) + " queries");
    }
    EvalReport r;
    r.xi = xi;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i].id != truth[i].id || answers[i].kind != truth[i].kind) {
            throw EvalMismatchError("record " + std::to_string(i + 1) + ": answer id " + std::to_string(answers[i].id) +
                                    " does not match truth id " + std::to_string(truth[i].id));
        }
        r.verdicts.push_back(judge(answers[i], truth[i], xi));
        tally(r, r.verdicts.back());
    }
    return r;
}

void merge_report(EvalReport& into, const EvalReport& other) {
    for (const auto& v : other.verdicts) {
        into.verdicts.push_back(v);
        tally(into, v);
    }
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
    nlohmann::ordered_json buckets = nlohmann::ordered_json::object();
    const char* names[kBuckets] = {"0", "1", "2", "3+"};
    for (int b = 0; b < kBuckets; ++b) buckets[names[b]] = rate_json(r.buckets[static_cast<std::size_t>(b)]);
    return {{"xi", r.xi},
            {"queries", r.overall.total},
            {"overall", rate_json(r.overall)},
            {"buckets", buckets},
            {"true_belief", rate_json(r.true_belief)},
            {"false_belief", rate_json(r.false_belief)}};
}

std::string report_to_csv(const EvalReport& r) {
    std::string out = "query-id,kind,verdict,iou,gt-view,answer-view,interactions-bucket\n";
    const char* names[kBuckets] = {"0", "1", "2", "3+"};
    for (const auto& v : r.verdicts) {
        out += std::to_string(v.id) + "," + std::string(to_string(v.kind)) + "," + (v.correct ? "correct" : "incorrect") +
               "," + fixed(v.iou) + "," + (v.gt_view ? std::to_string(*v.gt_view) : "") + "," +
               (v.answer_view ? std::to_string(*v.answer_view) : "") + "," + names[v.bucket] + "\n";
    }
    return out;
}

std::string bucket_row(const EvalReport& r) {
    std::string out = "interactions   0       1       2       3+      overall\n";
    out += "accuracy      ";
    for (const auto& b : r.buckets) out += " " + (b.total ? fixed(b.accuracy()) : std::string("  -   ")) + " ";
    out += " " + fixed(r.accuracy());
    return out;
}

}  // namespace beliefgraph::queries
