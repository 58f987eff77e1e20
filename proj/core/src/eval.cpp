#include "cqalog/eval.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "cqalog/errors.hpp"

namespace cqalog {

double average_precision(const std::vector<std::uint64_t>& ranked,
                         const std::set<std::uint64_t>& relevant) {
    if (relevant.empty()) throw DomainError("average_precision needs a non-empty relevant set");
    double hits = 0, sum = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (relevant.count(ranked[i]) == 0) continue;
        ++hits;
        sum += hits / static_cast<double>(i + 1);
    }
    return sum / static_cast<double>(relevant.size());
}

double reciprocal_rank(const std::vector<std::uint64_t>& ranked, std::uint64_t gold) {
    for (std::size_t i = 0; i < ranked.size(); ++i)
        if (ranked[i] == gold) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

std::map<std::uint64_t, std::int64_t> query_user_map(const std::vector<SyntheticQuery>& log) {
    std::map<std::uint64_t, std::int64_t> out;
    for (const SyntheticQuery& row : log) out[row.query_id] = row.account_id;
    return out;
}

EvalReport evaluate(const std::vector<RunEntry>& run, const std::vector<QrelRow>& qrels,
                    const std::map<std::uint64_t, std::int64_t>& query_user) {
    EvalReport report;

    std::map<std::uint64_t, std::vector<RunEntry>> by_query;
    for (const RunEntry& e : run) {
        if (query_user.count(e.query_id) == 0) throw UnknownQueryId(e.query_id);
        by_query[e.query_id].push_back(e);
    }
    for (auto& [qid, entries] : by_query)
        std::sort(entries.begin(), entries.end(), [](const RunEntry& a, const RunEntry& b) {
            if (a.rank != b.rank) return a.rank < b.rank;
            if (a.score != b.score) return a.score > b.score;
            return a.doc_key < b.doc_key;
        });

    struct QueryJudgments {
        std::set<std::uint64_t> relevant;  // grade >= 1
        std::uint64_t gold = 0;            // grade == 2; 0 = none
        bool any = false;
    };
    std::map<std::uint64_t, QueryJudgments> judged;
    for (const QrelRow& row : qrels) {
        if (query_user.count(row.query_id) == 0) {
            ++report.n_qrels_skipped;
            continue;
        }
        QueryJudgments& j = judged[row.query_id];
        j.any = true;
        if (row.grade >= 1) j.relevant.insert(row.doc_key);
        if (row.grade == 2 && (j.gold == 0 || row.doc_key < j.gold)) j.gold = row.doc_key;
    }

    struct UserAccum {
        double ap_sum = 0, rr_sum = 0;
        std::uint64_t ap_n = 0, rr_n = 0;
    };
    std::map<std::int64_t, UserAccum> users;
    for (const auto& [qid, j] : judged) {
        if (j.relevant.empty()) {
            ++report.n_queries_no_relevant;
            continue;
        }
        std::vector<std::uint64_t> ranked;
        if (auto it = by_query.find(qid); it != by_query.end()) {
            ranked.reserve(it->second.size());
            for (const RunEntry& e : it->second) ranked.push_back(e.doc_key);
        }
        UserAccum& acc = users[query_user.at(qid)];
        acc.ap_sum += average_precision(ranked, j.relevant);
        ++acc.ap_n;
        ++report.n_queries_evaluated;
        if (j.gold != 0) {
            acc.rr_sum += reciprocal_rank(ranked, j.gold);
            ++acc.rr_n;
        }
    }

    double map_total = 0, mrr_total = 0;
    std::uint64_t map_users = 0, mrr_users = 0;
    for (const auto& [account, acc] : users) {
        UserEval ue;
        if (acc.ap_n > 0) {
            ue.map = acc.ap_sum / static_cast<double>(acc.ap_n);
            map_total += ue.map;
            ++map_users;
        }
        if (acc.rr_n > 0) {
            ue.mrr = acc.rr_sum / static_cast<double>(acc.rr_n);
            mrr_total += ue.mrr;
            ++mrr_users;
        }
        ue.n_queries = acc.ap_n;
        report.per_user[account] = ue;
    }
    report.n_users = map_users;
    if (map_users > 0) report.map_score = map_total / static_cast<double>(map_users);
    if (mrr_users > 0) report.mrr_score = mrr_total / static_cast<double>(mrr_users);
    return report;
}

std::string eval_report_json(const EvalReport& report, std::string_view label) {
    nlohmann::json per_user = nlohmann::json::object();
    for (const auto& [account, ue] : report.per_user)
        per_user[std::to_string(account)] = {
            {"map", ue.map}, {"mrr", ue.mrr}, {"n_queries", ue.n_queries}};
    nlohmann::json doc{
        {"label", std::string(label)},
        {"map", report.map_score},
        {"mrr", report.mrr_score},
        {"n_users", report.n_users},
        {"n_queries_evaluated", report.n_queries_evaluated},
        {"n_queries_no_relevant", report.n_queries_no_relevant},
        {"n_qrels_skipped", report.n_qrels_skipped},
        {"note", "AP computed over the retrieved top-k list; macro-averaged per user"},
        {"per_user", per_user},
    };
    return doc.dump(2) + "\n";
}

std::string eval_table_text(const std::vector<std::pair<std::string, EvalReport>>& reports) {
    std::size_t width = 8;
    for (const auto& [label, report] : reports) width = std::max(width, label.size() + 2);
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s %8s %8s\n", static_cast<int>(width), "run", "MAP",
                  "MRR");
    out += buf;
    for (const auto& [label, report] : reports) {
        std::snprintf(buf, sizeof buf, "%-*s %8.4f %8.4f\n", static_cast<int>(width),
                      label.c_str(), report.map_score, report.mrr_score);
        out += buf;
    }
    return out;
}

}  // namespace cqalog
