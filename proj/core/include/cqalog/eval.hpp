#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cqalog/index.hpp"
#include "cqalog/synthesis.hpp"

namespace cqalog {

// AP = (1/|R|) * sum over relevant ranks i of precision@i. Relevant docs
// never retrieved contribute 0. relevant must be non-empty.
double average_precision(const std::vector<std::uint64_t>& ranked,
                         const std::set<std::uint64_t>& relevant);

// 1/rank of gold, 0 when absent.
double reciprocal_rank(const std::vector<std::uint64_t>& ranked, std::uint64_t gold);

struct UserEval {
    double map = 0;
    double mrr = 0;
    std::uint64_t n_queries = 0;  // queries contributing to this user's AP mean
};

struct EvalReport {
    double map_score = 0;  // macro over users of per-user AP means
    double mrr_score = 0;
    std::map<std::int64_t, UserEval> per_user;
    std::uint64_t n_queries_evaluated = 0;
    std::uint64_t n_queries_no_relevant = 0;  // qrels present but no grade >= 1
    std::uint64_t n_qrels_skipped = 0;        // qrels rows for unknown queries
    std::uint64_t n_users = 0;
};

// Per-query AP over grade>=1 docs and RR against the grade-2 doc; arithmetic
// means per user, then a macro mean over users. Queries present in qrels but
// missing from the run still count with AP = RR = 0. A run row whose query id
// is not in query_user is fatal (UnknownQueryId); a qrels row for an unknown
// query is skipped and counted.
EvalReport evaluate(const std::vector<RunEntry>& run, const std::vector<QrelRow>& qrels,
                    const std::map<std::uint64_t, std::int64_t>& query_user);

std::map<std::uint64_t, std::int64_t> query_user_map(const std::vector<SyntheticQuery>& log);

std::string eval_report_json(const EvalReport& report, std::string_view label);

// Plain-text two-column table (MAP, MRR) over several labelled reports.
std::string eval_table_text(const std::vector<std::pair<std::string, EvalReport>>& reports);

}  // namespace cqalog
