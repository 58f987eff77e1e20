#include <doctest.h>

#include "cqalog/errors.hpp"
#include "cqalog/eval.hpp"
#include "cqalog/rng.hpp"
#include "cqalog/trec.hpp"
#include "support/oracles.hpp"

using namespace cqalog;
using namespace cqalog::testing;

namespace {

RunEntry entry(std::uint64_t qid, std::uint64_t doc, int rank, double score) {
    RunEntry e;
    e.query_id = qid;
    e.doc_key = doc;
    e.rank = rank;
    e.score = score;
    e.tag = "t";
    return e;
}

QrelRow qrel(std::uint64_t qid, std::uint64_t doc, int grade) { return {qid, doc, grade}; }

}  // namespace

TEST_CASE("average precision over the retrieved list") {
    // relevant at ranks 1 and 3 of {1,2,3}, |R| = 2
    CHECK(average_precision({10, 20, 30}, {10, 30}) ==
          doctest::Approx((1.0 + 2.0 / 3.0) / 2).epsilon(1e-12));
    // missing relevant docs pull the mean down
    CHECK(average_precision({10}, {10, 99}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(average_precision({1, 2}, {99}) == 0.0);
    CHECK_THROWS_AS(average_precision({1}, {}), DomainError);
}

TEST_CASE("reciprocal rank") {
    CHECK(reciprocal_rank({5, 6, 7}, 6) == doctest::Approx(0.5));
    CHECK(reciprocal_rank({5, 6, 7}, 9) == 0.0);
    CHECK(reciprocal_rank({}, 9) == 0.0);
}

TEST_CASE("run files round-trip") {
    std::vector<RunEntry> entries = {entry(1, 42, 1, -3.25), entry(1, 7, 2, -4.5),
                                     entry(2, 42, 1, -0.125)};
    std::string text = write_run(entries);
    std::vector<RunEntry> back = read_run(text);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].query_id == entries[i].query_id);
        CHECK(back[i].doc_key == entries[i].doc_key);
        CHECK(back[i].rank == entries[i].rank);
        CHECK(back[i].score == entries[i].score);  // %.17g survives exactly
        CHECK(back[i].tag == entries[i].tag);
    }
    CHECK(text.substr(0, text.find('\n')) == "1 Q0 42 1 -3.25 t");
}

TEST_CASE("qrels files round-trip") {
    std::vector<QrelRow> rows = {qrel(1, 10, 2), qrel(1, 11, 1), qrel(2, 12, 0)};
    std::string text = write_qrels(rows);
    CHECK(read_qrels(text) == rows);
    CHECK(text.substr(0, text.find('\n')) == "1 0 10 2");
}

TEST_CASE("malformed trec lines carry their line number") {
    CHECK_THROWS_AS(read_run("1 Q0 42 1\n"), FormatError);
    CHECK_THROWS_AS(read_qrels("1 0 zz 2\n"), FormatError);
    try {
        read_run("1 Q0 42 1 -3.0 t\nbroken\n");
        FAIL("expected throw");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("two-user analytic macro average") {
    // user 1: one query with AP 1.0; user 2: 99 queries with AP 0.0
    std::vector<RunEntry> run;
    std::vector<QrelRow> qrels;
    std::map<std::uint64_t, std::int64_t> query_user;

    run.push_back(entry(1, 100, 1, -1.0));
    qrels.push_back(qrel(1, 100, 2));
    query_user[1] = 1;

    for (std::uint64_t q = 2; q <= 100; ++q) {
        run.push_back(entry(q, 500 + q, 1, -1.0));  // retrieved doc is irrelevant
        qrels.push_back(qrel(q, 100 + q, 2));       // the relevant one is never retrieved
        query_user[q] = 2;
    }

    EvalReport report = evaluate(run, qrels, query_user);
    CHECK(report.map_score == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(report.mrr_score == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(report.n_users == 2);
    CHECK(report.n_queries_evaluated == 100);
    CHECK(report.per_user.at(1).map == 1.0);
    CHECK(report.per_user.at(2).map == 0.0);
}

TEST_CASE("queries in qrels but absent from the run count as zero") {
    std::vector<RunEntry> run = {entry(1, 10, 1, -1.0)};
    std::vector<QrelRow> qrels = {qrel(1, 10, 2), qrel(2, 20, 2)};
    std::map<std::uint64_t, std::int64_t> query_user{{1, 1}, {2, 1}};

    EvalReport report = evaluate(run, qrels, query_user);
    CHECK(report.map_score == doctest::Approx(0.5));
    CHECK(report.n_queries_evaluated == 2);
}

TEST_CASE("grade-0 rows do not create relevance") {
    std::vector<RunEntry> run = {entry(1, 10, 1, -1.0), entry(1, 11, 2, -2.0)};
    std::vector<QrelRow> qrels = {qrel(1, 10, 0), qrel(1, 11, 1)};
    EvalReport report = evaluate(run, qrels, {{1, 1}});
    CHECK(report.map_score == doctest::Approx(0.5));  // only doc 11 is relevant
    CHECK(report.mrr_score == 0.0);                   // no grade-2 doc at all
}

TEST_CASE("unknown run query is fatal, unknown qrels row is skipped") {
    std::vector<RunEntry> run = {entry(9, 10, 1, -1.0)};
    std::vector<QrelRow> qrels = {qrel(1, 10, 2)};
    CHECK_THROWS_AS(evaluate(run, qrels, {{1, 1}}), UnknownQueryId);

    EvalReport report = evaluate({}, {qrel(1, 10, 2), qrel(7, 11, 2)}, {{1, 1}});
    CHECK(report.n_qrels_skipped == 1);
    CHECK(report.n_queries_evaluated == 1);
}

TEST_CASE("queries whose qrels have no positive grade are excluded") {
    std::vector<RunEntry> run = {entry(1, 10, 1, -1.0)};
    std::vector<QrelRow> qrels = {qrel(1, 10, 2), qrel(2, 20, 0)};
    std::map<std::uint64_t, std::int64_t> query_user{{1, 1}, {2, 1}};
    EvalReport report = evaluate(run, qrels, query_user);
    CHECK(report.n_queries_evaluated == 1);
    CHECK(report.n_queries_no_relevant == 1);
    CHECK(report.map_score == doctest::Approx(1.0));
}

TEST_CASE("run rows are consumed by recorded rank, not input order") {
    std::vector<RunEntry> run = {entry(1, 20, 2, -2.0), entry(1, 10, 1, -1.0)};
    std::vector<QrelRow> qrels = {qrel(1, 10, 2)};
    EvalReport report = evaluate(run, qrels, {{1, 1}});
    CHECK(report.map_score == doctest::Approx(1.0));
    CHECK(report.mrr_score == doctest::Approx(1.0));
}

TEST_CASE("evaluate matches the naive oracle on random instances") {
    Rng rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<RunEntry> run;
        std::vector<QrelRow> qrels;
        std::map<std::uint64_t, std::int64_t> query_user;

        std::uint64_t n_users = 2 + rng.bounded(4);
        std::uint64_t qid = 0;
        for (std::uint64_t u = 1; u <= n_users; ++u) {
            std::uint64_t n_queries = 1 + rng.bounded(6);
            for (std::uint64_t j = 0; j < n_queries; ++j) {
                ++qid;
                query_user[qid] = static_cast<std::int64_t>(u);

                // 6 candidate docs; 1 accepted + 0-3 relevant; run holds 0-6
                std::vector<std::uint64_t> docs;
                for (std::uint64_t d = 0; d < 6; ++d) docs.push_back(qid * 100 + d);
                qrels.push_back(qrel(qid, docs[rng.bounded(6)], 2));
                std::uint64_t extra = rng.bounded(4);
                for (std::uint64_t e = 0; e < extra; ++e)
                    qrels.push_back(qrel(qid, docs[rng.bounded(6)], 1));

                rng.shuffle(docs);
                std::uint64_t retrieved = rng.bounded(7);
                for (std::uint64_t r = 0; r < retrieved; ++r)
                    run.push_back(
                        entry(qid, docs[r], static_cast<int>(r + 1), -1.0 - 0.5 * r));
            }
        }

        // duplicate qrel rows are possible above; the library must cope
        EvalReport got = evaluate(run, qrels, query_user);
        NaiveEval want = naive_evaluate(run, qrels, query_user);
        CHECK(got.map_score == doctest::Approx(want.map).epsilon(1e-12));
        CHECK(got.mrr_score == doctest::Approx(want.mrr).epsilon(1e-12));
        for (const auto& [user, eval] : got.per_user) {
            CHECK(eval.map == doctest::Approx(want.user_map.at(user)).epsilon(1e-12));
            CHECK(eval.mrr == doctest::Approx(want.user_mrr.at(user)).epsilon(1e-12));
        }
    }
}

TEST_CASE("query_user_map reflects the log") {
    SyntheticQuery a;
    a.query_id = 1;
    a.account_id = 11;
    SyntheticQuery b;
    b.query_id = 2;
    b.account_id = 22;
    auto map = query_user_map({a, b});
    CHECK(map.at(1) == 11);
    CHECK(map.at(2) == 22);
}

TEST_CASE("eval json and table contain the headline numbers") {
    EvalReport report = evaluate({entry(1, 10, 1, -1.0)}, {qrel(1, 10, 2)}, {{1, 5}});
    std::string json = eval_report_json(report, "raw");
    CHECK(json.find("\"label\"") != std::string::npos);
    CHECK(json.find("\"map\"") != std::string::npos);
    std::string table = eval_table_text({{"raw", report}});
    CHECK(table.find("raw") != std::string::npos);
    CHECK(table.find("1.0000") != std::string::npos);
}
