#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cqalog/errors.hpp"
#include "cqalog/io.hpp"
#include "cqalog/pipeline.hpp"
#include "cqalog/snapshot.hpp"
#include "cqalog/synthesis.hpp"
#include "cqalog/trec.hpp"
#include "support/synthetic_dump.hpp"
#include "support/tmpdir.hpp"

using namespace cqalog;
using namespace cqalog::testing;

TEST_CASE("config serializes and parses losslessly") {
    PipelineConfig config;
    config.dump_dir = "/data/dump";
    config.excluded_forums = "/data/skip.txt";
    config.min_forum_questions = 42;
    config.min_other_answers = 3;
    config.length_dist = "pmf:0.5,0.25,0.25";
    config.min_user_queries = 7;
    config.mu = 1234.5;
    config.k = 20;
    config.seed = 99;
    config.idf_variant = "raw";
    config.strategy = "ranker:/models/global.json";
    config.length_sampling = "per_event";
    config.materialize_negatives = 4;
    config.sample_forums = 2;
    config.sample_questions_per_forum = 50;
    config.threads = 3;
    config.out_dir = "/data/out";

    PipelineConfig back = parse_config(serialize_config(config));
    CHECK(back.dump_dir == config.dump_dir);
    CHECK(back.excluded_forums == config.excluded_forums);
    CHECK(back.min_forum_questions == config.min_forum_questions);
    CHECK(back.min_other_answers == config.min_other_answers);
    CHECK(back.length_dist == config.length_dist);
    CHECK(back.min_user_queries == config.min_user_queries);
    CHECK(back.mu == config.mu);
    CHECK(back.k == config.k);
    CHECK(back.seed == config.seed);
    CHECK(back.idf_variant == config.idf_variant);
    CHECK(back.strategy == config.strategy);
    CHECK(back.length_sampling == config.length_sampling);
    CHECK(back.materialize_negatives == config.materialize_negatives);
    CHECK(back.sample_forums == config.sample_forums);
    CHECK(back.sample_questions_per_forum == config.sample_questions_per_forum);
    CHECK(back.threads == config.threads);
    CHECK(back.out_dir == config.out_dir);

    // comments, blank lines and unquoted values are accepted
    PipelineConfig loose = parse_config(
        "# a comment\n"
        "schema_version = 1\n"
        "\n"
        "dump_dir = /plain/path   # trailing comment\n"
        "mu = 10\n");
    CHECK(loose.dump_dir == "/plain/path");
    CHECK(loose.mu == 10.0);
    CHECK(loose.k == 100);  // defaults stay
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_config("dump_dir = \"x\"\n"), ConfigError);  // no version
    CHECK_THROWS_AS(parse_config("schema_version = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema_version = 1\nnot a pair\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema_version = 1\nmystery = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema_version = 1\nk = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema_version = 1\nmu = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema_version = 1\nseed = -4\n"), ConfigError);
}

TEST_CASE("validate_config checks semantic constraints") {
    PipelineConfig config;
    config.dump_dir = "/tmp/in";
    config.out_dir = "/tmp/out";
    CHECK_NOTHROW(validate_config(config));

    PipelineConfig bad = config;
    bad.dump_dir.clear();
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = config;
    bad.out_dir.clear();
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = config;
    bad.k = 0;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = config;
    bad.mu = -1;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = config;
    bad.idf_variant = "tfidf";
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = config;
    bad.length_sampling = "per_user";
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = config;
    bad.strategy = "bm25";
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad = config;
    bad.strategy = "ranker:/m.json";
    CHECK_NOTHROW(validate_config(bad));
    bad = config;
    bad.sample_forums = 2;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
    bad.sample_questions_per_forum = 10;
    CHECK_NOTHROW(validate_config(bad));
    bad = config;
    bad.length_dist = "uniform:5:1";
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

namespace {

PipelineConfig pipeline_config(const std::filesystem::path& dump,
                               const std::filesystem::path& out) {
    PipelineConfig config;
    config.dump_dir = dump.string();
    config.out_dir = out.string();
    config.min_user_queries = 5;
    config.k = 50;
    config.seed = 11;
    config.materialize_negatives = 2;
    return config;
}

}  // namespace

TEST_CASE("run_pipeline produces a complete, reproducible output tree") {
    TmpDir tmp;
    write_synthetic_dump(tmp / "dump", DumpSpec{});

    PipelineConfig config = pipeline_config(tmp / "dump", tmp / "out");
    PipelineResult result = run_pipeline(config);

    CHECK(result.out_dir == std::filesystem::path(tmp / "out"));
    CHECK(result.n_questions_sampled == 298);
    CHECK(result.n_queries > 0);
    CHECK(result.n_users > 0);
    CHECK(result.n_documents > 0);

    for (const char* rel :
         {"corpus.snap", "corpus.stats.json", "sample.tsv", "log.tsv", "qrels.txt",
          "idx_raw/index.bin", "idx_q2a/index.bin", "run_raw.txt", "run_q2a.txt",
          "eval_raw.json", "eval_q2a.json", "eval.txt", "manifest.json",
          "analysis/analysis.json", "analysis/profile_sizes.csv",
          "analysis/topics_per_profile.csv", "analysis/query_ambiguity.csv"}) {
        CAPTURE(rel);
        CHECK(std::filesystem::is_regular_file(tmp / "out" / rel));
    }

    // the written log matches the returned counts
    std::vector<SyntheticQuery> log = read_log_tsv(read_file(tmp / "out" / "log.tsv"));
    CHECK(log.size() == result.n_queries);
    Corpus corpus = load_corpus(tmp / "out" / "corpus.snap");
    std::set<std::int64_t> accounts;
    std::set<std::uint64_t> questions;
    for (const SyntheticQuery& row : log) {
        accounts.insert(row.account_id);
        std::uint32_t forum_idx = 0;
        while (corpus.forums[forum_idx].forum_id != row.forum_id) ++forum_idx;
        questions.insert(make_key(forum_idx, row.source_question_id));
    }
    CHECK(accounts.size() == result.n_users);

    // raw documents are exactly the answers of the logged questions
    std::size_t expected_docs = 0;
    for (std::uint64_t q : questions) expected_docs += corpus.answers_of.at(q).size();
    CHECK(result.n_documents == expected_docs);

    // every logged query is graded
    std::vector<QrelRow> qrels = read_qrels(read_file(tmp / "out" / "qrels.txt"));
    std::set<std::uint64_t> graded;
    for (const QrelRow& row : qrels) graded.insert(row.query_id);
    CHECK(graded.size() == log.size());

    CHECK(result.eval_raw.n_users == result.n_users);
    CHECK(result.eval_q2a.n_users == result.n_users);
    CHECK(result.eval_raw.map_score > 0.0);
    CHECK(result.eval_raw.map_score <= 1.0);
    CHECK(result.eval_q2a.map_score > 0.0);
    CHECK(result.eval_q2a.map_score <= 1.0);

    // the manifest records a checksum for every artifact
    std::string manifest = read_file(tmp / "out" / "manifest.json");
    CHECK(manifest.find("\"config_fnv64\"") != std::string::npos);
    CHECK(manifest.find("\"log.tsv\"") != std::string::npos);
    CHECK(manifest.find("\"idx_q2a/index.bin\"") != std::string::npos);
    CHECK(manifest.find("\"analysis/query_ambiguity.csv\"") != std::string::npos);

    // a rerun with the same config and input is byte-identical
    PipelineConfig again = config;
    again.out_dir = (tmp / "out2").string();
    run_pipeline(again);
    for (const char* rel :
         {"corpus.snap", "sample.tsv", "log.tsv", "qrels.txt", "idx_raw/index.bin",
          "idx_q2a/index.bin", "run_raw.txt", "run_q2a.txt", "eval_raw.json",
          "eval_q2a.json", "eval.txt", "analysis/analysis.json"}) {
        CAPTURE(rel);
        CHECK(read_file(tmp / "out" / rel) == read_file(tmp / "out2" / rel));
    }

    // a different seed yields a different log
    PipelineConfig other = config;
    other.seed = 12;
    other.out_dir = (tmp / "out3").string();
    run_pipeline(other);
    CHECK(read_file(tmp / "out" / "log.tsv") != read_file(tmp / "out3" / "log.tsv"));
}

TEST_CASE("run_pipeline honors forum sampling and rejects bad inputs") {
    TmpDir tmp;
    write_synthetic_dump(tmp / "dump", DumpSpec{});

    PipelineConfig config = pipeline_config(tmp / "dump", tmp / "sampled");
    config.sample_forums = 2;
    config.sample_questions_per_forum = 30;
    config.min_user_queries = 1;
    PipelineResult result = run_pipeline(config);
    CHECK(result.n_questions_sampled == 60);

    std::string sample = read_file(tmp / "sampled" / "sample.tsv");
    std::set<std::string> forums;
    std::size_t rows = 0;
    std::size_t start = 0;
    while (start < sample.size()) {
        std::size_t end = sample.find('\n', start);
        forums.insert(sample.substr(start, sample.find('\t', start) - start));
        start = end + 1;
        ++rows;
    }
    CHECK(rows == 60);
    CHECK(forums.size() == 2);

    PipelineConfig missing = pipeline_config(tmp / "nowhere", tmp / "x");
    CHECK_THROWS_AS(run_pipeline(missing), ConfigError);
}
