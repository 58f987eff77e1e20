#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cqalog/analysis.hpp"
#include "cqalog/dump.hpp"
#include "cqalog/errors.hpp"
#include "cqalog/eval.hpp"
#include "cqalog/index.hpp"
#include "cqalog/io.hpp"
#include "cqalog/pipeline.hpp"
#include "cqalog/ranker.hpp"
#include "cqalog/snapshot.hpp"
#include "cqalog/synthesis.hpp"
#include "cqalog/term_stats.hpp"
#include "cqalog/trec.hpp"

namespace {

using namespace cqalog;

constexpr const char* kVersionText =
    "cqalog 0.1.0 (corpus.snap CQAC v1, index CQIX v1, config schema v1, model json v1)";

std::uint32_t forum_index(const Corpus& corpus, const std::string& forum_id) {
    for (std::uint32_t i = 0; i < corpus.forums.size(); ++i)
        if (corpus.forums[i].forum_id == forum_id) return i;
    throw ConfigError("forum '" + forum_id + "' is not in the corpus");
}

// sample.tsv: forum_id <tab> question_id
std::vector<std::uint64_t> read_sample_tsv(const Corpus& corpus, const std::string& path) {
    std::string contents = read_file(path);
    std::vector<std::uint64_t> keys;
    std::size_t start = 0, line_no = 0;
    while (start < contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string::npos) end = contents.size();
        std::string line = contents.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw FormatError("sample line " + std::to_string(line_no) + ": expected 2 columns");
        std::uint32_t fi = forum_index(corpus, line.substr(0, tab));
        keys.push_back(make_key(fi, std::stoll(line.substr(tab + 1))));
    }
    return keys;
}

void resolve_log_keys(const Corpus& corpus, std::vector<SyntheticQuery>& log) {
    for (SyntheticQuery& row : log)
        row.question_key = make_key(forum_index(corpus, row.forum_id), row.source_question_id);
}

TermStats corpus_term_stats(const Corpus& corpus, const Lexicon& lexicon) {
    TermStats stats;
    for (const auto& [key, post] : corpus.posts) {
        std::string text;
        if (post.type == PostType::question) {
            text = strip_html(post.title);
            std::string body = strip_html(post.body);
            if (!text.empty() && !body.empty()) text += ' ';
            text += body;
        } else {
            text = strip_html(post.body);
        }
        stats.add_document(tokenize(text, lexicon));
    }
    return stats;
}

// df over the distinct questions appearing in a pairs dataset
TermStats pairs_term_stats(const std::vector<QuestionQueryPair>& pairs) {
    TermStats stats;
    std::map<std::string, const QuestionQueryPair*> distinct;
    for (const QuestionQueryPair& pair : pairs)
        distinct.emplace(pair.forum_id + '\x1f' + pair.title + '\x1f' + pair.body, &pair);
    for (const auto& [key, pair] : distinct) stats.add_document(pair->question_tokens);
    return stats;
}

int cmd_ingest(const std::string& dump_dir, const std::string& exclude_path,
               const std::string& out, const std::string& stats_out,
               const std::string& jsonl_out, int threads) {
    ExclusionList excluded;
    if (!exclude_path.empty()) excluded = load_exclusion_list(exclude_path);
    IngestReport report;
    auto dumps = ingest_dump(dump_dir, excluded, threads, &report);
    Corpus corpus = link_corpus(std::move(dumps));
    for (const std::string& forum_id : report.excluded) {
        Forum forum;
        forum.forum_id = forum_id;
        forum.excluded = true;
        forum.excluded_reason = excluded.reasons.at(forum_id);
        corpus.forums.push_back(std::move(forum));
    }
    save_corpus(corpus, out);
    if (!stats_out.empty()) write_file_atomic(stats_out, corpus_stats_json(corpus));
    if (!jsonl_out.empty()) export_corpus_jsonl(corpus, jsonl_out);
    std::printf("ingested %zu posts across %zu forums -> %s\n", corpus.posts.size(),
                corpus.forums.size(), out.c_str());
    return 0;
}

int cmd_sample(const std::string& corpus_path, std::uint64_t min_forum_questions,
               std::uint64_t min_other_answers, std::uint64_t forums,
               std::uint64_t per_forum, std::uint64_t seed, const std::string& out) {
    Corpus corpus = load_corpus(corpus_path);
    FilterPolicy policy{min_forum_questions, min_other_answers};
    std::vector<std::uint64_t> eligible = filter_questions(corpus, policy);
    std::vector<std::uint64_t> sampled =
        forums > 0 ? sample_questions(group_by_forum(eligible), forums, per_forum, seed)
                   : eligible;
    std::string tsv;
    for (std::uint64_t q : sampled) {
        tsv += corpus.forum_of(q).forum_id;
        tsv += '\t';
        tsv += std::to_string(key_post(q));
        tsv += '\n';
    }
    write_file_atomic(out, tsv);
    std::printf("sampled %zu of %zu eligible questions -> %s\n", sampled.size(), eligible.size(),
                out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic query log derivation from CQA dumps"};
    app.set_version_flag("--version", kVersionText);
    app.require_subcommand(1);

    try {
        // ingest
        auto* ingest = app.add_subcommand("ingest", "parse a dump directory into corpus.snap");
        std::string dump_dir, exclude_path, snap_out, stats_out, jsonl_out;
        int threads = 1;
        ingest->add_option("--dump-dir", dump_dir, "directory of per-forum dump folders")
            ->required();
        ingest->add_option("--exclude-forums", exclude_path, "forum exclusion list file");
        ingest->add_option("--out", snap_out, "corpus snapshot output")->required();
        ingest->add_option("--stats", stats_out, "corpus.stats.json output");
        ingest->add_option("--jsonl", jsonl_out, "JSON-lines debug export");
        ingest->add_option("--threads", threads, "parallel forum parsers");

        // sample
        auto* sample = app.add_subcommand("sample", "filter and sample questions");
        std::string s_corpus, s_out;
        std::uint64_t s_minq = 100, s_mino = 5, s_forums = 0, s_per = 0, s_seed = 1;
        sample->add_option("--corpus", s_corpus)->required();
        sample->add_option("--min-forum-questions", s_minq);
        sample->add_option("--min-other-answers", s_mino);
        sample->add_option("--forums", s_forums, "forums to draw (0 = keep all)");
        sample->add_option("--per-forum", s_per, "questions per drawn forum");
        sample->add_option("--seed", s_seed);
        sample->add_option("--out", s_out)->required();

        // derive
        auto* derive = app.add_subcommand("derive", "derive the query log and qrels");
        std::string d_corpus, d_sample, d_dist = "uniform:1:5", d_strategy = "tfidf_top";
        std::string d_idf = "smoothed", d_sampling = "per_question", d_log, d_qrels;
        std::uint64_t d_minu = 100, d_seed = 1, d_neg = 0, d_minq = 100, d_mino = 5;
        derive->add_option("--corpus", d_corpus)->required();
        derive->add_option("--sample", d_sample, "sample.tsv (default: all eligible)");
        derive->add_option("--length-dist", d_dist, "uniform:<a>:<b> or a pmf file");
        derive->add_option("--min-user-queries", d_minu);
        derive->add_option("--min-forum-questions", d_minq);
        derive->add_option("--min-other-answers", d_mino);
        derive->add_option("--seed", d_seed);
        derive->add_option("--strategy", d_strategy, "tfidf_top or ranker:<model.json>");
        derive->add_option("--idf-variant", d_idf, "smoothed or raw");
        derive->add_option("--length-sampling", d_sampling, "per_question or per_event");
        derive->add_option("--negatives", d_neg, "materialized grade-0 rows per query");
        derive->add_option("--out-log", d_log)->required();
        derive->add_option("--out-qrels", d_qrels)->required();

        // index
        auto* index_cmd = app.add_subcommand("index", "build an inverted index");
        std::string i_corpus, i_variant = "raw", i_log, i_out;
        double i_mu = 2500;
        index_cmd->add_option("--corpus", i_corpus)->required();
        index_cmd->add_option("--variant", i_variant, "raw or q2a");
        index_cmd->add_option("--mu", i_mu, "Dirichlet prior");
        index_cmd->add_option("--log", i_log, "restrict documents to this log's questions");
        index_cmd->add_option("--out", i_out, "index directory")->required();

        // search
        auto* search_cmd = app.add_subcommand("search", "run log queries against an index");
        std::string q_index, q_log, q_out, q_tag = "cqalog";
        std::uint64_t q_k = 100;
        search_cmd->add_option("--index", q_index)->required();
        search_cmd->add_option("--log", q_log)->required();
        search_cmd->add_option("--k", q_k);
        search_cmd->add_option("--tag", q_tag);
        search_cmd->add_option("--out", q_out)->required();

        // eval
        auto* eval_cmd = app.add_subcommand("eval", "MAP/MRR with user-macro averaging");
        std::string e_run, e_qrels, e_log, e_out, e_label = "run";
        eval_cmd->add_option("--run", e_run)->required();
        eval_cmd->add_option("--qrels", e_qrels)->required();
        eval_cmd->add_option("--log", e_log)->required();
        eval_cmd->add_option("--label", e_label);
        eval_cmd->add_option("--out", e_out, "eval.json output");

        // train-ranker
        auto* train_cmd = app.add_subcommand("train-ranker", "train the question-word ranker");
        std::string t_pairs, t_scope = "global", t_out, t_objective = "logistic";
        std::string t_idf = "smoothed";
        double t_lr = 0.1, t_l2 = 1e-4;
        std::uint64_t t_epochs = 2000;
        train_cmd->add_option("--pairs", t_pairs)->required();
        train_cmd->add_option("--scope", t_scope, "global or per-user");
        train_cmd->add_option("--lr", t_lr);
        train_cmd->add_option("--epochs", t_epochs);
        train_cmd->add_option("--l2", t_l2);
        train_cmd->add_option("--objective", t_objective, "logistic or hinge");
        train_cmd->add_option("--idf-variant", t_idf);
        train_cmd->add_option("--out", t_out)->required();

        // rank-words
        auto* rank_cmd = app.add_subcommand("rank-words", "rank a question's words by a model");
        std::string r_model, r_question, r_title, r_pairs;
        rank_cmd->add_option("--model", r_model)->required();
        rank_cmd->add_option("--question", r_question, "file holding the question body")
            ->required();
        rank_cmd->add_option("--title", r_title, "question title text");
        rank_cmd->add_option("--pairs", r_pairs, "pairs.tsv supplying df statistics");

        // analyze
        auto* analyze_cmd = app.add_subcommand("analyze", "descriptive statistics");
        std::string a_pairs, a_log, a_index, a_out;
        analyze_cmd->add_option("--pairs", a_pairs, "question-query pairs.tsv");
        analyze_cmd->add_option("--log", a_log, "derived log.tsv");
        analyze_cmd->add_option("--index", a_index, "index dir for document lengths");
        analyze_cmd->add_option("--out", a_out, "output directory")->required();

        // run
        auto* run_cmd = app.add_subcommand("run", "full pipeline from a config file");
        std::string run_config, run_out_dir, run_dump_dir;
        run_cmd->add_option("--config", run_config)->required();
        run_cmd->add_option("--out-dir", run_out_dir, "override out_dir");
        run_cmd->add_option("--dump-dir", run_dump_dir, "override dump_dir");

        CLI11_PARSE(app, argc, argv);

        if (*ingest)
            return cmd_ingest(dump_dir, exclude_path, snap_out, stats_out, jsonl_out, threads);

        if (*sample) return cmd_sample(s_corpus, s_minq, s_mino, s_forums, s_per, s_seed, s_out);

        if (*derive) {
            Corpus corpus = load_corpus(d_corpus);
            std::vector<std::uint64_t> questions =
                d_sample.empty()
                    ? filter_questions(corpus, FilterPolicy{d_minq, d_mino})
                    : read_sample_tsv(corpus, d_sample);
            const Lexicon& lexicon = Lexicon::builtin();
            TermStats stats = corpus_term_stats(corpus, lexicon);
            IdfVariant variant = parse_idf_variant(d_idf);
            CandidateScorer scorer;
            RankModel model;
            if (d_strategy == "tfidf_top") {
                scorer = tfidf_scorer(stats, variant);
            } else if (d_strategy.rfind("ranker:", 0) == 0) {
                model = load_model(d_strategy.substr(7));
                scorer = ranker_scorer(model, stats, variant);
            } else {
                throw ConfigError("strategy must be tfidf_top or ranker:<model path>");
            }
            BuildLogOptions options;
            options.dist = LengthDistribution::parse_spec(d_dist);
            options.seed = d_seed;
            if (d_sampling == "per_event")
                options.sampling = LengthSampling::per_event;
            else if (d_sampling != "per_question")
                throw ConfigError("length_sampling must be per_question or per_event");
            BuildLogResult built = build_log(corpus, questions, lexicon, scorer, options);
            std::vector<SyntheticQuery> log = retain_users(std::move(built.log), d_minu);
            assign_query_ids(log);
            std::vector<QrelRow> qrels = derive_qrels(corpus, log, d_neg, d_seed);
            write_file_atomic(d_log, write_log_tsv(log));
            write_file_atomic(d_qrels, write_qrels(qrels));
            std::printf("derived %zu queries (%zu qrels rows) -> %s, %s\n", log.size(),
                        qrels.size(), d_log.c_str(), d_qrels.c_str());
            return 0;
        }

        if (*index_cmd) {
            Corpus corpus = load_corpus(i_corpus);
            std::vector<std::uint64_t> questions;
            if (!i_log.empty()) {
                std::vector<SyntheticQuery> log = read_log_tsv(read_file(i_log));
                resolve_log_keys(corpus, log);
                for (const SyntheticQuery& row : log) questions.push_back(row.question_key);
            } else {
                for (const auto& [q, answers] : corpus.answers_of) questions.push_back(q);
            }
            IndexVariant variant = parse_index_variant(i_variant);
            auto docs = collect_documents(corpus, questions, variant);
            InvertedIndex index = build_index(docs, variant, i_mu);
            save_index(index, i_out);
            std::printf("indexed %zu documents, %zu terms -> %s\n", index.doc_ids.size(),
                        index.postings.size(), i_out.c_str());
            return 0;
        }

        if (*search_cmd) {
            InvertedIndex index = load_index(q_index);
            std::vector<SyntheticQuery> log = read_log_tsv(read_file(q_log));
            std::vector<RunEntry> entries;
            std::uint64_t empty = 0;
            for (const SyntheticQuery& row : log) {
                SearchResult found = search(index, row.terms, q_k, row.query_id, q_tag);
                if (found.empty_query) ++empty;
                entries.insert(entries.end(), found.entries.begin(), found.entries.end());
            }
            write_file_atomic(q_out, write_run(entries));
            std::printf("searched %zu queries (%llu empty after term dropping) -> %s\n",
                        log.size(), static_cast<unsigned long long>(empty), q_out.c_str());
            return 0;
        }

        if (*eval_cmd) {
            std::vector<RunEntry> run = read_run(read_file(e_run));
            std::vector<QrelRow> qrels = read_qrels(read_file(e_qrels));
            std::vector<SyntheticQuery> log = read_log_tsv(read_file(e_log));
            EvalReport report = evaluate(run, qrels, query_user_map(log));
            if (!e_out.empty()) write_file_atomic(e_out, eval_report_json(report, e_label));
            std::fputs(eval_table_text({{e_label, report}}).c_str(), stdout);
            return 0;
        }

        if (*train_cmd) {
            std::vector<QuestionQueryPair> pairs = read_pairs_tsv(read_file(t_pairs));
            TermStats stats = pairs_term_stats(pairs);
            IdfVariant variant = parse_idf_variant(t_idf);
            TrainOptions options;
            options.lr = t_lr;
            options.epochs = static_cast<std::uint32_t>(t_epochs);
            options.l2 = t_l2;
            if (t_objective == "hinge")
                options.objective = Objective::pairwise_hinge;
            else if (t_objective != "logistic")
                throw ConfigError("objective must be logistic or hinge");

            if (t_scope == "global") {
                std::vector<PairInstances> data;
                for (const QuestionQueryPair& pair : pairs)
                    data.push_back(featurize(pair, stats, variant));
                TrainResult trained = train(data, options, "global");
                save_model(trained.model, t_out);
                std::printf("trained global model (final loss %.6f) -> %s\n",
                            trained.loss_history.back(), t_out.c_str());
            } else if (t_scope == "per-user") {
                std::map<std::string, std::vector<PairInstances>> by_annotator;
                for (const QuestionQueryPair& pair : pairs)
                    by_annotator[pair.annotator_id].push_back(featurize(pair, stats, variant));
                std::vector<RankModel> models;
                for (const auto& [annotator, data] : by_annotator)
                    models.push_back(train(data, options, annotator).model);
                write_file_atomic(t_out, models_to_json(models));
                std::printf("trained %zu per-user models -> %s\n", models.size(), t_out.c_str());
            } else {
                throw ConfigError("scope must be global or per-user");
            }
            return 0;
        }

        if (*rank_cmd) {
            RankModel model = load_model(r_model);
            std::string body = read_file(r_question);
            QuestionQueryPair pair = make_pair("q", "cli", "", r_title, body, "");
            TermStats stats;
            if (!r_pairs.empty()) {
                stats = pairs_term_stats(read_pairs_tsv(read_file(r_pairs)));
            } else {
                stats.add_document(pair.question_tokens);
            }
            for (const RankedWord& word : rank_words(model, pair, stats))
                std::printf("%s\t%.6f\n", word.stem.c_str(), word.score);
            return 0;
        }

        if (*analyze_cmd) {
            if (a_pairs.empty() && a_log.empty())
                throw ConfigError("analyze needs --pairs and/or --log");
            PairStats pstats;
            AgreementReport agreement;
            CorpusStats cstats;
            bool have_pairs = !a_pairs.empty(), have_log = !a_log.empty();
            if (have_pairs) {
                std::vector<QuestionQueryPair> pairs = read_pairs_tsv(read_file(a_pairs));
                pstats = pair_stats(pairs);
                agreement = agreement_report(pairs);
            }
            if (have_log) {
                std::vector<SyntheticQuery> log = read_log_tsv(read_file(a_log));
                std::vector<std::uint32_t> doc_lens;
                if (!a_index.empty()) doc_lens = load_index(a_index).doc_lens;
                cstats = corpus_stats(log, doc_lens);
            }
            write_analysis(a_out, have_log ? &cstats : nullptr, have_pairs ? &pstats : nullptr,
                           have_pairs ? &agreement : nullptr);
            std::printf("analysis written to %s\n", a_out.c_str());
            return 0;
        }

        if (*run_cmd) {
            PipelineConfig config = load_config_file(run_config);
            if (const char* env = std::getenv("CQALOG_DUMP_DIR")) config.dump_dir = env;
            if (const char* env = std::getenv("CQALOG_OUT_DIR")) config.out_dir = env;
            if (!run_dump_dir.empty()) config.dump_dir = run_dump_dir;
            if (!run_out_dir.empty()) config.out_dir = run_out_dir;
            PipelineResult result = run_pipeline(config);
            std::printf(
                "pipeline complete: %llu questions, %llu queries, %llu users, %llu documents\n",
                static_cast<unsigned long long>(result.n_questions_sampled),
                static_cast<unsigned long long>(result.n_queries),
                static_cast<unsigned long long>(result.n_users),
                static_cast<unsigned long long>(result.n_documents));
            std::printf("raw MAP %.4f MRR %.4f | q2a MAP %.4f MRR %.4f\n",
                        result.eval_raw.map_score, result.eval_raw.mrr_score,
                        result.eval_q2a.map_score, result.eval_q2a.mrr_score);
            return 0;
        }
    } catch (const cqalog::Error& e) {
        std::fprintf(stderr, "cqalog: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cqalog: %s\n", e.what());
        return 1;
    }
    return 0;
}
