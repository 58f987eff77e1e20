#include "cqalog/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "cqalog/analysis.hpp"
#include "cqalog/dump.hpp"
#include "cqalog/errors.hpp"
#include "cqalog/index.hpp"
#include "cqalog/io.hpp"
#include "cqalog/ranker.hpp"
#include "cqalog/rng.hpp"
#include "cqalog/snapshot.hpp"
#include "cqalog/synthesis.hpp"
#include "cqalog/term_stats.hpp"
#include "cqalog/trec.hpp"

namespace cqalog {
namespace {

constexpr std::uint64_t kSchemaVersion = 1;

std::string trim(std::string_view s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

std::uint64_t to_u64(const std::string& value, const std::string& key) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError(key + " must be a non-negative integer, got '" + value + "'");
    return v;
}

double to_f64(const std::string& value, const std::string& key) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size())
        throw ConfigError(key + " must be a number, got '" + value + "'");
    return v;
}

std::string fnv_hex(const std::string& bytes) {
    std::uint64_t h = fnv1a64(bytes);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

PipelineConfig parse_config(std::string_view contents) {
    PipelineConfig config;
    bool saw_version = false;
    std::size_t start = 0, line_no = 0;
    while (start <= contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view raw = contents.substr(start, end - start);
        bool last = end == contents.size();
        start = end + 1;
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::string text = trim(line);
        if (text.empty()) {
            if (last) break;
            continue;
        }
        std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(std::string_view(text).substr(0, eq));
        std::string value = unquote(trim(std::string_view(text).substr(eq + 1)));

        if (key == "schema_version") {
            if (to_u64(value, key) != kSchemaVersion)
                throw ConfigError("unsupported schema_version " + value);
            saw_version = true;
        } else if (key == "dump_dir") {
            config.dump_dir = value;
        } else if (key == "excluded_forums") {
            config.excluded_forums = value;
        } else if (key == "min_forum_questions") {
            config.min_forum_questions = to_u64(value, key);
        } else if (key == "min_other_answers") {
            config.min_other_answers = to_u64(value, key);
        } else if (key == "length_dist") {
            config.length_dist = value;
        } else if (key == "min_user_queries") {
            config.min_user_queries = to_u64(value, key);
        } else if (key == "mu") {
            config.mu = to_f64(value, key);
        } else if (key == "k") {
            config.k = to_u64(value, key);
        } else if (key == "seed") {
            config.seed = to_u64(value, key);
        } else if (key == "idf_variant") {
            config.idf_variant = value;
        } else if (key == "strategy") {
            config.strategy = value;
        } else if (key == "length_sampling") {
            config.length_sampling = value;
        } else if (key == "materialize_negatives") {
            config.materialize_negatives = to_u64(value, key);
        } else if (key == "sample_forums") {
            config.sample_forums = to_u64(value, key);
        } else if (key == "sample_questions_per_forum") {
            config.sample_questions_per_forum = to_u64(value, key);
        } else if (key == "threads") {
            config.threads = to_u64(value, key);
        } else if (key == "out_dir") {
            config.out_dir = value;
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
        if (last) break;
    }
    if (!saw_version) throw ConfigError("config is missing schema_version");
    return config;
}

std::string serialize_config(const PipelineConfig& config) {
    std::string out;
    auto put_str = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = \"";
        out += value;
        out += "\"\n";
    };
    auto put_u64 = [&out](const char* key, std::uint64_t value) {
        out += key;
        out += " = ";
        out += std::to_string(value);
        out += '\n';
    };
    out += "schema_version = " + std::to_string(kSchemaVersion) + "\n";
    put_str("dump_dir", config.dump_dir);
    put_str("excluded_forums", config.excluded_forums);
    put_u64("min_forum_questions", config.min_forum_questions);
    put_u64("min_other_answers", config.min_other_answers);
    put_str("length_dist", config.length_dist);
    put_u64("min_user_queries", config.min_user_queries);
    char buf[40];
    std::snprintf(buf, sizeof buf, "mu = %.17g\n", config.mu);
    out += buf;
    put_u64("k", config.k);
    put_u64("seed", config.seed);
    put_str("idf_variant", config.idf_variant);
    put_str("strategy", config.strategy);
    put_str("length_sampling", config.length_sampling);
    put_u64("materialize_negatives", config.materialize_negatives);
    put_u64("sample_forums", config.sample_forums);
    put_u64("sample_questions_per_forum", config.sample_questions_per_forum);
    put_u64("threads", config.threads);
    put_str("out_dir", config.out_dir);
    return out;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
    return parse_config(read_file(path));
}

void validate_config(const PipelineConfig& config) {
    if (config.dump_dir.empty()) throw ConfigError("dump_dir is required");
    if (config.out_dir.empty()) throw ConfigError("out_dir is required");
    if (config.k < 1) throw ConfigError("k must be >= 1");
    if (config.mu < 0) throw ConfigError("mu must be >= 0");
    parse_idf_variant(config.idf_variant);
    if (config.length_sampling != "per_question" && config.length_sampling != "per_event")
        throw ConfigError("length_sampling must be per_question or per_event");
    if (config.strategy != "tfidf_top" && config.strategy.rfind("ranker:", 0) != 0)
        throw ConfigError("strategy must be tfidf_top or ranker:<model path>");
    if (config.sample_forums > 0 && config.sample_questions_per_forum == 0)
        throw ConfigError("sample_forums needs sample_questions_per_forum > 0");
    LengthDistribution::parse_spec(config.length_dist);  // throws on bad spec
}

namespace {

struct Artifacts {
    std::map<std::string, std::string> checksums;  // rel path -> fnv64 hex
    std::filesystem::path root;

    void write(const std::string& rel, const std::string& bytes) {
        write_file_atomic(root / rel, bytes);
        checksums[rel] = fnv_hex(bytes);
    }
};

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string("stage ") + name + ": " + e.what());
    }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    validate_config(config);
    if (!std::filesystem::is_directory(config.dump_dir))
        throw ConfigError("dump_dir does not exist: " + config.dump_dir);

    Artifacts artifacts;
    artifacts.root = config.out_dir;
    std::filesystem::create_directories(artifacts.root);
    const Lexicon& lexicon = Lexicon::builtin();
    IdfVariant idf_variant = parse_idf_variant(config.idf_variant);
    LengthDistribution dist = LengthDistribution::parse_spec(config.length_dist);

    // ingest
    Corpus corpus = stage("ingest", [&] {
        ExclusionList excluded;
        if (!config.excluded_forums.empty())
            excluded = load_exclusion_list(config.excluded_forums);
        IngestReport report;
        auto dumps = ingest_dump(config.dump_dir, excluded,
                                 static_cast<int>(config.threads), &report);
        Corpus linked = link_corpus(std::move(dumps));
        for (const std::string& forum_id : report.excluded) {
            Forum forum;
            forum.forum_id = forum_id;
            forum.excluded = true;
            forum.excluded_reason = excluded.reasons.at(forum_id);
            linked.forums.push_back(std::move(forum));  // appended: no posts reference it
        }
        return linked;
    });
    stage("ingest", [&] {
        artifacts.write("corpus.snap", serialize_corpus(corpus));
        artifacts.write("corpus.stats.json", corpus_stats_json(corpus));
        return 0;
    });

    // filter + sample
    std::vector<std::uint64_t> sampled = stage("sample", [&] {
        FilterPolicy policy{config.min_forum_questions, config.min_other_answers};
        std::vector<std::uint64_t> eligible = filter_questions(corpus, policy);
        if (config.sample_forums == 0) return eligible;
        return sample_questions(group_by_forum(eligible), config.sample_forums,
                                config.sample_questions_per_forum, config.seed);
    });
    stage("sample", [&] {
        std::string tsv;
        for (std::uint64_t q : sampled) {
            tsv += corpus.forum_of(q).forum_id;
            tsv += '\t';
            tsv += std::to_string(key_post(q));
            tsv += '\n';
        }
        artifacts.write("sample.tsv", tsv);
        return 0;
    });

    // term statistics over every question and answer in the corpus
    TermStats stats = stage("derive", [&] {
        TermStats s;
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
            s.add_document(tokenize(text, lexicon));
        }
        return s;
    });

    // derive the log and qrels
    std::vector<SyntheticQuery> log = stage("derive", [&] {
        CandidateScorer scorer;
        RankModel model;
        if (config.strategy == "tfidf_top") {
            scorer = tfidf_scorer(stats, idf_variant);
        } else {
            model = load_model(config.strategy.substr(7));
            scorer = ranker_scorer(model, stats, idf_variant);
        }
        BuildLogOptions options;
        options.dist = dist;
        options.seed = config.seed;
        options.sampling = config.length_sampling == "per_event" ? LengthSampling::per_event
                                                                 : LengthSampling::per_question;
        BuildLogResult built = build_log(corpus, sampled, lexicon, scorer, options);
        std::vector<SyntheticQuery> retained =
            retain_users(std::move(built.log), config.min_user_queries);
        assign_query_ids(retained);
        return retained;
    });
    std::vector<QrelRow> qrels = stage("derive", [&] {
        return derive_qrels(corpus, log, config.materialize_negatives, config.seed);
    });
    stage("derive", [&] {
        artifacts.write("log.tsv", write_log_tsv(log));
        artifacts.write("qrels.txt", write_qrels(qrels));
        return 0;
    });

    // index + search + eval for both variants
    std::vector<std::uint64_t> log_questions;
    for (const SyntheticQuery& row : log) log_questions.push_back(row.question_key);
    std::sort(log_questions.begin(), log_questions.end());
    log_questions.erase(std::unique(log_questions.begin(), log_questions.end()),
                        log_questions.end());

    PipelineResult result;
    result.out_dir = artifacts.root;
    result.n_questions_sampled = sampled.size();
    result.n_queries = log.size();
    std::set<std::int64_t> accounts;
    for (const SyntheticQuery& row : log) accounts.insert(row.account_id);
    result.n_users = accounts.size();

    std::map<std::uint64_t, std::int64_t> users = query_user_map(log);
    std::vector<std::pair<std::string, EvalReport>> table;
    std::vector<std::uint32_t> raw_doc_lens;
    for (IndexVariant variant : {IndexVariant::raw, IndexVariant::q2a}) {
        std::string name(index_variant_name(variant));
        InvertedIndex index = stage("index", [&] {
            auto docs = collect_documents(corpus, log_questions, variant, lexicon);
            return build_index(docs, variant, config.mu);
        });
        stage("index", [&] {
            std::filesystem::create_directories(artifacts.root / ("idx_" + name));
            artifacts.write("idx_" + name + "/index.bin", serialize_index(index));
            return 0;
        });
        if (variant == IndexVariant::raw) {
            result.n_documents = index.doc_ids.size();
            raw_doc_lens = index.doc_lens;
        }

        std::vector<RunEntry> run = stage("search", [&] {
            std::vector<RunEntry> entries;
            for (const SyntheticQuery& row : log) {
                SearchResult found = search(index, row.terms, config.k, row.query_id, name);
                entries.insert(entries.end(), found.entries.begin(), found.entries.end());
            }
            return entries;
        });
        stage("search", [&] {
            artifacts.write("run_" + name + ".txt", write_run(run));
            return 0;
        });

        EvalReport report = stage("eval", [&] { return evaluate(run, qrels, users); });
        stage("eval", [&] {
            artifacts.write("eval_" + name + ".json", eval_report_json(report, name));
            return 0;
        });
        table.emplace_back(name, report);
        (variant == IndexVariant::raw ? result.eval_raw : result.eval_q2a) = report;
    }
    stage("eval", [&] {
        artifacts.write("eval.txt", eval_table_text(table));
        return 0;
    });

    // analysis
    stage("analyze", [&] {
        CorpusStats cstats = corpus_stats(log, raw_doc_lens);
        write_analysis(artifacts.root / "analysis", &cstats, nullptr, nullptr);
        std::string json = read_file(artifacts.root / "analysis" / "analysis.json");
        artifacts.checksums["analysis/analysis.json"] = fnv_hex(json);
        for (const char* csv :
             {"profile_sizes.csv", "topics_per_profile.csv", "query_ambiguity.csv"})
            artifacts.checksums[std::string("analysis/") + csv] =
                fnv_hex(read_file(artifacts.root / "analysis" / csv));
        return 0;
    });

    // manifest written last so its presence marks a complete run
    stage("manifest", [&] {
        nlohmann::json files = nlohmann::json::object();
        for (const auto& [rel, sum] : artifacts.checksums) files[rel] = sum;
        nlohmann::json doc{
            {"schema_version", kSchemaVersion},
            {"config_fnv64", fnv_hex(serialize_config(config))},
            {"seed", config.seed},
            {"artifacts", files},
        };
        write_file_atomic(artifacts.root / "manifest.json", doc.dump(2) + "\n");
        return 0;
    });
    return result;
}

}  // namespace cqalog
