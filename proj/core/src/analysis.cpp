#include "cqalog/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "cqalog/io.hpp"
#include "cqalog/rng.hpp"

namespace cqalog {
namespace {

struct MeanSd {
    double mean = 0, sd = 0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    double sum = 0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(var / static_cast<double>(xs.size()));  // population sd
    return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        std::size_t j = i;
        while (j + 1 < text.size() &&
               (text[j + 1] == '.' || text[j + 1] == '!' || text[j + 1] == '?'))
            ++j;
        bool at_end = j + 1 >= text.size();
        if (!at_end && !std::isspace(static_cast<unsigned char>(text[j + 1]))) {
            i = j;
            continue;  // e.g. "3.14" or "e.g" mid-word
        }
        sentences.push_back(text.substr(start, j + 1 - start));
        i = j;
        start = std::min(j + 2, text.size());
    }
    if (start < text.size()) sentences.push_back(text.substr(start));
    return sentences;
}

double coverage(const TokenizedText& tokens, const std::set<std::string>& query_set) {
    if (tokens.empty()) return -1;  // undefined
    std::size_t used = 0;
    for (const Token& token : tokens.tokens) used += query_set.count(token.stem);
    return static_cast<double>(used) / static_cast<double>(tokens.size());
}

}  // namespace

PairStats pair_stats(const std::vector<QuestionQueryPair>& pairs, const Lexicon& lexicon) {
    PairStats stats;
    stats.n_pairs = pairs.size();
    if (pairs.empty()) return stats;

    std::uint64_t title_chosen = 0;
    double title_cov_sum = 0, first_cov_sum = 0, last_cov_sum = 0;
    std::uint64_t title_n = 0, first_n = 0, last_n = 0;
    std::uint64_t query_tokens = 0, own_words = 0, content_words = 0;
    double tfq_sum = 0, tfn_sum = 0;
    std::uint64_t tfq_n = 0, tfn_n = 0;
    std::array<double, 10> decile{};
    std::uint64_t decile_n = 0;

    for (const QuestionQueryPair& pair : pairs) {
        std::set<std::string> query_set(pair.query_stems.begin(), pair.query_stems.end());

        // title coverage over the title's token positions
        TokenizedText title_tokens;
        title_tokens.tokens.assign(pair.question_tokens.tokens.begin(),
                                   pair.question_tokens.tokens.begin() +
                                       static_cast<std::ptrdiff_t>(pair.title_len));
        double tc = coverage(title_tokens, query_set);
        if (tc >= 0) {
            title_cov_sum += tc;
            ++title_n;
            if (tc > 0) ++title_chosen;
        }

        // sentences over title + body, forum name excluded
        std::string title_text = strip_html(pair.title);
        std::string body_text = strip_html(pair.body);
        std::string prose = title_text;
        if (!title_text.empty() && !body_text.empty()) prose += ' ';
        prose += body_text;
        std::vector<std::string> sentences = split_sentences(prose);
        if (!sentences.empty()) {
            double fc = coverage(tokenize(sentences.front(), lexicon), query_set);
            if (fc >= 0) {
                first_cov_sum += fc;
                ++first_n;
            }
            double lc = coverage(tokenize(sentences.back(), lexicon), query_set);
            if (lc >= 0) {
                last_cov_sum += lc;
                ++last_n;
            }
        }

        // per-query-token rates and origin deciles
        std::size_t q_len = pair.question_tokens.size();
        for (std::size_t t = 0; t < pair.query_stems.size(); ++t) {
            ++query_tokens;
            if (pair.own_word_flags[t]) ++own_words;
            if (!lexicon.is_function_word(pair.query_surfaces[t])) ++content_words;
            if (!pair.own_word_flags[t] && q_len > 0) {
                std::size_t first = 0;
                for (std::size_t i = 0; i < q_len; ++i)
                    if (pair.question_tokens.tokens[i].stem == pair.query_stems[t]) {
                        first = i;
                        break;
                    }
                std::size_t bin = std::min<std::size_t>(9, 10 * first / q_len);
                decile[bin] += 1;
                ++decile_n;
            }
        }

        // tf_norm discrimination over question candidate stems
        for (const Candidate& c : question_candidates(pair.question_tokens, pair.title_len)) {
            double tf_norm = static_cast<double>(c.tf) / static_cast<double>(c.question_len);
            if (query_set.count(c.stem)) {
                tfq_sum += tf_norm;
                ++tfq_n;
            } else {
                tfn_sum += tf_norm;
                ++tfn_n;
            }
        }
    }

    if (title_n) {
        stats.title_word_chosen_rate =
            static_cast<double>(title_chosen) / static_cast<double>(title_n);
        stats.title_coverage = title_cov_sum / static_cast<double>(title_n);
    }
    if (first_n) stats.first_sentence_coverage = first_cov_sum / static_cast<double>(first_n);
    if (last_n) stats.last_sentence_coverage = last_cov_sum / static_cast<double>(last_n);
    if (query_tokens) {
        stats.own_word_rate = static_cast<double>(own_words) / static_cast<double>(query_tokens);
        stats.content_fraction =
            static_cast<double>(content_words) / static_cast<double>(query_tokens);
    }
    if (tfq_n) stats.tf_norm_query = tfq_sum / static_cast<double>(tfq_n);
    if (tfn_n) stats.tf_norm_nonquery = tfn_sum / static_cast<double>(tfn_n);
    if (decile_n) {
        stats.decile_defined = true;
        for (double& mass : decile) mass /= static_cast<double>(decile_n);
        stats.decile_mass = decile;
    }
    return stats;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b,
               bool* both_empty) {
    if (both_empty) *both_empty = false;
    if (a.empty() && b.empty()) {
        if (both_empty) *both_empty = true;
        return 1.0;
    }
    std::size_t inter = 0;
    for (const std::string& s : a) inter += b.count(s);
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

AgreementReport agreement_report(const std::vector<QuestionQueryPair>& pairs) {
    AgreementReport report;
    std::map<std::string, std::vector<std::set<std::string>>> groups;
    for (const QuestionQueryPair& pair : pairs) {
        std::string key = pair.forum_id + '\x1f' + pair.title + '\x1f' + pair.body;
        groups[key].push_back(
            std::set<std::string>(pair.query_stems.begin(), pair.query_stems.end()));
    }
    double total = 0;
    for (const auto& [key, queries] : groups) {
        if (queries.size() < 2) continue;
        double sum = 0;
        std::uint64_t n = 0;
        for (std::size_t i = 0; i < queries.size(); ++i)
            for (std::size_t j = i + 1; j < queries.size(); ++j) {
                bool both_empty = false;
                sum += jaccard(queries[i], queries[j], &both_empty);
                if (both_empty) ++report.n_both_empty;
                ++n;
            }
        double mean = sum / static_cast<double>(n);
        report.per_question.emplace_back(key.substr(0, key.find('\x1f')) + ":" +
                                             std::to_string(report.per_question.size()),
                                         mean);
        total += mean;
        ++report.n_questions;
    }
    if (report.n_questions)
        report.mean_jaccard = total / static_cast<double>(report.n_questions);
    return report;
}

std::string Histogram::to_csv(std::string_view value_name, std::string_view count_name) const {
    std::string out;
    out += value_name;
    out += ',';
    out += count_name;
    out += '\n';
    for (const auto& [value, count] : bins) {
        out += std::to_string(value);
        out += ',';
        out += std::to_string(count);
        out += '\n';
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<SyntheticQuery>& log,
                         const std::vector<std::uint32_t>& doc_lens) {
    CorpusStats stats;
    stats.n_queries = log.size();
    stats.n_documents = doc_lens.size();

    std::set<std::string> forums;
    std::map<std::int64_t, std::uint64_t> profile_size;
    std::map<std::int64_t, std::set<std::uint64_t>> profile_topics;
    std::map<std::string, std::set<std::uint64_t>> text_topics;
    std::vector<double> query_lens;
    query_lens.reserve(log.size());
    for (const SyntheticQuery& row : log) {
        forums.insert(row.forum_id);
        ++profile_size[row.account_id];
        // Logs loaded from TSV carry no question_key; post ids repeat across
        // forums, so fold the forum into the fallback topic key.
        std::uint64_t topic =
            row.question_key != 0
                ? row.question_key
                : fnv1a64_u64(static_cast<std::uint64_t>(row.source_question_id),
                              fnv1a64(row.forum_id));
        profile_topics[row.account_id].insert(topic);
        std::string text;
        for (std::size_t i = 0; i < row.terms.size(); ++i) {
            if (i) text += ' ';
            text += row.terms[i];
        }
        text_topics[text].insert(topic);
        query_lens.push_back(static_cast<double>(row.terms.size()));
    }
    stats.n_users = profile_size.size();
    stats.n_forums = forums.size();
    stats.n_distinct_queries = text_topics.size();

    MeanSd q = mean_sd(query_lens);
    stats.mean_query_len = q.mean;
    stats.sd_query_len = q.sd;

    std::vector<double> dl;
    dl.reserve(doc_lens.size());
    for (std::uint32_t len : doc_lens) dl.push_back(len);
    MeanSd d = mean_sd(dl);
    stats.mean_doc_len = d.mean;
    stats.sd_doc_len = d.sd;

    std::vector<double> sizes, topics;
    for (const auto& [account, n] : profile_size) {
        sizes.push_back(static_cast<double>(n));
        ++stats.profile_sizes.bins[n];
    }
    for (const auto& [account, t] : profile_topics) {
        topics.push_back(static_cast<double>(t.size()));
        ++stats.topics_per_profile.bins[t.size()];
    }
    MeanSd p = mean_sd(sizes);
    stats.mean_profile_size = p.mean;
    stats.sd_profile_size = p.sd;
    MeanSd t = mean_sd(topics);
    stats.mean_topics_per_profile = t.mean;
    stats.sd_topics_per_profile = t.sd;

    for (const auto& [text, topic_set] : text_topics)
        ++stats.query_ambiguity.bins[topic_set.size()];
    return stats;
}

std::string pair_stats_json(const PairStats& stats) {
    nlohmann::json doc{
        {"n_pairs", stats.n_pairs},
        {"title_word_chosen_rate", stats.title_word_chosen_rate},
        {"title_coverage", stats.title_coverage},
        {"first_sentence_coverage", stats.first_sentence_coverage},
        {"last_sentence_coverage", stats.last_sentence_coverage},
        {"own_word_rate", stats.own_word_rate},
        {"content_fraction", stats.content_fraction},
        {"tf_norm_query", stats.tf_norm_query},
        {"tf_norm_nonquery", stats.tf_norm_nonquery},
        {"decile_mass",
         std::vector<double>(stats.decile_mass.begin(), stats.decile_mass.end())},
        {"decile_defined", stats.decile_defined},
    };
    return doc.dump(2) + "\n";
}

std::string corpus_stats_json(const CorpusStats& stats) {
    nlohmann::json doc{
        {"n_users", stats.n_users},
        {"n_queries", stats.n_queries},
        {"n_distinct_queries", stats.n_distinct_queries},
        {"n_documents", stats.n_documents},
        {"n_forums", stats.n_forums},
        {"query_len", {{"mean", stats.mean_query_len}, {"sd", stats.sd_query_len}}},
        {"doc_len", {{"mean", stats.mean_doc_len}, {"sd", stats.sd_doc_len}}},
        {"profile_size", {{"mean", stats.mean_profile_size}, {"sd", stats.sd_profile_size}}},
        {"topics_per_profile",
         {{"mean", stats.mean_topics_per_profile}, {"sd", stats.sd_topics_per_profile}}},
    };
    return doc.dump(2) + "\n";
}

std::string agreement_json(const AgreementReport& report) {
    nlohmann::json per_question = nlohmann::json::array();
    for (const auto& [key, mean] : report.per_question)
        per_question.push_back({{"question", key}, {"mean_jaccard", mean}});
    nlohmann::json doc{
        {"mean_jaccard", report.mean_jaccard},
        {"n_questions", report.n_questions},
        {"n_both_empty", report.n_both_empty},
        {"per_question", per_question},
    };
    return doc.dump(2) + "\n";
}

void write_analysis(const std::filesystem::path& dir, const CorpusStats* corpus,
                    const PairStats* pairs, const AgreementReport* agreement) {
    std::filesystem::create_directories(dir);
    nlohmann::json doc = nlohmann::json::object();
    if (corpus) doc["corpus"] = nlohmann::json::parse(corpus_stats_json(*corpus));
    if (pairs) doc["pairs"] = nlohmann::json::parse(pair_stats_json(*pairs));
    if (agreement) doc["agreement"] = nlohmann::json::parse(agreement_json(*agreement));
    write_file_atomic(dir / "analysis.json", doc.dump(2) + "\n");

    if (corpus) {
        write_file_atomic(dir / "profile_sizes.csv",
                          corpus->profile_sizes.to_csv("profile_size", "users"));
        write_file_atomic(dir / "topics_per_profile.csv",
                          corpus->topics_per_profile.to_csv("topics", "users"));
        Histogram ambiguity;  // single-topic bin removed for the figure series
        for (const auto& [value, count] : corpus->query_ambiguity.bins)
            if (value >= 2) ambiguity.bins[value] = count;
        write_file_atomic(dir / "query_ambiguity.csv",
                          ambiguity.to_csv("topics", "distinct_queries"));
    }
}

}  // namespace cqalog
