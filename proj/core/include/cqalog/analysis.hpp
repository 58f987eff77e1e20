#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cqalog/ranker.hpp"
#include "cqalog/synthesis.hpp"
#include "cqalog/term_stats.hpp"

namespace cqalog {

struct PairStats {
    std::uint64_t n_pairs = 0;
    double title_word_chosen_rate = 0;  // pairs with >= 1 query word from the title
    double title_coverage = 0;          // mean fraction of title words used in the query
    double first_sentence_coverage = 0;
    double last_sentence_coverage = 0;
    double own_word_rate = 0;       // query tokens absent from the question (micro)
    double content_fraction = 0;    // query tokens classed content (micro)
    double tf_norm_query = 0;       // mean tf_norm of question stems used in the query
    double tf_norm_nonquery = 0;
    std::array<double, 10> decile_mass{};  // query-word first-occurrence deciles
    bool decile_defined = false;           // false when no query word occurs in a question
};

// Aggregates over annotated question-query pairs; coverage fractions are
// normalized by title/sentence length (2 of 8 title words -> 0.25). Sentences
// split on terminal punctuation over title + body; the forum name is not
// part of any sentence.
PairStats pair_stats(const std::vector<QuestionQueryPair>& pairs,
                     const Lexicon& lexicon = Lexicon::builtin());

// |a ∩ b| / |a ∪ b| over stem sets; both-empty is defined as 1.0 (identical
// empty needs) and reported through *both_empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b,
               bool* both_empty = nullptr);

struct AgreementReport {
    double mean_jaccard = 0;  // mean over questions of mean pairwise jaccard
    std::uint64_t n_questions = 0;
    std::uint64_t n_both_empty = 0;
    std::vector<std::pair<std::string, double>> per_question;  // key -> mean
};

// Pairs grouped by identical (forum_id, title, body); groups with >= 2
// annotators contribute the mean Jaccard over all unordered query pairs.
AgreementReport agreement_report(const std::vector<QuestionQueryPair>& pairs);

struct Histogram {
    std::map<std::uint64_t, std::uint64_t> bins;
    std::string to_csv(std::string_view value_name, std::string_view count_name) const;
};

struct CorpusStats {
    std::uint64_t n_users = 0;
    std::uint64_t n_queries = 0;
    std::uint64_t n_distinct_queries = 0;
    std::uint64_t n_documents = 0;
    std::uint64_t n_forums = 0;
    double mean_query_len = 0, sd_query_len = 0;
    double mean_doc_len = 0, sd_doc_len = 0;
    double mean_profile_size = 0, sd_profile_size = 0;
    double mean_topics_per_profile = 0, sd_topics_per_profile = 0;
    Histogram profile_sizes;
    Histogram topics_per_profile;
    Histogram query_ambiguity;  // topics per distinct query text, all bins
};

// Table-style aggregates over a derived log. doc_lens carries the indexed
// document lengths; population sd throughout. A "topic" is the source
// question; query ambiguity counts topics per textually identical query.
CorpusStats corpus_stats(const std::vector<SyntheticQuery>& log,
                         const std::vector<std::uint32_t>& doc_lens);

std::string pair_stats_json(const PairStats& stats);
std::string corpus_stats_json(const CorpusStats& stats);
std::string agreement_json(const AgreementReport& report);

// analysis.json plus per-histogram CSVs (profile_sizes.csv,
// topics_per_profile.csv, query_ambiguity.csv — the ambiguity CSV drops the
// single-topic bin).
void write_analysis(const std::filesystem::path& dir, const CorpusStats* corpus,
                    const PairStats* pairs, const AgreementReport* agreement);

}  // namespace cqalog
