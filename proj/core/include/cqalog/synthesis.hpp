#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cqalog/corpus.hpp"
#include "cqalog/rng.hpp"
#include "cqalog/term_stats.hpp"
#include "cqalog/text.hpp"

namespace cqalog {

struct LengthDistribution {
    enum class Kind { uniform_range, histogram };
    Kind kind = Kind::uniform_range;
    std::uint32_t min = 1, max = 5;  // uniform_range
    std::vector<double> pmf;         // histogram; pmf[i] = P(length = i + 1)

    static LengthDistribution uniform(std::uint32_t min, std::uint32_t max);
    static LengthDistribution from_pmf(std::vector<double> pmf);
    // "uniform:1:5", "hist:<path>", or a bare pmf-file path. The pmf file has
    // one "length probability" pair per line; '#' starts a comment.
    static LengthDistribution parse_spec(std::string_view spec);
    static LengthDistribution parse_pmf_file(std::string_view contents);

    std::uint32_t sample(Rng& rng) const;
    double mean() const;
    std::string spec() const;  // round-trips through parse_spec (hist as inline pmf)
};

// A distinct non-stopword stem of a question, with the statistics every
// extraction strategy scores from.
struct Candidate {
    std::string stem;
    std::uint32_t tf = 0;         // occurrences over non-stopword tokens
    std::uint32_t first_pos = 0;  // token index of first occurrence
    std::uint32_t question_len = 0;  // total tokens in the question
    bool in_title = false;
    bool is_content = false;
};

// Candidates in first-occurrence order. title_tokens = how many leading
// tokens came from the title.
std::vector<Candidate> question_candidates(const TokenizedText& question,
                                           std::size_t title_tokens);

using CandidateScorer = std::function<double(const Candidate&)>;

CandidateScorer tfidf_scorer(const TermStats& stats, IdfVariant variant);

// Draw l ~ dist (clamped to the candidate count), keep the l best-scoring
// stems — ties by earlier first occurrence, then lexicographic stem — and
// return them in first-occurrence order. Throws EmptyQuestion when the
// question has no candidates.
std::vector<std::string> extract_query(const std::vector<Candidate>& candidates,
                                       const LengthDistribution& dist, Rng& rng,
                                       const CandidateScorer& scorer);

struct SyntheticQuery {
    std::uint64_t query_id = 0;
    std::int64_t account_id = 0;
    std::string forum_id;
    std::int64_t source_question_id = 0;
    std::uint64_t question_key = 0;
    bool is_duplicate = false;
    std::uint32_t timestamp_ord = 0;  // position in the user's history
    std::vector<std::string> terms;
};

struct OwnershipEvent {
    std::uint64_t question_key = 0;
    std::int64_t account_id = 0;
    bool is_duplicate = false;
};

// One event for the question's author plus one per distinct favoriting user
// (self-favorites collapse into the author event). Sorted by
// (question_key, account_id) with the author first.
std::vector<OwnershipEvent> inject_duplicates(const Corpus& corpus,
                                              const std::vector<std::uint64_t>& questions);

enum class LengthSampling { per_question, per_event };

struct BuildLogOptions {
    LengthDistribution dist = LengthDistribution::uniform(1, 5);
    std::uint64_t seed = 1;
    LengthSampling sampling = LengthSampling::per_question;
    bool skip_synthetic_authors = true;
};

struct BuildLogResult {
    std::vector<SyntheticQuery> log;
    std::uint64_t empty_questions = 0;   // no candidate stems; events skipped
    std::uint64_t synthetic_skipped = 0;
};

// Extraction events for the sampled questions. Queries come back sorted by
// (account_id, timestamp_ord); query ids are not assigned yet (see
// finalize_log). Duplicates reuse the author extraction under per_question
// sampling and re-draw only the length under per_event.
BuildLogResult build_log(const Corpus& corpus, const std::vector<std::uint64_t>& questions,
                         const Lexicon& lexicon, const CandidateScorer& scorer,
                         const BuildLogOptions& options);

// Drop every query of a user with fewer than min_queries queries; order kept.
std::vector<SyntheticQuery> retain_users(std::vector<SyntheticQuery> log,
                                         std::uint64_t min_queries);

// Dense sequential query ids (1..N) in the log's current order.
void assign_query_ids(std::vector<SyntheticQuery>& log);

struct QrelRow {
    std::uint64_t query_id = 0;
    std::uint64_t doc_key = 0;
    int grade = 0;

    friend bool operator==(const QrelRow&, const QrelRow&) = default;
};

// Accepted answer -> 2, other answers -> 1; optionally materialize_negatives
// sampled same-forum unjudged answers at grade 0 per query. Rows sorted by
// (query_id, grade desc, doc_key). Throws MissingAcceptedAnswer.
std::vector<QrelRow> derive_qrels(const Corpus& corpus, const std::vector<SyntheticQuery>& log,
                                  std::uint64_t materialize_negatives = 0,
                                  std::uint64_t seed = 1);

// TSV: query_id, account_id, forum_id, source_question_id, is_duplicate,
// space-joined terms. Reading reconstructs timestamp_ord from file order.
std::string write_log_tsv(const std::vector<SyntheticQuery>& log);
std::vector<SyntheticQuery> read_log_tsv(std::string_view contents);

}  // namespace cqalog
