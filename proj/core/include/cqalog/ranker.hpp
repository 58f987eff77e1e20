#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cqalog/synthesis.hpp"
#include "cqalog/term_stats.hpp"
#include "cqalog/text.hpp"

namespace cqalog {

inline constexpr std::size_t kFeatureCount = 6;
extern const std::array<std::string_view, kFeatureCount> kFeatureNames;
// tf_norm, idf, first_rel_pos, in_title, is_content, stem_len_norm

struct QuestionQueryPair {
    std::string pair_id;
    std::string annotator_id;
    std::string forum_id;
    std::string title;
    std::string body;
    std::string query;
    TokenizedText question_tokens;  // title, then forum name, then body
    std::size_t title_len = 0;      // leading tokens that came from the title
    std::size_t pre_body = 0;       // tokens before the body starts
    std::vector<std::string> query_stems;
    std::vector<std::string> query_surfaces;
    std::vector<bool> own_word_flags;  // query token absent from the question
};

// TSV: pair_id, annotator_id, forum_id, title, body, query.
std::vector<QuestionQueryPair> read_pairs_tsv(std::string_view contents,
                                              const Lexicon& lexicon = Lexicon::builtin());
std::string write_pairs_tsv(const std::vector<QuestionQueryPair>& pairs);
QuestionQueryPair make_pair(std::string pair_id, std::string annotator_id,
                            std::string forum_id, std::string title, std::string body,
                            std::string query, const Lexicon& lexicon = Lexicon::builtin());

struct WordInstance {
    std::string stem;
    std::array<double, kFeatureCount> features{};
    int label = 0;  // stem appears in the query
};

struct PairInstances {
    std::string pair_id;
    std::string annotator_id;
    std::vector<WordInstance> instances;
};

// One instance per distinct non-stopword question stem; features are raw
// (unstandardized). Throws EmptyQuestion when no candidates exist.
PairInstances featurize(const QuestionQueryPair& pair, const TermStats& stats,
                        IdfVariant variant = IdfVariant::smoothed);

struct Standardizer {
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> sd{};  // 1 where the feature is constant

    static Standardizer fit(const std::vector<PairInstances>& data);
    std::array<double, kFeatureCount> apply(const std::array<double, kFeatureCount>& x) const;
    std::array<double, kFeatureCount> invert(const std::array<double, kFeatureCount>& z) const;
};

enum class Objective { logistic, pairwise_hinge };

struct TrainOptions {
    double lr = 0.1;
    std::uint32_t epochs = 2000;
    double l2 = 1e-4;
    Objective objective = Objective::logistic;
};

struct RankModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double bias = 0;
    Standardizer standardization;
    std::string scope = "global";  // or the annotator id

    double score_raw(const std::array<double, kFeatureCount>& features) const;  // sigmoid
};

// loss and gradient of the regularized objective at (w, b); exposed for the
// finite-difference check. Gradient layout: kFeatureCount weights then bias.
double loss_and_gradient(const std::vector<PairInstances>& data, const Standardizer& std_,
                         const std::vector<double>& weights, double bias,
                         const TrainOptions& options,
                         std::vector<double>* gradient = nullptr);

struct TrainResult {
    RankModel model;
    std::vector<double> loss_history;  // one entry per epoch
};

// Full-batch gradient descent from zero init; deterministic. Throws
// DegenerateLabels when every instance has the same label.
TrainResult train(const std::vector<PairInstances>& data, const TrainOptions& options = {},
                  std::string scope = "global");

struct RankedWord {
    std::string stem;
    double score = 0;
};

// Stems by descending model score; ties by ascending stem.
std::vector<RankedWord> rank_words(const RankModel& model, const QuestionQueryPair& pair,
                                   const TermStats& stats,
                                   IdfVariant variant = IdfVariant::smoothed);

struct RankingEval {
    double mean_ap = 0;
    double p_at_len = 0;
    std::uint64_t n_pairs = 0;  // pairs with >= 1 positive instance
};

RankingEval evaluate_ranking(const RankModel& model, const std::vector<QuestionQueryPair>& pairs,
                             const TermStats& stats,
                             IdfVariant variant = IdfVariant::smoothed);

struct AnnotatorDelta {
    std::string annotator_id;
    double global_ap = 0;
    double personal_ap = 0;
    double delta = 0;  // personal - global
};

struct PersonalizationReport {
    std::vector<AnnotatorDelta> per_annotator;
    double mean_global_ap = 0;
    double mean_personal_ap = 0;
    double fraction_improved = 0;  // annotators with delta > 0
    double sign_test_p = 1;        // exact two-sided binomial
    std::uint64_t n_annotators = 0;
};

// Leave-last-k-per-annotator split; trains a global model on all training
// pairs and one model per annotator, evaluates both on each annotator's
// held-out pairs. Throws InsufficientPairs when an annotator has < k+1 pairs.
PersonalizationReport compare_global_personalized(const std::vector<QuestionQueryPair>& pairs,
                                                  const TermStats& stats, std::uint64_t k = 10,
                                                  const TrainOptions& options = {},
                                                  IdfVariant variant = IdfVariant::smoothed);

// JSON model file: {feature_names, weights, bias, standardization, scope}.
std::string model_to_json(const RankModel& model);
RankModel model_from_json(std::string_view json_text);
void save_model(const RankModel& model, const std::filesystem::path& path);
RankModel load_model(const std::filesystem::path& path);

// Map annotator -> model, for the per-user scope.
std::string models_to_json(const std::vector<RankModel>& models);
std::vector<RankModel> models_from_json(std::string_view json_text);

// Adapter: use a trained model as the extraction strategy's scorer.
CandidateScorer ranker_scorer(const RankModel& model, const TermStats& stats,
                              IdfVariant variant = IdfVariant::smoothed);

// Exact two-sided sign test: n trials, s successes, p = 2 * P(X <= min(s, n-s)).
double sign_test_p_value(std::uint64_t successes, std::uint64_t n);

}  // namespace cqalog
