#include "cqalog/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "cqalog/errors.hpp"
#include "cqalog/io.hpp"

namespace cqalog {

const std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "tf_norm", "idf", "first_rel_pos", "in_title", "is_content", "stem_len_norm"};

namespace {

std::array<double, kFeatureCount> candidate_features(const Candidate& c, const TermStats& stats,
                                                     IdfVariant variant) {
    double len = c.question_len > 0 ? static_cast<double>(c.question_len) : 1.0;
    return {
        static_cast<double>(c.tf) / len,
        idf(stats, c.stem, variant),
        static_cast<double>(c.first_pos) / len,
        c.in_title ? 1.0 : 0.0,
        c.is_content ? 1.0 : 0.0,
        static_cast<double>(c.stem.size()) / 64.0,
    };
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

TokenizedText splice_question(const std::string& title_text, const std::string& forum_text,
                              const std::string& body_text, const Lexicon& lexicon,
                              std::size_t& title_len, std::size_t& pre_body) {
    TokenizedText out = tokenize(title_text, lexicon);
    title_len = out.tokens.size();
    std::uint32_t base = static_cast<std::uint32_t>(title_text.size()) + 1;
    for (Token token : tokenize(forum_text, lexicon).tokens) {
        token.char_offset += base;
        out.tokens.push_back(std::move(token));
    }
    pre_body = out.tokens.size();
    base += static_cast<std::uint32_t>(forum_text.size()) + 1;
    for (Token token : tokenize(body_text, lexicon).tokens) {
        token.char_offset += base;
        out.tokens.push_back(std::move(token));
    }
    return out;
}

}  // namespace

QuestionQueryPair make_pair(std::string pair_id, std::string annotator_id, std::string forum_id,
                            std::string title, std::string body, std::string query,
                            const Lexicon& lexicon) {
    QuestionQueryPair pair;
    pair.pair_id = std::move(pair_id);
    pair.annotator_id = std::move(annotator_id);
    pair.forum_id = std::move(forum_id);
    pair.title = std::move(title);
    pair.body = std::move(body);
    pair.query = std::move(query);

    std::string title_text = strip_html(pair.title);
    std::string body_text = strip_html(pair.body);
    pair.question_tokens = splice_question(title_text, pair.forum_id, body_text, lexicon,
                                           pair.title_len, pair.pre_body);

    std::set<std::string> question_stems;
    for (const Token& token : pair.question_tokens.tokens) question_stems.insert(token.stem);
    for (const Token& token : tokenize(pair.query, lexicon).tokens) {
        pair.query_stems.push_back(token.stem);
        pair.query_surfaces.push_back(token.surface);
        pair.own_word_flags.push_back(question_stems.count(token.stem) == 0);
    }
    return pair;
}

std::vector<QuestionQueryPair> read_pairs_tsv(std::string_view contents, const Lexicon& lexicon) {
    std::vector<QuestionQueryPair> pairs;
    std::size_t start = 0, line_no = 0;
    while (start < contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view line = contents.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t from = 0;
        for (;;) {
            std::size_t tab = line.find('\t', from);
            if (tab == std::string_view::npos) {
                cols.emplace_back(line.substr(from));
                break;
            }
            cols.emplace_back(line.substr(from, tab - from));
            from = tab + 1;
        }
        if (cols.size() != 6)
            throw FormatError("pairs line " + std::to_string(line_no) + ": expected 6 columns");
        pairs.push_back(make_pair(cols[0], cols[1], cols[2], cols[3], cols[4], cols[5], lexicon));
    }
    return pairs;
}

std::string write_pairs_tsv(const std::vector<QuestionQueryPair>& pairs) {
    std::string out;
    for (const QuestionQueryPair& pair : pairs) {
        out += pair.pair_id;
        out += '\t';
        out += pair.annotator_id;
        out += '\t';
        out += pair.forum_id;
        out += '\t';
        out += pair.title;
        out += '\t';
        out += pair.body;
        out += '\t';
        out += pair.query;
        out += '\n';
    }
    return out;
}

PairInstances featurize(const QuestionQueryPair& pair, const TermStats& stats,
                        IdfVariant variant) {
    std::vector<Candidate> candidates = question_candidates(pair.question_tokens, pair.title_len);
    if (candidates.empty()) throw EmptyQuestion();
    std::set<std::string> query_set(pair.query_stems.begin(), pair.query_stems.end());
    PairInstances out;
    out.pair_id = pair.pair_id;
    out.annotator_id = pair.annotator_id;
    out.instances.reserve(candidates.size());
    for (const Candidate& c : candidates) {
        WordInstance inst;
        inst.stem = c.stem;
        inst.features = candidate_features(c, stats, variant);
        inst.label = query_set.count(c.stem) ? 1 : 0;
        out.instances.push_back(std::move(inst));
    }
    return out;
}

Standardizer Standardizer::fit(const std::vector<PairInstances>& data) {
    Standardizer s;
    s.sd.fill(1.0);
    std::uint64_t n = 0;
    std::array<double, kFeatureCount> sum{}, sum2{};
    for (const PairInstances& group : data)
        for (const WordInstance& inst : group.instances) {
            ++n;
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                sum[f] += inst.features[f];
                sum2[f] += inst.features[f] * inst.features[f];
            }
        }
    if (n == 0) return s;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        s.mean[f] = sum[f] / static_cast<double>(n);
        double var = sum2[f] / static_cast<double>(n) - s.mean[f] * s.mean[f];
        s.sd[f] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    return s;
}

std::array<double, kFeatureCount> Standardizer::apply(
    const std::array<double, kFeatureCount>& x) const {
    std::array<double, kFeatureCount> z;
    for (std::size_t f = 0; f < kFeatureCount; ++f) z[f] = (x[f] - mean[f]) / sd[f];
    return z;
}

std::array<double, kFeatureCount> Standardizer::invert(
    const std::array<double, kFeatureCount>& z) const {
    std::array<double, kFeatureCount> x;
    for (std::size_t f = 0; f < kFeatureCount; ++f) x[f] = z[f] * sd[f] + mean[f];
    return x;
}

double RankModel::score_raw(const std::array<double, kFeatureCount>& features) const {
    auto z = standardization.apply(features);
    double dot = bias;
    for (std::size_t f = 0; f < kFeatureCount && f < weights.size(); ++f)
        dot += weights[f] * z[f];
    return sigmoid(dot);
}

double loss_and_gradient(const std::vector<PairInstances>& data, const Standardizer& std_,
                         const std::vector<double>& weights, double bias,
                         const TrainOptions& options, std::vector<double>* gradient) {
    if (gradient) gradient->assign(kFeatureCount + 1, 0.0);
    double loss = 0;
    std::uint64_t m = 0;

    if (options.objective == Objective::logistic) {
        for (const PairInstances& group : data)
            for (const WordInstance& inst : group.instances) {
                ++m;
                auto z = std_.apply(inst.features);
                double score = bias;
                for (std::size_t f = 0; f < kFeatureCount; ++f) score += weights[f] * z[f];
                double y = inst.label;
                // stable BCE: max(s,0) - s*y + ln(1 + e^{-|s|})
                loss += std::max(score, 0.0) - score * y +
                        std::log1p(std::exp(-std::abs(score)));
                if (gradient) {
                    double err = sigmoid(score) - y;
                    for (std::size_t f = 0; f < kFeatureCount; ++f) (*gradient)[f] += err * z[f];
                    (*gradient)[kFeatureCount] += err;
                }
            }
    } else {
        for (const PairInstances& group : data) {
            std::vector<const WordInstance*> pos, neg;
            for (const WordInstance& inst : group.instances)
                (inst.label ? pos : neg).push_back(&inst);
            for (const WordInstance* p : pos)
                for (const WordInstance* q : neg) {
                    ++m;
                    auto zp = std_.apply(p->features);
                    auto zq = std_.apply(q->features);
                    double margin = 0;
                    for (std::size_t f = 0; f < kFeatureCount; ++f)
                        margin += weights[f] * (zp[f] - zq[f]);
                    if (margin < 1.0) {
                        loss += 1.0 - margin;
                        if (gradient)
                            for (std::size_t f = 0; f < kFeatureCount; ++f)
                                (*gradient)[f] -= zp[f] - zq[f];
                    }
                }
        }
    }
    if (m == 0) throw DegenerateLabels();

    loss /= static_cast<double>(m);
    double reg = 0;
    for (double w : weights) reg += w * w;
    loss += 0.5 * options.l2 * reg;
    if (gradient) {
        for (std::size_t f = 0; f <= kFeatureCount; ++f)
            (*gradient)[f] /= static_cast<double>(m);
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            (*gradient)[f] += options.l2 * weights[f];
    }
    return loss;
}

TrainResult train(const std::vector<PairInstances>& data, const TrainOptions& options,
                  std::string scope) {
    bool any_pos = false, any_neg = false;
    for (const PairInstances& group : data)
        for (const WordInstance& inst : group.instances)
            (inst.label ? any_pos : any_neg) = true;
    if (!any_pos || !any_neg) throw DegenerateLabels();

    TrainResult result;
    RankModel& model = result.model;
    model.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
    model.weights.assign(kFeatureCount, 0.0);
    model.bias = 0;
    model.standardization = Standardizer::fit(data);
    model.scope = std::move(scope);

    std::vector<double> gradient;
    result.loss_history.reserve(options.epochs);
    for (std::uint32_t epoch = 0; epoch < options.epochs; ++epoch) {
        double loss = loss_and_gradient(data, model.standardization, model.weights, model.bias,
                                        options, &gradient);
        result.loss_history.push_back(loss);
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            model.weights[f] -= options.lr * gradient[f];
        model.bias -= options.lr * gradient[kFeatureCount];
    }
    return result;
}

std::vector<RankedWord> rank_words(const RankModel& model, const QuestionQueryPair& pair,
                                   const TermStats& stats, IdfVariant variant) {
    std::vector<Candidate> candidates = question_candidates(pair.question_tokens, pair.title_len);
    std::vector<RankedWord> out;
    out.reserve(candidates.size());
    for (const Candidate& c : candidates)
        out.push_back({c.stem, model.score_raw(candidate_features(c, stats, variant))});
    std::sort(out.begin(), out.end(), [](const RankedWord& a, const RankedWord& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.stem < b.stem;
    });
    return out;
}

RankingEval evaluate_ranking(const RankModel& model, const std::vector<QuestionQueryPair>& pairs,
                             const TermStats& stats, IdfVariant variant) {
    RankingEval eval;
    double ap_sum = 0, p_sum = 0;
    for (const QuestionQueryPair& pair : pairs) {
        std::set<std::string> query_set(pair.query_stems.begin(), pair.query_stems.end());
        std::vector<RankedWord> ranked = rank_words(model, pair, stats, variant);
        std::size_t positives = 0;
        for (const RankedWord& w : ranked) positives += query_set.count(w.stem);
        if (positives == 0) continue;

        double hits = 0, ap = 0, hits_at_l = 0;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (query_set.count(ranked[i].stem) == 0) continue;
            ++hits;
            ap += hits / static_cast<double>(i + 1);
            if (i < positives) ++hits_at_l;
        }
        ap_sum += ap / static_cast<double>(positives);
        p_sum += hits_at_l / static_cast<double>(positives);
        ++eval.n_pairs;
    }
    if (eval.n_pairs > 0) {
        eval.mean_ap = ap_sum / static_cast<double>(eval.n_pairs);
        eval.p_at_len = p_sum / static_cast<double>(eval.n_pairs);
    }
    return eval;
}

double sign_test_p_value(std::uint64_t successes, std::uint64_t n) {
    if (n == 0) return 1.0;
    std::uint64_t tail = std::min(successes, n - successes);
    double log_half = std::log(0.5);
    double p = 0;
    for (std::uint64_t i = 0; i <= tail; ++i) {
        double log_c = std::lgamma(static_cast<double>(n) + 1) -
                       std::lgamma(static_cast<double>(i) + 1) -
                       std::lgamma(static_cast<double>(n - i) + 1);
        p += std::exp(log_c + static_cast<double>(n) * log_half);
    }
    return std::min(1.0, 2.0 * p);
}

PersonalizationReport compare_global_personalized(const std::vector<QuestionQueryPair>& pairs,
                                                  const TermStats& stats, std::uint64_t k,
                                                  const TrainOptions& options,
                                                  IdfVariant variant) {
    if (k == 0) throw ConfigError("leave-last-k split needs k >= 1");

    // group by annotator, preserving dataset order within each group
    std::vector<std::string> annotators;
    std::map<std::string, std::vector<const QuestionQueryPair*>> grouped;
    for (const QuestionQueryPair& pair : pairs) {
        auto [it, fresh] = grouped.try_emplace(pair.annotator_id);
        if (fresh) annotators.push_back(pair.annotator_id);
        it->second.push_back(&pair);
    }
    std::sort(annotators.begin(), annotators.end());

    std::vector<PairInstances> global_train;
    std::map<std::string, std::vector<PairInstances>> personal_train;
    std::map<std::string, std::vector<QuestionQueryPair>> test;
    for (const std::string& annotator : annotators) {
        const auto& group = grouped[annotator];
        if (group.size() < k + 1)
            throw InsufficientPairs(annotator, group.size(), k + 1);
        std::size_t split = group.size() - static_cast<std::size_t>(k);
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (i < split) {
                PairInstances inst = featurize(*group[i], stats, variant);
                personal_train[annotator].push_back(inst);
                global_train.push_back(std::move(inst));
            } else {
                test[annotator].push_back(*group[i]);
            }
        }
    }

    RankModel global_model = train(global_train, options, "global").model;

    PersonalizationReport report;
    double global_sum = 0, personal_sum = 0;
    std::uint64_t improved = 0, nonzero = 0, wins = 0;
    for (const std::string& annotator : annotators) {
        RankModel personal = train(personal_train[annotator], options, annotator).model;
        AnnotatorDelta delta;
        delta.annotator_id = annotator;
        delta.global_ap = evaluate_ranking(global_model, test[annotator], stats, variant).mean_ap;
        delta.personal_ap = evaluate_ranking(personal, test[annotator], stats, variant).mean_ap;
        delta.delta = delta.personal_ap - delta.global_ap;
        global_sum += delta.global_ap;
        personal_sum += delta.personal_ap;
        if (delta.delta > 0) ++improved;
        if (delta.delta != 0) {
            ++nonzero;
            if (delta.delta > 0) ++wins;
        }
        report.per_annotator.push_back(std::move(delta));
    }
    report.n_annotators = annotators.size();
    if (!annotators.empty()) {
        report.mean_global_ap = global_sum / static_cast<double>(annotators.size());
        report.mean_personal_ap = personal_sum / static_cast<double>(annotators.size());
        report.fraction_improved = static_cast<double>(improved) /
                                   static_cast<double>(annotators.size());
    }
    report.sign_test_p = sign_test_p_value(wins, nonzero);
    return report;
}

namespace {

nlohmann::json model_json_obj(const RankModel& model) {
    return nlohmann::json{
        {"feature_names", model.feature_names},
        {"weights", model.weights},
        {"bias", model.bias},
        {"standardization",
         {{"mean", std::vector<double>(model.standardization.mean.begin(),
                                       model.standardization.mean.end())},
          {"sd", std::vector<double>(model.standardization.sd.begin(),
                                     model.standardization.sd.end())}}},
        {"scope", model.scope},
    };
}

RankModel model_from_obj(const nlohmann::json& obj) {
    RankModel model;
    model.feature_names = obj.at("feature_names").get<std::vector<std::string>>();
    model.weights = obj.at("weights").get<std::vector<double>>();
    model.bias = obj.at("bias").get<double>();
    model.scope = obj.at("scope").get<std::string>();
    auto mean = obj.at("standardization").at("mean").get<std::vector<double>>();
    auto sd = obj.at("standardization").at("sd").get<std::vector<double>>();
    if (model.weights.size() != kFeatureCount || mean.size() != kFeatureCount ||
        sd.size() != kFeatureCount)
        throw FormatError("model feature count mismatch");
    std::copy(mean.begin(), mean.end(), model.standardization.mean.begin());
    std::copy(sd.begin(), sd.end(), model.standardization.sd.begin());
    return model;
}

}  // namespace

std::string model_to_json(const RankModel& model) { return model_json_obj(model).dump(2) + "\n"; }

RankModel model_from_json(std::string_view json_text) {
    try {
        return model_from_obj(nlohmann::json::parse(json_text));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model json: ") + e.what());
    }
}

void save_model(const RankModel& model, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(model));
}

RankModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_file(path));
}

std::string models_to_json(const std::vector<RankModel>& models) {
    nlohmann::json by_scope = nlohmann::json::object();
    for (const RankModel& model : models) by_scope[model.scope] = model_json_obj(model);
    nlohmann::json doc{{"scope", "per_user"}, {"models", by_scope}};
    return doc.dump(2) + "\n";
}

std::vector<RankModel> models_from_json(std::string_view json_text) {
    try {
        nlohmann::json doc = nlohmann::json::parse(json_text);
        std::vector<RankModel> models;
        if (doc.contains("models")) {
            for (const auto& [scope, obj] : doc.at("models").items())
                models.push_back(model_from_obj(obj));
        } else {
            models.push_back(model_from_obj(doc));
        }
        return models;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model json: ") + e.what());
    }
}

CandidateScorer ranker_scorer(const RankModel& model, const TermStats& stats,
                              IdfVariant variant) {
    return [&model, &stats, variant](const Candidate& c) {
        return model.score_raw(candidate_features(c, stats, variant));
    };
}

}  // namespace cqalog
