#include "cqalog/synthesis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include "cqalog/errors.hpp"
#include "cqalog/io.hpp"

namespace cqalog {

LengthDistribution LengthDistribution::uniform(std::uint32_t min, std::uint32_t max) {
    if (min < 1 || min > max) throw ConfigError("uniform length range needs 1 <= min <= max");
    LengthDistribution d;
    d.kind = Kind::uniform_range;
    d.min = min;
    d.max = max;
    return d;
}

LengthDistribution LengthDistribution::from_pmf(std::vector<double> pmf) {
    double sum = 0;
    bool any = false;
    for (double p : pmf) {
        if (p < 0 || !std::isfinite(p)) throw ConfigError("pmf probabilities must be >= 0");
        sum += p;
        any = any || p > 0;
    }
    if (!any || std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("pmf probabilities must sum to 1");
    LengthDistribution d;
    d.kind = Kind::histogram;
    d.pmf = std::move(pmf);
    return d;
}

namespace {

double parse_double(std::string_view s) {
    // from_chars for double is inconsistently available with older
    // libstdc++; strtod on a bounded copy is portable.
    std::string copy(s);
    char* end = nullptr;
    double v = std::strtod(copy.c_str(), &end);
    if (end != copy.c_str() + copy.size()) throw ConfigError("bad number: " + copy);
    return v;
}

std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("bad integer: " + std::string(s));
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

}  // namespace

LengthDistribution LengthDistribution::parse_pmf_file(std::string_view contents) {
    std::vector<double> pmf;
    for (std::string_view line : split(contents, '\n')) {
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string_view::npos) continue;
        std::size_t b = line.find_first_of(" \t\r", a);
        if (b == std::string_view::npos) throw ConfigError("pmf line needs 'length probability'");
        std::size_t c = line.find_first_not_of(" \t\r", b);
        if (c == std::string_view::npos) throw ConfigError("pmf line needs 'length probability'");
        std::size_t d = line.find_last_not_of(" \t\r");
        std::uint64_t length = parse_u64(line.substr(a, b - a));
        double p = parse_double(line.substr(c, d - c + 1));
        if (length < 1) throw ConfigError("pmf lengths start at 1");
        if (pmf.size() < length) pmf.resize(length, 0.0);
        pmf[length - 1] += p;
    }
    return from_pmf(std::move(pmf));
}

LengthDistribution LengthDistribution::parse_spec(std::string_view spec) {
    if (spec.rfind("uniform:", 0) == 0) {
        auto parts = split(spec.substr(8), ':');
        if (parts.size() != 2) throw ConfigError("expected uniform:<min>:<max>");
        return uniform(static_cast<std::uint32_t>(parse_u64(parts[0])),
                       static_cast<std::uint32_t>(parse_u64(parts[1])));
    }
    if (spec.rfind("pmf:", 0) == 0) {  // inline, comma-separated, starting at length 1
        std::vector<double> pmf;
        for (std::string_view part : split(spec.substr(4), ','))
            pmf.push_back(parse_double(part));
        return from_pmf(std::move(pmf));
    }
    std::string_view path = spec;
    if (spec.rfind("hist:", 0) == 0) path = spec.substr(5);
    std::string contents = read_file(std::filesystem::path(path));
    return parse_pmf_file(contents);
}

std::uint32_t LengthDistribution::sample(Rng& rng) const {
    if (kind == Kind::uniform_range)
        return min + static_cast<std::uint32_t>(rng.bounded(max - min + 1));
    double u = rng.next_double();
    double cum = 0;
    std::uint32_t last_positive = 1;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (pmf[i] <= 0) continue;
        cum += pmf[i];
        last_positive = static_cast<std::uint32_t>(i + 1);
        if (u < cum) return last_positive;
    }
    return last_positive;  // guards rounding at u ~ 1
}

double LengthDistribution::mean() const {
    if (kind == Kind::uniform_range) return (static_cast<double>(min) + max) / 2.0;
    double m = 0;
    for (std::size_t i = 0; i < pmf.size(); ++i) m += pmf[i] * static_cast<double>(i + 1);
    return m;
}

std::string LengthDistribution::spec() const {
    if (kind == Kind::uniform_range)
        return "uniform:" + std::to_string(min) + ":" + std::to_string(max);
    std::string out = "pmf:";
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        if (i) out += ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", pmf[i]);
        out += buf;
    }
    return out;
}

std::vector<Candidate> question_candidates(const TokenizedText& question,
                                           std::size_t title_tokens) {
    std::map<std::string, Candidate> by_stem;
    for (std::size_t i = 0; i < question.tokens.size(); ++i) {
        const Token& token = question.tokens[i];
        if (token.is_stopword) continue;
        auto [it, fresh] = by_stem.try_emplace(token.stem);
        Candidate& c = it->second;
        if (fresh) {
            c.stem = token.stem;
            c.first_pos = static_cast<std::uint32_t>(i);
            c.is_content = token.word_class == WordClass::content;
        }
        ++c.tf;
        if (i < title_tokens) c.in_title = true;
    }
    std::vector<Candidate> out;
    out.reserve(by_stem.size());
    for (auto& [stem, c] : by_stem) {
        c.question_len = static_cast<std::uint32_t>(question.tokens.size());
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const Candidate& a, const Candidate& b) { return a.first_pos < b.first_pos; });
    return out;
}

CandidateScorer tfidf_scorer(const TermStats& stats, IdfVariant variant) {
    return [&stats, variant](const Candidate& c) {
        return static_cast<double>(c.tf) * idf(stats, c.stem, variant);
    };
}

std::vector<std::string> extract_query(const std::vector<Candidate>& candidates,
                                       const LengthDistribution& dist, Rng& rng,
                                       const CandidateScorer& scorer) {
    if (candidates.empty()) throw EmptyQuestion();
    std::uint32_t l = dist.sample(rng);
    l = std::min<std::uint32_t>(std::max<std::uint32_t>(l, 1),
                                static_cast<std::uint32_t>(candidates.size()));

    std::vector<double> scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) scores[i] = scorer(candidates[i]);

    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        if (candidates[a].first_pos != candidates[b].first_pos)
            return candidates[a].first_pos < candidates[b].first_pos;
        return candidates[a].stem < candidates[b].stem;
    });
    order.resize(l);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].first_pos < candidates[b].first_pos;
    });

    std::vector<std::string> terms;
    terms.reserve(l);
    for (std::size_t i : order) terms.push_back(candidates[i].stem);
    return terms;
}

std::vector<OwnershipEvent> inject_duplicates(const Corpus& corpus,
                                              const std::vector<std::uint64_t>& questions) {
    std::vector<OwnershipEvent> events;
    for (std::uint64_t q : questions) {
        auto owner_it = corpus.owner_of.find(q);
        if (owner_it == corpus.owner_of.end()) throw DanglingReference(key_post(q));
        std::int64_t author = owner_it->second;
        events.push_back({q, author, false});

        FavoriteEdge probe{0, q};
        auto lo = std::lower_bound(corpus.favorites.begin(), corpus.favorites.end(), probe,
                                   [](const FavoriteEdge& a, const FavoriteEdge& b) {
                                       return a.question_key < b.question_key;
                                   });
        std::int64_t prev = author;  // favorites are account-sorted per question
        bool first = true;
        for (auto it = lo; it != corpus.favorites.end() && it->question_key == q; ++it) {
            if (it->account_id == author) continue;  // self-favorite
            if (!first && it->account_id == prev) continue;  // repeated edge
            events.push_back({q, it->account_id, true});
            prev = it->account_id;
            first = false;
        }
    }
    return events;
}

BuildLogResult build_log(const Corpus& corpus, const std::vector<std::uint64_t>& questions,
                         const Lexicon& lexicon, const CandidateScorer& scorer,
                         const BuildLogOptions& options) {
    BuildLogResult result;
    std::vector<OwnershipEvent> events = inject_duplicates(corpus, questions);

    std::size_t i = 0;
    while (i < events.size()) {
        std::uint64_t q = events[i].question_key;
        std::size_t begin = i;
        while (i < events.size() && events[i].question_key == q) ++i;

        const Post& post = corpus.post(q);
        std::string title_text = strip_html(post.title);
        std::string body_text = strip_html(post.body);
        std::string combined = title_text;
        if (!title_text.empty() && !body_text.empty()) combined += ' ';
        combined += body_text;
        TokenizedText tokens = tokenize(combined, lexicon);
        std::size_t title_len = tokenize(title_text, lexicon).tokens.size();
        std::vector<Candidate> candidates = question_candidates(tokens, title_len);
        if (candidates.empty()) {
            ++result.empty_questions;
            continue;
        }

        std::int64_t author = events[begin].account_id;
        Rng author_rng(derive_seed(options.seed, "extract", q,
                                   static_cast<std::uint64_t>(author)));
        std::vector<std::string> author_terms =
            extract_query(candidates, options.dist, author_rng, scorer);

        for (std::size_t e = begin; e < i; ++e) {
            const OwnershipEvent& event = events[e];
            bool synthetic_author = !event.is_duplicate && event.account_id < 0;
            if (synthetic_author && options.skip_synthetic_authors) {
                ++result.synthetic_skipped;
                continue;
            }
            SyntheticQuery row;
            row.account_id = event.account_id;
            row.forum_id = corpus.forum_of(q).forum_id;
            row.source_question_id = key_post(q);
            row.question_key = q;
            row.is_duplicate = event.is_duplicate;
            if (!event.is_duplicate || options.sampling == LengthSampling::per_question) {
                row.terms = author_terms;
            } else {
                Rng event_rng(derive_seed(options.seed, "extract", q,
                                          static_cast<std::uint64_t>(event.account_id)));
                row.terms = extract_query(candidates, options.dist, event_rng, scorer);
            }
            result.log.push_back(std::move(row));
        }
    }

    // per-user history order: question creation time, then key
    std::stable_sort(result.log.begin(), result.log.end(),
                     [&corpus](const SyntheticQuery& a, const SyntheticQuery& b) {
                         if (a.account_id != b.account_id) return a.account_id < b.account_id;
                         std::int64_t ta = corpus.post(a.question_key).creation_ms;
                         std::int64_t tb = corpus.post(b.question_key).creation_ms;
                         if (ta != tb) return ta < tb;
                         return a.question_key < b.question_key;
                     });
    std::int64_t current = 0;
    std::uint32_t ord = 0;
    bool started = false;
    for (SyntheticQuery& row : result.log) {
        if (!started || row.account_id != current) {
            current = row.account_id;
            ord = 0;
            started = true;
        }
        row.timestamp_ord = ord++;
    }
    return result;
}

std::vector<SyntheticQuery> retain_users(std::vector<SyntheticQuery> log,
                                         std::uint64_t min_queries) {
    std::map<std::int64_t, std::uint64_t> counts;
    for (const SyntheticQuery& row : log) ++counts[row.account_id];
    std::erase_if(log, [&](const SyntheticQuery& row) {
        return counts[row.account_id] < min_queries;
    });
    return log;
}

void assign_query_ids(std::vector<SyntheticQuery>& log) {
    std::uint64_t next = 1;
    for (SyntheticQuery& row : log) row.query_id = next++;
}

std::vector<QrelRow> derive_qrels(const Corpus& corpus, const std::vector<SyntheticQuery>& log,
                                  std::uint64_t materialize_negatives, std::uint64_t seed) {
    // per-forum answer pools, built lazily only when negatives are wanted
    std::map<std::uint32_t, std::vector<std::uint64_t>> forum_answers;
    if (materialize_negatives > 0)
        for (const auto& [key, post] : corpus.posts)
            if (post.type == PostType::answer) forum_answers[post.forum_idx].push_back(key);

    std::vector<QrelRow> rows;
    for (const SyntheticQuery& query : log) {
        auto accepted_it = corpus.accepted_of.find(query.question_key);
        if (accepted_it == corpus.accepted_of.end())
            throw MissingAcceptedAnswer(query.source_question_id);
        std::uint64_t accepted = accepted_it->second;
        rows.push_back({query.query_id, accepted, 2});

        std::set<std::uint64_t> graded{accepted};
        auto answers_it = corpus.answers_of.find(query.question_key);
        if (answers_it != corpus.answers_of.end())
            for (std::uint64_t a : answers_it->second)
                if (a != accepted) {
                    rows.push_back({query.query_id, a, 1});
                    graded.insert(a);
                }

        if (materialize_negatives > 0) {
            std::vector<std::uint64_t> pool;
            for (std::uint64_t a : forum_answers[key_forum(query.question_key)])
                if (graded.count(a) == 0) pool.push_back(a);
            Rng rng(derive_seed(seed, "negatives", query.query_id));
            std::uint64_t want = std::min<std::uint64_t>(materialize_negatives, pool.size());
            for (std::uint64_t n = 0; n < want; ++n) {
                std::uint64_t pick = n + rng.bounded(pool.size() - n);
                std::swap(pool[n], pool[pick]);
                rows.push_back({query.query_id, pool[n], 0});
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const QrelRow& a, const QrelRow& b) {
        if (a.query_id != b.query_id) return a.query_id < b.query_id;
        if (a.grade != b.grade) return a.grade > b.grade;
        return a.doc_key < b.doc_key;
    });
    return rows;
}

std::string write_log_tsv(const std::vector<SyntheticQuery>& log) {
    std::string out;
    for (const SyntheticQuery& row : log) {
        out += std::to_string(row.query_id);
        out += '\t';
        out += std::to_string(row.account_id);
        out += '\t';
        out += row.forum_id;
        out += '\t';
        out += std::to_string(row.source_question_id);
        out += '\t';
        out += row.is_duplicate ? '1' : '0';
        out += '\t';
        for (std::size_t i = 0; i < row.terms.size(); ++i) {
            if (i) out += ' ';
            out += row.terms[i];
        }
        out += '\n';
    }
    return out;
}

std::vector<SyntheticQuery> read_log_tsv(std::string_view contents) {
    std::vector<SyntheticQuery> log;
    std::map<std::int64_t, std::uint32_t> ord;
    std::size_t line_no = 0;
    for (std::string_view line : split(contents, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto cols = split(line, '\t');
        if (cols.size() != 6)
            throw FormatError("log line " + std::to_string(line_no) + ": expected 6 columns");
        SyntheticQuery row;
        row.query_id = parse_u64(cols[0]);
        std::int64_t account;
        auto [p, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), account);
        if (ec != std::errc() || p != cols[1].data() + cols[1].size())
            throw FormatError("log line " + std::to_string(line_no) + ": bad account id");
        row.account_id = account;
        row.forum_id = std::string(cols[2]);
        row.source_question_id = static_cast<std::int64_t>(parse_u64(cols[3]));
        row.is_duplicate = cols[4] == "1";
        for (std::string_view term : split(cols[5], ' '))
            if (!term.empty()) row.terms.emplace_back(term);
        row.timestamp_ord = ord[row.account_id]++;
        log.push_back(std::move(row));
    }
    return log;
}

}  // namespace cqalog
