#include "cqalog/corpus.hpp"

#include <algorithm>
#include <charconv>

#include "cqalog/errors.hpp"
#include "cqalog/rng.hpp"

namespace cqalog {

const Post& Corpus::post(std::uint64_t key) const {
    auto it = posts.find(key);
    if (it == posts.end()) throw DanglingReference(key_post(key));
    return it->second;
}

namespace {

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_int_field(std::string_view s, std::size_t from, std::size_t len, int& out) {
    auto* first = s.data() + from;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc() && ptr == first + len;
}

std::int64_t synthetic_account(std::uint32_t forum_idx) {
    return -(static_cast<std::int64_t>(forum_idx) + 1);
}

}  // namespace

std::int64_t parse_timestamp_ms(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.mmm]
    if (text.size() < 19 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':')
        return 0;
    int y, mo, d, h, mi, s;
    if (!parse_int_field(text, 0, 4, y) || !parse_int_field(text, 5, 2, mo) ||
        !parse_int_field(text, 8, 2, d) || !parse_int_field(text, 11, 2, h) ||
        !parse_int_field(text, 14, 2, mi) || !parse_int_field(text, 17, 2, s))
        return 0;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) return 0;
    int ms = 0;
    if (text.size() >= 23 && text[19] == '.') parse_int_field(text, 20, 3, ms);
    std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return ((days * 24 + h) * 60 + mi) * 60000 + s * 1000 + ms;
}

Corpus link_corpus(std::vector<ForumDump> dumps) {
    std::sort(dumps.begin(), dumps.end(),
              [](const ForumDump& a, const ForumDump& b) { return a.forum_id < b.forum_id; });

    Corpus corpus;
    corpus.forums.reserve(dumps.size());
    for (std::uint32_t fi = 0; fi < dumps.size(); ++fi) {
        ForumDump& dump = dumps[fi];
        Forum forum;
        forum.forum_id = dump.forum_id;
        corpus.forums.push_back(std::move(forum));

        for (Post& post : dump.posts) {
            if (post.post_id <= 0 || post.post_id > 0xffffffffLL) {
                ++corpus.stats.duplicate_posts;
                continue;
            }
            post.forum_idx = fi;
            std::uint64_t key = make_key(fi, post.post_id);
            if (!corpus.posts.emplace(key, std::move(post)).second)
                ++corpus.stats.duplicate_posts;
        }
    }

    // answers -> parents; drop dangling answers
    std::vector<std::uint64_t> dangling;
    for (auto& [key, post] : corpus.posts) {
        if (post.type != PostType::answer) continue;
        std::uint64_t parent = make_key(post.forum_idx, post.parent_id);
        auto it = post.parent_id > 0 ? corpus.posts.find(parent) : corpus.posts.end();
        if (it == corpus.posts.end() || it->second.type != PostType::question) {
            dangling.push_back(key);
            continue;
        }
        corpus.answers_of[parent].push_back(key);
    }
    corpus.stats.dangling_answers = dangling.size();
    for (std::uint64_t key : dangling) corpus.posts.erase(key);

    // accepted-answer links + forum question counts
    for (auto& [key, post] : corpus.posts) {
        if (post.type != PostType::question) continue;
        ++corpus.forums[post.forum_idx].question_count;
        if (post.accepted_answer_id <= 0) continue;
        std::uint64_t accepted = make_key(post.forum_idx, post.accepted_answer_id);
        auto it = corpus.posts.find(accepted);
        if (it == corpus.posts.end() || it->second.type != PostType::answer ||
            make_key(post.forum_idx, it->second.parent_id) != key) {
            ++corpus.stats.bad_accepted_links;
            post.accepted_answer_id = -1;
            continue;
        }
        corpus.accepted_of[key] = accepted;
    }

    // ownership joined on account id; unmapped owners get a synthetic user
    for (auto& [key, post] : corpus.posts) {
        std::uint32_t fi = post.forum_idx;
        const auto& accounts = dumps[fi].accounts;
        std::int64_t account = 0;
        bool synthetic = false;
        auto it = post.owner_user_id >= 0 ? accounts.find(post.owner_user_id) : accounts.end();
        if (it != accounts.end()) {
            account = it->second;
        } else {
            account = synthetic_account(fi);
            synthetic = true;
            ++corpus.stats.synthetic_owned;
        }
        NetworkUser& user = corpus.users[account];
        user.account_id = account;
        user.synthetic = synthetic;
        if (!synthetic) user.local_ids[fi] = post.owner_user_id;
        (post.type == PostType::question ? user.question_keys : user.answer_keys).push_back(key);
        corpus.owner_of[key] = account;
    }

    // favorites: resolve user, validate target
    for (std::uint32_t fi = 0; fi < dumps.size(); ++fi) {
        const auto& accounts = dumps[fi].accounts;
        for (auto [local_user, post_id] : dumps[fi].favorites) {
            auto user_it = accounts.find(local_user);
            std::uint64_t key = make_key(fi, post_id);
            auto post_it = corpus.posts.find(key);
            if (user_it == accounts.end() || post_it == corpus.posts.end() ||
                post_it->second.type != PostType::question) {
                ++corpus.stats.dropped_favorites;
                continue;
            }
            corpus.favorites.push_back({user_it->second, key});
        }
    }
    std::sort(corpus.favorites.begin(), corpus.favorites.end(),
              [](const FavoriteEdge& a, const FavoriteEdge& b) {
                  return std::tie(a.question_key, a.account_id) <
                         std::tie(b.question_key, b.account_id);
              });
    corpus.favorites.erase(std::unique(corpus.favorites.begin(), corpus.favorites.end(),
                                       [](const FavoriteEdge& a, const FavoriteEdge& b) {
                                           return a.question_key == b.question_key &&
                                                  a.account_id == b.account_id;
                                       }),
                           corpus.favorites.end());
    return corpus;
}

std::vector<std::uint64_t> filter_questions(const Corpus& corpus, const FilterPolicy& policy) {
    std::vector<std::uint64_t> kept;
    for (const auto& [question, accepted] : corpus.accepted_of) {
        const Forum& forum = corpus.forum_of(question);
        if (forum.excluded || forum.question_count < policy.min_forum_questions) continue;
        auto it = corpus.answers_of.find(question);
        std::uint64_t others = it == corpus.answers_of.end() ? 0 : it->second.size() - 1;
        if (others >= policy.min_other_answers) kept.push_back(question);
    }
    return kept;  // map iteration order is already sorted
}

std::map<std::uint32_t, std::vector<std::uint64_t>> group_by_forum(
    const std::vector<std::uint64_t>& keys) {
    std::map<std::uint32_t, std::vector<std::uint64_t>> grouped;
    for (std::uint64_t key : keys) grouped[key_forum(key)].push_back(key);
    return grouped;
}

namespace {

// k distinct indices from [0, n), sorted; partial Fisher-Yates over an
// explicit index table keeps draws O(n) and order-independent of k.
std::vector<std::uint64_t> sample_indices(std::uint64_t n, std::uint64_t k, Rng& rng) {
    std::vector<std::uint64_t> idx(n);
    for (std::uint64_t i = 0; i < n; ++i) idx[i] = i;
    for (std::uint64_t i = 0; i < k; ++i)
        std::swap(idx[i], idx[i + rng.bounded(n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

std::vector<std::uint64_t> sample_questions(
    const std::map<std::uint32_t, std::vector<std::uint64_t>>& eligible,
    std::uint64_t n_forums, std::uint64_t n_per_forum, std::uint64_t seed) {
    if (n_forums == 0) return {};

    std::vector<std::uint32_t> qualifying;
    for (const auto& [forum_idx, questions] : eligible)
        if (questions.size() >= n_per_forum) qualifying.push_back(forum_idx);
    if (qualifying.size() < n_forums)
        throw InsufficientForums(n_forums, qualifying.size());

    Rng forum_rng(derive_seed(seed, "sample.forums"));
    std::vector<std::uint64_t> chosen = sample_indices(qualifying.size(), n_forums, forum_rng);

    std::vector<std::uint64_t> out;
    out.reserve(n_forums * n_per_forum);
    for (std::uint64_t ci : chosen) {
        std::uint32_t forum_idx = qualifying[ci];
        const auto& pool = eligible.at(forum_idx);
        Rng q_rng(derive_seed(seed, "sample.questions", forum_idx));
        for (std::uint64_t qi : sample_indices(pool.size(), n_per_forum, q_rng))
            out.push_back(pool[qi]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cqalog
