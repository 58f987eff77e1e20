#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cqalog {

enum class PostType : std::uint8_t { question = 1, answer = 2 };

// A post as parsed from one forum's Posts file. post_id is local to the
// forum; forum_idx is assigned when forums are linked into a corpus.
struct Post {
    std::int64_t post_id = 0;
    std::uint32_t forum_idx = 0;
    PostType type = PostType::question;
    std::int64_t parent_id = -1;           // answers; -1 = none
    std::int64_t accepted_answer_id = -1;  // questions; -1 = none
    std::int64_t owner_user_id = -1;       // local user id; -1 = none
    std::int32_t score = 0;
    std::int32_t favorite_count = 0;
    std::int64_t creation_ms = 0;  // epoch milliseconds
    std::string title;             // questions; raw HTML
    std::string body;              // raw HTML
};

struct Forum {
    std::string forum_id;
    std::uint64_t question_count = 0;
    bool excluded = false;
    std::string excluded_reason;
};

struct NetworkUser {
    std::int64_t account_id = 0;
    bool synthetic = false;                        // placeholder owner, one per forum
    std::map<std::uint32_t, std::int64_t> local_ids;  // forum_idx -> local user id
    std::vector<std::uint64_t> question_keys;
    std::vector<std::uint64_t> answer_keys;
};

struct FavoriteEdge {
    std::int64_t account_id = 0;
    std::uint64_t question_key = 0;
};

struct LinkStats {
    std::uint64_t dangling_answers = 0;   // parent question missing
    std::uint64_t duplicate_posts = 0;    // same (forum, id) seen twice; first kept
    std::uint64_t bad_accepted_links = 0; // accepted id missing or not a child answer
    std::uint64_t dropped_favorites = 0;  // target not a kept question, or user unmapped
    std::uint64_t synthetic_owned = 0;    // posts assigned to a synthetic owner
};

// Global post key: forum index in the high 32 bits, the forum-local post id
// in the low 32. Keys therefore sort by (forum_id, post_id).
constexpr std::uint64_t make_key(std::uint32_t forum_idx, std::int64_t post_id) {
    return (static_cast<std::uint64_t>(forum_idx) << 32) |
           static_cast<std::uint64_t>(post_id & 0xffffffff);
}
constexpr std::uint32_t key_forum(std::uint64_t key) {
    return static_cast<std::uint32_t>(key >> 32);
}
constexpr std::int64_t key_post(std::uint64_t key) {
    return static_cast<std::int64_t>(key & 0xffffffff);
}

struct Corpus {
    std::vector<Forum> forums;  // sorted by forum_id; index == forum_idx
    std::map<std::uint64_t, Post> posts;
    std::map<std::uint64_t, std::vector<std::uint64_t>> answers_of;  // question -> answers
    std::map<std::uint64_t, std::uint64_t> accepted_of;              // question -> answer
    std::map<std::int64_t, NetworkUser> users;                       // by account_id
    std::map<std::uint64_t, std::int64_t> owner_of;                  // post key -> account
    std::vector<FavoriteEdge> favorites;  // sorted by (question_key, account_id)
    LinkStats stats;

    const Post& post(std::uint64_t key) const;
    bool has_post(std::uint64_t key) const { return posts.count(key) != 0; }
    const Forum& forum_of(std::uint64_t key) const { return forums[key_forum(key)]; }
};

// Raw per-forum parse results, input to link_corpus.
struct ForumDump {
    std::string forum_id;
    std::vector<Post> posts;
    std::map<std::int64_t, std::int64_t> accounts;  // local user id -> account id
    std::vector<std::pair<std::int64_t, std::int64_t>> favorites;  // (local user, post)
};

// Merge per-forum dumps into one linked corpus: question->answer adjacency,
// accepted-answer links, cross-forum user profiles joined on account id,
// validated favorite edges. Posts without a resolvable owner go to a
// per-forum synthetic user with a negative account id.
Corpus link_corpus(std::vector<ForumDump> dumps);

struct FilterPolicy {
    std::uint64_t min_forum_questions = 100;
    std::uint64_t min_other_answers = 5;
};

// Questions with an accepted answer and at least min_other_answers other
// answers, from non-excluded forums holding at least min_forum_questions
// questions. Sorted.
std::vector<std::uint64_t> filter_questions(const Corpus& corpus, const FilterPolicy& policy);

// Uniform sample without replacement: first n_forums forums among those with
// >= n_per_forum eligible questions, then n_per_forum questions from each.
// Deterministic in seed; result sorted by (forum_id, question_id).
std::vector<std::uint64_t> sample_questions(
    const std::map<std::uint32_t, std::vector<std::uint64_t>>& eligible,
    std::uint64_t n_forums, std::uint64_t n_per_forum, std::uint64_t seed);

// Group a sorted key list by forum index.
std::map<std::uint32_t, std::vector<std::uint64_t>> group_by_forum(
    const std::vector<std::uint64_t>& keys);

// "2010-09-13T19:16:26.763" -> epoch ms; returns 0 when unparseable.
std::int64_t parse_timestamp_ms(std::string_view text);

}  // namespace cqalog
