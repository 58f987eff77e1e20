#include "cqalog/snapshot.hpp"

#include <json.hpp>

#include "cqalog/errors.hpp"
#include "cqalog/io.hpp"

namespace cqalog {
namespace {

constexpr char kMagic[4] = {'C', 'Q', 'A', 'C'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

std::int64_t unzigzag(std::uint64_t v) {
    return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

void write_post(ByteWriter& w, std::uint64_t key, const Post& post) {
    ByteWriter rec;
    rec.varint(key);
    rec.buf.push_back(static_cast<char>(post.type));
    rec.varint(zigzag(post.parent_id));
    rec.varint(zigzag(post.accepted_answer_id));
    rec.varint(zigzag(post.owner_user_id));
    rec.varint(zigzag(post.score));
    rec.varint(zigzag(post.favorite_count));
    rec.varint(zigzag(post.creation_ms));
    rec.str(post.title);
    rec.str(post.body);
    w.varint(rec.buf.size());
    w.buf.append(rec.buf);
}

Post read_post(ByteReader& r, std::uint64_t& key) {
    std::uint64_t len = r.varint();
    std::size_t end = r.pos() + len;
    key = r.varint();
    Post post;
    post.post_id = key_post(key);
    post.forum_idx = key_forum(key);
    post.type = static_cast<PostType>(r.str_bytes(1)[0]);
    if (post.type != PostType::question && post.type != PostType::answer)
        throw FormatError("bad post type in snapshot");
    post.parent_id = unzigzag(r.varint());
    post.accepted_answer_id = unzigzag(r.varint());
    post.owner_user_id = unzigzag(r.varint());
    post.score = static_cast<std::int32_t>(unzigzag(r.varint()));
    post.favorite_count = static_cast<std::int32_t>(unzigzag(r.varint()));
    post.creation_ms = unzigzag(r.varint());
    post.title = r.str();
    post.body = r.str();
    if (r.pos() != end) throw FormatError("post record length mismatch");
    return post;
}

}  // namespace

std::string serialize_corpus(const Corpus& corpus) {
    ByteWriter w;
    w.buf.append(kMagic, 4);
    w.u32(kVersion);

    w.varint(corpus.forums.size());
    for (const Forum& forum : corpus.forums) {
        w.str(forum.forum_id);
        w.varint(forum.question_count);
        w.buf.push_back(forum.excluded ? 1 : 0);
        w.str(forum.excluded_reason);
    }

    w.varint(corpus.posts.size());
    for (const auto& [key, post] : corpus.posts) write_post(w, key, post);

    w.varint(corpus.users.size());
    for (const auto& [account, user] : corpus.users) {
        w.varint(zigzag(account));
        w.buf.push_back(user.synthetic ? 1 : 0);
        w.varint(user.local_ids.size());
        for (auto [forum_idx, local] : user.local_ids) {
            w.varint(forum_idx);
            w.varint(zigzag(local));
        }
    }

    w.varint(corpus.favorites.size());
    for (const FavoriteEdge& edge : corpus.favorites) {
        w.varint(zigzag(edge.account_id));
        w.varint(edge.question_key);
    }

    w.varint(corpus.stats.dangling_answers);
    w.varint(corpus.stats.duplicate_posts);
    w.varint(corpus.stats.bad_accepted_links);
    w.varint(corpus.stats.dropped_favorites);
    w.varint(corpus.stats.synthetic_owned);
    return w.buf;
}

Corpus deserialize_corpus(const std::string& bytes) {
    ByteReader r(bytes.data(), bytes.size());
    if (bytes.size() < 8 || r.str_bytes(4) != std::string_view(kMagic, 4))
        throw FormatError("not a corpus snapshot");
    std::uint32_t version = r.u32();
    if (version != kVersion)
        throw FormatError("unsupported snapshot version " + std::to_string(version));

    Corpus corpus;
    std::uint64_t n_forums = r.varint();
    corpus.forums.resize(n_forums);
    for (Forum& forum : corpus.forums) {
        forum.forum_id = r.str();
        forum.question_count = r.varint();
        forum.excluded = r.str_bytes(1)[0] != 0;
        forum.excluded_reason = r.str();
    }

    std::uint64_t n_posts = r.varint();
    for (std::uint64_t i = 0; i < n_posts; ++i) {
        std::uint64_t key;
        Post post = read_post(r, key);
        if (post.forum_idx >= corpus.forums.size())
            throw FormatError("post references unknown forum");
        corpus.posts.emplace(key, std::move(post));
    }

    std::uint64_t n_users = r.varint();
    for (std::uint64_t i = 0; i < n_users; ++i) {
        std::int64_t account = unzigzag(r.varint());
        NetworkUser& user = corpus.users[account];
        user.account_id = account;
        user.synthetic = r.str_bytes(1)[0] != 0;
        std::uint64_t n_local = r.varint();
        for (std::uint64_t j = 0; j < n_local; ++j) {
            std::uint32_t forum_idx = static_cast<std::uint32_t>(r.varint());
            user.local_ids[forum_idx] = unzigzag(r.varint());
        }
    }

    std::uint64_t n_favorites = r.varint();
    corpus.favorites.reserve(n_favorites);
    for (std::uint64_t i = 0; i < n_favorites; ++i) {
        FavoriteEdge edge;
        edge.account_id = unzigzag(r.varint());
        edge.question_key = r.varint();
        corpus.favorites.push_back(edge);
    }

    corpus.stats.dangling_answers = r.varint();
    corpus.stats.duplicate_posts = r.varint();
    corpus.stats.bad_accepted_links = r.varint();
    corpus.stats.dropped_favorites = r.varint();
    corpus.stats.synthetic_owned = r.varint();
    if (!r.done()) throw FormatError("trailing bytes in snapshot");

    // adjacency, acceptance links, and per-user post lists are derived state
    for (auto& [key, post] : corpus.posts) {
        if (post.type == PostType::answer)
            corpus.answers_of[make_key(post.forum_idx, post.parent_id)].push_back(key);
        else if (post.accepted_answer_id > 0)
            corpus.accepted_of[key] = make_key(post.forum_idx, post.accepted_answer_id);
    }
    std::map<std::pair<std::uint32_t, std::int64_t>, std::int64_t> local_to_account;
    for (const auto& [account, user] : corpus.users)
        for (auto [forum_idx, local] : user.local_ids) local_to_account[{forum_idx, local}] = account;
    for (auto& [key, post] : corpus.posts) {
        auto it = local_to_account.find({post.forum_idx, post.owner_user_id});
        std::int64_t account = it != local_to_account.end()
                                   ? it->second
                                   : -(static_cast<std::int64_t>(post.forum_idx) + 1);
        NetworkUser& user = corpus.users[account];
        user.account_id = account;
        if (it == local_to_account.end()) user.synthetic = true;
        (post.type == PostType::question ? user.question_keys : user.answer_keys).push_back(key);
        corpus.owner_of[key] = account;
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_corpus(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) {
    return deserialize_corpus(read_file(path));
}

void export_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
    std::string out;
    for (const auto& [key, post] : corpus.posts) {
        nlohmann::json row{
            {"key", key},
            {"forum", corpus.forums[post.forum_idx].forum_id},
            {"post_id", post.post_id},
            {"type", post.type == PostType::question ? "question" : "answer"},
            {"score", post.score},
        };
        if (post.type == PostType::question) {
            row["title"] = post.title;
            if (post.accepted_answer_id > 0) row["accepted_answer_id"] = post.accepted_answer_id;
        } else {
            row["parent_id"] = post.parent_id;
        }
        if (post.owner_user_id >= 0) row["owner_user_id"] = post.owner_user_id;
        row["body"] = post.body;
        out += row.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::string corpus_stats_json(const Corpus& corpus) {
    std::uint64_t questions = 0, answers = 0, accepted = 0;
    for (const auto& [key, post] : corpus.posts)
        (post.type == PostType::question ? questions : answers) += 1;
    accepted = corpus.accepted_of.size();
    std::uint64_t real_users = 0;
    for (const auto& [account, user] : corpus.users)
        if (!user.synthetic) ++real_users;

    nlohmann::json forums = nlohmann::json::array();
    for (const Forum& forum : corpus.forums) {
        nlohmann::json f{{"forum_id", forum.forum_id}, {"questions", forum.question_count}};
        if (forum.excluded) f["excluded"] = forum.excluded_reason;
        forums.push_back(f);
    }
    nlohmann::json doc{
        {"forums", forums},
        {"posts", corpus.posts.size()},
        {"questions", questions},
        {"answers", answers},
        {"questions_with_accepted_answer", accepted},
        {"users", real_users},
        {"favorites", corpus.favorites.size()},
        {"link_warnings",
         {{"dangling_answers", corpus.stats.dangling_answers},
          {"duplicate_posts", corpus.stats.duplicate_posts},
          {"bad_accepted_links", corpus.stats.bad_accepted_links},
          {"dropped_favorites", corpus.stats.dropped_favorites},
          {"synthetic_owned", corpus.stats.synthetic_owned}}},
    };
    return doc.dump(2) + "\n";
}

}  // namespace cqalog
