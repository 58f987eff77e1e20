#include "cqalog/dump.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <thread>

#include "cqalog/errors.hpp"
#include "cqalog/xml.hpp"

namespace cqalog {
namespace {

bool to_i64(std::string_view s, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::int64_t attr_i64(const XmlRowReader& row, std::string_view name, std::int64_t fallback) {
    auto value = row.attr(name);
    std::int64_t parsed;
    if (value && to_i64(*value, parsed)) return parsed;
    return fallback;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

}  // namespace

ParseStats parse_posts(std::istream& in, const PostSink& sink) {
    ParseStats stats;
    XmlRowReader reader(in);
    while (reader.next_row()) {
        ++stats.rows;
        std::int64_t type_id = attr_i64(reader, "PostTypeId", 0);
        if (type_id != 1 && type_id != 2) {
            ++stats.skipped_type;
            continue;
        }
        std::int64_t id = attr_i64(reader, "Id", -1);
        auto body = reader.attr("Body");
        if (id <= 0 || !body) {
            ++stats.skipped_invalid;
            continue;
        }
        Post post;
        post.post_id = id;
        post.type = type_id == 1 ? PostType::question : PostType::answer;
        post.body = std::string(*body);
        post.owner_user_id = attr_i64(reader, "OwnerUserId", -1);
        post.score = static_cast<std::int32_t>(attr_i64(reader, "Score", 0));
        post.favorite_count = static_cast<std::int32_t>(attr_i64(reader, "FavoriteCount", 0));
        if (auto created = reader.attr("CreationDate"))
            post.creation_ms = parse_timestamp_ms(*created);
        if (post.type == PostType::question) {
            post.accepted_answer_id = attr_i64(reader, "AcceptedAnswerId", -1);
            if (auto title = reader.attr("Title")) post.title = std::string(*title);
        } else {
            post.parent_id = attr_i64(reader, "ParentId", -1);
            if (post.parent_id <= 0) {
                ++stats.skipped_invalid;
                continue;
            }
        }
        ++stats.kept;
        sink(std::move(post));
    }
    return stats;
}

ParseStats parse_users(std::istream& in, std::map<std::int64_t, std::int64_t>& out) {
    ParseStats stats;
    XmlRowReader reader(in);
    while (reader.next_row()) {
        ++stats.rows;
        std::int64_t id = attr_i64(reader, "Id", -1);
        std::int64_t account = attr_i64(reader, "AccountId", -1);
        if (id < 0 || account < 0) {
            ++stats.skipped_invalid;
            continue;
        }
        ++stats.kept;
        out[id] = account;
    }
    return stats;
}

ParseStats parse_votes(std::istream& in,
                       std::vector<std::pair<std::int64_t, std::int64_t>>& out) {
    ParseStats stats;
    XmlRowReader reader(in);
    while (reader.next_row()) {
        ++stats.rows;
        if (attr_i64(reader, "VoteTypeId", 0) != 5) {
            ++stats.skipped_type;
            continue;
        }
        std::int64_t user = attr_i64(reader, "UserId", -1);
        std::int64_t post = attr_i64(reader, "PostId", -1);
        if (user < 0 || post <= 0) {
            ++stats.skipped_invalid;
            continue;
        }
        ++stats.kept;
        out.emplace_back(user, post);
    }
    return stats;
}

ExclusionList parse_exclusion_list(std::string_view contents) {
    ExclusionList list;
    std::size_t start = 0;
    while (start <= contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view line = contents.substr(start, end - start);
        start = end + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string_view::npos) continue;
        std::size_t b = line.find_first_of(" \t\r", a);
        std::string forum(line.substr(a, (b == std::string_view::npos ? line.size() : b) - a));
        std::string reason = "excluded";
        if (b != std::string_view::npos) {
            std::size_t c = line.find_first_not_of(" \t\r", b);
            if (c != std::string_view::npos) {
                std::size_t d = line.find_last_not_of(" \t\r");
                reason = std::string(line.substr(c, d - c + 1));
            }
        }
        list.reasons[forum] = reason;
    }
    return list;
}

ExclusionList load_exclusion_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string contents((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    return parse_exclusion_list(contents);
}

ForumDump ingest_forum_dir(const std::filesystem::path& dir, ParseStats* stats) {
    ForumDump dump;
    dump.forum_id = dir.filename().string();
    auto posts_in = open_or_throw(dir / "Posts.xml");
    ParseStats parsed =
        parse_posts(posts_in, [&dump](Post&& post) { dump.posts.push_back(std::move(post)); });
    if (stats) *stats = parsed;
    if (std::filesystem::exists(dir / "Users.xml")) {
        auto users_in = open_or_throw(dir / "Users.xml");
        parse_users(users_in, dump.accounts);
    }
    if (std::filesystem::exists(dir / "Votes.xml")) {
        auto votes_in = open_or_throw(dir / "Votes.xml");
        parse_votes(votes_in, dump.favorites);
    }
    return dump;
}

std::vector<ForumDump> ingest_dump(const std::filesystem::path& dump_dir,
                                   const ExclusionList& excluded, int threads,
                                   IngestReport* report) {
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(dump_dir))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());

    std::vector<std::filesystem::path> todo;
    for (const auto& dir : dirs) {
        std::string forum_id = dir.filename().string();
        if (excluded.contains(forum_id)) {
            if (report) report->excluded.push_back(forum_id);
            continue;
        }
        todo.push_back(dir);
    }

    std::vector<ForumDump> dumps(todo.size());
    std::vector<ParseStats> stats(todo.size());
    if (threads <= 1 || todo.size() <= 1) {
        for (std::size_t i = 0; i < todo.size(); ++i)
            dumps[i] = ingest_forum_dir(todo[i], &stats[i]);
    } else {
        std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), todo.size());
        std::mutex mu;
        std::size_t next = 0;
        std::exception_ptr failure;
        auto work = [&] {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (failure || next >= todo.size()) return;
                    i = next++;
                }
                try {
                    dumps[i] = ingest_forum_dir(todo[i], &stats[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    if (report)
        for (std::size_t i = 0; i < dumps.size(); ++i)
            report->post_stats[dumps[i].forum_id] = stats[i];
    return dumps;
}

}  // namespace cqalog
