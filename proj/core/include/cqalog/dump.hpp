#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cqalog/corpus.hpp"

namespace cqalog {

struct ParseStats {
    std::uint64_t rows = 0;
    std::uint64_t kept = 0;
    std::uint64_t skipped_type = 0;     // PostTypeId outside {1,2}
    std::uint64_t skipped_invalid = 0;  // unusable required fields
};

using PostSink = std::function<void(Post&&)>;

// Stream Posts rows into the sink, one at a time; memory stays bounded by a
// single row. Rows with PostTypeId other than 1/2 are counted and skipped.
ParseStats parse_posts(std::istream& in, const PostSink& sink);

// Users rows: local Id -> AccountId. Rows without an AccountId cannot join
// across forums and are skipped (counted in skipped_invalid).
ParseStats parse_users(std::istream& in, std::map<std::int64_t, std::int64_t>& out);

// Votes rows with VoteTypeId=5 and a UserId: (local user id, post id).
ParseStats parse_votes(std::istream& in,
                       std::vector<std::pair<std::int64_t, std::int64_t>>& out);

// Reasons are free-form tags (non-english / specialized / too-small / ...).
struct ExclusionList {
    std::map<std::string, std::string> reasons;  // forum_id -> reason
    bool contains(const std::string& forum_id) const { return reasons.count(forum_id) != 0; }
};

// One forum id per line, optionally followed by whitespace and a reason tag;
// '#' starts a comment.
ExclusionList load_exclusion_list(const std::filesystem::path& path);
ExclusionList parse_exclusion_list(std::string_view contents);

// Parse Posts.xml / Users.xml / Votes.xml inside one forum directory.
// Users.xml and Votes.xml are optional; Posts.xml is not.
ForumDump ingest_forum_dir(const std::filesystem::path& dir, ParseStats* stats = nullptr);

struct IngestReport {
    std::map<std::string, ParseStats> post_stats;  // by forum id
    std::vector<std::string> excluded;             // forum ids skipped entirely
};

// Every subdirectory of dump_dir is a forum named by the directory. Excluded
// forums are recorded but not parsed. Forums come back sorted by forum id.
// threads > 1 parses forums concurrently.
std::vector<ForumDump> ingest_dump(const std::filesystem::path& dump_dir,
                                   const ExclusionList& excluded, int threads,
                                   IngestReport* report = nullptr);

}  // namespace cqalog
