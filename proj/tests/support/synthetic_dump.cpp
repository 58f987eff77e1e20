#include "support/synthetic_dump.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <tuple>

#include "cqalog/rng.hpp"

namespace cqalog::testing {

namespace {

const char* kApples[] = {"grafting",   "pruning",  "orchard",  "cider",    "pollination",
                         "rootstock",  "sapling",  "blossom",  "harvest",  "cultivar",
                         "fireblight", "espalier", "canopy",   "mulch",    "compost",
                         "irrigation", "thinning", "scion",    "budding",  "codling",
                         "russet",     "bramley",  "windfall", "dormancy", "nursery",
                         "scab",       "pippin",   "pomace",   "ripening", "orchardist"};

const char* kBikes[] = {"derailleur", "sprocket", "chainring", "cassette",  "crankset",
                        "headset",    "handlebar", "saddle",   "spokes",    "puncture",
                        "tubeless",   "sealant",  "rotor",     "caliper",   "shifter",
                        "freehub",    "fender",   "pannier",   "commuter",  "gravel",
                        "drivetrain", "grips",    "wheelset",  "hub",       "axle",
                        "cleats",     "pedals",   "tension",   "truing",    "clearance"};

const char* kCoffee[] = {"espresso",  "grinder",    "portafilter", "tamper",     "crema",
                         "roast",     "arabica",    "robusta",     "brewing",    "pourover",
                         "chemex",    "aeropress",  "percolator",  "acidity",    "bloom",
                         "degassing", "dose",       "ratio",       "kettle",     "gooseneck",
                         "barista",   "latte",      "cappuccino",  "burr",       "chaff",
                         "decaf",     "moka",       "siphon",      "dripper",    "turbulence"};

const char* kVerbs[] = {"prevent", "improve",   "adjust",   "replace",  "maintain", "restore",
                        "calibrate", "diagnose", "rebuild",  "upgrade",  "measure",  "stabilize"};

const char* kSeasons[] = {"winter", "spring", "summer", "autumn"};

const char* kFiller[] = {"schedule", "mistake",  "beginner", "technique", "advice",  "tutorial",
                         "workshop", "budget",   "warranty", "routine",   "climate", "storage"};

const char* const* topic_pool(int forum_idx) {
    switch (forum_idx % 3) {
        case 0: return kApples;
        case 1: return kBikes;
        default: return kCoffee;
    }
}

std::string forum_name(int forum_idx) {
    switch (forum_idx) {
        case 0: return "apples";
        case 1: return "bikes";
        case 2: return "coffee";
        default: {
            char buf[16];
            std::snprintf(buf, sizeof buf, "forum%02d", forum_idx);
            return buf;
        }
    }
}

std::string make_date(int n) {
    int day_index = n / 24;
    char buf[32];
    std::snprintf(buf, sizeof buf, "2013-%02d-%02dT%02d:%02d:00", 1 + (day_index / 28) % 12,
                  1 + day_index % 28, n % 24, (n * 17) % 60);
    return buf;
}

struct RawPost {
    Post post;
    std::string date;
};

struct RawForum {
    std::string forum_id;
    std::vector<RawPost> posts;
    // local id -> account id; account -1 stands for a Users row without an
    // AccountId attribute
    std::vector<std::pair<std::int64_t, std::int64_t>> users;
    // (vote type, local user id, post id); only type 5 is a favorite
    std::vector<std::tuple<int, std::int64_t, std::int64_t>> votes;
};

std::int64_t local_id(int forum_idx, int account) {
    return (forum_idx + 1) * 1000 + account;
}

RawForum make_forum(int forum_idx, const DumpSpec& spec) {
    RawForum forum;
    forum.forum_id = forum_name(forum_idx);
    const char* const* topics = topic_pool(forum_idx);
    int date_counter = 0;
    bool broken = spec.broken_rows && forum_idx == 0;

    for (int a = 1; a <= spec.accounts; ++a) forum.users.push_back({local_id(forum_idx, a), a});
    if (broken) forum.users.push_back({local_id(forum_idx, 999), -1});  // no AccountId

    for (int i = 1; i <= spec.questions_per_forum; ++i) {
        int t1 = i % 30, t2 = (i * 7 + 11) % 30, t3 = (i * 13 + 17) % 30;
        if (t2 == t1) t2 = (t2 + 1) % 30;
        while (t3 == t1 || t3 == t2) t3 = (t3 + 1) % 30;
        std::string w1 = topics[t1], w2 = topics[t2], w3 = topics[t3];
        std::string verb = kVerbs[i % 12];
        std::string season = kSeasons[i % 4];
        std::string f1 = kFiller[(i * 5) % 12], f2 = kFiller[(i * 5 + 3) % 12];

        RawPost q;
        q.post.post_id = i * 10;
        q.post.type = PostType::question;
        q.post.owner_user_id = local_id(forum_idx, (i - 1) % spec.accounts + 1);
        q.post.score = (i * 3) % 17 - 2;
        q.post.title = "How do I " + verb + " the " + w1 + " " + w2 + " for " + w3 + "?";
        q.post.body = "<p>I have been trying to " + verb + " the " + w1 + " in my " + w2 +
                      " since last " + season + ". The " + w1 + " keeps failing &amp; the " +
                      w2 + " looks wrong after every " + f1 + ".</p>\n<p>Is there a " + w3 +
                      " " + f2 + " for the " + w1 + "? Any advice about a proper " + f1 +
                      " would help.</p>";
        q.post.accepted_answer_id = i * 10 + 1;
        if (broken && i == 2) q.post.accepted_answer_id = -1;       // never accepted
        if (broken && i == 3) q.post.accepted_answer_id = 45;       // someone else's answer
        q.date = make_date(date_counter++);
        q.post.creation_ms = parse_timestamp_ms(q.date);
        forum.posts.push_back(std::move(q));

        for (int j = 0; j <= spec.other_answers; ++j) {
            RawPost a;
            a.post.post_id = i * 10 + 1 + j;
            a.post.type = PostType::answer;
            a.post.parent_id = i * 10;
            a.post.owner_user_id = local_id(forum_idx, (i + j * 3) % spec.accounts + 1);
            a.post.score = (i + 7 * j) % 11 - 1;
            if (j == 0) {
                a.post.body = "<p>You should " + verb + " the " + w1 + " before the " + w2 +
                              " settles in. I rebuilt my " + w1 + " with a " + w3 +
                              " gauge and it worked; see <code>notes-" + std::to_string(i) +
                              "</code> for the " + f2 + ".</p>";
            } else {
                std::string t = j % 3 == 1 ? w1 : (j % 3 == 2 ? w2 : w3);
                a.post.body = "<p>Maybe check the " + t + " again, a bad " +
                              kFiller[(i + j) % 12] + " often causes this. Worked for me last " +
                              kSeasons[(i + j) % 4] + ".</p>";
            }
            a.date = make_date(date_counter++);
            a.post.creation_ms = parse_timestamp_ms(a.date);
            forum.posts.push_back(std::move(a));
        }
    }

    if (broken) {
        RawPost extra;  // owner not in Users.xml -> synthetic account
        extra.post.post_id = 17;
        extra.post.type = PostType::answer;
        extra.post.parent_id = 10;
        extra.post.owner_user_id = 7777;
        extra.post.body = "<p>An orphaned reply about the grafting gauge.</p>";
        extra.date = make_date(date_counter++);
        extra.post.creation_ms = parse_timestamp_ms(extra.date);
        forum.posts.push_back(std::move(extra));

        RawPost dangling;  // parent question does not exist
        dangling.post.post_id = 9999;
        dangling.post.type = PostType::answer;
        dangling.post.parent_id = 88888;
        dangling.post.owner_user_id = local_id(forum_idx, 1);
        dangling.post.body = "<p>Replying to a deleted question.</p>";
        dangling.date = make_date(date_counter++);
        dangling.post.creation_ms = parse_timestamp_ms(dangling.date);
        forum.posts.push_back(std::move(dangling));
    }

    Rng rng(spec.seed + static_cast<std::uint64_t>(forum_idx));
    forum.votes.push_back({5, local_id(forum_idx, 1), 10});  // self-favorite of question 1
    for (int n = 1; n < spec.favorites_per_forum; ++n) {
        int account = 1 + static_cast<int>(rng.bounded(spec.accounts));
        int question = 1 + static_cast<int>(rng.bounded(spec.questions_per_forum));
        forum.votes.push_back({5, local_id(forum_idx, account), question * 10});
    }
    if (broken) {
        forum.votes.push_back({5, 7777, 20});                    // unmapped user
        forum.votes.push_back({5, local_id(forum_idx, 2), 12});  // favorite on an answer
        forum.votes.push_back({2, local_id(forum_idx, 3), 10});  // upvote, not a favorite
    }
    return forum;
}

std::vector<RawForum> make_raw(const DumpSpec& spec) {
    std::vector<RawForum> forums;
    for (int f = 0; f < spec.forums; ++f) forums.push_back(make_forum(f, spec));
    return forums;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void write_posts_xml(const std::filesystem::path& path, const RawForum& forum,
                     bool broken_extras) {
    std::ofstream out(path);
    out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n";
    for (const RawPost& rp : forum.posts) {
        const Post& p = rp.post;
        out << "  <row Id=\"" << p.post_id << "\" PostTypeId=\""
            << (p.type == PostType::question ? 1 : 2) << "\"";
        if (p.type == PostType::question) {
            if (p.accepted_answer_id >= 0)
                out << " AcceptedAnswerId=\"" << p.accepted_answer_id << "\"";
        } else {
            out << " ParentId=\"" << p.parent_id << "\"";
        }
        out << " CreationDate=\"" << rp.date << "\" Score=\"" << p.score << "\" Body=\""
            << xml_escape(p.body) << "\"";
        if (p.owner_user_id >= 0) out << " OwnerUserId=\"" << p.owner_user_id << "\"";
        if (p.type == PostType::question) out << " Title=\"" << xml_escape(p.title) << "\"";
        out << " />\n";
    }
    if (broken_extras) {
        // rows the parser must skip: a wiki post type and a body-less row
        out << "  <row Id=\"500001\" PostTypeId=\"3\" CreationDate=\"2013-06-01T00:00:00\" "
               "Body=\"tag wiki\" />\n";
        out << "  <row Id=\"500002\" PostTypeId=\"1\" CreationDate=\"2013-06-01T00:00:00\" "
               "Title=\"no body\" />\n";
    }
    out << "</posts>\n";
}

void write_users_xml(const std::filesystem::path& path, const RawForum& forum) {
    std::ofstream out(path);
    out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<users>\n";
    for (const auto& [local, account] : forum.users) {
        out << "  <row Id=\"" << local << "\" Reputation=\"" << (101 + local % 900)
            << "\" DisplayName=\"user" << local << "\"";
        if (account >= 0) out << " AccountId=\"" << account << "\"";
        out << " CreationDate=\"2012-01-01T00:00:00\" />\n";
    }
    out << "</users>\n";
}

void write_votes_xml(const std::filesystem::path& path, const RawForum& forum) {
    std::ofstream out(path);
    out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<votes>\n";
    int id = 1;
    for (const auto& [type, user, post] : forum.votes) {
        out << "  <row Id=\"" << id++ << "\" PostId=\"" << post << "\" VoteTypeId=\"" << type
            << "\"";
        if (type == 5) out << " UserId=\"" << user << "\"";
        out << " CreationDate=\"2013-07-01T00:00:00\" />\n";
    }
    out << "</votes>\n";
}

ForumDump to_forum_dump(const RawForum& raw) {
    ForumDump dump;
    dump.forum_id = raw.forum_id;
    for (const RawPost& rp : raw.posts) dump.posts.push_back(rp.post);
    for (const auto& [local, account] : raw.users)
        if (account >= 0) dump.accounts[local] = account;
    for (const auto& [type, user, post] : raw.votes)
        if (type == 5) dump.favorites.push_back({user, post});
    return dump;
}

}  // namespace

std::vector<ForumDump> synthetic_forum_dumps(const DumpSpec& spec) {
    std::vector<ForumDump> dumps;
    for (const RawForum& raw : make_raw(spec)) dumps.push_back(to_forum_dump(raw));
    return dumps;
}

void write_synthetic_dump(const std::filesystem::path& root, const DumpSpec& spec) {
    for (const RawForum& raw : make_raw(spec)) {
        std::filesystem::path dir = root / raw.forum_id;
        std::filesystem::create_directories(dir);
        write_posts_xml(dir / "Posts.xml", raw, spec.broken_rows && raw.forum_id == "apples");
        write_users_xml(dir / "Users.xml", raw);
        write_votes_xml(dir / "Votes.xml", raw);
    }
}

Corpus synthetic_corpus(const DumpSpec& spec) {
    return link_corpus(synthetic_forum_dumps(spec));
}

void write_flat_posts_xml(const std::filesystem::path& path, std::uint64_t rows) {
    std::ofstream out(path);
    out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n";
    for (std::uint64_t i = 1; i <= rows; ++i) {
        if (i % 2 == 1) {
            out << "  <row Id=\"" << i
                << "\" PostTypeId=\"1\" AcceptedAnswerId=\"" << (i + 1)
                << "\" CreationDate=\"2014-01-01T00:00:00\" Score=\"2\" "
                   "Body=\"&lt;p&gt;Why does the compost heap cool down overnight "
                   "&amp; dry out at the edges?&lt;/p&gt;\" OwnerUserId=\"11\" "
                   "Title=\"Compost heap cooling\" />\n";
        } else {
            out << "  <row Id=\"" << i << "\" ParentId=\"" << (i - 1)
                << "\" PostTypeId=\"2\" CreationDate=\"2014-01-01T01:00:00\" Score=\"1\" "
                   "Body=\"&lt;p&gt;Turn it weekly and keep the moisture even; edges "
                   "always dry first.&lt;/p&gt;\" OwnerUserId=\"12\" />\n";
        }
    }
    out << "</posts>\n";
}

std::string fixture_word(std::uint64_t index, std::uint64_t role) {
    static const char* syl[] = {"ban", "rem", "mit", "tol", "lun", "san", "ver", "pol",
                                "gar", "nis", "fen", "dor", "cal", "tri", "mos", "hel"};
    static const char* tail[] = {"ban", "rem", "mit", "tol", "lun", "ver", "pol", "gar",
                                 "fen", "dor", "cal", "tri", "mol", "hel", "run", "dim"};
    // hash the index so words do not recur with a short period; the role
    // stride of 3 keeps words of one question distinct in the first slot
    std::uint64_t h = (index + 1) * 0x9e3779b97f4a7c15ULL;
    h ^= h >> 31;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 29;
    std::string w;
    w += syl[(h + 3 * role) % 16];
    w += syl[((h >> 8) + 7 * role + 5) % 16];
    w += tail[((h >> 16) + role) % 16];
    return w;
}

std::vector<QuestionQueryPair> preference_pairs(int annotators, int per_annotator) {
    // Annotator u00 contributes 20x as many pairs and queries low-tf filler
    // words, pulling any pooled model away from the repeated words the other
    // annotators pick (odd ones from the title, even ones from the body).
    std::vector<QuestionQueryPair> pairs;
    for (int a = 0; a < annotators; ++a) {
        int count = a == 0 ? per_annotator * 20 : per_annotator;
        for (int p = 0; p < count; ++p) {
            std::uint64_t g = static_cast<std::uint64_t>(a) * (per_annotator * 32ULL) +
                              static_cast<std::uint64_t>(p);
            std::string a1 = fixture_word(g, 1), a2 = fixture_word(g, 2);
            std::string b1 = fixture_word(g, 3), b2 = fixture_word(g, 4);
            std::string f1 = fixture_word(g, 5), f2 = fixture_word(g, 6);
            std::string title = a1 + " " + a2;
            std::string body = b1 + " " + b2 + " and " + b1 + " " + b2 + " with " + f1 + " " +
                               f2 + " " + fixture_word(g, 7) + " " + fixture_word(g, 8) + " " +
                               fixture_word(g, 9) + " " + fixture_word(g, 10) + " then " + a1 +
                               " " + a2 + " again tag" + std::to_string(g);
            std::string query;
            if (a == 0)
                query = f1 + " " + f2;
            else if (a % 2 == 1)
                query = a1 + " " + a2;
            else
                query = b1 + " " + b2;
            char pair_id[24], annotator[16];
            std::snprintf(pair_id, sizeof pair_id, "p%07llu",
                          static_cast<unsigned long long>(g));
            std::snprintf(annotator, sizeof annotator, "u%02d", a);
            pairs.push_back(make_pair(pair_id, annotator, "prefs", title, body, query));
        }
    }
    return pairs;
}

std::vector<QuestionQueryPair> agreement_fixture(int questions, int annotators) {
    std::vector<QuestionQueryPair> pairs;
    for (int q = 0; q < questions; ++q) {
        std::vector<std::string> words;
        for (int j = 0; j < 7; ++j)
            words.push_back(fixture_word(static_cast<std::uint64_t>(q), 20 + j));
        std::string title = words[0] + " " + words[1];
        std::string body = "tag" + std::to_string(q);
        for (const std::string& w : words) {
            body += ' ';
            body += w;
        }
        for (int t = 0; t < annotators; ++t) {
            std::string query = words[t] + " " + words[t + 1] + " " + words[t + 2];
            char pair_id[24], annotator[16];
            std::snprintf(pair_id, sizeof pair_id, "q%03da%d", q, t);
            std::snprintf(annotator, sizeof annotator, "a%d", t);
            pairs.push_back(make_pair(pair_id, annotator, "agree", title, body, query));
        }
    }
    return pairs;
}

}  // namespace cqalog::testing
