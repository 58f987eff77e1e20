#include "cqalog/trec.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "cqalog/errors.hpp"

namespace cqalog {
namespace {

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::uint64_t to_u64(std::string_view s, const char* what, std::size_t line_no) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("line " + std::to_string(line_no) + ": bad " + what);
    return v;
}

template <typename F>
void for_lines(std::string_view contents, F&& f) {
    std::size_t start = 0, line_no = 0;
    while (start < contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view line = contents.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) f(line, line_no);
    }
}

}  // namespace

std::string write_run(const std::vector<RunEntry>& entries) {
    std::string out;
    char buf[64];
    for (const RunEntry& e : entries) {
        out += std::to_string(e.query_id);
        out += " Q0 ";
        out += std::to_string(e.doc_key);
        out += ' ';
        out += std::to_string(e.rank);
        out += ' ';
        std::snprintf(buf, sizeof buf, "%.17g", e.score);
        out += buf;
        out += ' ';
        out += e.tag.empty() ? "cqalog" : e.tag;
        out += '\n';
    }
    return out;
}

std::vector<RunEntry> read_run(std::string_view contents) {
    std::vector<RunEntry> entries;
    for_lines(contents, [&entries](std::string_view line, std::size_t line_no) {
        auto f = fields(line);
        if (f.size() != 6)
            throw FormatError("line " + std::to_string(line_no) + ": expected 6 run fields");
        RunEntry e;
        e.query_id = to_u64(f[0], "query id", line_no);
        e.doc_key = to_u64(f[2], "doc id", line_no);
        e.rank = static_cast<std::uint32_t>(to_u64(f[3], "rank", line_no));
        std::string score(f[4]);
        char* end = nullptr;
        e.score = std::strtod(score.c_str(), &end);
        if (end != score.c_str() + score.size())
            throw FormatError("line " + std::to_string(line_no) + ": bad score");
        e.tag = std::string(f[5]);
        entries.push_back(std::move(e));
    });
    return entries;
}

std::string write_qrels(const std::vector<QrelRow>& rows) {
    std::string out;
    for (const QrelRow& row : rows) {
        out += std::to_string(row.query_id);
        out += " 0 ";
        out += std::to_string(row.doc_key);
        out += ' ';
        out += std::to_string(row.grade);
        out += '\n';
    }
    return out;
}

std::vector<QrelRow> read_qrels(std::string_view contents) {
    std::vector<QrelRow> rows;
    for_lines(contents, [&rows](std::string_view line, std::size_t line_no) {
        auto f = fields(line);
        if (f.size() != 4)
            throw FormatError("line " + std::to_string(line_no) + ": expected 4 qrels fields");
        QrelRow row;
        row.query_id = to_u64(f[0], "query id", line_no);
        row.doc_key = to_u64(f[2], "doc id", line_no);
        row.grade = static_cast<int>(to_u64(f[3], "grade", line_no));
        rows.push_back(row);
    });
    return rows;
}

}  // namespace cqalog
