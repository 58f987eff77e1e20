#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cqalog {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedXml : Error {
    MalformedXml(int line, const std::string& what)
        : Error("malformed XML at line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

struct DanglingReference : Error {
    explicit DanglingReference(std::int64_t post_id)
        : Error("dangling reference to post " + std::to_string(post_id)), post_id(post_id) {}
    std::int64_t post_id;
};

struct InsufficientForums : Error {
    InsufficientForums(std::size_t wanted, std::size_t available)
        : Error("sampling needs " + std::to_string(wanted) + " forums but only " +
                std::to_string(available) + " qualify") {}
};

struct DomainError : Error {
    using Error::Error;
};

struct EmptyQuestion : Error {
    EmptyQuestion() : Error("question has no candidate stems") {}
};

struct DuplicateDocId : Error {
    explicit DuplicateDocId(std::int64_t doc_id)
        : Error("duplicate document id " + std::to_string(doc_id)), doc_id(doc_id) {}
    std::int64_t doc_id;
};

struct MissingAcceptedAnswer : Error {
    explicit MissingAcceptedAnswer(std::int64_t question_id)
        : Error("question " + std::to_string(question_id) + " has no accepted answer") {}
};

struct DegenerateLabels : Error {
    DegenerateLabels() : Error("training set has only one label value") {}
};

struct InsufficientPairs : Error {
    InsufficientPairs(const std::string& annotator, std::size_t have, std::size_t need)
        : Error("annotator " + annotator + " has " + std::to_string(have) +
                " pairs, split needs at least " + std::to_string(need)) {}
};

struct UnknownQueryId : Error {
    explicit UnknownQueryId(const std::string& query_id)
        : Error("run file references query " + query_id + " absent from the log") {}
    explicit UnknownQueryId(std::uint64_t query_id) : UnknownQueryId(std::to_string(query_id)) {}
};

struct ConfigError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

}  // namespace cqalog
