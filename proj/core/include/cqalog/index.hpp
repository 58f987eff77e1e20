#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cqalog/corpus.hpp"
#include "cqalog/text.hpp"

namespace cqalog {

struct Posting {
    std::uint64_t doc = 0;
    std::uint32_t count = 0;
    bool operator==(const Posting&) const = default;
};

enum class IndexVariant : std::uint8_t { raw = 0, q2a = 1 };

IndexVariant parse_index_variant(std::string_view name);
std::string_view index_variant_name(IndexVariant variant);

struct InvertedIndex {
    IndexVariant variant = IndexVariant::raw;
    double mu = 2500.0;
    std::vector<std::uint64_t> doc_ids;   // sorted
    std::vector<std::uint32_t> doc_lens;  // parallel to doc_ids
    std::uint64_t collection_len = 0;
    std::map<std::string, std::vector<Posting>> postings;  // doc-ascending
    std::map<std::string, std::uint64_t> collection_tf;

    std::size_t doc_pos(std::uint64_t doc) const;  // npos when absent
    std::uint32_t doc_len(std::uint64_t doc) const;
    std::uint64_t ctf(const std::string& stem) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct IndexDoc {
    std::uint64_t doc_key = 0;
    TokenizedText text;
};

// Answer documents for the given questions. raw: the answer body; q2a: the
// answer body followed by the question title and body.
std::vector<IndexDoc> collect_documents(const Corpus& corpus,
                                        const std::vector<std::uint64_t>& questions,
                                        IndexVariant variant,
                                        const Lexicon& lexicon = Lexicon::builtin());

// Stopwords are removed before indexing; doc_len counts the kept tokens.
InvertedIndex build_index(const std::vector<IndexDoc>& docs, IndexVariant variant, double mu);

// Dirichlet query likelihood: sum over query terms of
// c(t,q) * ln((c(t,d) + mu * ctf(t)/collection_len) / (|d| + mu)).
// Terms with zero collection frequency are skipped.
double score(const InvertedIndex& index, const std::vector<std::string>& terms,
             std::uint64_t doc);

struct RunEntry {
    std::uint64_t query_id = 0;
    std::uint64_t doc_key = 0;
    std::uint32_t rank = 0;  // 1-based
    double score = 0;
    std::string tag;
};

struct SearchResult {
    std::vector<RunEntry> entries;  // rank order; scores non-increasing
    std::uint32_t dropped_terms = 0;
    bool empty_query = false;  // every term dropped
};

// Document-at-a-time top-k over the union of the query terms' postings.
// Ties break toward the smaller doc id.
SearchResult search(const InvertedIndex& index, const std::vector<std::string>& terms,
                    std::size_t k = 100, std::uint64_t query_id = 0,
                    const std::string& tag = "cqalog");

// idx directory holds index.bin: "CQIX" magic, u32 version, variant, mu,
// doc table, then per-term postings with delta-encoded doc ids and varint
// counts.
void save_index(const InvertedIndex& index, const std::filesystem::path& dir);
InvertedIndex load_index(const std::filesystem::path& dir);

std::string serialize_index(const InvertedIndex& index);
InvertedIndex deserialize_index(const std::string& bytes);

}  // namespace cqalog
