#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "cqalog/text.hpp"

namespace cqalog {

enum class IdfVariant : std::uint8_t { smoothed = 0, raw = 1 };

IdfVariant parse_idf_variant(std::string_view name);
std::string_view idf_variant_name(IdfVariant v);

/// Document frequencies over stems, stopwords excluded. df counts distinct
/// documents, however often a stem repeats inside one.
struct TermStats {
    std::uint64_t doc_count = 0;
    std::uint64_t total_terms = 0;
    std::map<std::string, std::uint64_t> df;

    std::uint64_t df_of(const std::string& stem) const {
        auto it = df.find(stem);
        return it == df.end() ? 0 : it->second;
    }

    void add_document(const TokenizedText& doc);
    void merge(const TermStats& other);
};

TermStats build_term_stats(const std::vector<TokenizedText>& docs);

/// Inverse document frequency. The smoothed variant ln((N+1)/(df+1)) + 1
/// never hits zero or divides by zero; raw ln(N/df) is available for
/// sensitivity checks (df clamped to 1 there).
double idf(const TermStats& stats, const std::string& stem,
           IdfVariant variant = IdfVariant::smoothed);

}  // namespace cqalog
