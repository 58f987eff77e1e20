#include "cqalog/term_stats.hpp"

#include <cmath>
#include <set>

#include "cqalog/errors.hpp"

namespace cqalog {

IdfVariant parse_idf_variant(std::string_view name) {
    if (name == "smoothed") return IdfVariant::smoothed;
    if (name == "raw") return IdfVariant::raw;
    throw ConfigError("unknown idf variant: " + std::string(name));
}

std::string_view idf_variant_name(IdfVariant v) {
    return v == IdfVariant::smoothed ? "smoothed" : "raw";
}

void TermStats::add_document(const TokenizedText& doc) {
    ++doc_count;
    std::set<std::string> seen;
    for (const Token& t : doc.tokens) {
        if (t.is_stopword) continue;
        ++total_terms;
        seen.insert(t.stem);
    }
    for (const std::string& stem : seen) ++df[stem];
}

void TermStats::merge(const TermStats& other) {
    doc_count += other.doc_count;
    total_terms += other.total_terms;
    for (const auto& [stem, count] : other.df) df[stem] += count;
}

TermStats build_term_stats(const std::vector<TokenizedText>& docs) {
    TermStats stats;
    for (const TokenizedText& doc : docs) stats.add_document(doc);
    return stats;
}

double idf(const TermStats& stats, const std::string& stem, IdfVariant variant) {
    if (stats.doc_count == 0) throw DomainError("idf over an empty corpus");
    double n = static_cast<double>(stats.doc_count);
    double df_t = static_cast<double>(stats.df_of(stem));
    if (variant == IdfVariant::smoothed) return std::log((n + 1.0) / (df_t + 1.0)) + 1.0;
    return std::log(n / std::max(df_t, 1.0));
}

}  // namespace cqalog
