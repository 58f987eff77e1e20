#include <doctest.h>

#include <cmath>

#include "cqalog/errors.hpp"
#include "cqalog/term_stats.hpp"

using namespace cqalog;

namespace {

TermStats stats_of(const std::vector<std::string>& docs) {
    TermStats stats;
    for (const std::string& d : docs) stats.add_document(tokenize(d));
    return stats;
}

}  // namespace

TEST_CASE("df counts documents, not occurrences") {
    TermStats stats = stats_of({"orchard orchard orchard", "orchard cider", "cider mulch"});
    CHECK(stats.doc_count == 3);
    CHECK(stats.df_of("orchard") == 2);
    CHECK(stats.df_of("cider") == 2);
    CHECK(stats.df_of("mulch") == 1);
    CHECK(stats.df_of("absent") == 0);
}

TEST_CASE("stopwords do not enter the statistics") {
    TermStats stats = stats_of({"the orchard is the same"});
    CHECK(stats.df_of("the") == 0);
    CHECK(stats.df_of("orchard") == 1);
    // "is" and "same" are stopwords in the shipped list
    CHECK(stats.total_terms == 1);
}

TEST_CASE("df keys are stems") {
    TermStats stats = stats_of({"pruning prunes", "pruned"});
    CHECK(stats.df_of("prune") == 2);
}

TEST_CASE("smoothed idf follows ln((N+1)/(df+1)) + 1") {
    TermStats stats = stats_of({"orchard cider", "orchard", "mulch"});
    CHECK(idf(stats, "orchard") == doctest::Approx(std::log(4.0 / 3.0) + 1).epsilon(1e-12));
    CHECK(idf(stats, "mulch") == doctest::Approx(std::log(4.0 / 2.0) + 1).epsilon(1e-12));
    CHECK(idf(stats, "absent") == doctest::Approx(std::log(4.0 / 1.0) + 1).epsilon(1e-12));
    CHECK(idf(stats, "orchard") < idf(stats, "mulch"));
}

TEST_CASE("raw idf is ln(N/df) with df clamped") {
    TermStats stats = stats_of({"orchard cider", "orchard", "mulch"});
    CHECK(idf(stats, "orchard", IdfVariant::raw) ==
          doctest::Approx(std::log(3.0 / 2.0)).epsilon(1e-12));
    CHECK(idf(stats, "absent", IdfVariant::raw) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("merge adds counts") {
    TermStats a = stats_of({"orchard cider"});
    TermStats b = stats_of({"orchard mulch", "mulch"});
    a.merge(b);
    CHECK(a.doc_count == 3);
    CHECK(a.df_of("orchard") == 2);
    CHECK(a.df_of("mulch") == 2);
    CHECK(a.df_of("cider") == 1);
}

TEST_CASE("variant names parse both ways") {
    CHECK(parse_idf_variant("smoothed") == IdfVariant::smoothed);
    CHECK(parse_idf_variant("raw") == IdfVariant::raw);
    CHECK(idf_variant_name(IdfVariant::raw) == "raw");
    CHECK_THROWS_AS(parse_idf_variant("bogus"), ConfigError);
}
