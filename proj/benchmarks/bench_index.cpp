#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cqalog/index.hpp"
#include "cqalog/rng.hpp"
#include "cqalog/text.hpp"

namespace {

// synthetic corpus drawn from a small shared vocabulary so postings overlap
std::vector<cqalog::IndexDoc> synthetic_docs(std::size_t n_docs) {
    static const char* vocab[] = {"sort",   "vector", "thread", "regex",  "lambda",
                                  "memory", "string", "branch", "kernel", "socket",
                                  "parse",  "hash",   "tree",   "graph",  "cache"};
    cqalog::Rng rng(42);
    std::vector<cqalog::IndexDoc> docs;
    docs.reserve(n_docs);
    for (std::size_t i = 0; i < n_docs; ++i) {
        std::string text;
        std::uint64_t len = 20 + rng.bounded(60);
        for (std::uint64_t t = 0; t < len; ++t) {
            text += vocab[rng.bounded(std::size(vocab))];
            text += ' ';
        }
        docs.push_back({i + 1, cqalog::tokenize(text)});
    }
    return docs;
}

void bm_build_index(benchmark::State& state) {
    auto docs = synthetic_docs(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(cqalog::build_index(docs, cqalog::IndexVariant::raw, 2500));
}
BENCHMARK(bm_build_index)->Arg(1000)->Arg(5000);

void bm_search(benchmark::State& state) {
    auto docs = synthetic_docs(static_cast<std::size_t>(state.range(0)));
    auto index = cqalog::build_index(docs, cqalog::IndexVariant::raw, 2500);
    std::vector<std::string> query = {"sort", "vector", "cach"};
    for (auto _ : state) benchmark::DoNotOptimize(cqalog::search(index, query, 100));
}
BENCHMARK(bm_search)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
