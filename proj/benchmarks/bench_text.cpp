#include <benchmark/benchmark.h>

#include <string>

#include "cqalog/porter.hpp"
#include "cqalog/text.hpp"

namespace {

std::string sample_html() {
    std::string text;
    for (int i = 0; i < 200; ++i) {
        text +=
            "<p>How do I convert a <code>std::vector&lt;int&gt;</code> into a "
            "comma separated string without trailing separators?</p>\n"
            "<pre><code>for (auto v : xs) out += std::to_string(v);</code></pre>\n";
    }
    return text;
}

void bm_strip_html(benchmark::State& state) {
    std::string html = sample_html();
    for (auto _ : state) benchmark::DoNotOptimize(cqalog::strip_html(html));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * html.size()));
}
BENCHMARK(bm_strip_html);

void bm_tokenize(benchmark::State& state) {
    std::string text = cqalog::strip_html(sample_html());
    for (auto _ : state) benchmark::DoNotOptimize(cqalog::tokenize(text));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(bm_tokenize);

void bm_porter(benchmark::State& state) {
    std::vector<std::string> words = {"relational",   "conflated",  "happiness",
                                      "generalizations", "oscillators", "troubled",
                                      "controllable", "university", "agreement"};
    for (auto _ : state)
        for (const std::string& word : words)
            benchmark::DoNotOptimize(cqalog::porter_stem(word));
}
BENCHMARK(bm_porter);

}  // namespace

BENCHMARK_MAIN();
