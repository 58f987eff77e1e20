#include <benchmark/benchmark.h>

#include <sstream>
#include <string>

#include "cqalog/dump.hpp"
#include "cqalog/xml.hpp"

namespace {

std::string posts_xml(int rows) {
    std::string xml = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n";
    for (int i = 1; i <= rows; ++i) {
        xml += "  <row Id=\"" + std::to_string(i) +
               "\" PostTypeId=\"2\" ParentId=\"1\" Score=\"3\" "
               "Body=\"&lt;p&gt;Use a range loop &amp; reserve first.&lt;/p&gt;\" "
               "OwnerUserId=\"7\" CreationDate=\"2014-03-01T10:00:00.000\" />\n";
    }
    return xml + "</posts>\n";
}

void bm_row_reader(benchmark::State& state) {
    std::string xml = posts_xml(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        std::istringstream in(xml);
        cqalog::XmlRowReader reader(in);
        std::size_t rows = 0;
        while (reader.next_row()) rows += reader.attr("Id").has_value();
        benchmark::DoNotOptimize(rows);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * xml.size()));
}
BENCHMARK(bm_row_reader)->Arg(1000)->Arg(10000);

void bm_parse_posts(benchmark::State& state) {
    std::string xml = posts_xml(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        std::istringstream in(xml);
        std::size_t kept = 0;
        cqalog::parse_posts(in, [&](cqalog::Post&&) { ++kept; });
        benchmark::DoNotOptimize(kept);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * xml.size()));
}
BENCHMARK(bm_parse_posts)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
