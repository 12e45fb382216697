#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "taxominer/matcher.hpp"
#include "taxominer/stats.hpp"
#include "taxominer/taxonomy.hpp"
#include "taxominer/textprep.hpp"

using namespace taxominer;

namespace {

const std::vector<std::string> kVocab = {
    "exploit", "buffer",  "overflow", "shell", "code",   "cipher", "key",
    "packet",  "network", "password", "hash",  "kernel", "heap",   "stack",
    "race",    "binary",  "format",   "leak",  "canary", "rop"};

Taxonomy bench_taxonomy() {
    std::mt19937 rng(7);
    Taxonomy t;
    t.areas.push_back({"KA", {}});
    std::set<std::string> seen;
    while (t.areas[0].units.size() < 40) {
        int words = 1 + static_cast<int>(rng() % 3);
        std::string phrase;
        for (int w = 0; w < words; ++w) {
            if (w) phrase += ' ';
            phrase += kVocab[rng() % kVocab.size()];
        }
        if (!seen.insert(phrase).second) continue;
        std::string n = "KU" + std::to_string(t.areas[0].units.size());
        t.areas[0].units.push_back({n, {{n + "T", {{phrase, false, -1}}}}});
    }
    return t;
}

std::string bench_document(std::size_t words) {
    std::mt19937 rng(11);
    std::string text;
    for (std::size_t i = 0; i < words; ++i) text += kVocab[rng() % kVocab.size()] + " ";
    return text;
}

void BM_tokenize_and_stem(benchmark::State& state) {
    std::string text = bench_document(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        TokenStream ts = tokenize(text);
        for (const std::string& tok : ts.tokens) benchmark::DoNotOptimize(stem(tok));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_tokenize_and_stem)->Arg(1000)->Arg(10000);

void BM_keyword_matching(benchmark::State& state) {
    KeywordIndex idx = keyword_index(bench_taxonomy());
    CompiledMatcher matcher(idx);
    TokenStream doc = tokenize(bench_document(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(matcher.count_keywords(doc));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_keyword_matching)->Arg(1000)->Arg(10000);

void BM_mann_whitney_exact(benchmark::State& state) {
    std::mt19937 rng(13);
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) x.push_back(static_cast<double>(rng()) / 1e6);
    for (int i = 0; i < 10; ++i) y.push_back(static_cast<double>(rng()) / 1e6 + 99.0);
    MwuOptions opts;
    opts.method = MwuMethod::exact;
    for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_u(x, y, opts));
}
BENCHMARK(BM_mann_whitney_exact);

}  // namespace

BENCHMARK_MAIN();
