#include <benchmark/benchmark.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "counterfair/metrics.hpp"
#include "counterfair/plan.hpp"
#include "counterfair/refusal.hpp"
#include "counterfair/stats.hpp"
#include "counterfair/synthetic.hpp"
#include "counterfair/text.hpp"

namespace {

using namespace counterfair;

const TextScorer& scorer() {
    static const TextScorer s = [] {
        const std::filesystem::path base = BENCH_DATA_DIR;
        ScorerPaths p;
        p.hedge = base / "lexicons" / "hedge.lex";
        p.politeness = base / "lexicons" / "politeness.lex";
        p.negative = base / "lexicons" / "negative.lex";
        p.valence = base / "lexicons" / "valence.lex";
        p.patterns = base / "patterns" / "refusal.patterns";
        return load_scorer(p);
    }();
    return s;
}

IdentityBias bench_bias() {
    IdentityBias b;
    b.hedge_rate = 2.0;
    b.politeness_rate = 1.5;
    b.negative_rate = 1.0;
    b.sentiment = 0.5;
    b.refusal_probability = 0.0;
    return b;
}

const std::string& sample_text() {
    static const std::string text = synthetic_text(7, "p01", "Control", bench_bias());
    return text;
}

std::vector<double> gaussian_diffs(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.1, 1.0);
    std::vector<double> diffs(n);
    for (auto& d : diffs) d = gauss(rng);
    return diffs;
}

void BM_NormalizeAndTokenize(benchmark::State& state) {
    const std::string& text = sample_text();
    for (auto _ : state) benchmark::DoNotOptimize(normalize_and_tokenize(text));
}
BENCHMARK(BM_NormalizeAndTokenize);

void BM_ScoreText(benchmark::State& state) {
    const std::string& text = sample_text();
    const TextScorer& s = scorer();
    for (auto _ : state) benchmark::DoNotOptimize(score_text(text, s));
}
BENCHMARK(BM_ScoreText);

void BM_ClassifyRefusal(benchmark::State& state) {
    const std::string& text = sample_text();
    const TextScorer& s = scorer();
    for (auto _ : state) benchmark::DoNotOptimize(classify_refusal(text, s.patterns));
}
BENCHMARK(BM_ClassifyRefusal);

void BM_WilcoxonExact(benchmark::State& state) {
    const auto diffs = gaussian_diffs(static_cast<std::size_t>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(diffs));
}
BENCHMARK(BM_WilcoxonExact)->Arg(10)->Arg(20)->Arg(25);

void BM_WilcoxonApprox(benchmark::State& state) {
    const auto diffs = gaussian_diffs(static_cast<std::size_t>(state.range(0)), 12);
    for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(diffs));
}
BENCHMARK(BM_WilcoxonApprox)->Arg(30)->Arg(200);

void BM_BootstrapCI(benchmark::State& state) {
    const auto diffs = gaussian_diffs(30, 13);
    const int resamples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ci(diffs, resamples, 0.95, 42));
}
BENCHMARK(BM_BootstrapCI)->Arg(1000)->Arg(10000);

void BM_SyntheticText(benchmark::State& state) {
    const IdentityBias bias = bench_bias();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthetic_text(seed, "p01", "Control", bias));
        ++seed;
    }
}
BENCHMARK(BM_SyntheticText);

void BM_PairwiseSweep(benchmark::State& state) {
    AuditPlan plan;
    plan.name = "bench";
    plan.axes = {{"group", {"control", "treatment"}}};
    for (int i = 1; i <= 30; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "q%02d", i);
        plan.prompts.push_back({id, "scenario", "contract"});
    }
    plan.models = {{"bench-model", "http://localhost:9", "", "/v1/chat/completions"}};
    plan.significance_level = 0.05;
    plan.bootstrap_resamples = static_cast<int>(state.range(0));
    plan.rng_seed = 7;

    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<ScoredRecord> rows;
    for (const auto& prompt : plan.prompts) {
        for (const char* identity : {"Control", "Treatment"}) {
            ScoredRecord r;
            r.model = "bench-model";
            r.prompt_id = prompt.prompt_id;
            r.identity = identity;
            r.metrics.sentiment = gauss(rng);
            r.metrics.hedge_rate = 2.0 + gauss(rng);
            r.metrics.politeness_rate = 1.5 + gauss(rng);
            r.metrics.negative_rate = 1.0 + gauss(rng);
            r.metrics.word_count = 130;
            rows.push_back(std::move(r));
        }
    }
    for (auto _ : state) benchmark::DoNotOptimize(pairwise_sweep(rows, plan));
}
BENCHMARK(BM_PairwiseSweep)->Arg(200)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
