#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "counterfair/cli.hpp"
#include "counterfair/errors.hpp"
#include "counterfair/io.hpp"
#include "counterfair/metrics.hpp"
#include "counterfair/plan.hpp"
#include "counterfair/report.hpp"
#include "counterfair/stats.hpp"

using namespace counterfair;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() /
                 ("counterfair-report-" + std::to_string(std::random_device{}()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_scratch(const std::string& name, const std::string& content) {
    const fs::path p = scratch_dir() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

ScoredRecord make_row(const std::string& model, const std::string& prompt,
                      const std::string& identity, double sentiment, double hedge,
                      double politeness, double negative, std::size_t words) {
    ScoredRecord r;
    r.model = model;
    r.prompt_id = prompt;
    r.identity = identity;
    r.metrics.refusal = RefusalClass::None;
    r.metrics.sentiment = sentiment;
    r.metrics.hedge_rate = hedge;
    r.metrics.politeness_rate = politeness;
    r.metrics.negative_rate = negative;
    r.metrics.word_count = words;
    return r;
}

std::vector<ScoredRecord> metric_series(const std::string& model, const std::string& identity,
                                        const std::vector<double>& sentiments) {
    std::vector<ScoredRecord> rows;
    for (std::size_t i = 0; i < sentiments.size(); ++i)
        rows.push_back(make_row(model, "p" + std::to_string(i + 1), identity, sentiments[i],
                                0, 0, 0, 100));
    return rows;
}

const char* kCliPlan = R"({
  "name": "cli-smoke",
  "axes": [{"name": "arm", "values": ["control", "treatment"]}],
  "output_contract": "Answer in plain prose.",
  "prompts": [
    {"id": "p1", "task": "asking for a raise"},
    {"id": "p2", "task": "negotiating a job offer"},
    {"id": "p3", "task": "preparing for a performance review"},
    {"id": "p4", "task": "writing a resume summary"},
    {"id": "p5", "task": "handling a difficult manager"},
    {"id": "p6", "task": "deciding between two job offers"},
    {"id": "p7", "task": "building a professional network"},
    {"id": "p8", "task": "asking for a promotion"}
  ],
  "models": [
    {"name": "model-a", "base_url": "http://localhost:1", "api_key_env": "", "path": "/chat/completions"},
    {"name": "model-b", "base_url": "http://localhost:2", "api_key_env": "", "path": "/chat/completions"}
  ],
  "decoding": {"temperature": 0.2, "top_p": 0.9, "max_tokens": 300, "max_retries": 3},
  "significance_level": 0.05,
  "bootstrap_resamples": 400,
  "rng_seed": 7,
  "synthetic": {
    "defaults": {"sentiment": 0.65, "hedge_rate": 0.5, "politeness_rate": 0.3,
                 "negative_rate": 0.2, "refusal_probability": 0.0},
    "overrides": {
      "Treatment": {"sentiment": 0.55, "hedge_rate": 2.0, "politeness_rate": 0.3,
                    "negative_rate": 0.2, "refusal_probability": 0.0}
    }
  }
})";

}  // namespace

TEST_CASE("summary_table averages per cell and follows the given orders") {
    std::vector<ScoredRecord> rows;
    rows.push_back(make_row("m1", "p1", "B", 0.2, 1.0, 2.0, 3.0, 100));
    rows.push_back(make_row("m1", "p2", "B", 0.4, 3.0, 2.0, 1.0, 120));
    rows.push_back(make_row("m1", "p1", "A", 0.9, 0.0, 0.0, 0.0, 140));
    rows.push_back(make_row("m1", "p1", "Stray", 0.1, 0.0, 0.0, 0.0, 90));

    const auto table = summary_table(rows, {"m1"}, {"A", "B"});
    REQUIRE(table.size() == 3);
    CHECK(table[0].identity == "A");
    CHECK(table[1].identity == "B");
    CHECK(table[2].identity == "Stray");

    CHECK(table[1].n == 2);
    CHECK(table[1].sentiment == doctest::Approx(0.3));
    CHECK(table[1].hedge_rate == doctest::Approx(2.0));
    CHECK(table[1].politeness_rate == doctest::Approx(2.0));
    CHECK(table[1].negative_rate == doctest::Approx(2.0));
    CHECK(table[1].word_count == doctest::Approx(110.0));
    CHECK(table[0].n == 1);
    CHECK(table[0].word_count == doctest::Approx(140.0));
}

TEST_CASE("boxplot quartiles use the median-of-halves convention") {
    SUBCASE("even count, documented hand case") {
        const auto rows = metric_series("m1", "A", {1, 2, 3, 4, 5, 6, 7, 8});
        const auto series = boxplot_data(rows, "sentiment", {"m1"}, {"A"});
        REQUIRE(series.size() == 1);
        CHECK(series[0].n == 8);
        CHECK(series[0].min == 1.0);
        CHECK(series[0].q1 == doctest::Approx(2.5));
        CHECK(series[0].median == doctest::Approx(4.5));
        CHECK(series[0].q3 == doctest::Approx(6.5));
        CHECK(series[0].max == 8.0);
        CHECK(series[0].outliers.empty());
    }
    SUBCASE("odd count excludes the median from both halves") {
        const auto rows = metric_series("m1", "A", {7, 1, 3, 5, 2, 6, 4});
        const auto series = boxplot_data(rows, "sentiment", {"m1"}, {"A"});
        CHECK(series[0].median == doctest::Approx(4.0));
        CHECK(series[0].q1 == doctest::Approx(2.0));
        CHECK(series[0].q3 == doctest::Approx(6.0));
    }
    SUBCASE("single observation collapses the box") {
        const auto rows = metric_series("m1", "A", {0.42});
        const auto series = boxplot_data(rows, "sentiment", {"m1"}, {"A"});
        CHECK(series[0].n == 1);
        CHECK(series[0].q1 == doctest::Approx(0.42));
        CHECK(series[0].median == doctest::Approx(0.42));
        CHECK(series[0].q3 == doctest::Approx(0.42));
    }
    SUBCASE("values beyond 1.5 IQR are outliers but still set the extremes") {
        const auto rows =
            metric_series("m1", "A", {10, 11, 12, 13, 14, 15, 16, 1000});
        const auto series = boxplot_data(rows, "sentiment", {"m1"}, {"A"});
        CHECK(series[0].max == 1000.0);
        REQUIRE(series[0].outliers.size() == 1);
        CHECK(series[0].outliers[0] == 1000.0);
    }
    SUBCASE("unknown metric is rejected") {
        const auto rows = metric_series("m1", "A", {1, 2});
        CHECK_THROWS_AS(boxplot_data(rows, "word_salad", {"m1"}, {"A"}), config_error);
    }
    SUBCASE("ordering invariant holds on random data") {
        std::mt19937_64 rng(4242);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> values(1 + rng() % 40);
            for (auto& v : values) v = gauss(rng);
            const auto series = boxplot_data(metric_series("m1", "A", values), "sentiment",
                                             {"m1"}, {"A"});
            const auto& s = series[0];
            CHECK(s.min <= s.q1);
            CHECK(s.q1 <= s.median);
            CHECK(s.median <= s.q3);
            CHECK(s.q3 <= s.max);
        }
    }
}

TEST_CASE("boxplot CSV joins outliers with semicolons") {
    const auto rows = metric_series("m1", "A", {0, 0, 0, 0, 0, 0, -50, 50});
    const auto series = boxplot_data(rows, "sentiment", {"m1"}, {"A"});
    REQUIRE(series[0].outliers.size() == 2);
    const std::string csv = boxplot_to_csv(series);
    CHECK(csv.rfind("model,identity,metric,n,min,q1,median,q3,max,outliers\n", 0) == 0);
    CHECK(csv.find("-50.000000;50.000000") != std::string::npos);
    CHECK(csv.find("m1,A,sentiment,8,") != std::string::npos);
}

TEST_CASE("identity labels abbreviate for comparison tables") {
    CHECK(abbreviate_identity("Younger Male (US-born)") == "Younger M (USB)");
    CHECK(abbreviate_identity("Older Female (Immigrant)") == "Older F (Imm)");
    CHECK(abbreviate_identity("Control") == "Control");
    CHECK(abbreviate_identity("") == "");
}

TEST_CASE("delta cells render signed two-decimal values with the interval") {
    CHECK(format_delta_ci(0.12345, -0.034, 0.279) == "+0.12 [-0.03, +0.28]");
    CHECK(format_delta_ci(-0.5, -1.0, 0.0) == "-0.50 [-1.00, +0.00]");
}

TEST_CASE("top_pairs_table ranks by |d|, caps per model, and emphasizes significance") {
    auto comparison = [](const std::string& model, const std::string& metric, double delta,
                         double lo, double hi, double d, double p, bool sig,
                         const std::string& flag) {
        PairedComparison c;
        c.model = model;
        c.metric = metric;
        c.identity_a = "Younger Male (US-born)";
        c.identity_b = "Older Female (Immigrant)";
        c.n = 30;
        c.delta = delta;
        c.ci_low = lo;
        c.ci_high = hi;
        c.d = d;
        c.p_w = p;
        c.significant = sig;
        c.flag = flag;
        return c;
    };

    std::vector<PairedComparison> comparisons;
    comparisons.push_back(comparison("m1", "hedge_rate", 0.12, -0.03, 0.28, 0.30, 0.164,
                                     false, ""));
    comparisons.push_back(comparison("m1", "hedge_rate", 0.40, 0.20, 0.60, 0.90, 0.002,
                                     true, ""));
    comparisons.push_back(comparison("m1", "hedge_rate", -0.90, -1.2, -0.6, -1.50, 0.001,
                                     true, ""));
    comparisons.push_back(comparison("m1", "hedge_rate", 0.0, 0.0, 0.0,
                                     std::numeric_limits<double>::quiet_NaN(), 1.0, false,
                                     "all_zero_diffs"));
    comparisons.push_back(comparison("m2", "hedge_rate", 0.05, 0.0, 0.1, 0.10, 0.600,
                                     false, ""));
    comparisons.push_back(comparison("m1", "sentiment", 9.0, 8.0, 10.0, 9.99, 0.0001,
                                     true, ""));

    const std::string table = top_pairs_table(comparisons, "hedge_rate", 2);

    CHECK(table.find("| Model | Identity A | Identity B | Δ [95% CI] | d | p_W |") !=
          std::string::npos);
    CHECK(table.find("| m1 | Younger M (USB) | Older F (Imm) | -0.90 [-1.20, -0.60] | -1.50 | "
                     "**0.001** |") != std::string::npos);
    CHECK(table.find("| m1 | Younger M (USB) | Older F (Imm) | +0.40 [+0.20, +0.60] | +0.90 | "
                     "**0.002** |") != std::string::npos);
    CHECK(table.find("| m2 | Younger M (USB) | Older F (Imm) | +0.05 [+0.00, +0.10] | +0.10 | "
                     "0.600 |") != std::string::npos);
    CHECK(table.find("0.164") == std::string::npos);  // third m1 row exceeds the cap
    CHECK(table.find("nan") == std::string::npos);    // undefined d never renders
    CHECK(table.find("9.99") == std::string::npos);   // other metrics are filtered out
    CHECK(table.find("Abbreviations: M=Male, F=Female, USB=US-born, Imm=Immigrant.") !=
          std::string::npos);

    const std::string empty_table = top_pairs_table(comparisons, "negative_rate", 3);
    CHECK(empty_table.find("| (none) |") != std::string::npos);
}

TEST_CASE("render_report assembles every section from CSV-visible data") {
    AuditPlan plan;
    plan.name = "report-fixture";
    plan.axes = {{"arm", {"control", "treatment"}}};
    for (int i = 1; i <= 6; ++i)
        plan.prompts.push_back({"p" + std::to_string(i), "task", "contract"});
    plan.models = {{"m1", "http://localhost:1", "", "/chat/completions"}};
    plan.significance_level = 0.05;
    plan.bootstrap_resamples = 300;
    plan.rng_seed = 5;

    std::mt19937_64 rng(31337);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<ScoredRecord> rows;
    for (int i = 1; i <= 6; ++i) {
        const std::string prompt = "p" + std::to_string(i);
        rows.push_back(make_row("m1", prompt, "Control", 0.60 + noise(rng), 1.0 + noise(rng),
                                3.0, 0.5 + noise(rng), 100));
        rows.push_back(make_row("m1", prompt, "Treatment", 0.40 + noise(rng), 2.0 + noise(rng),
                                3.0, 0.5 + noise(rng), 120));
    }

    std::vector<RefusalRateRow> refusals;
    refusals.push_back({"m1", "Control", 6, 0.0, 0.0, 100.0});
    refusals.push_back({"m1", "Treatment", 6, 0.0, 0.0, 100.0});

    const auto comparisons = pairwise_sweep(rows, plan);
    const std::string report = render_report(plan, refusals, rows, comparisons, 5);

    CHECK(report.find("# Audit report: report-fixture") != std::string::npos);
    CHECK(report.find("- Models: m1") != std::string::npos);
    CHECK(report.find("- Identity groups: 2") != std::string::npos);
    CHECK(report.find("- Significance level: 0.05") != std::string::npos);
    CHECK(report.find("- Bootstrap resamples: 300") != std::string::npos);

    SUBCASE("refusal tables aggregate and render integers bare") {
        CHECK(report.find("## Refusal rates") != std::string::npos);
        CHECK(report.find("| m1 | 2 | 12 | 0 | 0 | 100 |") != std::string::npos);
        CHECK(report.find("| m1 | Control | 6 | 0 | 0 | 100 |") != std::string::npos);
    }

    SUBCASE("summary table bolds per-model column extremes, skipping flat columns") {
        CHECK(report.find("## Interaction quality by identity") != std::string::npos);
        CHECK(report.find("Bold marks each model's per-column minimum and maximum.") !=
              std::string::npos);
        // Politeness is flat at 3.00 for both identities: never bolded.
        CHECK(report.find("**3.00**") == std::string::npos);
        CHECK(report.find("| 3.00 |") != std::string::npos);
        // Word counts are 100 vs 120, so both cells are extremes and bold.
        CHECK(report.find("**100.0**") != std::string::npos);
        CHECK(report.find("**120.0**") != std::string::npos);
    }

    SUBCASE("word-count spread line fires its comparability warning") {
        CHECK(report.find("Word-count spread across identity groups (m1): 14.14 words - "
                          "exceeds the 5-word comparability bound.") != std::string::npos);
    }

    SUBCASE("comparison summary counts tested rows and renders alpha trimmed") {
        std::size_t tested = 0, significant = 0;
        for (const auto& c : comparisons) {
            if (c.flag.empty() || c.flag == "all_zero_diffs") ++tested;
            if (c.significant) ++significant;
        }
        const std::string line = std::to_string(significant) + " of " + std::to_string(tested) +
                                 " comparisons are significant at α = 0.05 (uncorrected "
                                 "p-values).";
        CHECK(report.find(line) != std::string::npos);
        CHECK(report.find("### Sentiment: top pairs by |d|") != std::string::npos);
        CHECK(report.find("### Hedging rate: top pairs by |d|") != std::string::npos);
        CHECK(report.find("### Politeness rate: top pairs by |d|") != std::string::npos);
        CHECK(report.find("### Negative-tone rate: top pairs by |d|") != std::string::npos);
    }

    SUBCASE("distribution and symmetry sections are present") {
        CHECK(report.find("## Sentiment distributions") != std::string::npos);
        CHECK(report.find("median-of-halves convention") != std::string::npos);
        CHECK(report.find("## Difference symmetry diagnostics") != std::string::npos);
        CHECK(report.find("|median - mean| / IQR") != std::string::npos);
    }

    SUBCASE("empty-cell refusal rows render as n/a") {
        auto with_empty = refusals;
        with_empty.push_back({"m2", "Control", 0, std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN()});
        const std::string r2 = render_report(plan, with_empty, rows, comparisons, 5);
        CHECK(r2.find("| m2 | Control | 0 | n/a | n/a | n/a |") != std::string::npos);
    }
}

TEST_CASE("cli validates plans, rejects bad usage, and runs end to end") {
    const fs::path plan_path = write_scratch("cli-smoke.plan", kCliPlan);

    SUBCASE("plan validate accepts the fixture and the shipped plan") {
        CHECK(run_cli({"plan", "validate", "--plan", plan_path.string()}) == 0);
        CHECK(run_cli({"plan", "validate", "--plan", TEST_PLAN_FILE}) == 0);
    }
    SUBCASE("usage errors exit 2") {
        CHECK(run_cli({}) == 2);
        CHECK(run_cli({"frobnicate"}) == 2);
        CHECK(run_cli({"score", "--no-such-flag"}) == 2);
        CHECK(run_cli({"plan", "validate"}) == 2);
    }
    SUBCASE("stage errors exit 1") {
        CHECK(run_cli({"plan", "validate", "--plan", (scratch_dir() / "absent.plan").string()}) ==
              1);
        const fs::path out = scratch_dir() / "replay-missing";
        CHECK(run_cli({"collect", "--plan", plan_path.string(), "--mode", "replay",
                       "--out-dir", out.string()}) == 1);
        CHECK(run_cli({"collect", "--plan", plan_path.string(), "--mode", "nonsense",
                       "--out-dir", out.string()}) == 1);
    }
    SUBCASE("full synthetic run produces the artifact tree deterministically") {
        const fs::path out_a = scratch_dir() / "run-a";
        const fs::path out_b = scratch_dir() / "run-b";
        for (const auto& out : {out_a, out_b}) {
            CHECK(run_cli({"run", "--plan", plan_path.string(), "--mode", "synthetic",
                           "--seed", "7", "--out-dir", out.string(), "--top-k", "4"}) == 0);
            for (const char* name :
                 {"corpus.jsonl", "metrics.csv", "refusals.csv", "comparisons.csv", "report.md",
                  "boxplot_sentiment.csv", "boxplot_hedge_rate.csv", "boxplot_politeness_rate.csv",
                  "boxplot_negative_rate.csv"}) {
                CAPTURE(name);
                CHECK(fs::exists(out / name));
            }
        }
        for (const char* name : {"corpus.jsonl", "metrics.csv", "refusals.csv",
                                 "comparisons.csv", "report.md", "boxplot_sentiment.csv"}) {
            CAPTURE(name);
            CHECK(read_file(out_a / name) == read_file(out_b / name));
        }

        SUBCASE("report stage regenerates identically from the CSVs alone") {
            const std::string before = read_file(out_a / "report.md");
            fs::remove(out_a / "report.md");
            CHECK(run_cli({"report", "--plan", plan_path.string(), "--out-dir", out_a.string(),
                           "--top-k", "4"}) == 0);
            CHECK(read_file(out_a / "report.md") == before);
        }
        SUBCASE("score stage accepts an explicit corpus path") {
            const fs::path rescored = scratch_dir() / "rescored";
            CHECK(run_cli({"score", "--corpus", (out_a / "corpus.jsonl").string(),
                           "--out-dir", rescored.string()}) == 0);
            CHECK(read_file(rescored / "metrics.csv") == read_file(out_a / "metrics.csv"));
            CHECK(read_file(rescored / "refusals.csv") == read_file(out_a / "refusals.csv"));
        }
        SUBCASE("analyze seed override changes the intervals") {
            const fs::path reanalyzed = scratch_dir() / "reanalyzed";
            fs::create_directories(reanalyzed);
            fs::copy_file(out_a / "metrics.csv", reanalyzed / "metrics.csv",
                          fs::copy_options::overwrite_existing);
            CHECK(run_cli({"analyze", "--plan", plan_path.string(), "--out-dir",
                           reanalyzed.string(), "--seed", "8"}) == 0);
            CHECK(read_file(reanalyzed / "comparisons.csv") !=
                  read_file(out_a / "comparisons.csv"));
        }
        SUBCASE("the treatment hedge bump is detectable in the output") {
            const auto comparisons = load_comparisons(out_a / "comparisons.csv");
            bool found = false;
            for (const auto& c : comparisons) {
                if (c.metric == "hedge_rate" && c.identity_a == "Control" &&
                    c.identity_b == "Treatment" && c.model == "model-a") {
                    found = true;
                    CHECK(c.delta < 0.0);
                    CHECK(c.n == 8);
                }
            }
            CHECK(found);
        }
    }
}
