#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "counterfair/errors.hpp"
#include "counterfair/hash.hpp"
#include "counterfair/metrics.hpp"
#include "counterfair/plan.hpp"
#include "counterfair/stats.hpp"

using namespace counterfair;

namespace {

// Independent oracle for the exact two-sided signed-rank p-value: doubled
// average ranks stay integral, so every subset sum is compared exactly.
struct ExactOracle {
    double w_min = 0.0;
    double p = 1.0;
    bool degenerate = false;
};

ExactOracle brute_force_wilcoxon(const std::vector<double>& diffs) {
    std::vector<double> nz;
    for (double d : diffs)
        if (d != 0.0) nz.push_back(d);
    ExactOracle out;
    if (nz.empty()) {
        out.degenerate = true;
        return out;
    }
    const std::size_t m = nz.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&nz](std::size_t a, std::size_t b) { return std::abs(nz[a]) < std::abs(nz[b]); });

    std::vector<std::uint64_t> rank2(m, 0);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && std::abs(nz[order[j + 1]]) == std::abs(nz[order[i]])) ++j;
        const std::uint64_t doubled = (i + 1) + (j + 1);  // 2 * average 1-based rank
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
        i = j + 1;
    }

    std::uint64_t total2 = 0, w2_plus = 0;
    for (std::size_t k = 0; k < m; ++k) {
        total2 += rank2[k];
        if (nz[k] > 0) w2_plus += rank2[k];
    }
    const std::uint64_t w2_min = std::min(w2_plus, total2 - w2_plus);
    out.w_min = static_cast<double>(w2_min) / 2.0;

    std::uint64_t extreme = 0;
    const std::uint64_t masks = 1ull << m;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        std::uint64_t sum = 0;
        for (std::size_t k = 0; k < m; ++k)
            if (mask & (1ull << k)) sum += rank2[k];
        if (sum <= w2_min || sum >= total2 - w2_min) ++extreme;
    }
    out.p = static_cast<double>(extreme) / static_cast<double>(masks);
    return out;
}

AuditPlan sweep_plan(std::vector<std::string> identities, std::size_t n_prompts) {
    AuditPlan plan;
    plan.name = "sweep";
    plan.axes = {{"arm", std::move(identities)}};
    for (std::size_t i = 1; i <= n_prompts; ++i) {
        std::string id = "p" + std::to_string(i);
        plan.prompts.push_back({id, "task " + id, "contract"});
    }
    plan.models = {{"m1", "http://localhost:9", "", "/chat/completions"}};
    plan.significance_level = 0.05;
    plan.bootstrap_resamples = 200;
    plan.rng_seed = 42;
    return plan;
}

ScoredRecord make_row(const std::string& model, const std::string& prompt,
                      const std::string& identity, double sentiment, double hedge,
                      double politeness, double negative) {
    ScoredRecord r;
    r.model = model;
    r.prompt_id = prompt;
    r.identity = identity;
    r.metrics.refusal = RefusalClass::None;
    r.metrics.sentiment = sentiment;
    r.metrics.hedge_rate = hedge;
    r.metrics.politeness_rate = politeness;
    r.metrics.negative_rate = negative;
    r.metrics.word_count = 130;
    return r;
}

}  // namespace

TEST_CASE("wilcoxon hand cases match enumeration") {
    SUBCASE("all-positive run of five") {
        const auto r = wilcoxon_signed_rank({1, 2, 3, 4, 5});
        CHECK(r.exact);
        CHECK(r.n_nonzero == 5);
        CHECK(r.w_statistic == 0.0);
        CHECK(r.p_value == doctest::Approx(0.0625).epsilon(1e-14));
    }
    SUBCASE("perfectly balanced pair") {
        const auto r = wilcoxon_signed_rank({1, -1});
        CHECK(r.exact);
        CHECK(r.w_statistic == doctest::Approx(1.5));
        CHECK(r.p_value == doctest::Approx(1.0));
    }
    SUBCASE("zeros are dropped before ranking") {
        const auto r = wilcoxon_signed_rank({0.0, 1.0, 2.0});
        CHECK(r.n_nonzero == 2);
        CHECK(r.p_value == doctest::Approx(0.5));
    }
    SUBCASE("tied magnitudes share average ranks") {
        const auto r = wilcoxon_signed_rank({1, -1, 2, 3});
        CHECK(r.exact);
        CHECK(r.w_statistic == doctest::Approx(1.5));
        CHECK(r.p_value == doctest::Approx(0.375).epsilon(1e-14));
    }
    SUBCASE("all-zero differences degenerate to p = 1") {
        const auto r = wilcoxon_signed_rank({0.0, 0.0, 0.0});
        CHECK(r.degenerate);
        CHECK(r.n_nonzero == 0);
        CHECK(r.p_value == 1.0);
    }
}

TEST_CASE("wilcoxon exact path agrees with a brute-force oracle") {
    std::mt19937_64 rng(987654321);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        std::vector<double> diffs(n);
        if (trial % 2 == 0) {
            for (auto& d : diffs) d = static_cast<double>(static_cast<int>(rng() % 7)) - 3.0;
        } else {
            for (auto& d : diffs) d = gauss(rng);
        }
        const auto oracle = brute_force_wilcoxon(diffs);
        const auto got = wilcoxon_signed_rank(diffs);
        CHECK(got.degenerate == oracle.degenerate);
        if (!oracle.degenerate) {
            CHECK(got.exact);
            CHECK(got.w_statistic == doctest::Approx(oracle.w_min).epsilon(1e-14));
        }
        CHECK(std::abs(got.p_value - oracle.p) <= 1e-12);
    }
}

TEST_CASE("wilcoxon switches to the tie-corrected normal approximation past the limit") {
    SUBCASE("boundary stays exact") {
        std::vector<double> diffs;
        for (int i = 1; i <= 25; ++i) diffs.push_back(i);
        CHECK(wilcoxon_signed_rank(diffs).exact);
        diffs.push_back(26);
        CHECK_FALSE(wilcoxon_signed_rank(diffs).exact);
    }
    SUBCASE("fully tied magnitudes reproduce the closed-form z") {
        std::vector<double> diffs(25, 1.0);
        diffs.push_back(-1.0);
        const auto r = wilcoxon_signed_rank(diffs);
        CHECK_FALSE(r.exact);
        CHECK(r.n_nonzero == 26);
        CHECK(r.w_statistic == doctest::Approx(13.5));
        // mean = 26*27/4, tie-corrected variance = 26*27*53/24 - (26^3-26)/48,
        // continuity-corrected two-sided tail via erfc.
        const double variance = 26.0 * 27.0 * 53.0 / 24.0 - (26.0 * 26.0 * 26.0 - 26.0) / 48.0;
        const double expected = std::erfc((175.5 - 13.5 - 0.5) / std::sqrt(2.0 * variance));
        CHECK(r.p_value == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("large one-sided sample stays a valid probability") {
        std::vector<double> diffs;
        for (int i = 1; i <= 40; ++i) diffs.push_back(i * 0.25);
        const auto r = wilcoxon_signed_rank(diffs);
        CHECK_FALSE(r.exact);
        CHECK(r.p_value > 0.0);
        CHECK(r.p_value < 1e-6);
    }
}

TEST_CASE("paired cohen's d on hand data and error contracts") {
    CHECK(cohens_d_paired({2, 4, 6}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(cohens_d_paired({1, -1}) == doctest::Approx(0.0));
    CHECK(cohens_d_paired({-2, -4, -6}) == doctest::Approx(-2.0).epsilon(1e-14));

    CHECK_THROWS_AS(cohens_d_paired({}), insufficient_data_error);
    CHECK_THROWS_AS(cohens_d_paired({5.0}), insufficient_data_error);
    CHECK_THROWS_AS(cohens_d_paired({3, 3, 3}), undefined_effect_error);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.3, 1.0);
    std::vector<double> diffs(40);
    for (auto& d : diffs) d = gauss(rng);
    std::vector<double> negated;
    for (double d : diffs) negated.push_back(-d);
    CHECK(cohens_d_paired(negated) == doctest::Approx(-cohens_d_paired(diffs)).epsilon(1e-12));
}

TEST_CASE("bootstrap intervals are seeded, ordered, and shape-preserving") {
    std::mt19937_64 rng(20260816);
    std::normal_distribution<double> gauss(0.5, 1.0);
    std::vector<double> diffs(30);
    for (auto& d : diffs) d = gauss(rng);

    const auto a = bootstrap_ci(diffs, 2000, 0.95, 11);
    const auto b = bootstrap_ci(diffs, 2000, 0.95, 11);
    CHECK(a.low == b.low);
    CHECK(a.high == b.high);
    CHECK(a.low <= a.high);

    const auto other = bootstrap_ci(diffs, 2000, 0.95, 12);
    CHECK((other.low != a.low || other.high != a.high));

    SUBCASE("constant data collapses to a point") {
        const auto c = bootstrap_ci(std::vector<double>(8, 1.25), 500, 0.95, 3);
        CHECK(c.low == 1.25);
        CHECK(c.high == 1.25);
    }
    SUBCASE("single observation collapses to a point") {
        const auto c = bootstrap_ci({0.75}, 500, 0.95, 3);
        CHECK(c.low == 0.75);
        CHECK(c.high == 0.75);
    }
    SUBCASE("negating the data mirrors the interval") {
        std::vector<double> negated;
        for (double d : diffs) negated.push_back(-d);
        const auto n = bootstrap_ci(negated, 2000, 0.95, 11);
        CHECK(n.low == doctest::Approx(-a.high).epsilon(1e-12));
        CHECK(n.high == doctest::Approx(-a.low).epsilon(1e-12));
    }
    SUBCASE("shifting the data shifts the interval") {
        std::vector<double> shifted;
        for (double d : diffs) shifted.push_back(d + 10.0);
        const auto s = bootstrap_ci(shifted, 2000, 0.95, 11);
        CHECK(s.low == doctest::Approx(a.low + 10.0).epsilon(1e-9));
        CHECK(s.high == doctest::Approx(a.high + 10.0).epsilon(1e-9));
    }
    SUBCASE("narrower levels nest inside wider ones") {
        const auto wide = bootstrap_ci(diffs, 2000, 0.95, 11);
        const auto narrow = bootstrap_ci(diffs, 2000, 0.5, 11);
        CHECK(wide.low <= narrow.low);
        CHECK(narrow.high <= wide.high);
    }
    SUBCASE("bad arguments are rejected") {
        CHECK_THROWS_AS(bootstrap_ci({}, 100, 0.95, 1), insufficient_data_error);
        CHECK_THROWS_AS(bootstrap_ci({1.0}, 0, 0.95, 1), config_error);
        CHECK_THROWS_AS(bootstrap_ci({1.0}, 100, 1.0, 1), config_error);
        CHECK_THROWS_AS(bootstrap_ci({1.0}, 100, 0.0, 1), config_error);
    }
}

TEST_CASE("pair_differences joins on prompt id in plan order") {
    const std::vector<std::string> order = {"p1", "p2", "p3", "p4"};
    std::vector<ScoredRecord> rows;
    rows.push_back(make_row("m1", "p2", "A", 0.8, 0, 0, 0));
    rows.push_back(make_row("m1", "p2", "B", 0.5, 0, 0, 0));
    rows.push_back(make_row("m1", "p1", "A", 0.4, 0, 0, 0));
    rows.push_back(make_row("m1", "p1", "B", 0.1, 0, 0, 0));
    rows.push_back(make_row("m1", "p3", "A", 0.9, 0, 0, 0));  // B side missing
    rows.push_back(make_row("m2", "p4", "A", 0.9, 0, 0, 0));  // wrong model
    rows.push_back(make_row("m2", "p4", "B", 0.1, 0, 0, 0));
    rows.push_back(make_row("m1", "px", "A", 0.9, 0, 0, 0));  // not in plan order
    rows.push_back(make_row("m1", "px", "B", 0.1, 0, 0, 0));

    const auto diffs = pair_differences(rows, "m1", "A", "B", "sentiment", order);
    CHECK(diffs.prompt_ids == std::vector<std::string>{"p1", "p2"});
    REQUIRE(diffs.diffs.size() == 2);
    CHECK(diffs.diffs[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(diffs.diffs[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(diffs.excluded_prompts == std::vector<std::string>{"p3", "p4"});

    CHECK_THROWS_AS(pair_differences(rows, "m3", "A", "B", "sentiment", order),
                    empty_pairing_error);
}

TEST_CASE("pairwise_sweep covers every metric and identity pair with honest flags") {
    auto plan = sweep_plan({"aa", "bb", "cc", "dd"}, 10);
    const auto grid = expand_identity_grid(plan.axes);
    REQUIRE(grid.size() == 4);
    CHECK(grid[0].label == "Aa");

    std::mt19937_64 rng(5150);
    std::normal_distribution<double> gauss(0.0, 0.1);
    std::vector<ScoredRecord> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (const auto& prompt : plan.prompts) {
            const double sentiment = 0.1 * static_cast<double>(i) + gauss(rng);
            const double hedge = static_cast<double>(i);
            const double politeness = 3.0;
            const double negative = gauss(rng);
            rows.push_back(make_row("m1", prompt.prompt_id, grid[i].label, sentiment, hedge,
                                    politeness, negative));
        }
    }

    const auto sweep = pairwise_sweep(rows, plan);
    REQUIRE(sweep.size() == 4 * 6);

    SUBCASE("rows arrive model-major, then metric, then grid-ordered pairs") {
        CHECK(sweep[0].metric == "sentiment");
        CHECK(sweep[0].identity_a == "Aa");
        CHECK(sweep[0].identity_b == "Bb");
        CHECK(sweep[1].identity_b == "Cc");
        CHECK(sweep[2].identity_b == "Dd");
        CHECK(sweep[3].identity_a == "Bb");
        CHECK(sweep[5].identity_a == "Cc");
        CHECK(sweep[6].metric == "hedge_rate");
        CHECK(sweep[12].metric == "politeness_rate");
        CHECK(sweep[18].metric == "negative_rate");
        for (const auto& row : sweep) {
            CHECK(row.model == "m1");
            CHECK(row.n == 10);
        }
    }

    SUBCASE("constant nonzero differences flag the undefined effect size") {
        const auto& row = sweep[6];  // hedge_rate, Aa vs Bb
        CHECK(row.flag == "undefined_effect");
        CHECK(row.delta == doctest::Approx(-1.0));
        CHECK(std::isnan(row.d));
        CHECK(row.p_w == doctest::Approx(2.0 / 1024.0).epsilon(1e-14));
        CHECK(row.significant);
        CHECK(row.ci_low == doctest::Approx(-1.0));
        CHECK(row.ci_high == doctest::Approx(-1.0));
    }

    SUBCASE("identical columns flag all-zero differences") {
        const auto& row = sweep[12];  // politeness_rate, Aa vs Bb
        CHECK(row.flag == "all_zero_diffs");
        CHECK(row.delta == 0.0);
        CHECK(row.p_w == 1.0);
        CHECK_FALSE(row.significant);
        CHECK(std::isnan(row.d));
        CHECK(row.symmetry == 0.0);
    }

    SUBCASE("healthy columns carry empty flags and consistent significance") {
        const auto& row = sweep[0];
        CHECK(row.flag.empty());
        CHECK(std::isfinite(row.d));
        CHECK(row.significant == (row.p_w < plan.significance_level));
        CHECK(row.ci_low <= row.ci_high);
    }

    SUBCASE("input order cannot change the output") {
        auto shuffled = rows;
        std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(99));
        const auto again = pairwise_sweep(shuffled, plan);
        REQUIRE(again.size() == sweep.size());
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            CHECK(again[i].delta == sweep[i].delta);
            CHECK(again[i].ci_low == sweep[i].ci_low);
            CHECK(again[i].ci_high == sweep[i].ci_high);
            CHECK(again[i].p_w == sweep[i].p_w);
        }
    }

    SUBCASE("the plan seed drives the intervals") {
        auto reseeded = plan;
        reseeded.rng_seed = 43;
        const auto again = pairwise_sweep(rows, reseeded);
        CHECK((again[0].ci_low != sweep[0].ci_low || again[0].ci_high != sweep[0].ci_high));
    }
}

TEST_CASE("pairwise_sweep flags thin and missing data instead of aborting") {
    SUBCASE("single shared prompt") {
        auto plan = sweep_plan({"control", "treatment"}, 1);
        std::vector<ScoredRecord> rows;
        rows.push_back(make_row("m1", "p1", "Control", 0.4, 1, 1, 1));
        rows.push_back(make_row("m1", "p1", "Treatment", 0.6, 2, 2, 2));
        const auto sweep = pairwise_sweep(rows, plan);
        REQUIRE(sweep.size() == 4);
        CHECK(sweep[0].flag == "insufficient_data");
        CHECK(sweep[0].n == 1);
        CHECK(std::isnan(sweep[0].d));
        CHECK(sweep[0].p_w == 1.0);
    }
    SUBCASE("identity absent from the metrics table") {
        auto plan = sweep_plan({"control", "treatment"}, 3);
        std::vector<ScoredRecord> rows;
        for (const auto& prompt : plan.prompts)
            rows.push_back(make_row("m1", prompt.prompt_id, "Control", 0.4, 1, 1, 1));
        const auto sweep = pairwise_sweep(rows, plan);
        REQUIRE(sweep.size() == 4);
        for (const auto& row : sweep) {
            CHECK(row.flag == "no_pairs");
            CHECK(row.n == 0);
            CHECK(std::isnan(row.delta));
            CHECK(std::isnan(row.d));
            CHECK(row.p_w == 1.0);
            CHECK_FALSE(row.significant);
        }
    }
}

TEST_CASE("comparisons CSV round-trips values, flags, and NaN effect sizes") {
    std::vector<PairedComparison> rows(2);
    rows[0] = {"m1", "sentiment", "Aa", "Bb", 10, 0.123456, -0.01, 0.25,
               0.8,  0.003,       true, "",   0.12};
    rows[1] = {"m1",
               "hedge_rate",
               "Aa",
               "Cc",
               10,
               0.0,
               0.0,
               0.0,
               std::numeric_limits<double>::quiet_NaN(),
               1.0,
               false,
               "all_zero_diffs",
               0.0};

    const std::string csv = comparisons_to_csv(rows);
    CHECK(csv.rfind("model,metric,identity_a,identity_b,n,delta,ci_low,ci_high,d,p_w,"
                    "significant,degenerate_flag\n", 0) == 0);
    CHECK(csv.find(",true,") != std::string::npos);
    CHECK(csv.find(",nan,") != std::string::npos);
    CHECK(csv.find(",false,all_zero_diffs") != std::string::npos);

    const auto back = comparisons_from_csv(csv, "test");
    REQUIRE(back.size() == 2);
    CHECK(back[0].delta == doctest::Approx(0.123456));
    CHECK(back[0].significant);
    CHECK(back[0].flag.empty());
    CHECK(back[1].flag == "all_zero_diffs");
    CHECK_FALSE(back[1].significant);
    CHECK(std::isnan(back[1].d));
    CHECK(back[1].n == 10);
}

TEST_CASE("symmetry diagnostic separates symmetric from skewed differences") {
    CHECK(symmetry_diagnostic({-2, -1, 0, 1, 2}) == doctest::Approx(0.0));
    CHECK(symmetry_diagnostic({0, 0, 0, 0, 10}) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(symmetry_diagnostic({5, 5, 5}) == 0.0);
    CHECK(symmetry_diagnostic({1.0}) == 0.0);
    CHECK(symmetry_diagnostic({}) == 0.0);
}
