#include "counterfair/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "counterfair/errors.hpp"
#include "counterfair/hash.hpp"
#include "counterfair/io.hpp"

namespace counterfair {

PairedDiffs pair_differences(const std::vector<ScoredRecord>& rows, const std::string& model,
                             const std::string& identity_a, const std::string& identity_b,
                             const std::string& metric,
                             const std::vector<std::string>& prompt_order) {
    std::map<std::string, double> side_a, side_b;
    for (const auto& r : rows) {
        if (r.model != model) continue;
        auto value = metric_value(r.metrics, metric);
        if (!value) throw audit_error("unknown metric '" + metric + "'");
        if (r.identity == identity_a) side_a[r.prompt_id] = *value;
        else if (r.identity == identity_b) side_b[r.prompt_id] = *value;
    }

    PairedDiffs out;
    out.model = model;
    out.metric = metric;
    out.identity_a = identity_a;
    out.identity_b = identity_b;
    for (const auto& prompt : prompt_order) {
        auto a = side_a.find(prompt);
        auto b = side_b.find(prompt);
        if (a != side_a.end() && b != side_b.end()) {
            out.prompt_ids.push_back(prompt);
            out.diffs.push_back(a->second - b->second);
        } else {
            out.excluded_prompts.push_back(prompt);
        }
    }
    if (out.diffs.empty())
        throw empty_pairing_error("no prompt has scored records for both '" + identity_a +
                                  "' and '" + identity_b + "' under model '" + model + "'");
    return out;
}

double cohens_d_paired(const std::vector<double>& diffs) {
    const std::size_t n = diffs.size();
    if (n < 2)
        throw insufficient_data_error("paired effect size needs at least 2 differences, got " +
                                      std::to_string(n));
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0)
        throw undefined_effect_error("paired effect size undefined: zero-variance differences");
    return mean / sd;
}

namespace {

// Average ranks of |values|; ranks are exact multiples of 0.5, so doubling
// them gives exact integers for the enumeration below.
std::vector<double> average_ranks_abs(const std::vector<double>& values) {
    const std::size_t m = values.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&values](std::size_t a, std::size_t b) {
        return std::abs(values[a]) < std::abs(values[b]);
    });
    std::vector<double> ranks(m, 0.0);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m &&
               std::abs(values[order[j + 1]]) == std::abs(values[order[i]])) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs) {
    std::vector<double> nonzero;
    nonzero.reserve(diffs.size());
    for (double d : diffs)
        if (d != 0.0) nonzero.push_back(d);

    WilcoxonResult result;
    result.n_nonzero = nonzero.size();
    if (nonzero.empty()) {
        result.degenerate = true;
        result.p_value = 1.0;
        return result;
    }

    const std::size_t m = nonzero.size();
    const auto ranks = average_ranks_abs(nonzero);
    double w_plus = 0.0, total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        total += ranks[i];
        if (nonzero[i] > 0) w_plus += ranks[i];
    }
    const double w_minus = total - w_plus;
    result.w_statistic = std::min(w_plus, w_minus);

    if (m <= kWilcoxonExactLimit) {
        result.exact = true;
        // Doubled ranks are integers; count sign assignments by rank-sum via
        // the subset-sum distribution of W+ (polynomial product).
        std::vector<std::uint64_t> doubled(m);
        std::uint64_t total2 = 0;
        for (std::size_t i = 0; i < m; ++i) {
            doubled[i] = static_cast<std::uint64_t>(std::llround(ranks[i] * 2.0));
            total2 += doubled[i];
        }
        std::vector<double> count(total2 + 1, 0.0);
        count[0] = 1.0;
        std::uint64_t reach = 0;
        for (std::size_t i = 0; i < m; ++i) {
            reach += doubled[i];
            for (std::uint64_t s = reach + 1; s-- > doubled[i];)
                count[s] += count[s - doubled[i]];
        }
        const std::uint64_t w2 = static_cast<std::uint64_t>(std::llround(result.w_statistic * 2.0));
        const std::uint64_t upper = total2 - w2;
        double extreme = 0.0;
        for (std::uint64_t s = 0; s <= total2; ++s)
            if (s <= w2 || s >= upper) extreme += count[s];
        result.p_value = extreme / std::ldexp(1.0, static_cast<int>(m));
    } else {
        // Tie-corrected normal approximation with continuity correction.
        const double md = static_cast<double>(m);
        const double mean = md * (md + 1.0) / 4.0;
        double tie_term = 0.0;
        std::map<double, std::size_t> groups;
        for (double d : nonzero) ++groups[std::abs(d)];
        for (const auto& [value, t] : groups) {
            const double td = static_cast<double>(t);
            tie_term += td * td * td - td;
        }
        const double variance = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_term / 48.0;
        double numerator = result.w_statistic - mean;
        if (numerator < 0) numerator += 0.5;
        else if (numerator > 0) numerator -= 0.5;
        const double z = numerator / std::sqrt(variance);
        result.p_value = std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
        if (result.p_value <= 0.0) result.p_value = std::numeric_limits<double>::min();
    }
    return result;
}

BootstrapCI bootstrap_ci(const std::vector<double>& diffs, int resamples, double level,
                         std::uint64_t seed) {
    const std::size_t n = diffs.size();
    if (n == 0) throw insufficient_data_error("bootstrap needs at least one difference");
    if (resamples < 1) throw config_error("bootstrap resamples must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw config_error("bootstrap level must be in (0, 1)");

    std::mt19937_64 rng(seed);
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& mean : means) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += diffs[bounded_draw(rng, n)];
        mean = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());

    auto quantile = [&means](double q) {
        // Linear interpolation between order statistics; symmetric under
        // negation, which the sweep's antisymmetry property relies on.
        const double h = q * static_cast<double>(means.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, means.size() - 1);
        const double frac = h - static_cast<double>(lo);
        return means[lo] + frac * (means[hi] - means[lo]);
    };
    const double alpha = (1.0 - level) / 2.0;
    return {quantile(alpha), quantile(1.0 - alpha)};
}

namespace {

double median_sorted(const std::vector<double>& sorted, std::size_t begin, std::size_t end) {
    const std::size_t len = end - begin;
    const std::size_t mid = begin + len / 2;
    if (len % 2 == 1) return sorted[mid];
    return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

}  // namespace

double symmetry_diagnostic(const std::vector<double>& diffs) {
    if (diffs.size() < 2) return 0.0;
    std::vector<double> sorted = diffs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = median_sorted(sorted, 0, n);
    double mean = 0.0;
    for (double d : sorted) mean += d;
    mean /= static_cast<double>(n);
    const std::size_t half = n / 2;
    const double q1 = median_sorted(sorted, 0, half);
    const double q3 = median_sorted(sorted, n - half, n);
    const double iqr = q3 - q1;
    if (iqr == 0.0) return 0.0;
    return std::abs(median - mean) / iqr;
}

std::vector<PairedComparison> pairwise_sweep(const std::vector<ScoredRecord>& rows,
                                             const AuditPlan& plan) {
    const auto grid = expand_identity_grid(plan.axes);
    std::vector<std::string> prompt_order;
    prompt_order.reserve(plan.prompts.size());
    for (const auto& p : plan.prompts) prompt_order.push_back(p.prompt_id);

    std::vector<PairedComparison> out;
    for (const auto& model : plan.models) {
        for (const auto& metric : metric_names()) {
            for (std::size_t a = 0; a < grid.size(); ++a) {
                for (std::size_t b = a + 1; b < grid.size(); ++b) {
                    PairedComparison row;
                    row.model = model.name;
                    row.metric = metric;
                    row.identity_a = grid[a].label;
                    row.identity_b = grid[b].label;

                    PairedDiffs diffs;
                    try {
                        diffs = pair_differences(rows, model.name, grid[a].label, grid[b].label,
                                                 metric, prompt_order);
                    } catch (const empty_pairing_error&) {
                        row.flag = "no_pairs";
                        row.delta = row.ci_low = row.ci_high = row.d =
                            std::numeric_limits<double>::quiet_NaN();
                        row.p_w = 1.0;
                        out.push_back(std::move(row));
                        continue;
                    }

                    row.n = diffs.diffs.size();
                    double mean = 0.0;
                    for (double d : diffs.diffs) mean += d;
                    row.delta = mean / static_cast<double>(row.n);
                    row.symmetry = symmetry_diagnostic(diffs.diffs);

                    const auto wilcoxon = wilcoxon_signed_rank(diffs.diffs);
                    row.p_w = wilcoxon.p_value;
                    if (wilcoxon.degenerate) row.flag = "all_zero_diffs";

                    // Per-comparison seed: execution order cannot change output.
                    const std::uint64_t seed = derive_seed(
                        plan.rng_seed, {model.name, metric, grid[a].label, grid[b].label});
                    const auto ci = bootstrap_ci(diffs.diffs, plan.bootstrap_resamples,
                                                 1.0 - plan.significance_level, seed);
                    row.ci_low = ci.low;
                    row.ci_high = ci.high;

                    try {
                        row.d = cohens_d_paired(diffs.diffs);
                    } catch (const stats_error&) {
                        row.d = std::numeric_limits<double>::quiet_NaN();
                        if (row.flag.empty())
                            row.flag = diffs.diffs.size() < 2 ? "insufficient_data" : "undefined_effect";
                    }

                    row.significant = row.p_w < plan.significance_level;
                    out.push_back(std::move(row));
                }
            }
        }
    }
    return out;
}

std::string comparisons_to_csv(const std::vector<PairedComparison>& rows) {
    std::string out =
        "model,metric,identity_a,identity_b,n,delta,ci_low,ci_high,d,p_w,significant,degenerate_flag\n";
    for (const auto& r : rows) {
        out += csv_row({r.model, r.metric, r.identity_a, r.identity_b, std::to_string(r.n),
                        format_real(r.delta), format_real(r.ci_low), format_real(r.ci_high),
                        format_real(r.d), format_real(r.p_w), r.significant ? "true" : "false",
                        r.flag});
    }
    return out;
}

std::vector<PairedComparison> comparisons_from_csv(const std::string& content,
                                                   const std::string& origin) {
    std::vector<PairedComparison> rows;
    std::size_t pos = 0, line_no = 0;
    bool header_seen = false;
    auto to_double = [](const std::string& s) {
        return s == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
    };
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        auto fields = csv_split(line, line_no);
        if (fields.size() != 12)
            throw parse_error(origin + ": expected 12 columns, got " + std::to_string(fields.size()),
                              line_no);
        PairedComparison r;
        r.model = fields[0];
        r.metric = fields[1];
        r.identity_a = fields[2];
        r.identity_b = fields[3];
        r.n = static_cast<std::size_t>(std::stoull(fields[4]));
        r.delta = to_double(fields[5]);
        r.ci_low = to_double(fields[6]);
        r.ci_high = to_double(fields[7]);
        r.d = to_double(fields[8]);
        r.p_w = to_double(fields[9]);
        r.significant = fields[10] == "true";
        r.flag = fields[11];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<PairedComparison> load_comparisons(const std::filesystem::path& path) {
    return comparisons_from_csv(read_file(path), path.filename().string());
}

}  // namespace counterfair
