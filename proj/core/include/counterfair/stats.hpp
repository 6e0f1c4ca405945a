#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "counterfair/metrics.hpp"
#include "counterfair/plan.hpp"

namespace counterfair {

/// Paired per-prompt differences (identity A minus identity B) for one
/// metric within one model. Prompts missing a scored record on either side
/// are excluded and listed.
struct PairedDiffs {
    std::string model;
    std::string metric;
    std::string identity_a;
    std::string identity_b;
    std::vector<std::string> prompt_ids;  // prompts contributing a pair, plan order
    std::vector<double> diffs;            // same order as prompt_ids
    std::vector<std::string> excluded_prompts;
};

/// Pair rows by prompt id. `prompt_order` fixes the output order (prompts
/// absent from it are ignored). Raises empty_pairing_error when no prompt
/// has both sides.
PairedDiffs pair_differences(const std::vector<ScoredRecord>& rows, const std::string& model,
                             const std::string& identity_a, const std::string& identity_b,
                             const std::string& metric,
                             const std::vector<std::string>& prompt_order);

/// Paired Cohen's d: mean(D) / sd(D) with the n-1 denominator.
/// Raises insufficient_data_error for n < 2 and undefined_effect_error when
/// sd(D) == 0 (the effect size is reported as an error, never 0 or inf).
double cohens_d_paired(const std::vector<double>& diffs);

struct WilcoxonResult {
    double w_statistic = 0.0;   // min(W+, W-) over nonzero differences
    double p_value = 1.0;       // two-sided, in (0, 1]
    std::size_t n_nonzero = 0;  // pairs surviving zero-removal
    bool exact = false;         // enumeration (m <= 25) vs normal approximation
    bool degenerate = false;    // every difference was zero
};

/// Wilcoxon signed-rank test, two-sided.
///
/// Zero differences are dropped; ties in |D| share average ranks. With
/// m <= 25 nonzero differences the p-value is exact: over all 2^m sign
/// assignments, the probability that W+ <= min(W+, W-)_obs or
/// W+ >= M - min(W+, W-)_obs, where M is the total rank sum. Beyond 25 a
/// normal approximation applies, with tie-corrected variance
/// m(m+1)(2m+1)/24 - sum(t^3 - t)/48 and a 0.5 continuity correction.
/// All-zero differences give the degenerate result p = 1.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs);

/// Threshold above which the exact enumeration yields to the approximation.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

struct BootstrapCI {
    double low = 0.0;
    double high = 0.0;
};

/// Seeded percentile bootstrap for the mean difference: `resamples` draws
/// with replacement, bounds at the (1-level)/2 and 1-(1-level)/2 quantiles
/// (linear interpolation) of the resampled means. Identical seeds give
/// identical intervals; constant input collapses to a zero-width interval.
BootstrapCI bootstrap_ci(const std::vector<double>& diffs, int resamples, double level,
                         std::uint64_t seed);

/// One sweep row. When the effect size is undefined the row is flagged via
/// `flag` ("undefined_effect") and d is NaN; the sweep never aborts on a
/// degenerate pair.
struct PairedComparison {
    std::string model;
    std::string metric;
    std::string identity_a;
    std::string identity_b;
    std::size_t n = 0;
    double delta = 0.0;  // mean difference, A minus B
    double ci_low = 0.0;
    double ci_high = 0.0;
    double d = 0.0;
    double p_w = 1.0;
    bool significant = false;
    std::string flag;       // empty | undefined_effect | all_zero_diffs | insufficient_data | no_pairs
    double symmetry = 0.0;  // |median - mean| / IQR of the diffs (0 when IQR is 0)
};

/// Skew diagnostic for the signed-rank symmetry assumption:
/// |median - mean| / IQR (quartiles by median-of-halves), 0 when the IQR
/// degenerates or fewer than two values exist.
double symmetry_diagnostic(const std::vector<double>& diffs);

/// All unordered identity pairs (A before B in grid order) for every metric
/// and model: per model, C(|grid|, 2) pairs x 4 metrics. Bootstrap seeds are
/// derived per comparison from the plan seed, so any execution order gives
/// identical output.
std::vector<PairedComparison> pairwise_sweep(const std::vector<ScoredRecord>& rows,
                                             const AuditPlan& plan);

/// comparisons.csv: model,metric,identity_a,identity_b,n,delta,ci_low,
/// ci_high,d,p_w,significant,degenerate_flag.
std::string comparisons_to_csv(const std::vector<PairedComparison>& rows);
std::vector<PairedComparison> comparisons_from_csv(const std::string& content,
                                                   const std::string& origin);
std::vector<PairedComparison> load_comparisons(const std::filesystem::path& path);

}  // namespace counterfair
