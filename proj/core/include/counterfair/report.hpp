#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "counterfair/metrics.hpp"
#include "counterfair/plan.hpp"
#include "counterfair/refusal.hpp"
#include "counterfair/stats.hpp"

namespace counterfair {

/// Per-(model, identity) means over scored records.
struct SummaryRow {
    std::string model;
    std::string identity;
    double sentiment = 0.0;
    double politeness_rate = 0.0;
    double hedge_rate = 0.0;
    double negative_rate = 0.0;
    double word_count = 0.0;
    std::size_t n = 0;
};

/// One row per (model, identity) with at least one scored record, ordered by
/// `model_order` then `identity_order`. Groups absent from the orders keep
/// first-seen order after the known ones.
std::vector<SummaryRow> summary_table(const std::vector<ScoredRecord>& rows,
                                      const std::vector<std::string>& model_order,
                                      const std::vector<std::string>& identity_order);

/// Five-number summary plus 1.5*IQR outliers for one (model, identity,
/// metric) series. Quartiles use the median-of-halves convention with the
/// middle element excluded on odd counts; min and max are the data extremes.
struct BoxplotSeries {
    std::string model;
    std::string identity;
    std::string metric;
    std::size_t n = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::vector<double> outliers;
};

/// Series ordered like summary_table rows. Raises config_error for an
/// unknown metric id.
std::vector<BoxplotSeries> boxplot_data(const std::vector<ScoredRecord>& rows,
                                        const std::string& metric,
                                        const std::vector<std::string>& model_order,
                                        const std::vector<std::string>& identity_order);

/// boxplot_<metric>.csv: model,identity,metric,n,min,q1,median,q3,max,
/// outliers. The outliers field joins values with ';'.
std::string boxplot_to_csv(const std::vector<BoxplotSeries>& series);

/// Shorten identity labels for comparison tables: Male -> M, Female -> F,
/// US-born -> USB, Immigrant -> Imm. Unknown words pass through.
std::string abbreviate_identity(const std::string& label);

/// "+0.12 [-0.03, +0.28]" (two decimals, explicit signs).
std::string format_delta_ci(double delta, double ci_low, double ci_high);

/// Markdown table of the top-k rows per model for one metric, sorted by |d|
/// descending (rows without a defined d sink to the bottom and are dropped
/// when ranked rows fill k). The p column is emphasized with ** exactly when
/// the row is significant at the sweep's level.
std::string top_pairs_table(const std::vector<PairedComparison>& comparisons,
                            const std::string& metric, std::size_t top_k);

/// Full Markdown report: refusal tables, per-identity metric means with
/// per-model column extremes in bold, top identity-pair tables per metric,
/// sentiment distribution summaries, and difference-symmetry diagnostics.
/// A pure view: every number restates or aggregates CSV-visible data.
std::string render_report(const AuditPlan& plan, const std::vector<RefusalRateRow>& refusals,
                          const std::vector<ScoredRecord>& rows,
                          const std::vector<PairedComparison>& comparisons, std::size_t top_k);

}  // namespace counterfair
