#include "counterfair/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "counterfair/errors.hpp"
#include "counterfair/io.hpp"

namespace counterfair {

namespace {

// Rank keys by a preferred order, then first-seen for strays.
class OrderIndex {
  public:
    explicit OrderIndex(const std::vector<std::string>& preferred) {
        for (const auto& key : preferred) rank_.emplace(key, rank_.size());
        base_ = rank_.size();
    }
    std::size_t rank(const std::string& key) {
        auto [it, inserted] = rank_.emplace(key, base_ + extra_);
        if (inserted) ++extra_;
        return it->second;
    }

  private:
    std::unordered_map<std::string, std::size_t> rank_;
    std::size_t base_ = 0;
    std::size_t extra_ = 0;
};

double median_slice(const std::vector<double>& sorted, std::size_t begin, std::size_t end) {
    const std::size_t len = end - begin;
    const std::size_t mid = begin + len / 2;
    if (len % 2 == 1) return sorted[mid];
    return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

// "0.050000" -> "0.05"; keeps at least one decimal.
std::string trim_real(double v) {
    std::string s = format_real(v);
    if (s == "nan") return s;
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return s;
}

// Percentages in the report body: one decimal at most, integers bare.
std::string percent_cell(double v) {
    if (std::isnan(v)) return "n/a";
    const double rounded = std::round(v * 10.0) / 10.0;
    if (rounded == std::floor(rounded)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", rounded);
        return buf;
    }
    return format_fixed(v, 1);
}

std::string md_row(const std::vector<std::string>& cells) {
    std::string line = "|";
    for (const auto& c : cells) {
        line += " ";
        line += c;
        line += " |";
    }
    line += "\n";
    return line;
}

std::string md_separator(std::size_t columns) {
    std::string line = "|";
    for (std::size_t i = 0; i < columns; ++i) line += "---|";
    line += "\n";
    return line;
}

std::string bold(const std::string& s) { return "**" + s + "**"; }

struct GroupKey {
    std::string model;
    std::string identity;
};

}  // namespace

std::vector<SummaryRow> summary_table(const std::vector<ScoredRecord>& rows,
                                      const std::vector<std::string>& model_order,
                                      const std::vector<std::string>& identity_order) {
    std::vector<SummaryRow> out;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
    OrderIndex models(model_order);
    OrderIndex identities(identity_order);

    for (const auto& row : rows) {
        const std::pair<std::size_t, std::size_t> key{models.rank(row.model),
                                                      identities.rank(row.identity)};
        auto [it, inserted] = slot.emplace(key, out.size());
        if (inserted) {
            SummaryRow s;
            s.model = row.model;
            s.identity = row.identity;
            out.push_back(std::move(s));
        }
        SummaryRow& s = out[it->second];
        s.sentiment += row.metrics.sentiment;
        s.politeness_rate += row.metrics.politeness_rate;
        s.hedge_rate += row.metrics.hedge_rate;
        s.negative_rate += row.metrics.negative_rate;
        s.word_count += static_cast<double>(row.metrics.word_count);
        s.n += 1;
    }

    for (auto& s : out) {
        const double n = static_cast<double>(s.n);
        s.sentiment /= n;
        s.politeness_rate /= n;
        s.hedge_rate /= n;
        s.negative_rate /= n;
        s.word_count /= n;
    }

    std::vector<SummaryRow> ordered;
    ordered.reserve(out.size());
    for (const auto& [key, index] : slot) ordered.push_back(std::move(out[index]));
    return ordered;
}

std::vector<BoxplotSeries> boxplot_data(const std::vector<ScoredRecord>& rows,
                                        const std::string& metric,
                                        const std::vector<std::string>& model_order,
                                        const std::vector<std::string>& identity_order) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
    OrderIndex models(model_order);
    OrderIndex identities(identity_order);
    std::vector<GroupKey> keys;
    std::vector<std::vector<double>> values;

    for (const auto& row : rows) {
        const auto v = metric_value(row.metrics, metric);
        if (!v) throw config_error("unknown metric '" + metric + "'");
        const std::pair<std::size_t, std::size_t> key{models.rank(row.model),
                                                      identities.rank(row.identity)};
        auto [it, inserted] = slot.emplace(key, keys.size());
        if (inserted) {
            keys.push_back({row.model, row.identity});
            values.emplace_back();
        }
        values[it->second].push_back(*v);
    }

    std::vector<BoxplotSeries> out;
    out.reserve(keys.size());
    for (const auto& [key, index] : slot) {
        std::vector<double>& data = values[index];
        std::sort(data.begin(), data.end());
        BoxplotSeries s;
        s.model = keys[index].model;
        s.identity = keys[index].identity;
        s.metric = metric;
        s.n = data.size();
        s.min = data.front();
        s.max = data.back();
        s.median = median_slice(data, 0, data.size());
        const std::size_t half = data.size() / 2;
        if (half == 0) {
            s.q1 = s.q3 = s.median;
        } else {
            s.q1 = median_slice(data, 0, half);
            s.q3 = median_slice(data, data.size() - half, data.size());
        }
        const double iqr = s.q3 - s.q1;
        const double lo = s.q1 - 1.5 * iqr;
        const double hi = s.q3 + 1.5 * iqr;
        for (double v : data)
            if (v < lo || v > hi) s.outliers.push_back(v);
        out.push_back(std::move(s));
    }
    return out;
}

std::string boxplot_to_csv(const std::vector<BoxplotSeries>& series) {
    std::string out = "model,identity,metric,n,min,q1,median,q3,max,outliers\n";
    for (const auto& s : series) {
        std::string joined;
        for (std::size_t i = 0; i < s.outliers.size(); ++i) {
            if (i) joined += ";";
            joined += format_real(s.outliers[i]);
        }
        out += csv_row({s.model, s.identity, s.metric, std::to_string(s.n), format_real(s.min),
                        format_real(s.q1), format_real(s.median), format_real(s.q3),
                        format_real(s.max), joined});
    }
    return out;
}

std::string abbreviate_identity(const std::string& label) {
    static const std::unordered_map<std::string, std::string> kShort = {
        {"Male", "M"}, {"Female", "F"}, {"US-born", "USB"}, {"Immigrant", "Imm"}};
    std::string out;
    std::size_t i = 0;
    while (i < label.size()) {
        if (label[i] == ' ' || label[i] == '(' || label[i] == ')') {
            out.push_back(label[i]);
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < label.size() && label[j] != ' ' && label[j] != '(' && label[j] != ')') ++j;
        const std::string word = label.substr(i, j - i);
        auto it = kShort.find(word);
        out += (it != kShort.end()) ? it->second : word;
        i = j;
    }
    return out;
}

std::string format_delta_ci(double delta, double ci_low, double ci_high) {
    return format_signed(delta, 2) + " [" + format_signed(ci_low, 2) + ", " +
           format_signed(ci_high, 2) + "]";
}

std::string top_pairs_table(const std::vector<PairedComparison>& comparisons,
                            const std::string& metric, std::size_t top_k) {
    std::vector<const PairedComparison*> pool;
    for (const auto& c : comparisons)
        if (c.metric == metric) pool.push_back(&c);

    std::stable_sort(pool.begin(), pool.end(),
                     [](const PairedComparison* a, const PairedComparison* b) {
                         const bool a_ok = std::isfinite(a->d);
                         const bool b_ok = std::isfinite(b->d);
                         if (a_ok != b_ok) return a_ok;
                         if (!a_ok) return false;
                         return std::abs(a->d) > std::abs(b->d);
                     });

    std::unordered_map<std::string, std::size_t> taken;
    std::vector<const PairedComparison*> rows;
    for (const auto* c : pool) {
        if (!std::isfinite(c->d)) continue;
        if (taken[c->model] >= top_k) continue;
        ++taken[c->model];
        rows.push_back(c);
    }

    std::string out;
    out += md_row({"Model", "Identity A", "Identity B", "Δ [95% CI]", "d", "p_W"});
    out += md_separator(6);
    for (const auto* c : rows) {
        std::string p = format_fixed(c->p_w, 3);
        if (c->significant) p = bold(p);
        out += md_row({c->model, abbreviate_identity(c->identity_a),
                       abbreviate_identity(c->identity_b),
                       format_delta_ci(c->delta, c->ci_low, c->ci_high), format_signed(c->d, 2),
                       p});
    }
    if (rows.empty()) out += md_row({"(none)", "", "", "", "", ""});
    out += "\nAbbreviations: M=Male, F=Female, USB=US-born, Imm=Immigrant.\n";
    return out;
}

namespace {

std::string metric_heading(const std::string& metric) {
    if (metric == "sentiment") return "Sentiment";
    if (metric == "hedge_rate") return "Hedging rate";
    if (metric == "politeness_rate") return "Politeness rate";
    if (metric == "negative_rate") return "Negative-tone rate";
    return metric;
}

struct ColumnExtremes {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    bool flat() const { return min == max; }
};

std::string summary_cell(double v, int decimals, const ColumnExtremes& ex) {
    std::string s = format_fixed(v, decimals);
    if (!ex.flat() && (v == ex.min || v == ex.max)) return bold(s);
    return s;
}

}  // namespace

std::string render_report(const AuditPlan& plan, const std::vector<RefusalRateRow>& refusals,
                          const std::vector<ScoredRecord>& rows,
                          const std::vector<PairedComparison>& comparisons, std::size_t top_k) {
    const auto grid = expand_identity_grid(plan.axes);
    std::vector<std::string> identity_order;
    identity_order.reserve(grid.size());
    for (const auto& profile : grid) identity_order.push_back(profile.label);
    std::vector<std::string> model_order;
    model_order.reserve(plan.models.size());
    for (const auto& m : plan.models) model_order.push_back(m.name);
    std::vector<std::string> prompt_order;
    prompt_order.reserve(plan.prompts.size());
    for (const auto& p : plan.prompts) prompt_order.push_back(p.prompt_id);

    std::ostringstream md;
    md << "# Audit report: " << plan.name << "\n\n";
    md << "- Models: ";
    for (std::size_t i = 0; i < model_order.size(); ++i)
        md << (i ? ", " : "") << model_order[i];
    md << "\n- Identity groups: " << grid.size();
    md << "\n- Prompts: " << plan.prompts.size();
    md << "\n- Significance level: " << trim_real(plan.significance_level);
    md << "\n- Bootstrap resamples: " << plan.bootstrap_resamples << "\n";

    md << "\n## Refusal rates\n\n";
    {
        struct Aggregate {
            std::size_t groups = 0;
            std::size_t records = 0;
            double full = 0.0, partial = 0.0, none = 0.0;
        };
        std::vector<std::string> agg_order;
        std::unordered_map<std::string, Aggregate> agg;
        for (const auto& r : refusals) {
            auto [it, inserted] = agg.emplace(r.model, Aggregate{});
            if (inserted) agg_order.push_back(r.model);
            Aggregate& a = it->second;
            a.groups += 1;
            a.records += r.n;
            if (r.n > 0) {
                const double n = static_cast<double>(r.n);
                a.full += r.full_pct * n / 100.0;
                a.partial += r.partial_pct * n / 100.0;
                a.none += r.none_pct * n / 100.0;
            }
        }
        md << md_row({"Model", "Identity groups", "Responses", "Full (%)", "Partial (%)",
                      "None (%)"});
        md << md_separator(6);
        for (const auto& model : agg_order) {
            const Aggregate& a = agg.at(model);
            const double n = static_cast<double>(a.records);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            md << md_row({model, std::to_string(a.groups), std::to_string(a.records),
                          percent_cell(a.records ? 100.0 * a.full / n : nan),
                          percent_cell(a.records ? 100.0 * a.partial / n : nan),
                          percent_cell(a.records ? 100.0 * a.none / n : nan)});
        }

        md << "\nPer identity group:\n\n";
        md << md_row({"Model", "Identity", "n", "Full (%)", "Partial (%)", "None (%)"});
        md << md_separator(6);
        for (const auto& r : refusals)
            md << md_row({r.model, r.identity, std::to_string(r.n), percent_cell(r.full_pct),
                          percent_cell(r.partial_pct), percent_cell(r.none_pct)});
    }

    md << "\n## Interaction quality by identity\n\n";
    const auto summary = summary_table(rows, model_order, identity_order);
    {
        struct ModelExtremes {
            ColumnExtremes sentiment, politeness, hedging, negative, words;
        };
        std::unordered_map<std::string, ModelExtremes> extremes;
        for (const auto& s : summary) {
            ModelExtremes& e = extremes[s.model];
            auto widen = [](ColumnExtremes& c, double v) {
                c.min = std::min(c.min, v);
                c.max = std::max(c.max, v);
            };
            widen(e.sentiment, s.sentiment);
            widen(e.politeness, s.politeness_rate);
            widen(e.hedging, s.hedge_rate);
            widen(e.negative, s.negative_rate);
            widen(e.words, s.word_count);
        }
        md << md_row({"Model", "Identity", "Sentiment", "Politeness", "Hedging", "Negative",
                      "Words", "n"});
        md << md_separator(8);
        for (const auto& s : summary) {
            const ModelExtremes& e = extremes.at(s.model);
            md << md_row({s.model, s.identity, summary_cell(s.sentiment, 2, e.sentiment),
                          summary_cell(s.politeness_rate, 2, e.politeness),
                          summary_cell(s.hedge_rate, 2, e.hedging),
                          summary_cell(s.negative_rate, 2, e.negative),
                          summary_cell(s.word_count, 1, e.words), std::to_string(s.n)});
        }
        md << "\nBold marks each model's per-column minimum and maximum.\n";

        for (const auto& model : model_order) {
            std::vector<double> counts;
            for (const auto& s : summary)
                if (s.model == model) counts.push_back(s.word_count);
            if (counts.size() < 2) continue;
            double mean = 0.0;
            for (double c : counts) mean += c;
            mean /= static_cast<double>(counts.size());
            double ss = 0.0;
            for (double c : counts) ss += (c - mean) * (c - mean);
            const double sd = std::sqrt(ss / static_cast<double>(counts.size() - 1));
            md << "\nWord-count spread across identity groups (" << model
               << "): " << format_fixed(sd, 2) << " words"
               << (sd > 5.0 ? " - exceeds the 5-word comparability bound." : ".") << "\n";
        }
    }

    md << "\n## Paired identity comparisons\n\n";
    {
        std::size_t significant = 0;
        std::size_t tested = 0;
        for (const auto& c : comparisons) {
            if (c.flag.empty() || c.flag == "all_zero_diffs") ++tested;
            if (c.significant) ++significant;
        }
        md << significant << " of " << tested << " comparisons are significant at α = "
           << trim_real(plan.significance_level) << " (uncorrected p-values).\n";
        for (const auto& metric : metric_names()) {
            md << "\n### " << metric_heading(metric) << ": top pairs by |d|\n\n";
            md << top_pairs_table(comparisons, metric, top_k);
        }
    }

    md << "\n## Sentiment distributions\n\n";
    {
        const auto series = boxplot_data(rows, "sentiment", model_order, identity_order);
        md << md_row({"Model", "Identity", "Min", "Q1", "Median", "Q3", "Max", "Outliers"});
        md << md_separator(8);
        for (const auto& s : series)
            md << md_row({s.model, s.identity, format_fixed(s.min, 2), format_fixed(s.q1, 2),
                          format_fixed(s.median, 2), format_fixed(s.q3, 2),
                          format_fixed(s.max, 2), std::to_string(s.outliers.size())});
        md << "\nQuartiles use the median-of-halves convention (median excluded on odd counts);"
              " outliers lie beyond 1.5 IQR from the quartiles. Full per-metric series are in"
              " the boxplot_<metric>.csv files.\n";
    }

    md << "\n## Difference symmetry diagnostics\n\n";
    {
        struct SymmetryRow {
            const PairedComparison* row;
            double value;
        };
        std::vector<SymmetryRow> checks;
        for (const auto& c : comparisons) {
            if (!c.flag.empty()) continue;
            try {
                const auto diffs =
                    pair_differences(rows, c.model, c.identity_a, c.identity_b, c.metric,
                                     prompt_order);
                checks.push_back({&c, symmetry_diagnostic(diffs.diffs)});
            } catch (const stats_error&) {
                continue;
            }
        }
        std::stable_sort(checks.begin(), checks.end(),
                         [](const SymmetryRow& a, const SymmetryRow& b) {
                             return a.value > b.value;
                         });
        md << "The signed-rank test assumes roughly symmetric paired differences. The skew"
              " score is |median - mean| / IQR; larger means more asymmetric.\n\n";
        md << md_row({"Model", "Metric", "Identity A", "Identity B", "Skew score"});
        md << md_separator(5);
        const std::size_t shown = std::min<std::size_t>(checks.size(), top_k);
        for (std::size_t i = 0; i < shown; ++i) {
            const auto& c = *checks[i].row;
            md << md_row({c.model, metric_heading(c.metric), abbreviate_identity(c.identity_a),
                          abbreviate_identity(c.identity_b), format_fixed(checks[i].value, 3)});
        }
        if (!shown) md << md_row({"(none)", "", "", "", ""});
    }

    return md.str();
}

}  // namespace counterfair
