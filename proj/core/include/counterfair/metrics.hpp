#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "counterfair/corpus.hpp"
#include "counterfair/lexicon.hpp"
#include "counterfair/refusal.hpp"
#include "counterfair/sentiment.hpp"

namespace counterfair {

/// Per-response measurements. Rates are per 100 words; sentiment is the
/// compound score in [-1, 1].
struct MetricVector {
    RefusalClass refusal = RefusalClass::None;
    double sentiment = 0.0;
    double hedge_rate = 0.0;
    double politeness_rate = 0.0;
    double negative_rate = 0.0;
    std::size_t word_count = 0;
};

/// The data tables scoring needs, loaded once and shared.
struct TextScorer {
    Lexicon hedge;
    Lexicon politeness;
    Lexicon negative;
    ValenceLexicon valence;
    PatternTable patterns;
};

/// Paths to the five scoring data files.
struct ScorerPaths {
    std::filesystem::path hedge;
    std::filesystem::path politeness;
    std::filesystem::path negative;
    std::filesystem::path valence;
    std::filesystem::path patterns;
};

TextScorer load_scorer(const ScorerPaths& paths);

/// Score one response text. Refusal classification runs on the raw text;
/// rate metrics run on normalized tokens. Raises zero_word_error when the
/// text has no countable words (such records are flagged and skipped by the
/// scoring stage, never silently zeroed).
MetricVector score_text(std::string_view text, const TextScorer& scorer);

/// Score one ok-status record (refusal texts included: a pure refusal still
/// has rates over its own words).
MetricVector score_record(const ResponseRecord& record, const TextScorer& scorer);

struct ScoredRecord {
    std::string model;
    std::string prompt_id;
    std::string identity;
    MetricVector metrics;
};

/// The metrics table plus the records scoring had to set aside.
struct ScoringResult {
    std::vector<ScoredRecord> rows;              // corpus order, ok records only
    std::vector<std::string> flagged;            // "(prompt, identity, model): reason"
    std::size_t excluded_records = 0;            // status != ok
};

/// Score every ok record of a corpus, collecting flags instead of failing.
ScoringResult score_corpus(const Corpus& corpus, const TextScorer& scorer);

/// metrics.csv: model,prompt_id,identity,refusal,sentiment,hedge_rate,
/// politeness_rate,negative_rate,word_count. Reals carry six decimals.
std::string metrics_to_csv(const std::vector<ScoredRecord>& rows);
std::vector<ScoredRecord> metrics_from_csv(const std::string& content, const std::string& origin);
std::vector<ScoredRecord> load_metrics(const std::filesystem::path& path);

/// Canonical metric-column ids, in report order.
const std::vector<std::string>& metric_names();

/// Extract one metric by column id; nullopt for an unknown id.
std::optional<double> metric_value(const MetricVector& m, const std::string& metric);

}  // namespace counterfair
