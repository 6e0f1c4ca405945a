#include "counterfair/metrics.hpp"

#include <charconv>

#include "counterfair/errors.hpp"
#include "counterfair/io.hpp"
#include "counterfair/text.hpp"

namespace counterfair {

TextScorer load_scorer(const ScorerPaths& paths) {
    TextScorer scorer;
    scorer.hedge = load_lexicon(paths.hedge);
    scorer.politeness = load_lexicon(paths.politeness);
    scorer.negative = load_lexicon(paths.negative);
    scorer.valence = load_valence_lexicon(paths.valence);
    scorer.patterns = load_pattern_table(paths.patterns);
    return scorer;
}

MetricVector score_text(std::string_view text, const TextScorer& scorer) {
    MetricVector m;
    m.refusal = classify_refusal(text, scorer.patterns).cls;
    m.sentiment = sentiment_compound(text, scorer.valence);

    const auto tokens = normalize_and_tokenize(text);
    m.word_count = tokens.size();
    m.hedge_rate = rate_per_100(scorer.hedge.count_matches(tokens), m.word_count);
    m.politeness_rate = rate_per_100(scorer.politeness.count_matches(tokens), m.word_count);
    m.negative_rate = rate_per_100(scorer.negative.count_matches(tokens), m.word_count);
    return m;
}

MetricVector score_record(const ResponseRecord& record, const TextScorer& scorer) {
    if (record.status != ResponseStatus::Ok)
        throw audit_error("cannot score an excluded record (" + record.prompt_id + ", " +
                          record.identity + ", " + record.model + ")");
    return score_text(record.text, scorer);
}

ScoringResult score_corpus(const Corpus& corpus, const TextScorer& scorer) {
    ScoringResult result;
    result.rows.reserve(corpus.records.size());
    for (const auto& r : corpus.records) {
        if (r.status != ResponseStatus::Ok) {
            ++result.excluded_records;
            continue;
        }
        try {
            result.rows.push_back({r.model, r.prompt_id, r.identity, score_text(r.text, scorer)});
        } catch (const zero_word_error& e) {
            result.flagged.push_back("(" + r.prompt_id + ", " + r.identity + ", " + r.model +
                                     "): " + e.what());
        }
    }
    return result;
}

std::string metrics_to_csv(const std::vector<ScoredRecord>& rows) {
    std::string out =
        "model,prompt_id,identity,refusal,sentiment,hedge_rate,politeness_rate,negative_rate,word_count\n";
    for (const auto& r : rows) {
        out += csv_row({r.model, r.prompt_id, r.identity, to_string(r.metrics.refusal),
                        format_real(r.metrics.sentiment), format_real(r.metrics.hedge_rate),
                        format_real(r.metrics.politeness_rate), format_real(r.metrics.negative_rate),
                        std::to_string(r.metrics.word_count)});
    }
    return out;
}

namespace {

double parse_double_field(const std::string& s, std::size_t line_no, const char* what) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw parse_error(std::string("bad ") + what + " value '" + s + "'", line_no);
    }
}

}  // namespace

std::vector<ScoredRecord> metrics_from_csv(const std::string& content, const std::string& origin) {
    std::vector<ScoredRecord> rows;
    std::size_t pos = 0, line_no = 0;
    bool header_seen = false;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;  // column order is fixed; the header is not re-parsed
            continue;
        }
        auto fields = csv_split(line, line_no);
        if (fields.size() != 9)
            throw parse_error(origin + ": expected 9 columns, got " + std::to_string(fields.size()),
                              line_no);
        ScoredRecord r;
        r.model = fields[0];
        r.prompt_id = fields[1];
        r.identity = fields[2];
        r.metrics.refusal = refusal_class_from_string(fields[3]);
        r.metrics.sentiment = parse_double_field(fields[4], line_no, "sentiment");
        r.metrics.hedge_rate = parse_double_field(fields[5], line_no, "hedge_rate");
        r.metrics.politeness_rate = parse_double_field(fields[6], line_no, "politeness_rate");
        r.metrics.negative_rate = parse_double_field(fields[7], line_no, "negative_rate");
        r.metrics.word_count = static_cast<std::size_t>(
            parse_double_field(fields[8], line_no, "word_count"));
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ScoredRecord> load_metrics(const std::filesystem::path& path) {
    return metrics_from_csv(read_file(path), path.filename().string());
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"sentiment", "hedge_rate", "politeness_rate",
                                                   "negative_rate"};
    return names;
}

std::optional<double> metric_value(const MetricVector& m, const std::string& metric) {
    if (metric == "sentiment") return m.sentiment;
    if (metric == "hedge_rate") return m.hedge_rate;
    if (metric == "politeness_rate") return m.politeness_rate;
    if (metric == "negative_rate") return m.negative_rate;
    if (metric == "word_count") return static_cast<double>(m.word_count);
    return std::nullopt;
}

}  // namespace counterfair
