#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "counterfair/plan.hpp"

namespace counterfair {

enum class ResponseStatus { Ok, ExcludedAfterRetries };

std::string to_string(ResponseStatus status);
ResponseStatus response_status_from_string(const std::string& s);

/// One collected response for a (prompt, identity, model) cell. Records with
/// status ExcludedAfterRetries stay in the corpus with empty text and
/// attempts == max_retries + 1; they are dropped from metric denominators,
/// not from the file.
struct ResponseRecord {
    std::string prompt_id;
    std::string identity;
    std::string model;
    DecodingConfig decoding;
    std::string text;
    ResponseStatus status = ResponseStatus::Ok;
    int attempts = 1;
    std::string timestamp;  // ISO-8601 UTC

    bool operator==(const ResponseRecord&) const = default;
};

inline constexpr const char* kCorpusSchema = "counterfair-corpus/v1";

/// A response corpus: schema header plus records in deterministic
/// (model, prompt, identity-grid) order.
struct Corpus {
    std::string schema = kCorpusSchema;
    std::string plan_fingerprint;
    std::string mode;  // live | replay | synthetic
    std::vector<ResponseRecord> records;
};

/// Serialize to JSON Lines: one header object, then one record per line.
std::string corpus_to_jsonl(const Corpus& corpus);

/// Parse JSON Lines. Raises parse_error carrying the offending 1-based line
/// number on malformed lines, a schema mismatch, or a duplicate
/// (prompt, identity, model) key.
Corpus corpus_from_jsonl(const std::string& content, const std::string& origin);

/// Atomic save / strict load.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace counterfair
