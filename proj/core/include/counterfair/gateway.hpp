#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "counterfair/corpus.hpp"
#include "counterfair/plan.hpp"
#include "counterfair/prompt.hpp"

namespace counterfair {

/// Transport knobs. Tests shrink the backoff base so retry paths run fast;
/// the exponential shape (base * 2^attempt, plus jitter) is fixed.
struct GatewayOptions {
    int concurrency = 4;       // in-flight requests per live collection
    int backoff_base_ms = 1000;
    double backoff_jitter = 0.1;
    int timeout_seconds = 120;
};

/// One chat completion against an OpenAI-compatible endpoint.
///
/// Sends system_text and user_text as a two-message request with the given
/// decoding parameters. The bearer token comes from the environment variable
/// named by the endpoint (never from configuration); a missing variable or a
/// malformed base_url raises config_error before any request is sent.
/// Transport failures, non-2xx statuses, and unparseable bodies are retried
/// up to decoding.max_retries times with exponential backoff; when retries
/// are exhausted the record comes back with status ExcludedAfterRetries,
/// empty text, and attempts == max_retries + 1.
ResponseRecord complete(const ModelEndpoint& endpoint, const RenderedPrompt& rendered,
                        const DecodingConfig& decoding, const GatewayOptions& options = {});

enum class CollectMode { Live, Replay, Synthetic };

std::string to_string(CollectMode mode);

struct RunOptions {
    CollectMode mode = CollectMode::Synthetic;
    std::filesystem::path replay_corpus;  // required for Replay
    std::optional<std::uint64_t> seed_override;
    GatewayOptions gateway;
};

struct RunResult {
    Corpus corpus;
    std::vector<std::string> warnings;
};

/// Collect one record per (prompt, identity, model) cell of the plan.
///
///   Live      - concurrent HTTP completions (options.gateway.concurrency).
///   Replay    - records come from options.replay_corpus; any plan cell
///               missing from the file is a hard error naming the keys.
///   Synthetic - deterministic generator records; the corpus is
///               byte-identical for a fixed seed.
///
/// Records are returned sorted by (model, prompt_id, identity grid index)
/// regardless of completion timing, and failed cells stay present with
/// excluded status: record count always equals the cell count.
RunResult run_audit(const AuditPlan& plan, const RunOptions& options);

}  // namespace counterfair
