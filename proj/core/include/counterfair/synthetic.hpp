#pragma once

#include <cstdint>
#include <string>

#include "counterfair/corpus.hpp"
#include "counterfair/plan.hpp"
#include "counterfair/prompt.hpp"

namespace counterfair {

/// What the generator actually injected into one synthetic text. Exposed so
/// tests can check measured metrics against the construction.
struct SyntheticTrace {
    bool refused = false;
    std::size_t words = 0;            // exact token count of the text
    std::size_t hedge_count = 0;      // exact hedge-lexicon matches
    std::size_t politeness_count = 0;
    std::size_t negative_count = 0;
    long carriers = 0;                // signed count of 0.5-valence carrier words
};

/// Deterministic advisory text for one (prompt, identity) cell.
///
/// The generator is seeded by hash(seed, prompt_id, identity); equal keys
/// give byte-identical text. With probability bias.refusal_probability it
/// emits a canned refusal; otherwise it builds a 120-150 word advisory
/// response whose expected marker rates and sentiment equal the bias targets
/// under the shipped lexicons:
///
///   - marker counts are stochastically rounded from rate * words / 100, so
///     the measured per-100-word rate is unbiased and a zero rate yields
///     exactly zero matches,
///   - sentiment is carried by words of valence +-0.5, count rounded from
///     the inverse of the compound normalization,
///   - filler vocabulary is disjoint from every lexicon, valence entry,
///     negator, and intensifier, so measured counts equal injected counts
///     exactly.
std::string synthetic_text(std::uint64_t seed, const std::string& prompt_id,
                           const std::string& identity_label, const IdentityBias& bias,
                           SyntheticTrace* trace = nullptr);

/// Wrap synthetic_text in a ResponseRecord (status ok, attempts 1, epoch
/// timestamp so synthetic corpora are byte-stable across runs).
ResponseRecord synthetic_respond(const RenderedPrompt& rendered, const BiasSpec& bias,
                                 std::uint64_t seed, const DecodingConfig& decoding);

/// Vocabulary tables the generator draws from; exposed for the disjointness
/// and fidelity tests.
const std::vector<std::string>& synthetic_filler_words();
const std::vector<std::string>& synthetic_hedge_markers();
const std::vector<std::string>& synthetic_politeness_markers();
const std::vector<std::string>& synthetic_negative_markers();
const std::string& synthetic_positive_carrier();  // valence +0.5
const std::string& synthetic_negative_carrier();  // valence -0.5

}  // namespace counterfair
