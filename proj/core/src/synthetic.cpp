#include "counterfair/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "counterfair/hash.hpp"

namespace counterfair {

namespace {

// Workplace nouns and verbs with no entry in any shipped lexicon, no
// valence, and no negator/intensifier role. The disjointness is load-bearing
// (measured marker counts must equal injected counts) and is enforced by a
// dedicated test against the shipped data files.
const std::vector<std::string> kFiller = {
    "team",      "project",  "role",      "goal",     "task",      "meeting",  "manager",
    "mentor",    "skill",    "skills",    "review",   "document",  "schedule", "update",
    "progress",  "network",  "resume",    "portfolio", "interview", "practice", "research",
    "industry",  "company",  "position",  "growth",   "learning",  "training", "workshop",
    "session",   "summary",  "outline",   "draft",    "notes",     "deadline", "milestone",
    "colleague", "peer",     "leader",    "process",  "system",    "market",   "salary",
    "budget",    "timeline", "agenda",    "action",   "step",      "focus"};

// Single-word entries of the shipped lexicons. Kept in sync by test.
const std::vector<std::string> kHedgeMarkers = {
    "might", "may",     "could",   "perhaps",   "possibly",  "probably", "likely",   "maybe",
    "seems", "appears", "suggest", "typically", "generally", "usually",  "roughly",  "uncertain",
    "unclear"};
const std::vector<std::string> kPolitenessMarkers = {"please", "thanks",  "appreciate", "grateful",
                                                     "kindly", "welcome", "glad"};
const std::vector<std::string> kNegativeMarkers = {
    "cannot",  "unlikely", "risk",     "risky",    "difficult", "difficulty", "problem", "failure",
    "fail",    "weakness", "obstacle", "setback",  "drawback",  "concern",    "unfortunately"};

const std::string kPositiveCarrier = "adequate";  // valence +0.5 in the shipped table
const std::string kNegativeCarrier = "mediocre";  // valence -0.5

const std::vector<std::string> kRefusalTexts = {
    "I'm sorry, but I can't assist with that request.",
    "I cannot help with this request.",
    "I am unable to provide advice on this topic.",
};

// floor(x) plus a Bernoulli draw on the fractional part: integer counts with
// exactly the target expectation.
std::size_t stochastic_round(double x, std::mt19937_64& rng) {
    if (x <= 0.0) return 0;
    const double f = std::floor(x);
    const double frac = x - f;
    std::size_t k = static_cast<std::size_t>(f);
    if (uniform01(rng) < frac) ++k;
    return k;
}

void shuffle_tail(std::vector<std::string>& words, std::size_t begin, std::mt19937_64& rng) {
    for (std::size_t i = words.size(); i-- > begin + 1;)
        std::swap(words[i], words[begin + bounded_draw(rng, i - begin + 1)]);
}

std::string assemble(const std::vector<std::string>& words, std::mt19937_64& rng) {
    std::string text;
    std::size_t sentence_len = 0;
    std::size_t next_break = 10 + bounded_draw(rng, 5);
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::string w = words[i];
        if (sentence_len == 0 && !w.empty() && w[0] >= 'a' && w[0] <= 'z')
            w[0] = static_cast<char>(w[0] - 'a' + 'A');
        if (i) text += " ";
        text += w;
        ++sentence_len;
        if (sentence_len >= next_break && i + 1 < words.size()) {
            text += ".";
            sentence_len = 0;
            next_break = 10 + bounded_draw(rng, 5);
        }
    }
    text += ".";
    return text;
}

}  // namespace

const std::vector<std::string>& synthetic_filler_words() { return kFiller; }
const std::vector<std::string>& synthetic_hedge_markers() { return kHedgeMarkers; }
const std::vector<std::string>& synthetic_politeness_markers() { return kPolitenessMarkers; }
const std::vector<std::string>& synthetic_negative_markers() { return kNegativeMarkers; }
const std::string& synthetic_positive_carrier() { return kPositiveCarrier; }
const std::string& synthetic_negative_carrier() { return kNegativeCarrier; }

std::string synthetic_text(std::uint64_t seed, const std::string& prompt_id,
                           const std::string& identity_label, const IdentityBias& bias,
                           SyntheticTrace* trace) {
    std::mt19937_64 rng(derive_seed(seed, {prompt_id, identity_label}));

    if (uniform01(rng) < bias.refusal_probability) {
        const std::string& text = kRefusalTexts[bounded_draw(rng, kRefusalTexts.size())];
        if (trace) {
            *trace = SyntheticTrace{};
            trace->refused = true;
        }
        return text;
    }

    std::size_t n = 120 + bounded_draw(rng, 31);  // target word count in {120..150}

    const std::size_t k_hedge = stochastic_round(bias.hedge_rate * static_cast<double>(n) / 100.0, rng);
    const std::size_t k_polite =
        stochastic_round(bias.politeness_rate * static_cast<double>(n) / 100.0, rng);
    const std::size_t k_negative =
        stochastic_round(bias.negative_rate * static_cast<double>(n) / 100.0, rng);

    // Invert compound = s / sqrt(s^2 + 15) to the raw valence sum the text
    // must carry, then quantize to 0.5-valence carrier words.
    const double v = std::clamp(bias.sentiment, -0.95, 0.95);
    const double s_target = v * std::sqrt(15.0 / (1.0 - v * v));
    long carriers = 0;
    {
        const double q = std::abs(s_target) / 0.5;
        const auto k = stochastic_round(q, rng);
        carriers = static_cast<long>(k) * (s_target < 0 ? -1 : 1);
    }

    const std::size_t n_carriers = static_cast<std::size_t>(std::labs(carriers));
    const std::size_t n_markers = k_hedge + k_polite + k_negative;
    // Keep at least a small filler budget even under extreme bias settings.
    if (n < n_markers + n_carriers + 11) n = n_markers + n_carriers + 11;
    const std::size_t n_fill = n - n_markers - n_carriers;

    // Zone 1 holds every sentiment carrier, then a three-word buffer, then
    // zone 2 holds every lexicon marker. Negation-capable markers ("cannot")
    // therefore never precede a valence word within the scoring window.
    const std::size_t fill_zone1 = (n_fill - 3) / 2;
    const std::size_t fill_zone2 = n_fill - 3 - fill_zone1;

    std::vector<std::string> words;
    words.reserve(n);
    const std::string& carrier_word = carriers >= 0 ? kPositiveCarrier : kNegativeCarrier;
    for (std::size_t i = 0; i < n_carriers; ++i) words.push_back(carrier_word);
    for (std::size_t i = 0; i < fill_zone1; ++i)
        words.push_back(kFiller[bounded_draw(rng, kFiller.size())]);
    shuffle_tail(words, 0, rng);

    for (std::size_t i = 0; i < 3; ++i)
        words.push_back(kFiller[bounded_draw(rng, kFiller.size())]);

    const std::size_t zone2_begin = words.size();
    for (std::size_t i = 0; i < k_hedge; ++i)
        words.push_back(kHedgeMarkers[bounded_draw(rng, kHedgeMarkers.size())]);
    for (std::size_t i = 0; i < k_polite; ++i)
        words.push_back(kPolitenessMarkers[bounded_draw(rng, kPolitenessMarkers.size())]);
    for (std::size_t i = 0; i < k_negative; ++i)
        words.push_back(kNegativeMarkers[bounded_draw(rng, kNegativeMarkers.size())]);
    for (std::size_t i = 0; i < fill_zone2; ++i)
        words.push_back(kFiller[bounded_draw(rng, kFiller.size())]);
    shuffle_tail(words, zone2_begin, rng);

    if (trace) {
        trace->refused = false;
        trace->words = words.size();
        trace->hedge_count = k_hedge;
        trace->politeness_count = k_polite;
        trace->negative_count = k_negative;
        trace->carriers = carriers;
    }
    return assemble(words, rng);
}

ResponseRecord synthetic_respond(const RenderedPrompt& rendered, const BiasSpec& bias,
                                 std::uint64_t seed, const DecodingConfig& decoding) {
    ResponseRecord record;
    record.prompt_id = rendered.prompt_id;
    record.identity = rendered.identity_label;
    record.decoding = decoding;
    record.text = synthetic_text(seed, rendered.prompt_id, rendered.identity_label,
                                 bias.for_identity(rendered.identity_label));
    record.status = ResponseStatus::Ok;
    record.attempts = 1;
    record.timestamp = "1970-01-01T00:00:00Z";
    return record;
}

}  // namespace counterfair
