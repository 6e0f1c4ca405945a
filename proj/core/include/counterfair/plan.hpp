#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace counterfair {

/// One demographic axis: a name plus its ordered candidate values.
struct AttributeAxis {
    std::string name;
    std::vector<std::string> values;

    bool operator==(const AttributeAxis&) const = default;
};

/// One point of the identity grid: a value chosen per axis, in axis order,
/// plus the display label derived from those values.
struct IdentityProfile {
    std::vector<std::pair<std::string, std::string>> assignments;  // (axis, value)
    std::string label;

    bool operator==(const IdentityProfile&) const = default;
};

struct PromptSpec {
    std::string prompt_id;
    std::string task_description;
    std::string output_contract;

    bool operator==(const PromptSpec&) const = default;
};

struct DecodingConfig {
    double temperature = 0.2;
    double top_p = 0.9;
    int max_tokens = 300;
    int max_retries = 3;

    bool operator==(const DecodingConfig&) const = default;
};

/// Where and how to reach one model over the wire. The API key is read from
/// the environment variable named here, never stored in configuration.
struct ModelEndpoint {
    std::string name;
    std::string base_url;
    std::string api_key_env;
    std::string completion_path = "/chat/completions";

    bool operator==(const ModelEndpoint&) const = default;
};

/// Target behavior for one synthetic identity: marker rates are per 100
/// words, sentiment is a compound-score target in [-1, 1].
struct IdentityBias {
    double hedge_rate = 0.5;
    double politeness_rate = 0.3;
    double negative_rate = 0.2;
    double sentiment = 0.65;
    double refusal_probability = 0.0;

    bool operator==(const IdentityBias&) const = default;
};

/// Synthetic-mode configuration: defaults plus per-identity-label overrides.
struct BiasSpec {
    IdentityBias defaults;
    std::map<std::string, IdentityBias> overrides;

    const IdentityBias& for_identity(const std::string& label) const {
        auto it = overrides.find(label);
        return it == overrides.end() ? defaults : it->second;
    }

    bool operator==(const BiasSpec&) const = default;
};

struct AuditPlan {
    std::string name;
    std::vector<AttributeAxis> axes;
    std::vector<PromptSpec> prompts;
    std::vector<ModelEndpoint> models;
    DecodingConfig decoding;
    double significance_level = 0.05;
    int bootstrap_resamples = 10000;
    std::uint64_t rng_seed = 0;
    BiasSpec synthetic;
};

/// Cartesian product of all axis values in lexicographic (axis index,
/// value index) order; the last axis varies fastest. Grid index therefore
/// identifies a profile deterministically.
std::vector<IdentityProfile> expand_identity_grid(const std::vector<AttributeAxis>& axes);

/// Display label for one assignment vector: every value first-letter
/// capitalized, the final axis value parenthesized when there are at least
/// two axes. ["younger","male","US-born"] becomes "Younger Male (US-born)".
std::string identity_label(const std::vector<std::pair<std::string, std::string>>& assignments);

/// Recover the assignments encoded in a label, given the axes it was built
/// from. Returns nullopt when the label matches no grid point.
std::optional<IdentityProfile> parse_identity_label(const std::vector<AttributeAxis>& axes,
                                                    const std::string& label);

/// Validate structure: non-empty axes/prompts/models, unique prompt ids and
/// axis values, decoding ranges (temperature >= 0, top_p in (0,1],
/// max_tokens >= 1, max_retries >= 0), significance in (0,1), resamples >= 1,
/// bias ranges. Returns every violation found, never throws; an empty result
/// means the plan is usable.
std::vector<std::string> validate_plan(const AuditPlan& plan);

/// Parse a plan file (JSON). Raises parse_error on malformed input with the
/// offending field in the message; does not validate ranges (see
/// validate_plan).
AuditPlan load_plan(const std::filesystem::path& path);
AuditPlan parse_plan(const std::string& json_text, const std::string& origin = "plan");

/// Stable fingerprint of the plan's audit-relevant content, as 16 hex digits.
/// Stored in corpus headers so a replay can be matched to its plan.
std::string plan_fingerprint(const AuditPlan& plan);

}  // namespace counterfair
