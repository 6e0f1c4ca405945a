#include "counterfair/plan.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "counterfair/errors.hpp"
#include "counterfair/hash.hpp"
#include "counterfair/io.hpp"

namespace counterfair {

using nlohmann::json;

std::vector<IdentityProfile> expand_identity_grid(const std::vector<AttributeAxis>& axes) {
    std::vector<IdentityProfile> grid;
    if (axes.empty()) return grid;
    for (const auto& axis : axes)
        if (axis.values.empty()) return grid;

    std::size_t total = 1;
    for (const auto& axis : axes) total *= axis.values.size();
    grid.reserve(total);

    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t count = 0; count < total; ++count) {
        IdentityProfile p;
        p.assignments.reserve(axes.size());
        for (std::size_t a = 0; a < axes.size(); ++a)
            p.assignments.emplace_back(axes[a].name, axes[a].values[idx[a]]);
        p.label = identity_label(p.assignments);
        grid.push_back(std::move(p));
        // Odometer increment, last axis fastest.
        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++idx[a] < axes[a].values.size()) break;
            idx[a] = 0;
        }
    }
    return grid;
}

namespace {

std::string capitalize_first(const std::string& s) {
    std::string out = s;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z')
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
}

}  // namespace

std::string identity_label(const std::vector<std::pair<std::string, std::string>>& assignments) {
    std::string label;
    const std::size_t n = assignments.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::string display = capitalize_first(assignments[i].second);
        if (n >= 2 && i + 1 == n) {
            label += " (" + display + ")";
        } else {
            if (i) label += " ";
            label += display;
        }
    }
    return label;
}

std::optional<IdentityProfile> parse_identity_label(const std::vector<AttributeAxis>& axes,
                                                    const std::string& label) {
    // Grids are small (a handful of axes with a few values each), so matching
    // against the expanded grid is both simplest and obviously correct.
    for (auto& profile : expand_identity_grid(axes))
        if (profile.label == label) return profile;
    return std::nullopt;
}

std::vector<std::string> validate_plan(const AuditPlan& plan) {
    std::vector<std::string> errors;
    auto fail = [&errors](std::string msg) { errors.push_back(std::move(msg)); };

    if (plan.axes.empty()) fail("axes: at least one attribute axis is required");
    std::set<std::string> axis_names;
    for (std::size_t a = 0; a < plan.axes.size(); ++a) {
        const auto& axis = plan.axes[a];
        const std::string at = "axes[" + std::to_string(a) + "]";
        if (axis.name.empty()) fail(at + ".name: must not be empty");
        if (!axis_names.insert(axis.name).second)
            fail(at + ".name: duplicate axis name '" + axis.name + "'");
        if (axis.values.empty()) fail(at + ".values: at least one value is required");
        std::set<std::string> seen;
        for (std::size_t v = 0; v < axis.values.size(); ++v) {
            if (axis.values[v].empty())
                fail(at + ".values[" + std::to_string(v) + "]: must not be empty");
            else if (!seen.insert(axis.values[v]).second)
                fail(at + ".values[" + std::to_string(v) + "]: duplicate value '" + axis.values[v] + "'");
        }
    }

    if (plan.prompts.empty()) fail("prompts: at least one prompt is required");
    std::map<std::string, std::size_t> prompt_ids;
    for (std::size_t i = 0; i < plan.prompts.size(); ++i) {
        const auto& p = plan.prompts[i];
        const std::string at = "prompts[" + std::to_string(i) + "]";
        if (p.prompt_id.empty()) fail(at + ".id: must not be empty");
        auto [it, inserted] = prompt_ids.emplace(p.prompt_id, i);
        if (!inserted)
            fail(at + ".id: duplicate of prompts[" + std::to_string(it->second) + "] ('" + p.prompt_id + "')");
        if (p.task_description.empty()) fail(at + ".task: must not be empty");
    }

    if (plan.models.empty()) fail("models: at least one model is required");
    std::set<std::string> model_names;
    for (std::size_t m = 0; m < plan.models.size(); ++m) {
        const std::string at = "models[" + std::to_string(m) + "]";
        if (plan.models[m].name.empty()) fail(at + ".name: must not be empty");
        else if (!model_names.insert(plan.models[m].name).second)
            fail(at + ".name: duplicate model name '" + plan.models[m].name + "'");
    }

    const auto& d = plan.decoding;
    if (d.temperature < 0.0) fail("decoding.temperature: must be >= 0");
    if (!(d.top_p > 0.0 && d.top_p <= 1.0))
        fail("decoding.top_p: must be in (0, 1], got " + format_real(d.top_p));
    if (d.max_tokens < 1) fail("decoding.max_tokens: must be >= 1");
    if (d.max_retries < 0) fail("decoding.max_retries: must be >= 0");

    if (!(plan.significance_level > 0.0 && plan.significance_level < 1.0))
        fail("significance_level: must be in (0, 1)");
    if (plan.bootstrap_resamples < 1) fail("bootstrap_resamples: must be >= 1");

    auto check_bias = [&fail](const IdentityBias& b, const std::string& at) {
        if (b.hedge_rate < 0) fail(at + ".hedge_rate: must be >= 0");
        if (b.politeness_rate < 0) fail(at + ".politeness_rate: must be >= 0");
        if (b.negative_rate < 0) fail(at + ".negative_rate: must be >= 0");
        if (b.sentiment < -1.0 || b.sentiment > 1.0) fail(at + ".sentiment: must be in [-1, 1]");
        if (b.refusal_probability < 0.0 || b.refusal_probability > 1.0)
            fail(at + ".refusal_probability: must be in [0, 1]");
    };
    check_bias(plan.synthetic.defaults, "synthetic.defaults");
    auto grid = expand_identity_grid(plan.axes);
    for (const auto& [label, bias] : plan.synthetic.overrides) {
        check_bias(bias, "synthetic.overrides['" + label + "']");
        bool known = std::any_of(grid.begin(), grid.end(),
                                 [&label](const IdentityProfile& p) { return p.label == label; });
        if (!known)
            fail("synthetic.overrides['" + label + "']: label matches no identity in the grid");
    }

    return errors;
}

namespace {

const json* find_key(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& at) {
    const json* v = find_key(obj, key);
    if (!v || !v->is_string()) throw parse_error(at + "." + key + ": expected a string");
    return v->get<std::string>();
}

std::string optional_string(const json& obj, const char* key, const std::string& fallback = "") {
    const json* v = find_key(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) throw parse_error(std::string("expected a string for '") + key + "'");
    return v->get<std::string>();
}

double optional_number(const json& obj, const char* key, double fallback) {
    const json* v = find_key(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) throw parse_error(std::string("expected a number for '") + key + "'");
    return v->get<double>();
}

IdentityBias parse_bias(const json& obj, const IdentityBias& base) {
    IdentityBias b = base;
    b.hedge_rate = optional_number(obj, "hedge_rate", b.hedge_rate);
    b.politeness_rate = optional_number(obj, "politeness_rate", b.politeness_rate);
    b.negative_rate = optional_number(obj, "negative_rate", b.negative_rate);
    b.sentiment = optional_number(obj, "sentiment", b.sentiment);
    b.refusal_probability = optional_number(obj, "refusal_probability", b.refusal_probability);
    return b;
}

}  // namespace

AuditPlan parse_plan(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw parse_error(origin + ": " + e.what());
    }
    if (!root.is_object()) throw parse_error(origin + ": top level must be an object");

    AuditPlan plan;
    plan.name = optional_string(root, "name", origin);

    const json* axes = find_key(root, "axes");
    if (!axes || !axes->is_array()) throw parse_error(origin + ": 'axes' must be an array");
    for (std::size_t i = 0; i < axes->size(); ++i) {
        const json& a = (*axes)[i];
        const std::string at = "axes[" + std::to_string(i) + "]";
        if (!a.is_object()) throw parse_error(at + ": expected an object");
        AttributeAxis axis;
        axis.name = require_string(a, "name", at);
        const json* values = find_key(a, "values");
        if (!values || !values->is_array()) throw parse_error(at + ".values: expected an array");
        for (const json& v : *values) {
            if (!v.is_string()) throw parse_error(at + ".values: expected strings");
            axis.values.push_back(v.get<std::string>());
        }
        plan.axes.push_back(std::move(axis));
    }

    const std::string default_contract = optional_string(root, "output_contract");

    const json* prompts = find_key(root, "prompts");
    if (!prompts || !prompts->is_array()) throw parse_error(origin + ": 'prompts' must be an array");
    for (std::size_t i = 0; i < prompts->size(); ++i) {
        const json& p = (*prompts)[i];
        const std::string at = "prompts[" + std::to_string(i) + "]";
        if (!p.is_object()) throw parse_error(at + ": expected an object");
        PromptSpec spec;
        spec.prompt_id = require_string(p, "id", at);
        spec.task_description = require_string(p, "task", at);
        spec.output_contract = optional_string(p, "output_contract", default_contract);
        plan.prompts.push_back(std::move(spec));
    }

    const json* models = find_key(root, "models");
    if (!models || !models->is_array()) throw parse_error(origin + ": 'models' must be an array");
    for (std::size_t i = 0; i < models->size(); ++i) {
        const json& m = (*models)[i];
        const std::string at = "models[" + std::to_string(i) + "]";
        if (!m.is_object()) throw parse_error(at + ": expected an object");
        ModelEndpoint ep;
        ep.name = require_string(m, "name", at);
        ep.base_url = optional_string(m, "base_url");
        ep.api_key_env = optional_string(m, "api_key_env");
        ep.completion_path = optional_string(m, "path", "/chat/completions");
        plan.models.push_back(std::move(ep));
    }

    if (const json* d = find_key(root, "decoding")) {
        if (!d->is_object()) throw parse_error(origin + ": 'decoding' must be an object");
        plan.decoding.temperature = optional_number(*d, "temperature", plan.decoding.temperature);
        plan.decoding.top_p = optional_number(*d, "top_p", plan.decoding.top_p);
        plan.decoding.max_tokens = static_cast<int>(optional_number(*d, "max_tokens", plan.decoding.max_tokens));
        plan.decoding.max_retries = static_cast<int>(optional_number(*d, "max_retries", plan.decoding.max_retries));
    }

    plan.significance_level = optional_number(root, "significance_level", plan.significance_level);
    plan.bootstrap_resamples = static_cast<int>(optional_number(root, "bootstrap_resamples", plan.bootstrap_resamples));
    if (const json* seed = find_key(root, "rng_seed")) {
        if (!seed->is_number_unsigned() && !seed->is_number_integer())
            throw parse_error(origin + ": 'rng_seed' must be an integer");
        plan.rng_seed = seed->get<std::uint64_t>();
    }

    if (const json* syn = find_key(root, "synthetic")) {
        if (!syn->is_object()) throw parse_error(origin + ": 'synthetic' must be an object");
        if (const json* defaults = find_key(*syn, "defaults"))
            plan.synthetic.defaults = parse_bias(*defaults, plan.synthetic.defaults);
        if (const json* overrides = find_key(*syn, "overrides")) {
            if (!overrides->is_object())
                throw parse_error(origin + ": 'synthetic.overrides' must be an object keyed by identity label");
            for (auto it = overrides->begin(); it != overrides->end(); ++it)
                plan.synthetic.overrides[it.key()] = parse_bias(it.value(), plan.synthetic.defaults);
        }
    }

    return plan;
}

AuditPlan load_plan(const std::filesystem::path& path) {
    return parse_plan(read_file(path), path.filename().string());
}

std::string plan_fingerprint(const AuditPlan& plan) {
    json j;
    j["name"] = plan.name;
    json axes = json::array();
    for (const auto& a : plan.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    j["axes"] = axes;
    json prompts = json::array();
    for (const auto& p : plan.prompts)
        prompts.push_back({{"id", p.prompt_id}, {"task", p.task_description}, {"contract", p.output_contract}});
    j["prompts"] = prompts;
    json models = json::array();
    for (const auto& m : plan.models) models.push_back({{"name", m.name}});
    j["models"] = models;
    j["decoding"] = {{"temperature", plan.decoding.temperature},
                     {"top_p", plan.decoding.top_p},
                     {"max_tokens", plan.decoding.max_tokens},
                     {"max_retries", plan.decoding.max_retries}};
    // nlohmann objects keep keys sorted, so dump() is canonical.
    std::uint64_t h = fnv1a64(j.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace counterfair
