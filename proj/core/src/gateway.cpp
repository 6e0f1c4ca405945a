#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "counterfair/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "counterfair/errors.hpp"
#include "counterfair/hash.hpp"
#include "counterfair/synthetic.hpp"

namespace counterfair {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string scheme_host_port;  // what httplib::Client wants
    std::string path_prefix;       // any path component of base_url
};

ParsedUrl parse_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw config_error("endpoint base_url '" + base_url + "' has no scheme");
    const std::string scheme = base_url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw config_error("endpoint base_url scheme must be http or https, got '" + scheme + "'");
    const std::size_t authority_begin = scheme_end + 3;
    if (authority_begin >= base_url.size())
        throw config_error("endpoint base_url '" + base_url + "' has no host");
    auto path_begin = base_url.find('/', authority_begin);
    ParsedUrl out;
    if (path_begin == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, path_begin);
        out.path_prefix = base_url.substr(path_begin);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Pull choices[0].message.content out of a completion response; empty
// optional means the attempt failed and should be retried.
std::optional<std::string> extract_content(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        return std::nullopt;
    const json& first = j["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content"))
        return std::nullopt;
    const json& content = first["message"]["content"];
    if (!content.is_string()) return std::nullopt;
    std::string text = content.get<std::string>();
    if (text.empty()) return std::nullopt;
    return text;
}

void backoff_sleep(int attempt, const GatewayOptions& options) {
    if (options.backoff_base_ms <= 0) return;
    thread_local std::mt19937_64 jitter_rng(std::random_device{}());
    const double base = static_cast<double>(options.backoff_base_ms) *
                        std::ldexp(1.0, attempt - 1);
    const double jitter = 1.0 + options.backoff_jitter * uniform01(jitter_rng);
    std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(base * jitter)));
}

}  // namespace

std::string to_string(CollectMode mode) {
    switch (mode) {
        case CollectMode::Live: return "live";
        case CollectMode::Replay: return "replay";
        case CollectMode::Synthetic: return "synthetic";
    }
    return "synthetic";
}

ResponseRecord complete(const ModelEndpoint& endpoint, const RenderedPrompt& rendered,
                        const DecodingConfig& decoding, const GatewayOptions& options) {
    if (endpoint.name.empty()) throw config_error("endpoint has no model name");
    if (endpoint.base_url.empty())
        throw config_error("endpoint '" + endpoint.name + "' has no base_url");
    const ParsedUrl url = parse_base_url(endpoint.base_url);

    std::string bearer;
    if (!endpoint.api_key_env.empty()) {
        const char* key = std::getenv(endpoint.api_key_env.c_str());
        if (!key || !*key)
            throw config_error("environment variable '" + endpoint.api_key_env +
                               "' is not set (required by endpoint '" + endpoint.name + "')");
        bearer = key;
    }

    const json body = {{"model", endpoint.name},
                       {"messages",
                        {{{"role", "system"}, {"content", rendered.system_text}},
                         {{"role", "user"}, {"content", rendered.user_text}}}},
                       {"temperature", decoding.temperature},
                       {"top_p", decoding.top_p},
                       {"max_tokens", decoding.max_tokens}};
    const std::string payload = body.dump();
    const std::string path = url.path_prefix + endpoint.completion_path;

    ResponseRecord record;
    record.prompt_id = rendered.prompt_id;
    record.identity = rendered.identity_label;
    record.model = endpoint.name;
    record.decoding = decoding;

    const int max_attempts = decoding.max_retries + 1;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        httplib::Client client(url.scheme_host_port);
        client.set_connection_timeout(options.timeout_seconds);
        client.set_read_timeout(options.timeout_seconds);
        httplib::Headers headers;
        if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);

        auto res = client.Post(path, headers, payload, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            if (auto text = extract_content(res->body)) {
                record.text = *text;
                record.status = ResponseStatus::Ok;
                record.attempts = attempt;
                record.timestamp = iso8601_now();
                return record;
            }
        }
        if (attempt < max_attempts) backoff_sleep(attempt, options);
    }

    record.text.clear();
    record.status = ResponseStatus::ExcludedAfterRetries;
    record.attempts = max_attempts;
    record.timestamp = iso8601_now();
    return record;
}

namespace {

struct Cell {
    std::size_t model_index;
    std::size_t prompt_index;
    std::size_t grid_index;
    RenderedPrompt rendered;
};

std::vector<Cell> plan_cells(const AuditPlan& plan, const std::vector<IdentityProfile>& grid) {
    std::vector<Cell> cells;
    cells.reserve(plan.models.size() * plan.prompts.size() * grid.size());
    for (std::size_t m = 0; m < plan.models.size(); ++m)
        for (std::size_t p = 0; p < plan.prompts.size(); ++p)
            for (std::size_t g = 0; g < grid.size(); ++g)
                cells.push_back({m, p, g, render_prompt(plan.prompts[p], grid[g])});
    return cells;
}

void sort_canonical(std::vector<ResponseRecord>& records,
                    const std::vector<IdentityProfile>& grid) {
    std::unordered_map<std::string, std::size_t> grid_index;
    for (std::size_t g = 0; g < grid.size(); ++g) grid_index[grid[g].label] = g;
    std::sort(records.begin(), records.end(),
              [&grid_index](const ResponseRecord& a, const ResponseRecord& b) {
                  if (a.model != b.model) return a.model < b.model;
                  if (a.prompt_id != b.prompt_id) return a.prompt_id < b.prompt_id;
                  return grid_index.at(a.identity) < grid_index.at(b.identity);
              });
}

}  // namespace

RunResult run_audit(const AuditPlan& plan, const RunOptions& options) {
    const auto grid = expand_identity_grid(plan.axes);
    if (grid.empty()) throw config_error("plan has an empty identity grid");
    const std::uint64_t seed = options.seed_override.value_or(plan.rng_seed);

    RunResult result;
    result.corpus.plan_fingerprint = plan_fingerprint(plan);
    result.corpus.mode = to_string(options.mode);

    auto cells = plan_cells(plan, grid);

    if (options.mode == CollectMode::Synthetic) {
        for (const auto& cell : cells) {
            ResponseRecord r = synthetic_respond(cell.rendered, plan.synthetic, seed, plan.decoding);
            r.model = plan.models[cell.model_index].name;
            result.corpus.records.push_back(std::move(r));
        }
    } else if (options.mode == CollectMode::Replay) {
        if (options.replay_corpus.empty())
            throw config_error("replay mode requires a corpus path");
        Corpus source = load_corpus(options.replay_corpus);
        if (source.plan_fingerprint != result.corpus.plan_fingerprint)
            result.warnings.push_back("replay corpus was collected under a different plan (" +
                                      source.plan_fingerprint + " vs " +
                                      result.corpus.plan_fingerprint + ")");
        std::map<std::tuple<std::string, std::string, std::string>, const ResponseRecord*> index;
        for (const auto& r : source.records)
            index[{r.prompt_id, r.identity, r.model}] = &r;

        std::vector<std::string> missing;
        for (const auto& cell : cells) {
            const std::string& model = plan.models[cell.model_index].name;
            auto it = index.find({cell.rendered.prompt_id, cell.rendered.identity_label, model});
            if (it == index.end()) {
                missing.push_back("(" + cell.rendered.prompt_id + ", " +
                                  cell.rendered.identity_label + ", " + model + ")");
                continue;
            }
            result.corpus.records.push_back(*it->second);
        }
        if (!missing.empty()) {
            std::string msg = "replay corpus is missing " + std::to_string(missing.size()) +
                              " of " + std::to_string(cells.size()) + " plan cells:";
            const std::size_t shown = std::min<std::size_t>(missing.size(), 10);
            for (std::size_t i = 0; i < shown; ++i) msg += " " + missing[i];
            if (missing.size() > shown) msg += " ...";
            throw audit_error(msg);
        }
        if (source.records.size() > cells.size())
            result.warnings.push_back(std::to_string(source.records.size() - cells.size()) +
                                      " extra records in the replay corpus were ignored");
    } else {
        // Live collection: a small claim-by-index pool, results placed by
        // cell index so concurrency cannot reorder or drop records.
        std::vector<ResponseRecord> records(cells.size());
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::string failure;
        std::mutex failure_mutex;

        const std::size_t workers = std::min<std::size_t>(
            cells.size(), static_cast<std::size_t>(std::max(1, options.gateway.concurrency)));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size() || failed.load()) return;
                    try {
                        records[i] = complete(plan.models[cells[i].model_index], cells[i].rendered,
                                              plan.decoding, options.gateway);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failed.exchange(true)) failure = e.what();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failed.load()) throw config_error(failure);
        result.corpus.records = std::move(records);
    }

    sort_canonical(result.corpus.records, grid);
    return result;
}

}  // namespace counterfair
