#include "counterfair/corpus.hpp"

#include <json.hpp>

#include <set>
#include <tuple>

#include "counterfair/errors.hpp"
#include "counterfair/io.hpp"

namespace counterfair {

using nlohmann::json;

std::string to_string(ResponseStatus status) {
    return status == ResponseStatus::Ok ? "ok" : "excluded_after_retries";
}

ResponseStatus response_status_from_string(const std::string& s) {
    if (s == "ok") return ResponseStatus::Ok;
    if (s == "excluded_after_retries") return ResponseStatus::ExcludedAfterRetries;
    throw parse_error("unknown response status '" + s + "'");
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::string out;
    json header = {{"schema", corpus.schema},
                   {"plan", corpus.plan_fingerprint},
                   {"mode", corpus.mode}};
    out += header.dump();
    out += "\n";
    for (const auto& r : corpus.records) {
        json line = {{"prompt_id", r.prompt_id},
                     {"identity", r.identity},
                     {"model", r.model},
                     {"decoding",
                      {{"temperature", r.decoding.temperature},
                       {"top_p", r.decoding.top_p},
                       {"max_tokens", r.decoding.max_tokens},
                       {"max_retries", r.decoding.max_retries}}},
                     {"text", r.text},
                     {"status", to_string(r.status)},
                     {"attempts", r.attempts},
                     {"timestamp", r.timestamp}};
        out += line.dump();
        out += "\n";
    }
    return out;
}

Corpus corpus_from_jsonl(const std::string& content, const std::string& origin) {
    Corpus corpus;
    std::set<std::tuple<std::string, std::string, std::string>> keys;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw parse_error(origin + ": malformed JSON record: " + e.what(), line_no);
        }
        if (!j.is_object()) throw parse_error(origin + ": record is not an object", line_no);

        if (!header_seen) {
            if (!j.contains("schema") || !j["schema"].is_string())
                throw parse_error(origin + ": first line must be a header with a 'schema' field", line_no);
            corpus.schema = j["schema"].get<std::string>();
            if (corpus.schema != kCorpusSchema)
                throw parse_error(origin + ": unsupported corpus schema '" + corpus.schema +
                                  "' (expected '" + kCorpusSchema + "')", line_no);
            corpus.plan_fingerprint = j.value("plan", "");
            corpus.mode = j.value("mode", "");
            header_seen = true;
            continue;
        }

        ResponseRecord r;
        try {
            r.prompt_id = j.at("prompt_id").get<std::string>();
            r.identity = j.at("identity").get<std::string>();
            r.model = j.at("model").get<std::string>();
            r.text = j.at("text").get<std::string>();
            r.status = response_status_from_string(j.at("status").get<std::string>());
            r.attempts = j.at("attempts").get<int>();
            r.timestamp = j.value("timestamp", "");
            if (j.contains("decoding")) {
                const json& d = j["decoding"];
                r.decoding.temperature = d.value("temperature", r.decoding.temperature);
                r.decoding.top_p = d.value("top_p", r.decoding.top_p);
                r.decoding.max_tokens = d.value("max_tokens", r.decoding.max_tokens);
                r.decoding.max_retries = d.value("max_retries", r.decoding.max_retries);
            }
        } catch (const json::exception& e) {
            throw parse_error(origin + ": bad record field: " + e.what(), line_no);
        } catch (const parse_error& e) {
            throw parse_error(origin + ": " + e.what(), line_no);
        }

        if (!keys.emplace(r.prompt_id, r.identity, r.model).second)
            throw parse_error(origin + ": duplicate record for (" + r.prompt_id + ", " + r.identity +
                              ", " + r.model + ")", line_no);
        corpus.records.push_back(std::move(r));
    }
    if (!header_seen) throw parse_error(origin + ": empty corpus file (missing header line)");
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    atomic_write_file(path, corpus_to_jsonl(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) {
    return corpus_from_jsonl(read_file(path), path.filename().string());
}

}  // namespace counterfair
