#include "counterfair/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "counterfair/errors.hpp"
#include "counterfair/text.hpp"

namespace counterfair {

Lexicon::Lexicon(std::vector<std::string> entries, std::string version)
    : entries_(std::move(entries)), version_(std::move(version)) {
    phrases_.reserve(entries_.size());
    for (const auto& entry : entries_) {
        auto tokens = normalize_and_tokenize(entry);
        if (tokens.empty())
            throw parse_error("lexicon entry '" + entry + "' normalizes to nothing");
        phrases_.push_back(std::move(tokens));
    }
    for (std::size_t i = 0; i < phrases_.size(); ++i)
        by_first_[phrases_[i][0]].push_back(i);
    for (auto& [first, indices] : by_first_) {
        std::sort(indices.begin(), indices.end(), [this](std::size_t a, std::size_t b) {
            if (phrases_[a].size() != phrases_[b].size()) return phrases_[a].size() > phrases_[b].size();
            return a < b;
        });
    }
}

std::size_t Lexicon::count_matches(const std::vector<std::string>& tokens) const {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t advance = 1;
        auto it = by_first_.find(tokens[i]);
        if (it != by_first_.end()) {
            for (std::size_t idx : it->second) {
                const auto& phrase = phrases_[idx];
                if (i + phrase.size() > tokens.size()) continue;
                bool matched = true;
                for (std::size_t k = 1; k < phrase.size(); ++k) {
                    if (tokens[i + k] != phrase[k]) {
                        matched = false;
                        break;
                    }
                }
                if (matched) {
                    ++count;
                    advance = phrase.size();
                    break;  // indices are longest-first, so this is the longest match
                }
            }
        }
        i += advance;
    }
    return count;
}

std::vector<std::string> Lexicon::single_word_entries() const {
    std::vector<std::string> singles;
    for (std::size_t i = 0; i < phrases_.size(); ++i)
        if (phrases_[i].size() == 1) singles.push_back(phrases_[i][0]);
    return singles;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open lexicon file " + path.string());

    std::string version;
    std::vector<std::string> entries;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool version_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t");
        std::string content = line.substr(start, end - start + 1);
        if (content[0] == '#') continue;
        if (!version_seen) {
            if (content.rfind("version ", 0) != 0)
                throw parse_error("lexicon file " + path.string() +
                                  " must begin with a 'version <tag>' line", line_no);
            version = content.substr(8);
            version_seen = true;
            continue;
        }
        if (!seen.insert(content).second)
            throw parse_error("duplicate lexicon entry '" + content + "' in " + path.string(), line_no);
        entries.push_back(content);
    }
    if (!version_seen)
        throw parse_error("lexicon file " + path.string() + " has no version line");
    return Lexicon(std::move(entries), std::move(version));
}

double rate_per_100(std::size_t count, std::size_t words) {
    if (words == 0) throw zero_word_error("rate undefined: zero countable words");
    return 100.0 * static_cast<double>(count) / static_cast<double>(words);
}

}  // namespace counterfair
