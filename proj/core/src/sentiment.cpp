#include "counterfair/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "counterfair/errors.hpp"
#include "counterfair/text.hpp"

namespace counterfair {

const std::vector<std::string>& negator_words() {
    static const std::vector<std::string> words = {
        "not",    "no",      "never",   "none",    "neither", "nor",     "cannot",
        "can't",  "won't",   "wouldn't", "shouldn't", "couldn't", "doesn't", "don't",
        "didn't", "isn't",   "aren't",  "wasn't",  "weren't", "hasn't",  "haven't",
        "hadn't", "without", "rarely",  "seldom"};
    return words;
}

const std::vector<std::pair<std::string, double>>& booster_words() {
    static const std::vector<std::pair<std::string, double>> words = {
        {"very", kBoosterIncrement},         {"really", kBoosterIncrement},
        {"extremely", kBoosterIncrement},    {"absolutely", kBoosterIncrement},
        {"completely", kBoosterIncrement},   {"highly", kBoosterIncrement},
        {"incredibly", kBoosterIncrement},   {"remarkably", kBoosterIncrement},
        {"exceptionally", kBoosterIncrement},{"particularly", kBoosterIncrement},
        {"quite", kBoosterIncrement},        {"totally", kBoosterIncrement},
        {"utterly", kBoosterIncrement},      {"deeply", kBoosterIncrement},
        {"enormously", kBoosterIncrement},
        {"slightly", -kBoosterIncrement},    {"somewhat", -kBoosterIncrement},
        {"barely", -kBoosterIncrement},      {"hardly", -kBoosterIncrement},
        {"marginally", -kBoosterIncrement},  {"scarcely", -kBoosterIncrement},
        {"partly", -kBoosterIncrement},      {"kinda", -kBoosterIncrement},
        {"sorta", -kBoosterIncrement},       {"occasionally", -kBoosterIncrement}};
    return words;
}

namespace {

const std::unordered_set<std::string>& negator_set() {
    static const std::unordered_set<std::string> s(negator_words().begin(), negator_words().end());
    return s;
}

const std::unordered_map<std::string, double>& booster_map() {
    static const std::unordered_map<std::string, double> m(booster_words().begin(),
                                                           booster_words().end());
    return m;
}

}  // namespace

double sentiment_compound(std::string_view text, const ValenceLexicon& lexicon) {
    const auto tokens = raw_tokens(text);
    const auto& negators = negator_set();
    const auto& boosters = booster_map();

    double sum = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (boosters.count(tokens[i])) continue;  // intensifiers carry no valence of their own
        auto it = lexicon.valence.find(tokens[i]);
        if (it == lexicon.valence.end()) continue;
        double v = it->second;
        if (v == 0.0) continue;

        double boost = 0.0;
        int negations = 0;
        const std::size_t window = i < 3 ? i : 3;
        for (std::size_t back = 1; back <= window; ++back) {
            const std::string& prev = tokens[i - back];
            auto b = boosters.find(prev);
            if (b != boosters.end()) boost += b->second;
            if (negators.count(prev)) ++negations;
        }
        double magnitude = std::max(0.0, std::abs(v) + boost);
        v = (v < 0 ? -magnitude : magnitude);
        for (int k = 0; k < negations; ++k) v *= kNegationFactor;
        sum += v;
    }

    if (sum == 0.0) return 0.0;
    double compound = sum / std::sqrt(sum * sum + kNormalizationAlpha);
    return std::clamp(compound, -1.0, 1.0);
}

ValenceLexicon load_valence_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open valence lexicon " + path.string());

    ValenceLexicon lex;
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
                throw parse_error("valence lexicon " + path.string() +
                                  " must begin with a 'version <tag>' line", line_no);
            lex.version = content.substr(8);
            version_seen = true;
            continue;
        }
        std::size_t sep = content.find_last_of(" \t");
        if (sep == std::string::npos)
            throw parse_error("expected '<word> <valence>' in " + path.string(), line_no);
        std::string word = content.substr(0, content.find_first_of(" \t"));
        std::string number = content.substr(sep + 1);
        try {
            double v = std::stod(number);
            if (!lex.valence.emplace(word, v).second)
                throw parse_error("duplicate valence entry '" + word + "' in " + path.string(), line_no);
        } catch (const std::invalid_argument&) {
            throw parse_error("bad valence value '" + number + "' in " + path.string(), line_no);
        } catch (const std::out_of_range&) {
            throw parse_error("valence value out of range in " + path.string(), line_no);
        }
    }
    if (!version_seen)
        throw parse_error("valence lexicon " + path.string() + " has no version line");
    return lex;
}

}  // namespace counterfair
