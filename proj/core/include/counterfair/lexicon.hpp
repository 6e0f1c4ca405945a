#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace counterfair {

/// A marker lexicon: word or multi-word entries counted per response.
///
/// Matching is greedy left-to-right over normalized tokens: at each position
/// the longest entry starting there wins and its tokens are consumed, so
/// matches never overlap. {"a b c", "a b"} over [a, b, c] counts once.
class Lexicon {
public:
    Lexicon() = default;
    Lexicon(std::vector<std::string> entries, std::string version);

    /// Number of non-overlapping matches in the token sequence.
    std::size_t count_matches(const std::vector<std::string>& tokens) const;

    const std::vector<std::string>& entries() const { return entries_; }
    const std::string& version() const { return version_; }
    std::size_t size() const { return entries_.size(); }

    /// Entries that are single tokens (used by the synthetic generator).
    std::vector<std::string> single_word_entries() const;

private:
    std::vector<std::string> entries_;
    std::string version_;
    std::vector<std::vector<std::string>> phrases_;
    // first token -> indices into phrases_, longest phrase first
    std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
};

/// Load a lexicon file: '#' comments and blank lines ignored; the first
/// content line must be "version <tag>"; every later content line is one
/// entry. Raises parse_error with a line number on violations.
Lexicon load_lexicon(const std::filesystem::path& path);

/// Per-100-words rate: exactly 100 * count / words.
/// Raises zero_word_error when words == 0 (the rate is undefined).
double rate_per_100(std::size_t count, std::size_t words);

}  // namespace counterfair
