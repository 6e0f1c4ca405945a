#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace counterfair {

/// Normalization and tokenization for rate metrics.
///
/// Rules, applied in order:
///  1. lowercase (ASCII),
///  2. every punctuation character becomes a space, except an apostrophe
///     with a letter on both sides ("can't" survives, a quoting apostrophe
///     does not),
///  3. split on whitespace runs.
///
/// "You can't; it depends!" tokenizes to [you, can't, it, depends].
std::vector<std::string> normalize_and_tokenize(std::string_view text);

/// Word count under the same tokenization: w(x) = token count.
std::size_t word_count(std::string_view text);

/// Raw-text tokens for sentiment scoring: whitespace split, leading and
/// trailing punctuation trimmed (inner apostrophes kept), lowercased.
/// No punctuation-to-space rewriting, so emphasis characters are simply
/// trimmed rather than splitting words.
std::vector<std::string> raw_tokens(std::string_view text);

/// True when the text contains no non-whitespace character.
bool is_blank(std::string_view text);

}  // namespace counterfair
