#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace counterfair {

/// Word -> valence table loaded from a data file. The shipped file is a
/// compact curated subset; any file in the same two-column format (word,
/// valence) can be dropped in via the --valence-lexicon flag.
struct ValenceLexicon {
    std::string version;
    std::unordered_map<std::string, double> valence;
};

ValenceLexicon load_valence_lexicon(const std::filesystem::path& path);

/// Compound sentiment in [-1, 1] under a documented valence-sum model:
///
///   - token valences are summed over raw-text tokens,
///   - a negator within the 3 preceding tokens multiplies the valence by
///     -0.74 (one factor per negator found),
///   - each intensifier within the 3 preceding tokens shifts |valence| by
///     +-0.293 (floored at zero),
///   - the sum s is normalized to s / sqrt(s^2 + 15) and clipped to [-1, 1].
///
/// Capitalization and punctuation emphasis carry no weight in this model;
/// see README for the divergences from the full reference scorer.
double sentiment_compound(std::string_view text, const ValenceLexicon& lexicon);

/// Built-in negator list (documented subset).
const std::vector<std::string>& negator_words();

/// Built-in intensifier table: word -> signed magnitude shift.
const std::vector<std::pair<std::string, double>>& booster_words();

inline constexpr double kNegationFactor = -0.74;
inline constexpr double kBoosterIncrement = 0.293;
inline constexpr double kNormalizationAlpha = 15.0;

}  // namespace counterfair
