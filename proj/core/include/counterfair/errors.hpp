#pragma once

#include <stdexcept>
#include <string>

namespace counterfair {

/// Base class for all library errors.
struct audit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed configuration: endpoint descriptors, plan structure, bad flag values.
struct config_error : audit_error {
    using audit_error::audit_error;
};

/// A file could not be read, written, or atomically replaced.
struct io_error : audit_error {
    using audit_error::audit_error;
};

/// A structured input file failed to parse. Carries the 1-based line number
/// when the failure is attributable to a single line (0 otherwise).
struct parse_error : audit_error {
    std::size_t line = 0;
    parse_error(const std::string& what, std::size_t line_no = 0)
        : audit_error(line_no ? what + " (line " + std::to_string(line_no) + ")" : what),
          line(line_no) {}
};

/// Base class for statistical errors raised by the stats engine.
struct stats_error : audit_error {
    using audit_error::audit_error;
};

/// Effect size is undefined (zero-variance differences).
struct undefined_effect_error : stats_error {
    using stats_error::stats_error;
};

/// Too few paired observations to compute the requested statistic.
struct insufficient_data_error : stats_error {
    using stats_error::stats_error;
};

/// Pairing produced no usable pairs at all.
struct empty_pairing_error : stats_error {
    using stats_error::stats_error;
};

/// A record's text has zero countable words, so per-100-word rates are undefined.
struct zero_word_error : audit_error {
    using audit_error::audit_error;
};

}  // namespace counterfair
