#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mbscore/epiweek.hpp"

namespace mbscore {

/// Discrete probabilistic forecast over an ordered list of category bins.
///
/// Values are immutable after construction; all operations on them are pure
/// functions returning new values.
struct CategoricalForecast {
    std::vector<std::string> bin_labels;
    std::vector<double> probs;
    /// Number of zero bins prepended by pad_support (0 for raw forecasts).
    int offset = 0;

    std::size_t size() const { return probs.size(); }
};

/// Moving-average transform of a forecast; see blur() in scoring.hpp.
struct BlurredForecast {
    std::vector<std::string> bin_labels;
    std::vector<double> probs;
    /// Window half-width used to produce it.
    int d = 0;

    std::size_t size() const { return probs.size(); }
};

/// Checks a raw probability vector and returns a normalized forecast.
///
/// Entries in [-1e-12, 0) are clamped to zero (floating-point noise from
/// upstream tools). If the sum is within tol of 1 the vector is renormalized
/// to sum to exactly 1; otherwise NotNormalized is thrown. Throws
/// NegativeProbability for entries below -1e-12 and EmptySupport for an
/// empty vector. Labels default to "1".."T" when omitted.
CategoricalForecast validate_forecast(std::vector<double> raw_probs,
                                      double tol = 1e-6,
                                      std::vector<std::string> bin_labels = {});

/// True when the first d and last d probabilities are all exactly zero
/// and more than 2d bins exist.
bool satisfies_regularity(const std::vector<double>& probs, int d);

/// Prepends/appends the minimal number of zero bins so that the first d and
/// last d probabilities are zero. Existing probabilities are unchanged;
/// offset accumulates the number of prepended bins. Added bins get labels
/// extended from the existing grid when the labels are recognizably numeric,
/// week-valued, or interval-valued, and synthetic labels otherwise.
CategoricalForecast pad_support(const CategoricalForecast& f, int d);

/// Inverse of pad_support for a vector padded from original_size bins:
/// drops the offset prepended bins and anything appended past the original
/// length. Dropped entries must be zero.
CategoricalForecast unpad_support(const CategoricalForecast& f, std::size_t original_size);

/// The seven FluSight forecast targets.
enum class TargetId {
    wili_1wk,
    wili_2wk,
    wili_3wk,
    wili_4wk,
    onset_week,
    peak_week,
    peak_intensity,
};

/// One category bin of a target grid.
struct Bin {
    enum class Kind { interval, week, none };
    Kind kind = Kind::interval;
    // interval bins: [lo, hi), terminal catch-all closes at hi
    double lo = 0.0;
    double hi = 0.0;
    bool hi_inclusive = false;
    // week bins
    EpiWeek week{};

    std::string label() const;
};

/// Observed outcome: a wILI percentage, an epidemic week, or "none"
/// (no onset this season).
struct Observation {
    enum class Kind { value, week, none };
    Kind kind = Kind::value;
    double value = 0.0;
    EpiWeek week{};

    static Observation of_value(double v) { return { Kind::value, v, {} }; }
    static Observation of_week(EpiWeek w) { return { Kind::week, 0.0, w }; }
    static Observation of_none() { return { Kind::none, 0.0, {} }; }

    std::string to_text() const;
};

/// Bin structure and multibin window half-width for one FluSight target.
///
/// Bins are ordered; the optional "none" bin (season onset only) is always
/// last and is isolated: it belongs to no other bin's window and no ordered
/// bin belongs to its window.
struct TargetSpec {
    TargetId target_id = TargetId::wili_1wk;
    int d = 0;
    std::vector<Bin> bins;
    Season season{};
    std::optional<std::size_t> none_bin;

    /// Number of bins participating in window adjacency (excludes "none").
    std::size_t ordered_size() const {
        return bins.size() - (none_bin ? 1u : 0u);
    }
    std::vector<std::string> bin_labels() const;
};

/// Index of the unique bin containing the observation (intervals are
/// left-closed right-open; the terminal catch-all closes at its upper
/// bound). Throws OutOfRange when no bin contains it.
std::size_t outcome_to_bin(const Observation& observed, const TargetSpec& spec);

} // namespace mbscore
