#pragma once

#include "mbscore/forecast.hpp"

#include <cstddef>
#include <vector>

namespace mbscore {

/// Scoring rule selector. `d` is the window half-width and only meaningful
/// for the multibin rule; `floor` (if positive) replaces the probability mass
/// assigned to the outcome, or the window total, by max(mass, floor) before
/// taking the log, mirroring a common evaluation convention.
struct ScoreRule {
    enum class Kind { log, multibin };
    Kind kind = Kind::log;
    /// Window half-width. Negative means "use the target's default" where a
    /// TargetSpec is in play (season evaluation); direct score() calls on the
    /// multibin rule need an explicit d >= 0.
    int d = -1;
    double floor = 0.0;
};

/// log p_y, with log 0 = -inf. Out-of-support outcomes also score -inf
/// for the overload taking a raw index against a sized support.
double log_score(const std::vector<double>& probs, std::size_t outcome);
double log_score(const CategoricalForecast& f, std::size_t outcome);

/// log sum_{|i| <= d} p_{y+i}, indices outside the support contributing zero.
double multibin_log_score(const std::vector<double>& probs, std::size_t outcome, int d);
double multibin_log_score(const CategoricalForecast& f, std::size_t outcome, int d);

/// Applies `rule` to forecast `f` and outcome bin `y`.
double score(const ScoreRule& rule, const CategoricalForecast& f, std::size_t outcome);

/// Moving-average smoothing: p~_t = (1/(2d+1)) sum_{|i| <= d} p_{t+i}.
/// The blurred vector sums to 1 exactly when `probs` satisfies the
/// regularity condition for d; otherwise mass leaks off the ends.
BlurredForecast blur(const CategoricalForecast& f, int d);
std::vector<double> blur(const std::vector<double>& probs, int d);

/// sum_t belief_t * score(rule, f, t), with the convention 0 * -inf = 0 so
/// outcomes the belief rules out cannot poison the expectation.
double expected_score(const ScoreRule& rule,
                      const CategoricalForecast& f,
                      const std::vector<double>& belief);

} // namespace mbscore
