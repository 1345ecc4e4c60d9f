#pragma once

#include "mbscore/forecast.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mbscore {

/// One of the four bundled peak-week scenarios demonstrating hedging under
/// the multibin rule with d = 1 on a seven-week support.
struct WorkedExample {
    int number = 0;
    std::string description;
    CategoricalForecast belief;
    int d = 1;
    /// Known expected multibin scores under the belief, to three decimals:
    /// reporting the belief itself vs. reporting the optimal hedge.
    double expected_score_honest = 0.0;
    double expected_score_hedged = 0.0;
    /// Closed-form optimal hedge, when deconvolution is feasible.
    std::optional<std::vector<double>> exact_hedge;
};

const std::vector<WorkedExample>& worked_examples();

} // namespace mbscore
