#include "mbscore/examples.hpp"

#include <vector>

namespace mbscore {

namespace {

CategoricalForecast weeks_1_to_7(std::vector<double> probs) {
    return validate_forecast(std::move(probs), 1e-9,
                             { "1", "2", "3", "4", "5", "6", "7" });
}

std::vector<WorkedExample> build_examples() {
    std::vector<WorkedExample> ex(4);

    ex[0].number = 1;
    ex[0].description = "peak equally likely in weeks 3-5; optimal hedge is certainty on week 4";
    ex[0].belief = weeks_1_to_7({ 0, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0 });
    ex[0].expected_score_honest = -0.270;
    ex[0].expected_score_hedged = 0.000;
    ex[0].exact_hedge = std::vector<double>{ 0, 0, 0, 1, 0, 0, 0 };

    ex[1].number = 2;
    ex[1].description = "peak around week 4 with light tails; hedge concentrates on weeks 3-5";
    ex[1].belief = weeks_1_to_7({ 0, 1.0 / 12, 0.25, 1.0 / 3, 0.25, 1.0 / 12, 0 });
    ex[1].expected_score_honest = -0.447;
    ex[1].expected_score_hedged = -0.375;
    ex[1].exact_hedge = std::vector<double>{ 0, 0, 0.25, 0.5, 0.25, 0, 0 };

    ex[2].number = 3;
    ex[2].description = "heavier tails; the optimal hedge is bimodal on weeks 3 and 5";
    ex[2].belief = weeks_1_to_7({ 0, 1.0 / 6, 1.0 / 6, 1.0 / 3, 1.0 / 6, 1.0 / 6, 0 });
    ex[2].expected_score_honest = -0.637;
    ex[2].expected_score_hedged = -0.462;
    ex[2].exact_hedge = std::vector<double>{ 0, 0, 0.5, 0, 0.5, 0, 0 };

    ex[3].number = 4;
    ex[3].description = "mode at week 2 with a long right tail; no exact hedge exists and the "
                        "optimum shifts the mode to week 3";
    ex[3].belief = weeks_1_to_7({ 0, 0.6, 0.2, 0.125, 0.05, 0.025, 0 });
    ex[3].expected_score_honest = -0.417;
    ex[3].expected_score_hedged = -0.256;

    return ex;
}

} // namespace

const std::vector<WorkedExample>& worked_examples() {
    static const std::vector<WorkedExample> ex = build_examples();
    return ex;
}

} // namespace mbscore
