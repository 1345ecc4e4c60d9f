#include "mbscore/scoring.hpp"

#include "mbscore/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mbscore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double floored_log(double mass, double floor) {
    if (floor > 0.0 && mass < floor) mass = floor;
    return mass > 0.0 ? std::log(mass) : kNegInf;
}

double window_mass(const std::vector<double>& probs, std::size_t outcome, int d) {
    const long n = static_cast<long>(probs.size());
    const long y = static_cast<long>(outcome);
    const long lo = std::max(0L, y - d);
    const long hi = std::min(n - 1, y + d);
    double s = 0.0;
    for (long t = lo; t <= hi; ++t) s += probs[static_cast<std::size_t>(t)];
    return s;
}

} // namespace

double log_score(const std::vector<double>& probs, std::size_t outcome) {
    // The support embeds into the integers with zero mass outside it, so an
    // outcome beyond the edge simply has probability zero.
    if (outcome >= probs.size()) return kNegInf;
    return probs[outcome] > 0.0 ? std::log(probs[outcome]) : kNegInf;
}

double log_score(const CategoricalForecast& f, std::size_t outcome) {
    return log_score(f.probs, outcome);
}

double multibin_log_score(const std::vector<double>& probs, std::size_t outcome, int d) {
    if (d < 0) {
        throw OutOfRange("window half-width must be nonnegative");
    }
    // Zero-padded view: an outcome beyond the edge still has a window, which
    // may clip into the support; further out it is all padding.
    if (outcome >= probs.size() + static_cast<std::size_t>(d) + 1) return kNegInf;
    const double s = window_mass(probs, outcome, d);
    return s > 0.0 ? std::log(s) : kNegInf;
}

double multibin_log_score(const CategoricalForecast& f, std::size_t outcome, int d) {
    return multibin_log_score(f.probs, outcome, d);
}

double score(const ScoreRule& rule, const CategoricalForecast& f, std::size_t outcome) {
    if (outcome >= f.size()) {
        throw IndexOutOfRange("outcome bin " + std::to_string(outcome) +
                              " outside support of size " + std::to_string(f.size()));
    }
    if (rule.kind == ScoreRule::Kind::multibin && rule.d < 0) {
        throw OutOfRange("multibin rule has no window half-width set");
    }
    const double mass = rule.kind == ScoreRule::Kind::log
                            ? f.probs[outcome]
                            : window_mass(f.probs, outcome, rule.d);
    return floored_log(mass, rule.floor);
}

std::vector<double> blur(const std::vector<double>& probs, int d) {
    if (d < 0) {
        throw OutOfRange("window half-width must be nonnegative");
    }
    const double w = 1.0 / (2.0 * d + 1.0);
    std::vector<double> out(probs.size());
    // Each window is summed directly, in the same order the scoring side
    // sums it: the two must agree bitwise so that all-zero windows stay
    // exactly zero and log(blurred) - log(window mass) is stable even for
    // windows holding a sliver of mass next to a heavy neighbour.
    for (std::size_t t = 0; t < probs.size(); ++t) {
        out[t] = window_mass(probs, t, d) * w;
    }
    return out;
}

BlurredForecast blur(const CategoricalForecast& f, int d) {
    return BlurredForecast{ f.bin_labels, blur(f.probs, d), d };
}

double expected_score(const ScoreRule& rule,
                      const CategoricalForecast& f,
                      const std::vector<double>& belief) {
    if (belief.size() != f.size()) {
        throw ShapeMismatch("belief has " + std::to_string(belief.size()) +
                            " bins, forecast has " + std::to_string(f.size()));
    }
    double total = 0.0;
    for (std::size_t t = 0; t < belief.size(); ++t) {
        if (belief[t] == 0.0) continue; // 0 * -inf treated as 0
        total += belief[t] * score(rule, f, t);
    }
    return total;
}

} // namespace mbscore
