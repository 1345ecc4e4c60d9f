#include "mbscore/hedging.hpp"

#include "mbscore/errors.hpp"
#include "mbscore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mbscore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTruncateTol = 1e-12;
constexpr double kReblurTol = 1e-10;

void normalize_exact(std::vector<double>& p) {
    double sum = 0.0;
    for (double v : p) sum += v;
    for (double& v : p) v /= sum;
    double sum2 = 0.0;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum2 += p[i];
        if (p[i] > p[argmax]) argmax = i;
    }
    p[argmax] += 1.0 - sum2;
}

/// Window sums W_t = sum_{|i| <= d} g_{t+i}, zero-padded.
std::vector<double> window_sums(const std::vector<double>& g, int d) {
    const long n = static_cast<long>(g.size());
    std::vector<double> w(g.size());
    double run = 0.0;
    for (long t = 0; t < std::min(n, static_cast<long>(d)); ++t) run += g[t];
    for (long t = 0; t < n; ++t) {
        if (t + d < n) run += g[t + d];
        w[t] = run;
        if (t - d >= 0) run -= g[t - d];
    }
    return w;
}

/// J(g) = sum_{f_t > 0} f_t log(W_t / (2d+1)).
double objective_value(const std::vector<double>& f, const std::vector<double>& w, int d) {
    const double log_width = std::log(2.0 * d + 1.0);
    double j = 0.0;
    for (std::size_t t = 0; t < f.size(); ++t) {
        if (f[t] == 0.0) continue;
        if (w[t] <= 0.0) return kNegInf;
        j += f[t] * (std::log(w[t]) - log_width);
    }
    return j;
}

} // namespace

std::optional<std::vector<double>> exact_deconvolve(const std::vector<double>& f,
                                                    int d,
                                                    double negativity_tol) {
    if (d < 0) {
        throw OutOfRange("window half-width must be nonnegative");
    }
    const long n = static_cast<long>(f.size());
    if (n <= 2L * d) return std::nullopt;

    // Forward substitution on (2d+1) f_t = sum_{|i| <= d} g_{t+i}, taking
    // g_0..g_{d-1} = 0. Each equation introduces exactly one new unknown.
    std::vector<double> g(f.size(), 0.0);
    const double width = 2.0 * d + 1.0;
    double run = 0.0; // sum g_{t-d} .. g_{t+d-1}
    for (long t = 0; t + d < n; ++t) {
        const double v = width * f[t] - run;
        if (v < -negativity_tol) return std::nullopt;
        g[t + d] = std::max(v, 0.0);
        run += g[t + d];
        if (t - d >= 0) run -= g[t - d];
    }

    normalize_exact(g);

    // The last d equations were never imposed; re-blur catches both those
    // and any damage done by clamping. Clamps can shift a window sum by up
    // to negativity_tol, so the check tolerance must cover that.
    const double reblur_tol = std::max(kReblurTol, negativity_tol);
    const std::vector<double> check = blur(g, d);
    for (long t = 0; t < n; ++t) {
        if (std::abs(check[t] - f[t]) > reblur_tol) return std::nullopt;
    }
    return g;
}

HedgeResult optimize_hedged(const CategoricalForecast& f,
                            int d,
                            const OptimizerConfig& config) {
    if (!satisfies_regularity(f.probs, d)) {
        throw RegularityViolated("belief does not satisfy the regularity condition for d = " +
                                 std::to_string(d) + "; pad_support first");
    }
    const std::size_t n = f.size();
    const double j_f = objective_value(f.probs, window_sums(f.probs, d), d);

    HedgeResult res;
    res.g = f;

    if (auto exact = exact_deconvolve(f.probs, d, config.negativity_tol)) {
        res.g.probs = std::move(*exact);
        res.method = HedgeResult::Method::exact;
        // blur(g) = f, so J(g) = sum f_t log f_t, the global maximum.
        double j = 0.0;
        for (double p : f.probs) {
            if (p > 0.0) j += p * std::log(p);
        }
        res.objective = j;
        res.expected_gain = std::max(0.0, j - j_f);
        res.converged = true;
        return res;
    }

    res.method = HedgeResult::Method::iterative;

    // Uniform start on the interior bins keeps regularity exactly; an
    // optimum supported there always exists.
    std::vector<double> g(n, 0.0);
    const std::size_t interior = n - 2 * static_cast<std::size_t>(d);
    for (std::size_t s = d; s < n - d; ++s) g[s] = 1.0 / static_cast<double>(interior);
    normalize_exact(g);

    std::vector<double> w = window_sums(g, d);
    double j = objective_value(f.probs, w, d);
    if (config.track_objective) res.objective_trace.push_back(j);

    std::vector<double> ratio(n), mult;
    int iter = 0;
    bool converged = false;
    while (iter < config.max_iterations) {
        ++iter;
        for (std::size_t t = 0; t < n; ++t) {
            ratio[t] = f.probs[t] > 0.0 ? f.probs[t] / w[t] : 0.0;
        }
        mult = window_sums(ratio, d);
        for (std::size_t s = 0; s < n; ++s) g[s] *= mult[s];

        w = window_sums(g, d);
        const double j_new = objective_value(f.probs, w, d);
        if (config.track_objective) res.objective_trace.push_back(j_new);
        const double delta = std::abs(j_new - j);
        j = j_new;
        if (delta < config.rel_tol * std::max(1.0, std::abs(j_new))) {
            converged = true;
            break;
        }
    }

    for (double& v : g) {
        if (v < kTruncateTol) v = 0.0;
    }
    normalize_exact(g);
    const double j_final = objective_value(f.probs, window_sums(g, d), d);

    res.iterations = iter;
    res.converged = converged;
    // Below this the "improvement" is rounding noise; return f unchanged so
    // already-optimal beliefs (point masses, exact fixed points) round-trip.
    constexpr double kMinGain = 1e-13;
    if (j_final <= j_f + kMinGain) {
        res.g = f;
        res.objective = j_f;
        res.expected_gain = 0.0;
    } else {
        res.g.probs = std::move(g);
        res.objective = j_final;
        res.expected_gain = j_final - j_f;
    }
    return res;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) {
        throw ShapeMismatch("KL divergence needs equal supports, got " +
                            std::to_string(p.size()) + " and " + std::to_string(q.size()));
    }
    double kl = 0.0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        if (p[t] == 0.0) continue;
        if (q[t] <= 0.0) return std::numeric_limits<double>::infinity();
        kl += p[t] * std::log(p[t] / q[t]);
    }
    return kl;
}

double hedging_gain(const CategoricalForecast& f, const CategoricalForecast& g, int d) {
    if (f.size() != g.size()) {
        throw ShapeMismatch("forecasts have different supports");
    }
    const ScoreRule rule{ ScoreRule::Kind::multibin, d, 0.0 };
    return expected_score(rule, g, f.probs) - expected_score(rule, f, f.probs);
}

} // namespace mbscore
