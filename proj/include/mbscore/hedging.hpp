#pragma once

#include "mbscore/forecast.hpp"

#include <optional>
#include <vector>

namespace mbscore {

struct OptimizerConfig {
    int max_iterations = 10000;
    /// Stop when |J_new - J_old| < rel_tol * max(1, |J_new|).
    double rel_tol = 1e-12;
    /// Exact deconvolution: entries in [-negativity_tol, 0) are rounding noise
    /// and clamp to zero; anything below -negativity_tol means infeasible.
    double negativity_tol = 1e-9;
    bool track_objective = false;
};

struct HedgeResult {
    enum class Method { exact, iterative };

    CategoricalForecast g;
    Method method = Method::iterative;
    /// J(G) = sum_t f_t log(blur(G)_t). The expected multibin score of G
    /// under belief F is J(G) + log(2d+1).
    double objective = 0.0;
    /// Expected multibin score improvement of G over F under belief F.
    /// Nonnegative by construction.
    double expected_gain = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

/// Solves blur(g, d) = f exactly by forward substitution with the first d
/// entries pinned to zero. Returns nullopt when the solution has a
/// significantly negative entry or fails to reproduce f on re-blur, meaning
/// no probability vector blurs to f.
std::optional<std::vector<double>> exact_deconvolve(const std::vector<double>& f,
                                                    int d,
                                                    double negativity_tol = 1e-9);

/// Finds the forecast G maximizing the expected multibin score under belief
/// `f`, which must satisfy the regularity condition for `d`. Tries exact
/// deconvolution first (globally optimal when feasible, since then the
/// blurred G equals f); otherwise runs a multiplicative fixed-point ascent
/// on the concave objective J. Each update rescales
///     g_s <- g_s * sum_{t : |t-s| <= d} f_t / W_t,   W_t = window mass of g,
/// which preserves the simplex exactly and never decreases J.
HedgeResult optimize_hedged(const CategoricalForecast& f,
                            int d,
                            const OptimizerConfig& config = {});

/// sum_t p_t log(p_t / q_t), with 0 log(0/q) = 0 and p>0, q=0 giving +inf.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

/// Expected multibin score of g minus that of f, both under belief f.
double hedging_gain(const CategoricalForecast& f, const CategoricalForecast& g, int d);

} // namespace mbscore
