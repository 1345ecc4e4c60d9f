#include <catch2/catch_amalgamated.hpp>

#include <mbscore/errors.hpp>
#include <mbscore/scoring.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "testutil.hpp"

using namespace mbscore;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("log score is the log of the outcome's mass") {
    const std::vector<double> p{ 0.1, 0.6, 0.3 };
    CHECK(log_score(p, 1) == Approx(std::log(0.6)));
    CHECK(log_score(p, 0) == Approx(std::log(0.1)));
    CHECK(log_score({ 1.0, 0.0 }, 1) == -kInf);
    CHECK(log_score(p, 5) == -kInf);
}

TEST_CASE("multibin window is zero-padded at the edges") {
    const std::vector<double> p{ 0.1, 0.6, 0.3 };
    CHECK(multibin_log_score(p, 0, 1) == Approx(std::log(0.7)));
    CHECK(multibin_log_score(p, 1, 1) == Approx(std::log(1.0)));
    CHECK(multibin_log_score(p, 2, 1) == Approx(std::log(0.9)));
    CHECK(multibin_log_score(p, 0, 0) == Approx(std::log(0.1)));
    // d larger than the support captures everything.
    CHECK(multibin_log_score(p, 1, 10) == Approx(0.0));
    CHECK(multibin_log_score({ 0.0, 1.0, 0.0 }, 0, 0) == -kInf);
}

TEST_CASE("d = 0 multibin reduces to the log score") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testutil::dirichlet(rng, 9);
        for (std::size_t y = 0; y < p.size(); ++y) {
            CHECK(multibin_log_score(p, y, 0) == log_score(p, y));
        }
    }
}

TEST_CASE("blur is the moving average and matches a naive evaluation") {
    const std::vector<double> p{ 0.0, 0.5, 0.5, 0.0 };
    const auto b = blur(p, 1);
    REQUIRE(b.size() == 4u);
    CHECK(b[0] == Approx(0.5 / 3));
    CHECK(b[1] == Approx(1.0 / 3));
    CHECK(b[2] == Approx(1.0 / 3));
    CHECK(b[3] == Approx(0.5 / 3));

    std::mt19937 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> tdist(1, 25);
        std::uniform_int_distribution<int> ddist(0, 6);
        const int t = tdist(rng);
        const int d = ddist(rng);
        const auto probs = testutil::dirichlet(rng, t);
        const auto fast = blur(probs, d);
        for (int i = 0; i < t; ++i) {
            double mass = 0.0;
            for (int j = std::max(0, i - d); j <= std::min(t - 1, i + d); ++j) {
                mass += probs[static_cast<std::size_t>(j)];
            }
            CHECK(fast[static_cast<std::size_t>(i)] ==
                  Approx(mass / (2.0 * d + 1)).margin(1e-15));
        }
    }
}

TEST_CASE("blurring a regular forecast conserves probability") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> ddist(1, 4);
        const int d = ddist(rng);
        std::uniform_int_distribution<int> tdist(2 * d + 1, 30);
        const int t = tdist(rng);
        const auto f = testutil::random_padded_forecast(rng, t, d);
        const auto b = blur(f.probs, d);
        double sum = 0.0;
        for (double x : b) {
            sum += x;
        }
        CHECK(sum == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("multibin score equals log score of the blurred forecast plus log(2d+1)") {
    std::mt19937 rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> ddist(0, 5);
        const int d = ddist(rng);
        std::uniform_int_distribution<int> tdist(2 * d + 1, 40);
        const int t = tdist(rng);
        const auto f = testutil::random_padded_forecast(rng, t, d);
        const auto blurred = blur(f.probs, d);
        for (std::size_t y = 0; y < f.size(); ++y) {
            const double lhs = multibin_log_score(f.probs, y, d);
            const double rhs = log_score(blurred, y) + std::log(2.0 * d + 1);
            if (std::isfinite(lhs) || std::isfinite(rhs)) {
                REQUIRE(lhs == Approx(rhs).margin(1e-12));
            } else {
                REQUIRE(lhs == rhs); // both -inf
            }
        }
    }
}

TEST_CASE("score dispatches on the rule") {
    const auto f = validate_forecast({ 0.0, 0.5, 0.5, 0.0 });
    CHECK(score({ ScoreRule::Kind::log, -1, 0.0 }, f, 1) == Approx(std::log(0.5)));
    CHECK(score({ ScoreRule::Kind::multibin, 1, 0.0 }, f, 1) == Approx(0.0));
    CHECK_THROWS_AS(score({ ScoreRule::Kind::multibin, -1, 0.0 }, f, 1), OutOfRange);
}

TEST_CASE("a positive floor bounds scores away from -inf") {
    const auto f = validate_forecast({ 1.0, 0.0 });
    const ScoreRule floored{ ScoreRule::Kind::log, -1, 1e-6 };
    CHECK(score(floored, f, 1) == Approx(std::log(1e-6)));
    CHECK(score(floored, f, 0) == Approx(0.0).margin(1e-12));

    const ScoreRule mb{ ScoreRule::Kind::multibin, 0, 0.01 };
    CHECK(score(mb, f, 1) == Approx(std::log(0.01)));
}

TEST_CASE("expected_score treats zero-belief outcomes as contributing zero") {
    const auto f = validate_forecast({ 1.0, 0.0 });
    const ScoreRule rule{ ScoreRule::Kind::log, -1, 0.0 };
    // f itself scores -inf on bin 2, but the belief puts no mass there.
    CHECK(expected_score(rule, f, { 1.0, 0.0 }) == Approx(0.0).margin(1e-12));
    CHECK(expected_score(rule, f, { 0.5, 0.5 }) == -kInf);
    CHECK_THROWS_AS(expected_score(rule, f, { 1.0 }), ShapeMismatch);
}

TEST_CASE("expected multibin score is the objective shifted by log(2d+1)") {
    std::mt19937 rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + trial % 3;
        const auto f = testutil::random_padded_forecast(rng, 2 * d + 5 + trial % 7, d);
        const ScoreRule rule{ ScoreRule::Kind::multibin, d, 0.0 };
        const double es = expected_score(rule, f, f.probs);
        const double j = testutil::naive_objective(f.probs, f.probs, d);
        CHECK(es == Approx(j + std::log(2.0 * d + 1)).margin(1e-10));
    }
}
