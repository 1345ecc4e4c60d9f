#include <catch2/catch_amalgamated.hpp>

#include <mbscore/errors.hpp>
#include <mbscore/flusight.hpp>
#include <mbscore/forecast.hpp>

#include <random>
#include <vector>

#include "testutil.hpp"

using namespace mbscore;
using Catch::Approx;

TEST_CASE("validate_forecast normalizes and labels") {
    const auto f = validate_forecast({ 0.2, 0.3, 0.5 });
    REQUIRE(f.size() == 3u);
    CHECK(f.probs[0] == Approx(0.2));
    CHECK(f.bin_labels == std::vector<std::string>{ "1", "2", "3" });
    CHECK(f.offset == 0);

    // Small deviations from 1 are renormalized to an exact simplex point.
    const auto g = validate_forecast({ 0.5, 0.5000001 }, 1e-6);
    double sum = 0.0;
    for (double p : g.probs) {
        sum += p;
    }
    CHECK(sum == 1.0);

    // The looser submission-layer tolerance admits sums like 1.002.
    const auto h = validate_forecast({ 0.5, 0.502 }, 5e-3);
    sum = 0.0;
    for (double p : h.probs) {
        sum += p;
    }
    CHECK(sum == 1.0);
}

TEST_CASE("validate_forecast rejects bad input") {
    CHECK_THROWS_AS(validate_forecast({}), EmptySupport);
    CHECK_THROWS_AS(validate_forecast({ 0.5, 0.6 }), NotNormalized);
    CHECK_THROWS_AS(validate_forecast({ 1.2, -0.2 }), NegativeProbability);
    CHECK_THROWS_AS(validate_forecast({ 0.5, 0.5 }, 1e-6, { "a" }), SupportMismatch);
    CHECK_THROWS_AS(validate_forecast({ 0.5, 0.5 }, 1e-6, { "a", "a" }), SupportMismatch);

    // -1e-13 is floating-point noise, clamped to zero rather than rejected.
    const auto f = validate_forecast({ 1.0, -1e-13 });
    CHECK(f.probs[1] == 0.0);
}

TEST_CASE("regularity requires d zero bins at each end") {
    CHECK(satisfies_regularity({ 0.0, 0.5, 0.5, 0.0 }, 1));
    CHECK_FALSE(satisfies_regularity({ 0.5, 0.5, 0.0, 0.0 }, 1));
    CHECK(satisfies_regularity({ 0.0, 1.0, 0.0 }, 1)); // T = 2d + 1 is the minimum
    CHECK_FALSE(satisfies_regularity({ 0.0, 0.0 }, 1)); // needs T > 2d
    CHECK(satisfies_regularity({ 0.0, 0.0, 1.0, 0.0, 0.0 }, 2));
    CHECK(satisfies_regularity({ 0.3, 0.7 }, 0));
    CHECK_FALSE(satisfies_regularity({ 0.3, 0.7 }, -1));
}

TEST_CASE("pad_support adds only the missing zero margin") {
    const auto f = validate_forecast({ 1.0 / 3, 1.0 / 3, 1.0 / 3 },
                                     1e-6, { "3", "4", "5" });
    const auto padded = pad_support(f, 1);
    REQUIRE(padded.size() == 5u);
    CHECK(padded.offset == 1);
    CHECK(padded.probs[0] == 0.0);
    CHECK(padded.probs[4] == 0.0);
    CHECK(padded.probs[2] == Approx(1.0 / 3));
    CHECK(padded.bin_labels ==
          std::vector<std::string>{ "2", "3", "4", "5", "6" });

    // Already-regular inputs come back unchanged.
    const auto again = pad_support(padded, 1);
    CHECK(again.size() == 5u);
    CHECK(again.offset == 1);

    // Partial margins are topped up, not duplicated.
    const auto half = validate_forecast({ 0.0, 0.5, 0.5 });
    const auto p2 = pad_support(half, 2);
    REQUIRE(p2.size() == 6u);
    CHECK(p2.offset == 1);
    CHECK(satisfies_regularity(p2.probs, 2));
}

TEST_CASE("pad_support extends week and interval labels") {
    const auto weeks = validate_forecast({ 0.5, 0.5 }, 1e-6,
                                         { "2016-EW52", "2017-EW01" });
    const auto padded = pad_support(weeks, 1);
    CHECK(padded.bin_labels ==
          std::vector<std::string>{ "2016-EW51", "2016-EW52", "2017-EW01",
                                    "2017-EW02" });

    const auto ivals = validate_forecast({ 0.5, 0.5 }, 1e-6,
                                         { "[0.4,0.5)", "[0.5,0.6)" });
    const auto ipad = pad_support(ivals, 1);
    CHECK(ipad.bin_labels ==
          std::vector<std::string>{ "[0.3,0.4)", "[0.4,0.5)", "[0.5,0.6)",
                                    "[0.6,0.7)" });

    const auto odd = validate_forecast({ 0.5, 0.5 }, 1e-6, { "cat", "dog" });
    const auto opad = pad_support(odd, 1);
    CHECK(opad.bin_labels ==
          std::vector<std::string>{ "pad-1", "cat", "dog", "pad+1" });
}

TEST_CASE("unpad_support inverts pad_support") {
    std::mt19937 rng(7001);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> tdist(1, 12);
        std::uniform_int_distribution<int> ddist(0, 3);
        const int t = tdist(rng);
        const int d = ddist(rng);
        const auto f = testutil::dirichlet(rng, t);
        const auto fc = validate_forecast(f);
        const auto padded = pad_support(fc, d);
        CHECK(satisfies_regularity(padded.probs, d));
        const auto back = unpad_support(padded, fc.size());
        REQUIRE(back.size() == fc.size());
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back.probs[i] == fc.probs[i]);
            CHECK(back.bin_labels[i] == fc.bin_labels[i]);
        }
        CHECK(back.offset == 0);
    }
}

TEST_CASE("unpad_support refuses to drop probability mass") {
    auto padded = pad_support(validate_forecast({ 0.5, 0.5 }), 1);
    padded.probs = { 0.1, 0.45, 0.45, 0.0 };
    CHECK_THROWS_AS(unpad_support(padded, 2), RegularityViolated);
}

TEST_CASE("interval outcomes map to left-closed right-open bins") {
    const TargetSpec spec = target_spec(TargetId::wili_1wk, Season{ 2016, 40, 20 });
    CHECK(spec.d == 5);
    CHECK_FALSE(spec.none_bin.has_value());
    REQUIRE(spec.bins.size() == 131u);
    CHECK(spec.ordered_size() == 131u);

    CHECK(outcome_to_bin(Observation::of_value(0.0), spec) == 0u);
    CHECK(outcome_to_bin(Observation::of_value(3.14), spec) == 31u);
    CHECK(outcome_to_bin(Observation::of_value(3.1), spec) == 31u);
    // Bin edges belong to the bin on their right.
    CHECK(outcome_to_bin(Observation::of_value(3.2), spec) == 32u);
    // The terminal catch-all [13, 100] includes its upper bound.
    CHECK(outcome_to_bin(Observation::of_value(13.0), spec) == 130u);
    CHECK(outcome_to_bin(Observation::of_value(100.0), spec) == 130u);
    CHECK_THROWS_AS(outcome_to_bin(Observation::of_value(-0.5), spec), OutOfRange);
    CHECK_THROWS_AS(outcome_to_bin(Observation::of_value(100.5), spec), OutOfRange);

    CHECK(spec.bins[31].label() == "[3.1,3.2)");
    CHECK(spec.bins[130].label() == "[13,100]");
}

TEST_CASE("week outcomes and the onset none bin") {
    const Season season{ 2016, 40, 20 };
    const TargetSpec onset = target_spec(TargetId::onset_week, season);
    CHECK(onset.d == 1);
    REQUIRE(onset.none_bin.has_value());
    CHECK(*onset.none_bin == 33u);
    CHECK(onset.bins.size() == 34u);
    CHECK(onset.ordered_size() == 33u);

    CHECK(outcome_to_bin(Observation::of_week({ 2016, 40 }), onset) == 0u);
    CHECK(outcome_to_bin(Observation::of_week({ 2017, 6 }), onset) == 18u);
    CHECK(outcome_to_bin(Observation::of_none(), onset) == 33u);
    CHECK_THROWS_AS(outcome_to_bin(Observation::of_week({ 2017, 30 }), onset),
                    OutOfRange);

    const TargetSpec peak = target_spec(TargetId::peak_week, season);
    CHECK(peak.d == 1);
    CHECK_FALSE(peak.none_bin.has_value());
    CHECK(peak.bins.size() == 33u);
    CHECK_THROWS_AS(outcome_to_bin(Observation::of_none(), peak), OutOfRange);

    CHECK(onset.bins[0].label() == "2016-EW40");
    CHECK(onset.bins[33].label() == "none");
    CHECK(Observation::of_none().to_text() == "none");
    CHECK(Observation::of_week({ 2017, 6 }).to_text() == "2017-EW06");
}
