#include <catch2/catch_amalgamated.hpp>

#include <mbscore/errors.hpp>
#include <mbscore/flusight.hpp>

#include <string>
#include <vector>

using namespace mbscore;
using Catch::Approx;

namespace {

const Season kSeason{ 2016, 40, 20 };

const std::string kHeader =
    "Location,Target,Type,Unit,Bin_start_incl,Bin_end_notincl,Value\n";

const std::string kSmallSubmission = kHeader +
    "US National,Season peak week,Point,week,NA,NA,5\n"
    "US National,Season peak week,Bin,week,4,5,0.6\n"
    "US National,Season peak week,Bin,week,5,6,0.4\n"
    "US National,1 wk ahead,Bin,percent,2.0,2.1,0.7\n"
    "US National,1 wk ahead,Bin,percent,2.1,2.2,0.302\n"
    "US National,Season onset,Bin,week,none,none,0.5\n"
    "US National,Season onset,Bin,week,42,43,0.5\n";

} // namespace

TEST_CASE("target names round-trip case-insensitively") {
    for (TargetId id : kAllTargets) {
        CHECK(parse_target_name(target_name(id)) == id);
    }
    CHECK(parse_target_name("season peak week") == TargetId::peak_week);
    CHECK(parse_target_name("SEASON ONSET") == TargetId::onset_week);
    CHECK(parse_target_name(" 1 wk ahead ") == TargetId::wili_1wk);
    CHECK_FALSE(parse_target_name("Season florp").has_value());
    CHECK(target_name(TargetId::peak_intensity) == "Season peak percentage");
}

TEST_CASE("bin rows become grid-aligned forecasts with missing bins at zero") {
    const auto records = parse_submission(kSmallSubmission, kSeason);
    REQUIRE(records.size() == 3u);

    // First-appearance order: peak week, 1 wk ahead, onset.
    CHECK(records[0].target_id == TargetId::peak_week);
    CHECK(records[1].target_id == TargetId::wili_1wk);
    CHECK(records[2].target_id == TargetId::onset_week);
    CHECK(records[0].location == "US National");

    // Peak week: EW04/EW05 of 2017 sit at season indices 16 and 17.
    const auto& peak = records[0].forecast;
    REQUIRE(peak.size() == 33u);
    CHECK(peak.probs[16] == Approx(0.6));
    CHECK(peak.probs[17] == Approx(0.4));
    double sum = 0.0;
    for (double p : peak.probs) {
        sum += p;
    }
    CHECK(sum == 1.0);
    CHECK(peak.bin_labels[16] == "2017-EW04");

    // 1 wk ahead sums to 1.002 in the file; tol 1e-3 renormalizes it.
    const auto& wili = records[1].forecast;
    REQUIRE(wili.size() == 131u);
    CHECK(wili.probs[20] == Approx(0.7 / 1.002));
    CHECK(wili.probs[21] == Approx(0.302 / 1.002));
    CHECK(wili.probs[0] == 0.0);

    // Onset: the "none" bin is the trailing 34th bin.
    const auto& onset = records[2].forecast;
    REQUIRE(onset.size() == 34u);
    CHECK(onset.probs[33] == Approx(0.5));
    CHECK(onset.probs[2] == Approx(0.5));
}

TEST_CASE("point rows are ignored and never emit records") {
    const std::string csv = kHeader +
        "US National,Season peak week,Point,week,NA,NA,5\n"
        "US National,Season peak week,Bin,week,4,5,1.0\n";
    const auto records = parse_submission(csv, kSeason);
    REQUIRE(records.size() == 1u);
    CHECK(records[0].forecast.probs[16] == Approx(1.0));

    // A (location, target) with only a Point row emits no record at all.
    const std::string only_point = kHeader +
        "US National,Season peak week,Point,week,NA,NA,5\n";
    CHECK(parse_submission(only_point, kSeason).empty());
}

TEST_CASE("malformed submissions are rejected with specific errors") {
    CHECK_THROWS_AS(parse_submission("", kSeason), MalformedRow);
    CHECK_THROWS_AS(parse_submission("Location,Target\n", kSeason), MalformedRow);

    const std::string bad_target = kHeader +
        "US National,Season florp,Bin,week,4,5,1.0\n";
    CHECK_THROWS_AS(parse_submission(bad_target, kSeason), UnknownTarget);

    const std::string off_grid = kHeader +
        "US National,1 wk ahead,Bin,percent,2.05,2.15,1.0\n";
    CHECK_THROWS_AS(parse_submission(off_grid, kSeason), BinGridMismatch);

    const std::string bad_value = kHeader +
        "US National,1 wk ahead,Bin,percent,2.0,2.1,zebra\n";
    CHECK_THROWS_AS(parse_submission(bad_value, kSeason), MalformedRow);

    const std::string dup_bin = kHeader +
        "US National,1 wk ahead,Bin,percent,2.0,2.1,0.5\n"
        "US National,1 wk ahead,Bin,percent,2.0,2.1,0.5\n";
    CHECK_THROWS_AS(parse_submission(dup_bin, kSeason), DuplicateForecast);

    const std::string short_row = kHeader +
        "US National,1 wk ahead,Bin,percent,2.0\n";
    CHECK_THROWS_AS(parse_submission(short_row, kSeason), MalformedRow);

    const std::string not_normalized = kHeader +
        "US National,1 wk ahead,Bin,percent,2.0,2.1,0.5\n"
        "US National,1 wk ahead,Bin,percent,2.1,2.2,0.4\n";
    CHECK_THROWS_AS(parse_submission(not_normalized, kSeason), NotNormalized);

    // The none bin belongs to onset only.
    const std::string none_peak = kHeader +
        "US National,Season peak week,Bin,week,none,none,1.0\n";
    CHECK_THROWS_AS(parse_submission(none_peak, kSeason), BinGridMismatch);
}

TEST_CASE("serialized submissions re-parse to identical records") {
    const Submission sub = parse_submission_rows(kSmallSubmission);
    REQUIRE(sub.rows.size() == 7u);
    const std::string text = serialize_submission(sub);
    const auto first = parse_submission(kSmallSubmission, kSeason);
    const auto second = parse_submission(text, kSeason);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].location == second[i].location);
        CHECK(first[i].target_id == second[i].target_id);
        REQUIRE(first[i].forecast.size() == second[i].forecast.size());
        for (std::size_t b = 0; b < first[i].forecast.size(); ++b) {
            CHECK(first[i].forecast.probs[b] == second[i].forecast.probs[b]);
        }
    }
}

TEST_CASE("replace_forecast rewrites values in place, shape-checked") {
    Submission sub = parse_submission_rows(kSmallSubmission);
    const TargetSpec spec = target_spec(TargetId::peak_week, kSeason);

    std::vector<double> probs(spec.bins.size(), 0.0);
    probs[16] = 0.25;
    probs[17] = 0.75;
    replace_forecast(sub, "US National", spec, probs);

    const auto updated = extract_forecast(sub, "US National", spec);
    CHECK(updated.probs[16] == 0.25);
    CHECK(updated.probs[17] == 0.75);
    // The Point row and other targets are untouched.
    CHECK(sub.rows[0].value == "5");
    CHECK(sub.rows[3].value == "0.7");

    CHECK_THROWS_AS(replace_forecast(sub, "US National", spec, { 0.5, 0.5 }),
                    ShapeMismatch);
    CHECK_THROWS_AS(replace_forecast(sub, "HHS Region 1", spec, probs),
                    MissingForecast);
}

TEST_CASE("filename metadata: week, team, and year inference") {
    const auto a = submission_meta_from_filename("EW50-2016-DemoModel.csv", kSeason);
    CHECK(a.team == "DemoModel");
    CHECK(a.issue_week == EpiWeek{ 2016, 50 });

    // Trailing date: the calendar year of the date can lag or lead the
    // MMWR year of the week around the new year.
    const auto b = submission_meta_from_filename("EW01-DemoModel-2017-01-09.csv", kSeason);
    CHECK(b.team == "DemoModel");
    CHECK(b.issue_week == EpiWeek{ 2017, 1 });

    const auto c = submission_meta_from_filename("EW52-DemoModel-2017-01-02.csv", kSeason);
    CHECK(c.issue_week == EpiWeek{ 2016, 52 });

    const auto d = submission_meta_from_filename("EW44-Multi-Part-Team-2016-11-07.csv", kSeason);
    CHECK(d.team == "Multi-Part-Team");
    CHECK(d.issue_week == EpiWeek{ 2016, 44 });

    // No year anywhere: the season resolves the bare week.
    const auto e = submission_meta_from_filename("/some/dir/EW43-Alpha.csv", kSeason);
    CHECK(e.team == "Alpha");
    CHECK(e.issue_week == EpiWeek{ 2016, 43 });

    const auto f = submission_meta_from_filename("EW05-Beta.csv", kSeason);
    CHECK(f.issue_week == EpiWeek{ 2017, 5 });

    CHECK_THROWS_AS(submission_meta_from_filename("notaweek.csv", kSeason), MalformedRow);
    CHECK_THROWS_AS(submission_meta_from_filename("EW25-Beta.csv", kSeason), MalformedRow);
}

TEST_CASE("truth rows resolve to bins at parse time") {
    const std::string csv =
        "Location,Target,Value\n"
        "US National,1 wk ahead,3.14\n"
        "US National,Season peak week,2017-EW06\n"
        "US National,Season onset,none\n"
        "US National,Season peak percentage,5.1\n";
    const auto truth = parse_truth(csv, kSeason);
    REQUIRE(truth.size() == 4u);

    CHECK(truth[0].target_id == TargetId::wili_1wk);
    CHECK(truth[0].resolved_bin == 31u); // [3.1, 3.2)
    CHECK_FALSE(truth[0].issue_week.has_value());

    CHECK(truth[1].resolved_bin == 18u); // 2017-EW06 in season order
    CHECK(truth[2].resolved_bin == 33u); // onset "none"
    CHECK(truth[2].observed.kind == Observation::Kind::none);
    CHECK(truth[3].resolved_bin == 51u); // [5.1, 5.2)
}

TEST_CASE("week-ahead truth rows carry the issue week they serve") {
    const std::string csv =
        "Location,Target,Week,Value\n"
        "US National,1 wk ahead,2016-EW50,2.2\n"
        "US National,2 wk ahead,50,2.5\n"
        "US National,Season onset,,2016-EW48\n";
    const auto truth = parse_truth(csv, kSeason);
    REQUIRE(truth.size() == 3u);
    CHECK(truth[0].issue_week == EpiWeek{ 2016, 50 });
    CHECK(truth[0].resolved_bin == 22u);
    CHECK(truth[1].issue_week == EpiWeek{ 2016, 50 });
    CHECK_FALSE(truth[2].issue_week.has_value());
    CHECK(truth[2].resolved_bin == 8u); // 2016-EW48
}

TEST_CASE("truth parse failures") {
    CHECK_THROWS_AS(parse_truth("", kSeason), MalformedRow);
    CHECK_THROWS_AS(parse_truth("Location,Value\nUS National,1\n", kSeason),
                    MalformedRow);
    CHECK_THROWS_AS(
        parse_truth("Location,Target,Value\nUS National,Season florp,1\n", kSeason),
        UnknownTarget);
    CHECK_THROWS_AS(
        parse_truth("Location,Target,Value\nUS National,1 wk ahead,high\n", kSeason),
        MalformedRow);
    // Below the wILI grid: resolution fails, the row cannot be scored.
    CHECK_THROWS_AS(
        parse_truth("Location,Target,Value\nUS National,1 wk ahead,-0.5\n", kSeason),
        OutOfRange);
}

TEST_CASE("week labels parse in canonical or bare form") {
    CHECK(parse_week_label("2017-EW06", kSeason) == EpiWeek{ 2017, 6 });
    CHECK(parse_week_label("6", kSeason) == EpiWeek{ 2017, 6 });
    CHECK(parse_week_label("44", kSeason) == EpiWeek{ 2016, 44 });
    CHECK_THROWS_AS(parse_week_label("garbage", kSeason), MalformedRow);
    CHECK_THROWS_AS(parse_week_label("30", kSeason), MalformedRow);
}
