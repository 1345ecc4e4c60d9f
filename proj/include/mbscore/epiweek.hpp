#pragma once

#include <compare>
#include <optional>
#include <string>

namespace mbscore {

/// MMWR epidemiological week, e.g. 2016-EW50.
struct EpiWeek {
    int year = 0;
    int week = 0; // 1..52 (or 53 in long MMWR years)

    auto operator<=>(const EpiWeek&) const = default;
};

/// Number of MMWR weeks (52 or 53) in the given year.
int weeks_in_year(int year);

EpiWeek next_week(EpiWeek w);
EpiWeek prev_week(EpiWeek w);
EpiWeek add_weeks(EpiWeek w, int n);

/// Canonical "YYYY-EWww" form, zero-padded week number.
std::string to_string(const EpiWeek& w);

/// Accepts "2016-EW50", "EW50-2016", "2016-ew05" and a few spacing variants.
std::optional<EpiWeek> parse_epiweek(const std::string& text);

/// One influenza season: EW<start_week> of first_year through EW<end_week>
/// of first_year+1. Week bins and multibin neighbourhoods follow season
/// order, not calendar week numbers, across the new-year wrap.
struct Season {
    int first_year = 2016;
    int start_week = 40;
    int end_week = 20;

    int length() const;
    /// 0-based position of w in season order, or -1 if outside the season.
    int index_of(const EpiWeek& w) const;
    EpiWeek week_at(int index) const;
    /// Resolve a bare MMWR week number (e.g. "50" or "6") to a season week.
    std::optional<EpiWeek> resolve(int bare_week) const;

    bool operator==(const Season&) const = default;
};

} // namespace mbscore
