#include "mbscore/epiweek.hpp"

#include "mbscore/errors.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>

namespace mbscore {

namespace {

// Days since epoch of the Sunday starting MMWR week 1 of the given year.
// MMWR weeks run Sunday through Saturday; week 1 is the week containing
// January 4 (equivalently, the first week with at least four days in the
// new year).
std::chrono::sys_days mmwr_week1_start(int year) {
    using namespace std::chrono;
    const sys_days jan4 = sys_days{ January / 4 / year };
    const weekday wd{ jan4 };
    return jan4 - days{ static_cast<int>(wd.c_encoding()) }; // back to Sunday
}

} // namespace

int weeks_in_year(int year) {
    const auto span = mmwr_week1_start(year + 1) - mmwr_week1_start(year);
    return static_cast<int>(span.count() / 7);
}

EpiWeek next_week(EpiWeek w) {
    if (w.week >= weeks_in_year(w.year)) {
        return EpiWeek{ w.year + 1, 1 };
    }
    return EpiWeek{ w.year, w.week + 1 };
}

EpiWeek prev_week(EpiWeek w) {
    if (w.week <= 1) {
        return EpiWeek{ w.year - 1, weeks_in_year(w.year - 1) };
    }
    return EpiWeek{ w.year, w.week - 1 };
}

EpiWeek add_weeks(EpiWeek w, int n) {
    while (n > 0) {
        w = next_week(w);
        --n;
    }
    while (n < 0) {
        w = prev_week(w);
        ++n;
    }
    return w;
}

std::string to_string(const EpiWeek& w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-EW%02d", w.year, w.week);
    return buf;
}

std::optional<EpiWeek> parse_epiweek(const std::string& text) {
    // Normalize: uppercase, drop spaces.
    std::string s;
    s.reserve(text.size());
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    int year = 0;
    int week = 0;
    if (std::sscanf(s.c_str(), "%4d-EW%2d", &year, &week) == 2 ||
        std::sscanf(s.c_str(), "EW%2d-%4d", &week, &year) == 2 ||
        std::sscanf(s.c_str(), "%4dEW%2d", &year, &week) == 2) {
        if (week >= 1 && week <= weeks_in_year(year)) {
            return EpiWeek{ year, week };
        }
    }
    return std::nullopt;
}

int Season::length() const {
    return (weeks_in_year(first_year) - start_week + 1) + end_week;
}

int Season::index_of(const EpiWeek& w) const {
    if (w.year == first_year && w.week >= start_week && w.week <= weeks_in_year(first_year)) {
        return w.week - start_week;
    }
    if (w.year == first_year + 1 && w.week >= 1 && w.week <= end_week) {
        return (weeks_in_year(first_year) - start_week + 1) + (w.week - 1);
    }
    return -1;
}

EpiWeek Season::week_at(int index) const {
    if (index < 0 || index >= length()) {
        throw OutOfRange("season week index " + std::to_string(index) + " out of range");
    }
    const int first_part = weeks_in_year(first_year) - start_week + 1;
    if (index < first_part) {
        return EpiWeek{ first_year, start_week + index };
    }
    return EpiWeek{ first_year + 1, index - first_part + 1 };
}

std::optional<EpiWeek> Season::resolve(int bare_week) const {
    if (bare_week >= start_week && bare_week <= weeks_in_year(first_year)) {
        return EpiWeek{ first_year, bare_week };
    }
    if (bare_week >= 1 && bare_week <= end_week) {
        return EpiWeek{ first_year + 1, bare_week };
    }
    return std::nullopt;
}

} // namespace mbscore
