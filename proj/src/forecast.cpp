#include "mbscore/forecast.hpp"

#include "mbscore/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

namespace mbscore {

namespace {

constexpr double kNegativeClampTol = 1e-12;

// Makes the vector sum to exactly 1.0: divide by the sum, then absorb the
// residual rounding into the largest entry.
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

bool parse_long(const std::string& s, long& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtol(s.c_str(), &end, 10);
    return end != nullptr && *end == '\0';
}

// Label extension strategies for padding, tried in order: plain integers,
// epidemic weeks, uniform-width interval strings, then synthetic labels.
struct LabelExtender {
    enum class Mode { integer, week, interval, synthetic };
    Mode mode = Mode::synthetic;
    long first_int = 0, last_int = 0;
    EpiWeek first_week{}, last_week{};
    double lo = 0.0, width = 0.0; // interval grid

    static LabelExtender detect(const std::vector<std::string>& labels) {
        LabelExtender ex;
        if (labels.empty()) return ex;

        long a = 0, b = 0;
        if (parse_long(labels.front(), a) && parse_long(labels.back(), b)) {
            bool ok = true;
            long expect = a;
            for (const auto& l : labels) {
                long v = 0;
                if (!parse_long(l, v) || v != expect++) { ok = false; break; }
            }
            if (ok) {
                ex.mode = Mode::integer;
                ex.first_int = a;
                ex.last_int = b;
                return ex;
            }
        }

        if (auto w0 = parse_epiweek(labels.front())) {
            bool ok = true;
            EpiWeek expect = *w0;
            for (const auto& l : labels) {
                auto w = parse_epiweek(l);
                if (!w || *w != expect) { ok = false; break; }
                expect = next_week(expect);
            }
            if (ok) {
                ex.mode = Mode::week;
                ex.first_week = *w0;
                ex.last_week = *parse_epiweek(labels.back());
                return ex;
            }
        }

        double lo0 = 0.0, hi0 = 0.0;
        if (labels.size() >= 2 &&
            std::sscanf(labels.front().c_str(), "[%lf,%lf)", &lo0, &hi0) == 2 && hi0 > lo0) {
            ex.mode = Mode::interval;
            ex.lo = lo0;
            ex.width = hi0 - lo0;
            return ex;
        }

        return ex;
    }

    std::string before(int k) const { // k = 1..d, k bins before the first
        char buf[48];
        switch (mode) {
        case Mode::integer:
            return std::to_string(first_int - k);
        case Mode::week:
            return mbscore::to_string(add_weeks(first_week, -k));
        case Mode::interval:
            std::snprintf(buf, sizeof(buf), "[%g,%g)", lo - k * width, lo - (k - 1) * width);
            return buf;
        case Mode::synthetic:
            break;
        }
        std::snprintf(buf, sizeof(buf), "pad-%d", k);
        return buf;
    }

    std::string after(int k, std::size_t n_original) const {
        char buf[48];
        switch (mode) {
        case Mode::integer:
            return std::to_string(last_int + k);
        case Mode::week:
            return mbscore::to_string(add_weeks(last_week, k));
        case Mode::interval: {
            const double top = lo + static_cast<double>(n_original) * width;
            std::snprintf(buf, sizeof(buf), "[%g,%g)", top + (k - 1) * width, top + k * width);
            return buf;
        }
        case Mode::synthetic:
            break;
        }
        std::snprintf(buf, sizeof(buf), "pad+%d", k);
        return buf;
    }
};

} // namespace

CategoricalForecast validate_forecast(std::vector<double> raw_probs,
                                      double tol,
                                      std::vector<std::string> bin_labels) {
    if (raw_probs.empty()) {
        throw EmptySupport("forecast has no bins");
    }
    for (double& v : raw_probs) {
        if (v < -kNegativeClampTol) {
            throw NegativeProbability("probability " + std::to_string(v) + " is negative");
        }
        if (v < 0.0) v = 0.0;
    }
    double sum = 0.0;
    for (double v : raw_probs) sum += v;
    if (std::abs(sum - 1.0) > tol) {
        throw NotNormalized("probabilities sum to " + std::to_string(sum) +
                            ", outside tolerance " + std::to_string(tol));
    }
    if (sum != 1.0) {
        normalize_exact(raw_probs);
    }

    if (bin_labels.empty()) {
        bin_labels.reserve(raw_probs.size());
        for (std::size_t i = 0; i < raw_probs.size(); ++i) {
            bin_labels.push_back(std::to_string(i + 1));
        }
    }
    if (bin_labels.size() != raw_probs.size()) {
        throw SupportMismatch("bin label count " + std::to_string(bin_labels.size()) +
                              " does not match probability count " +
                              std::to_string(raw_probs.size()));
    }
    std::set<std::string> uniq(bin_labels.begin(), bin_labels.end());
    if (uniq.size() != bin_labels.size()) {
        throw SupportMismatch("bin labels are not unique");
    }

    return CategoricalForecast{ std::move(bin_labels), std::move(raw_probs), 0 };
}

bool satisfies_regularity(const std::vector<double>& probs, int d) {
    const std::size_t n = probs.size();
    if (d < 0 || n <= 2 * static_cast<std::size_t>(d)) return false;
    for (int i = 0; i < d; ++i) {
        if (probs[i] != 0.0 || probs[n - 1 - i] != 0.0) return false;
    }
    return true;
}

CategoricalForecast pad_support(const CategoricalForecast& f, int d) {
    if (d < 0) {
        throw OutOfRange("window half-width must be nonnegative");
    }
    const std::size_t n = f.size();
    std::size_t lead = 0;
    while (lead < n && f.probs[lead] == 0.0) ++lead;
    std::size_t trail = 0;
    while (trail < n - lead && f.probs[n - 1 - trail] == 0.0) ++trail;

    const int prepend = std::max(0, d - static_cast<int>(lead));
    const int append = std::max(0, d - static_cast<int>(trail));
    if (prepend == 0 && append == 0) {
        return f;
    }

    const LabelExtender ex = LabelExtender::detect(f.bin_labels);
    CategoricalForecast out;
    out.offset = f.offset + prepend;
    out.probs.reserve(n + prepend + append);
    out.bin_labels.reserve(n + prepend + append);
    for (int k = prepend; k >= 1; --k) {
        out.bin_labels.push_back(ex.before(k));
        out.probs.push_back(0.0);
    }
    out.bin_labels.insert(out.bin_labels.end(), f.bin_labels.begin(), f.bin_labels.end());
    out.probs.insert(out.probs.end(), f.probs.begin(), f.probs.end());
    for (int k = 1; k <= append; ++k) {
        out.bin_labels.push_back(ex.after(k, n));
        out.probs.push_back(0.0);
    }
    return out;
}

CategoricalForecast unpad_support(const CategoricalForecast& f, std::size_t original_size) {
    const std::size_t lead = static_cast<std::size_t>(f.offset);
    if (lead + original_size > f.size()) {
        throw SupportMismatch("padded forecast shorter than offset plus original size");
    }
    for (std::size_t i = 0; i < lead; ++i) {
        if (f.probs[i] != 0.0) {
            throw RegularityViolated("prepended bin " + std::to_string(i) + " carries mass");
        }
    }
    for (std::size_t i = lead + original_size; i < f.size(); ++i) {
        if (f.probs[i] != 0.0) {
            throw RegularityViolated("appended bin " + std::to_string(i) + " carries mass");
        }
    }
    CategoricalForecast out;
    out.offset = 0;
    out.bin_labels.assign(f.bin_labels.begin() + lead, f.bin_labels.begin() + lead + original_size);
    out.probs.assign(f.probs.begin() + lead, f.probs.begin() + lead + original_size);
    return out;
}

std::string Bin::label() const {
    char buf[48];
    switch (kind) {
    case Kind::interval:
        std::snprintf(buf, sizeof(buf), hi_inclusive ? "[%g,%g]" : "[%g,%g)", lo, hi);
        return buf;
    case Kind::week:
        return mbscore::to_string(week);
    case Kind::none:
        return "none";
    }
    return "?";
}

std::string Observation::to_text() const {
    switch (kind) {
    case Kind::value: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", value);
        return buf;
    }
    case Kind::week:
        return mbscore::to_string(week);
    case Kind::none:
        return "none";
    }
    return "?";
}

std::vector<std::string> TargetSpec::bin_labels() const {
    std::vector<std::string> out;
    out.reserve(bins.size());
    for (const auto& b : bins) out.push_back(b.label());
    return out;
}

std::size_t outcome_to_bin(const Observation& observed, const TargetSpec& spec) {
    switch (observed.kind) {
    case Observation::Kind::none:
        if (spec.none_bin) return *spec.none_bin;
        throw OutOfRange("target has no 'none' bin");
    case Observation::Kind::week:
        for (std::size_t i = 0; i < spec.bins.size(); ++i) {
            if (spec.bins[i].kind == Bin::Kind::week && spec.bins[i].week == observed.week) {
                return i;
            }
        }
        throw OutOfRange("week " + to_string(observed.week) + " is not on the bin grid");
    case Observation::Kind::value: {
        // Bin edges are decimal numbers stored as doubles and observed values
        // arrive from decimal text; the two can round in opposite directions
        // (51 * 0.1 > 5.1 as doubles). A value within kEdgeTol of an edge
        // belongs to the bin whose closed lower edge it names.
        constexpr double kEdgeTol = 1e-9;
        for (std::size_t i = 0; i < spec.bins.size(); ++i) {
            const Bin& b = spec.bins[i];
            if (b.kind != Bin::Kind::interval) continue;
            const bool above_lo = observed.value >= b.lo - kEdgeTol;
            const bool below_hi = b.hi_inclusive ? observed.value <= b.hi + kEdgeTol
                                                 : observed.value < b.hi - kEdgeTol;
            if (above_lo && below_hi) return i;
        }
        throw OutOfRange("value " + std::to_string(observed.value) + " is not on the bin grid");
    }
    }
    throw OutOfRange("unrecognized observation");
}

} // namespace mbscore
