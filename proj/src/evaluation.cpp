#include "mbscore/evaluation.hpp"

#include "mbscore/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace mbscore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool ci_equal(const std::string& a, const std::string& b) {
    return lower(a) == lower(b);
}

double floored_log(double mass, double floor) {
    if (floor > 0.0 && mass < floor) mass = floor;
    return mass > 0.0 ? std::log(mass) : kNegInf;
}

std::size_t target_index(TargetId id) {
    return static_cast<std::size_t>(id);
}

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

const TruthRecord& find_truth(const std::vector<TruthRecord>& truth,
                              const std::string& location,
                              TargetId target_id,
                              const EpiWeek& issue_week) {
    const TruthRecord* season_level = nullptr;
    const TruthRecord* week_level = nullptr;
    for (const auto& t : truth) {
        if (t.target_id != target_id || !ci_equal(t.location, location)) continue;
        if (t.issue_week) {
            if (*t.issue_week == issue_week) {
                if (week_level) {
                    throw MalformedRow("duplicate truth for " + target_name(target_id) +
                                       " at " + to_string(issue_week));
                }
                week_level = &t;
            }
        } else {
            if (season_level) {
                throw MalformedRow("duplicate season-level truth for " +
                                   target_name(target_id));
            }
            season_level = &t;
        }
    }
    if (week_level) return *week_level;
    if (season_level) return *season_level;
    throw MissingTruth("no truth for " + target_name(target_id) + " at location '" +
                       location + "' serving issue week " + to_string(issue_week));
}

const ForecastRecord& find_forecast(const std::vector<ForecastRecord>& forecasts,
                                    TargetId target_id,
                                    const EpiWeek& issue_week) {
    const ForecastRecord* found = nullptr;
    for (const auto& f : forecasts) {
        if (f.target_id != target_id || !(f.issue_week == issue_week)) continue;
        if (found) {
            throw DuplicateForecast("two forecasts for " + target_name(target_id) +
                                    " at " + to_string(issue_week));
        }
        found = &f;
    }
    if (!found) {
        throw MissingForecast("no forecast for " + target_name(target_id) + " at " +
                              to_string(issue_week));
    }
    return *found;
}

std::string format_score(double v, int precision) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MalformedRow("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

double target_score(const TargetSpec& spec,
                    const std::vector<double>& probs,
                    std::size_t outcome_bin,
                    const ScoreRule& rule) {
    if (probs.size() != spec.bins.size()) {
        throw ShapeMismatch("forecast has " + std::to_string(probs.size()) +
                            " bins, grid has " + std::to_string(spec.bins.size()));
    }
    if (outcome_bin >= probs.size()) {
        throw IndexOutOfRange("outcome bin " + std::to_string(outcome_bin) +
                              " outside grid of size " + std::to_string(probs.size()));
    }
    if (rule.kind == ScoreRule::Kind::log) {
        return floored_log(probs[outcome_bin], rule.floor);
    }

    const int d = rule.d >= 0 ? rule.d : spec.d;
    if (spec.none_bin && outcome_bin == *spec.none_bin) {
        return floored_log(probs[outcome_bin], rule.floor);
    }
    const long limit = static_cast<long>(spec.ordered_size());
    const long y = static_cast<long>(outcome_bin);
    const long lo = std::max(0L, y - d);
    const long hi = std::min(limit - 1, y + d);
    double mass = 0.0;
    for (long t = lo; t <= hi; ++t) mass += probs[static_cast<std::size_t>(t)];
    return floored_log(mass, rule.floor);
}

std::vector<PerForecastScore> score_season(const std::vector<ForecastRecord>& forecasts,
                                           const std::vector<TruthRecord>& truth,
                                           const std::vector<EvaluationWindow>& windows,
                                           const ScoreRule& rule,
                                           const Season& season) {
    std::vector<PerForecastScore> out;
    for (const auto& w : windows) {
        const TargetSpec spec = target_spec(w.target_id, season);
        for (const auto& week : w.included_issue_weeks) {
            const ForecastRecord& rec = find_forecast(forecasts, w.target_id, week);
            const TruthRecord& tr = find_truth(truth, rec.location, w.target_id, week);
            PerForecastScore s;
            s.team = rec.team;
            s.location = rec.location;
            s.target_id = w.target_id;
            s.issue_week = week;
            s.score = target_score(spec, rec.forecast.probs, tr.resolved_bin, rule);
            out.push_back(std::move(s));
        }
    }
    return out;
}

ScoreRow evaluate_season(const std::vector<ForecastRecord>& forecasts,
                         const std::vector<TruthRecord>& truth,
                         const std::vector<EvaluationWindow>& windows,
                         const ScoreRule& rule,
                         const Season& season,
                         const std::string& label) {
    for (const auto& w : windows) {
        if (w.included_issue_weeks.empty()) {
            throw MissingForecast("window for " + target_name(w.target_id) +
                                  " includes no issue weeks; empty averages are refused");
        }
    }

    ScoreRow row;
    row.label = label;
    for (auto& c : row.cells) c.mean = kNaN;

    const std::vector<PerForecastScore> scores =
        score_season(forecasts, truth, windows, rule, season);
    std::array<double, 7> sums{};
    std::array<int, 7> counts{};
    for (const auto& s : scores) {
        const std::size_t i = target_index(s.target_id);
        sums[i] += s.score;
        counts[i] += 1;
    }
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
        if (counts[i] > 0) {
            row.cells[i] = ScoreCell{ sums[i] / counts[i], counts[i] };
        }
    }
    return row;
}

TargetHedge hedge_forecast(const TargetSpec& spec,
                           const CategoricalForecast& f,
                           const OptimizerConfig& cfg) {
    if (f.size() != spec.bins.size()) {
        throw ShapeMismatch("forecast has " + std::to_string(f.size()) +
                            " bins, grid has " + std::to_string(spec.bins.size()));
    }
    TargetHedge out;

    if (spec.none_bin) {
        // The isolated "none" bin separates from the week block: the optimal
        // G keeps the none probability and hedges the conditional week
        // distribution; the gain scales by the week mass.
        const std::size_t nb = *spec.none_bin;
        const std::size_t weeks = spec.ordered_size();
        const double p_none = f.probs[nb];
        const double a = 1.0 - p_none;
        out.g = f;
        if (a <= 1e-15) {
            return out; // all mass on "none": already optimal
        }

        CategoricalForecast cond;
        cond.bin_labels.assign(f.bin_labels.begin(), f.bin_labels.begin() + weeks);
        cond.probs.assign(f.probs.begin(), f.probs.begin() + weeks);
        for (double& v : cond.probs) v /= a;
        normalize_exact(cond.probs);

        const CategoricalForecast padded = pad_support(cond, spec.d);
        const HedgeResult res = optimize_hedged(padded, spec.d, cfg);
        const CategoricalForecast hedged = unpad_support(res.g, cond.size());

        for (std::size_t i = 0; i < weeks; ++i) {
            out.g.probs[i] = a * hedged.probs[i];
        }
        out.g.probs[nb] = p_none;
        out.expected_gain = a * res.expected_gain;
        out.method = res.method;
        out.iterations = res.iterations;
        out.converged = res.converged;
        return out;
    }

    const CategoricalForecast padded = pad_support(f, spec.d);
    const HedgeResult res = optimize_hedged(padded, spec.d, cfg);
    const CategoricalForecast hedged = unpad_support(res.g, f.size());
    out.g = f;
    out.g.probs = hedged.probs;
    out.expected_gain = res.expected_gain;
    out.method = res.method;
    out.iterations = res.iterations;
    out.converged = res.converged;
    return out;
}

std::vector<ForecastRecord> hedge_season(const std::vector<ForecastRecord>& forecasts,
                                         const Season& season,
                                         const OptimizerConfig& cfg) {
    std::vector<ForecastRecord> out;
    out.reserve(forecasts.size());
    for (const auto& rec : forecasts) {
        const TargetSpec spec = target_spec(rec.target_id, season);
        ForecastRecord hedged = rec;
        hedged.forecast = hedge_forecast(spec, rec.forecast, cfg).g;
        out.push_back(std::move(hedged));
    }
    return out;
}

ScoreTable compare_table(const ScoreRow& original, const ScoreRow& hedged) {
    for (std::size_t i = 0; i < original.cells.size(); ++i) {
        if (original.cells[i].count != hedged.cells[i].count) {
            throw ShapeMismatch("count mismatch for " +
                                target_name(static_cast<TargetId>(i)) + ": " +
                                std::to_string(original.cells[i].count) + " vs " +
                                std::to_string(hedged.cells[i].count));
        }
    }
    ScoreTable t;
    t.rows = { original, hedged };
    t.gains.resize(original.cells.size(), kNaN);
    for (std::size_t i = 0; i < original.cells.size(); ++i) {
        if (original.cells[i].count > 0) {
            t.gains[i] = hedged.cells[i].mean - original.cells[i].mean;
        }
    }
    return t;
}

std::vector<EvaluationWindow> derive_windows(const std::vector<TruthRecord>& truth,
                                             const std::vector<EpiWeek>& issue_weeks,
                                             const Season& season,
                                             const std::string& location,
                                             const WindowRules& rules) {
    const Observation* onset_obs = nullptr;
    const Observation* peak_obs = nullptr;
    for (const auto& t : truth) {
        if (!ci_equal(t.location, location)) continue;
        if (t.target_id == TargetId::onset_week && !t.issue_week) onset_obs = &t.observed;
        if (t.target_id == TargetId::peak_week && !t.issue_week) peak_obs = &t.observed;
    }
    if (!onset_obs) {
        throw MissingTruth("no season-level onset truth for location '" + location + "'");
    }
    if (!peak_obs) {
        throw MissingTruth("no season-level peak week truth for location '" + location + "'");
    }
    const bool no_onset = onset_obs->kind == Observation::Kind::none;
    const int onset_idx = no_onset ? 0 : season.index_of(onset_obs->week);
    const int peak_idx = season.index_of(peak_obs->week);
    if ((!no_onset && onset_idx < 0) || peak_idx < 0) {
        throw MissingTruth("onset or peak week truth lies outside the season");
    }

    // Issue weeks in season order, deduplicated.
    std::vector<EpiWeek> weeks;
    for (const auto& w : issue_weeks) {
        if (season.index_of(w) < 0) continue;
        if (std::find(weeks.begin(), weeks.end(), w) == weeks.end()) weeks.push_back(w);
    }
    std::sort(weeks.begin(), weeks.end(), [&](const EpiWeek& a, const EpiWeek& b) {
        return season.index_of(a) < season.index_of(b);
    });

    std::vector<EvaluationWindow> out;
    for (const TargetId id : kAllTargets) {
        EvaluationWindow win;
        win.target_id = id;
        for (const auto& w : weeks) {
            const int i = season.index_of(w);
            bool include = false;
            switch (id) {
            case TargetId::onset_week:
                include = no_onset || i <= onset_idx + rules.onset_grace;
                break;
            case TargetId::peak_week:
            case TargetId::peak_intensity:
                include = i <= peak_idx + rules.peak_grace;
                break;
            default: {
                const int horizon = static_cast<int>(target_index(id)) + 1;
                const int t = i + horizon;
                include = t < season.length() &&
                          (no_onset || t >= onset_idx - rules.weekahead_before_onset) &&
                          t <= peak_idx + rules.weekahead_after_peak;
                break;
            }
            }
            if (include) win.included_issue_weeks.push_back(w);
        }
        out.push_back(std::move(win));
    }
    return out;
}

std::vector<EvaluationWindow> parse_windows(const std::string& csv_text, const Season& season) {
    std::istringstream in(csv_text);
    std::string line;
    std::vector<EvaluationWindow> out;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw MalformedRow("windows row " + std::to_string(lineno) + " has no comma");
        }
        const std::string target_text = line.substr(0, comma);
        const std::string week_text = line.substr(comma + 1);
        if (!header_seen) {
            header_seen = true;
            if (ci_equal(lower(target_text), "target")) continue;
        }
        const auto id = parse_target_name(target_text);
        if (!id) {
            throw UnknownTarget("unknown target '" + target_text + "' in windows row " +
                                std::to_string(lineno));
        }
        const EpiWeek wk = parse_week_label(week_text, season);
        auto it = std::find_if(out.begin(), out.end(), [&](const EvaluationWindow& w) {
            return w.target_id == *id;
        });
        if (it == out.end()) {
            out.push_back(EvaluationWindow{ *id, {} });
            it = out.end() - 1;
        }
        if (std::find(it->included_issue_weeks.begin(), it->included_issue_weeks.end(), wk) !=
            it->included_issue_weeks.end()) {
            throw MalformedRow("week " + to_string(wk) + " listed twice for " +
                               target_name(*id));
        }
        it->included_issue_weeks.push_back(wk);
    }
    if (out.empty()) {
        throw MalformedRow("windows file defines no windows");
    }
    return out;
}

std::vector<EvaluationWindow> load_windows_file(const std::string& path, const Season& season) {
    return parse_windows(read_file(path), season);
}

std::string serialize_windows(const std::vector<EvaluationWindow>& windows) {
    std::string out = "Target,Issue_week\n";
    for (const auto& w : windows) {
        for (const auto& wk : w.included_issue_weeks) {
            out += target_name(w.target_id);
            out += ',';
            out += to_string(wk);
            out += '\n';
        }
    }
    return out;
}

std::string render_table_text(const ScoreTable& table, int precision) {
    const std::array<std::string, 7> heads{
        "1 wk", "2 wk", "3 wk", "4 wk", "onset week", "peak week", "peak intensity",
    };

    std::vector<std::string> labels;
    std::vector<std::array<std::string, 7>> cells;
    for (const auto& r : table.rows) {
        labels.push_back(r.label);
        std::array<std::string, 7> vals;
        for (std::size_t i = 0; i < 7; ++i) {
            vals[i] = format_score(r.cells[i].mean, precision);
        }
        cells.push_back(vals);
    }
    if (!table.gains.empty()) {
        labels.push_back("gain");
        std::array<std::string, 7> vals;
        for (std::size_t i = 0; i < 7; ++i) {
            vals[i] = format_score(table.gains[i], precision);
        }
        cells.push_back(vals);
    }
    if (!table.rows.empty()) {
        labels.push_back("n");
        std::array<std::string, 7> vals;
        for (std::size_t i = 0; i < 7; ++i) {
            vals[i] = std::to_string(table.rows.front().cells[i].count);
        }
        cells.push_back(vals);
    }

    std::size_t label_w = 0;
    for (const auto& l : labels) label_w = std::max(label_w, l.size());
    std::array<std::size_t, 7> col_w{};
    for (std::size_t i = 0; i < 7; ++i) {
        col_w[i] = heads[i].size();
        for (const auto& row : cells) col_w[i] = std::max(col_w[i], row[i].size());
    }

    std::string out(label_w, ' ');
    for (std::size_t i = 0; i < 7; ++i) {
        out += "  ";
        out += std::string(col_w[i] - heads[i].size(), ' ');
        out += heads[i];
    }
    out += '\n';
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out += labels[r];
        out += std::string(label_w - labels[r].size(), ' ');
        for (std::size_t i = 0; i < 7; ++i) {
            out += "  ";
            out += std::string(col_w[i] - cells[r][i].size(), ' ');
            out += cells[r][i];
        }
        out += '\n';
    }
    return out;
}

std::string render_table_csv(const ScoreTable& table, int precision) {
    std::string out = "target";
    for (const auto& r : table.rows) {
        out += ',';
        out += r.label;
    }
    if (!table.gains.empty()) out += ",gain";
    out += ",count\n";

    for (std::size_t i = 0; i < 7; ++i) {
        out += target_name(static_cast<TargetId>(i));
        for (const auto& r : table.rows) {
            out += ',';
            out += format_score(r.cells[i].mean, precision);
        }
        if (!table.gains.empty()) {
            out += ',';
            out += format_score(table.gains[i], precision);
        }
        out += ',';
        out += std::to_string(table.rows.empty() ? 0 : table.rows.front().cells[i].count);
        out += '\n';
    }
    return out;
}

std::string render_score_log_csv(const std::vector<PerForecastScore>& original,
                                 const std::vector<PerForecastScore>& hedged,
                                 int precision) {
    std::string out = "team,location,target,issue_week,score_original,score_hedged\n";
    for (const auto& s : original) {
        const PerForecastScore* h = nullptr;
        for (const auto& cand : hedged) {
            if (cand.target_id == s.target_id && cand.issue_week == s.issue_week &&
                ci_equal(cand.location, s.location)) {
                h = &cand;
                break;
            }
        }
        out += s.team;
        out += ',';
        out += s.location;
        out += ',';
        out += target_name(s.target_id);
        out += ',';
        out += to_string(s.issue_week);
        out += ',';
        out += format_score(s.score, precision);
        out += ',';
        out += h ? format_score(h->score, precision) : "";
        out += '\n';
    }
    return out;
}

} // namespace mbscore
