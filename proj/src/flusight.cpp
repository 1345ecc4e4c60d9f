#include "mbscore/flusight.hpp"

#include "mbscore/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

namespace mbscore {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool ci_equal(const std::string& a, const std::string& b) {
    return lower(trim(a)) == lower(trim(b));
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end != nullptr && *end == '\0';
}

bool parse_int(const std::string& s, long& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtol(t.c_str(), &end, 10);
    return end != nullptr && *end == '\0';
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

/// Splits one CSV line. Double quotes delimit fields; "" inside a quoted
/// field is a literal quote.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur)) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    return lines;
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

std::string basename_of(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

bool is_week_target(TargetId id) {
    return id == TargetId::onset_week || id == TargetId::peak_week;
}

/// Maps a row's Bin_start_incl onto the target grid. nullopt means the
/// value is not on the grid.
std::optional<std::size_t> match_bin(const TargetSpec& spec, const std::string& bin_start) {
    if (ci_equal(bin_start, "none")) {
        return spec.none_bin;
    }
    double v = 0.0;
    if (!parse_double(bin_start, v)) return std::nullopt;

    if (is_week_target(spec.target_id)) {
        const long bare = std::lround(v);
        if (bare < 1 || bare > 53 || static_cast<double>(bare) != v) return std::nullopt;
        const auto wk = spec.season.resolve(static_cast<int>(bare));
        if (!wk) return std::nullopt;
        for (std::size_t i = 0; i < spec.bins.size(); ++i) {
            if (spec.bins[i].kind == Bin::Kind::week && spec.bins[i].week == *wk) return i;
        }
        return std::nullopt;
    }
    for (std::size_t i = 0; i < spec.bins.size(); ++i) {
        if (spec.bins[i].kind == Bin::Kind::interval && std::abs(spec.bins[i].lo - v) < 1e-6) {
            return i;
        }
    }
    return std::nullopt;
}

const std::array<const char*, 7> kTargetNames{
    "1 wk ahead", "2 wk ahead", "3 wk ahead", "4 wk ahead",
    "Season onset", "Season peak week", "Season peak percentage",
};

} // namespace

EpiWeek parse_week_label(const std::string& text, const Season& season) {
    if (auto wk = parse_epiweek(text)) {
        return *wk;
    }
    long bare = 0;
    if (parse_int(text, bare)) {
        if (auto wk = season.resolve(static_cast<int>(bare))) {
            return *wk;
        }
    }
    throw MalformedRow("'" + text + "' is not a recognizable week");
}

std::string target_name(TargetId id) {
    return kTargetNames[static_cast<std::size_t>(id)];
}

std::optional<TargetId> parse_target_name(const std::string& name) {
    for (std::size_t i = 0; i < kTargetNames.size(); ++i) {
        if (ci_equal(name, kTargetNames[i])) return static_cast<TargetId>(i);
    }
    return std::nullopt;
}

TargetSpec target_spec(TargetId id, const Season& season) {
    TargetSpec spec;
    spec.target_id = id;
    spec.season = season;
    if (is_week_target(id)) {
        spec.d = 1;
        const int len = season.length();
        spec.bins.reserve(static_cast<std::size_t>(len) + 1);
        for (int i = 0; i < len; ++i) {
            Bin b;
            b.kind = Bin::Kind::week;
            b.week = season.week_at(i);
            spec.bins.push_back(b);
        }
        if (id == TargetId::onset_week) {
            Bin none;
            none.kind = Bin::Kind::none;
            spec.bins.push_back(none);
            spec.none_bin = spec.bins.size() - 1;
        }
    } else {
        spec.d = 5;
        spec.bins.reserve(131);
        for (int i = 0; i < 130; ++i) {
            Bin b;
            b.kind = Bin::Kind::interval;
            b.lo = i * 0.1;
            b.hi = (i + 1) * 0.1;
            spec.bins.push_back(b);
        }
        Bin last;
        last.kind = Bin::Kind::interval;
        last.lo = 13.0;
        last.hi = 100.0;
        last.hi_inclusive = true;
        spec.bins.push_back(last);
    }
    return spec;
}

SubmissionMeta submission_meta_from_filename(const std::string& filename, const Season& season) {
    std::string base = basename_of(filename);
    const std::string low = lower(base);
    if (low.size() > 4 && low.compare(low.size() - 4, 4, ".csv") == 0) {
        base = base.substr(0, base.size() - 4);
    }

    std::vector<std::string> tokens;
    std::string cur;
    for (char c : base) {
        if (c == '-') {
            tokens.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    tokens.push_back(cur);

    long week = 0;
    if (tokens.empty() || tokens[0].size() < 3 || lower(tokens[0]).compare(0, 2, "ew") != 0 ||
        !parse_int(tokens[0].substr(2), week) || week < 1 || week > 53) {
        throw MalformedRow("filename does not start with an EWww token: " + filename);
    }
    tokens.erase(tokens.begin());

    // A trailing YYYY-MM-DD triple is a submission date, not part of the
    // team name; a lone YYYY token is the issue year.
    std::optional<int> year;
    std::optional<int> date_year, date_month;
    long y = 0, m = 0, dd = 0;
    if (tokens.size() >= 3 && tokens[tokens.size() - 3].size() == 4 &&
        parse_int(tokens[tokens.size() - 3], y) &&
        parse_int(tokens[tokens.size() - 2], m) && m >= 1 && m <= 12 &&
        parse_int(tokens[tokens.size() - 1], dd) && dd >= 1 && dd <= 31) {
        date_year = static_cast<int>(y);
        date_month = static_cast<int>(m);
        tokens.resize(tokens.size() - 3);
    } else {
        for (auto it = tokens.begin(); it != tokens.end(); ++it) {
            long v = 0;
            if (it->size() == 4 && parse_int(*it, v) && v >= 1900 && v <= 2100) {
                year = static_cast<int>(v);
                tokens.erase(it);
                break;
            }
        }
    }

    SubmissionMeta meta;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) meta.team += '-';
        meta.team += tokens[i];
    }
    if (meta.team.empty()) meta.team = "unknown";

    if (year) {
        meta.issue_week = EpiWeek{ *year, static_cast<int>(week) };
    } else if (date_year) {
        int iy = *date_year;
        if (week >= 30 && *date_month <= 6) iy -= 1;
        if (week < 30 && *date_month >= 7) iy += 1;
        meta.issue_week = EpiWeek{ iy, static_cast<int>(week) };
    } else if (auto wk = season.resolve(static_cast<int>(week))) {
        meta.issue_week = *wk;
    } else {
        throw MalformedRow("issue week " + std::to_string(week) +
                           " is outside the season and the filename names no year: " + filename);
    }
    return meta;
}

Submission parse_submission_rows(const std::string& csv_text) {
    const std::vector<std::string> lines = split_lines(csv_text);
    std::size_t li = 0;
    while (li < lines.size() && trim(lines[li]).empty()) ++li;
    if (li == lines.size()) {
        throw MalformedRow("submission is empty");
    }

    const std::vector<std::string> header = split_csv_line(lines[li]);
    const std::vector<std::string> expected{
        "location", "target", "type", "unit", "bin_start_incl", "bin_end_notincl", "value",
    };
    if (header.size() < expected.size()) {
        throw MalformedRow("expected at least 7 header columns, found " +
                           std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < expected.size(); ++c) {
        if (lower(header[c]) != expected[c]) {
            throw MalformedRow("unexpected header column '" + header[c] + "'");
        }
    }

    Submission sub;
    for (++li; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        std::vector<std::string> f = split_csv_line(lines[li]);
        if (f.size() < 7) {
            throw MalformedRow("row " + std::to_string(li + 1) + " has " +
                               std::to_string(f.size()) + " fields, expected 7");
        }
        sub.rows.push_back(SubmissionRow{
            std::move(f[0]), std::move(f[1]), std::move(f[2]), std::move(f[3]),
            std::move(f[4]), std::move(f[5]), std::move(f[6]),
        });
    }
    return sub;
}

std::vector<ForecastRecord> parse_submission(const std::string& csv_text, const Season& season) {
    const Submission sub = parse_submission_rows(csv_text);

    // (location, canonical target) pairs in order of first appearance.
    // Point rows are ignored wholesale: they never contribute a record.
    std::vector<std::pair<std::string, TargetId>> pairs;
    for (const auto& r : sub.rows) {
        if (!ci_equal(r.type, "bin")) continue;
        const auto id = parse_target_name(r.target);
        if (!id) {
            throw UnknownTarget("unknown target '" + r.target + "'");
        }
        const std::pair<std::string, TargetId> key{ trim(r.location), *id };
        if (std::find(pairs.begin(), pairs.end(), key) == pairs.end()) {
            pairs.push_back(key);
        }
    }

    std::vector<ForecastRecord> out;
    out.reserve(pairs.size());
    for (const auto& [location, id] : pairs) {
        const TargetSpec spec = target_spec(id, season);
        ForecastRecord rec;
        rec.location = location;
        rec.target_id = id;
        rec.forecast = extract_forecast(sub, location, spec);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ForecastRecord> load_submission_file(const std::string& path, const Season& season) {
    std::vector<ForecastRecord> recs = parse_submission(read_file(path), season);
    const SubmissionMeta meta = submission_meta_from_filename(path, season);
    for (auto& r : recs) {
        r.team = meta.team;
        r.issue_week = meta.issue_week;
    }
    return recs;
}

Submission load_submission_rows(const std::string& path, const Season& season) {
    Submission sub = parse_submission_rows(read_file(path));
    const SubmissionMeta meta = submission_meta_from_filename(path, season);
    sub.team = meta.team;
    sub.issue_week = meta.issue_week;
    return sub;
}

std::string serialize_submission(const Submission& sub) {
    std::string out = "Location,Target,Type,Unit,Bin_start_incl,Bin_end_notincl,Value\n";
    for (const auto& r : sub.rows) {
        out += csv_field(r.location);
        out += ',';
        out += csv_field(r.target);
        out += ',';
        out += csv_field(r.type);
        out += ',';
        out += csv_field(r.unit);
        out += ',';
        out += csv_field(r.bin_start);
        out += ',';
        out += csv_field(r.bin_end);
        out += ',';
        out += csv_field(r.value);
        out += '\n';
    }
    return out;
}

CategoricalForecast extract_forecast(const Submission& sub,
                                     const std::string& location,
                                     const TargetSpec& spec,
                                     double tol) {
    const std::string want = target_name(spec.target_id);
    std::vector<double> vals(spec.bins.size(), 0.0);
    std::vector<bool> seen(spec.bins.size(), false);
    bool any_bin_row = false;

    for (const auto& r : sub.rows) {
        if (!ci_equal(r.target, want) || !ci_equal(r.location, location)) continue;
        if (!ci_equal(r.type, "bin")) continue;
        any_bin_row = true;
        const auto idx = match_bin(spec, r.bin_start);
        if (!idx) {
            throw BinGridMismatch("bin start '" + r.bin_start + "' is not on the grid for " +
                                  want);
        }
        double v = 0.0;
        if (!parse_double(r.value, v)) {
            throw MalformedRow("non-numeric Value '" + r.value + "' for " + want);
        }
        if (seen[*idx]) {
            throw DuplicateForecast("bin '" + r.bin_start + "' appears twice for " + want);
        }
        seen[*idx] = true;
        vals[*idx] = v;
    }

    if (!any_bin_row) {
        throw MissingForecast("no Bin rows for target '" + want + "' at location '" +
                              location + "'");
    }
    return validate_forecast(std::move(vals), tol, spec.bin_labels());
}

void replace_forecast(Submission& sub,
                      const std::string& location,
                      const TargetSpec& spec,
                      const std::vector<double>& probs) {
    if (probs.size() != spec.bins.size()) {
        throw ShapeMismatch("replacement has " + std::to_string(probs.size()) +
                            " bins, grid has " + std::to_string(spec.bins.size()));
    }
    const std::string want = target_name(spec.target_id);
    bool any = false;
    for (auto& r : sub.rows) {
        if (!ci_equal(r.target, want) || !ci_equal(r.location, location)) continue;
        if (!ci_equal(r.type, "bin")) continue;
        const auto idx = match_bin(spec, r.bin_start);
        if (!idx) {
            throw BinGridMismatch("bin start '" + r.bin_start + "' is not on the grid for " +
                                  want);
        }
        any = true;
        r.value = format_double(probs[*idx]);
    }
    if (!any) {
        throw MissingForecast("no Bin rows to rewrite for target '" + want +
                              "' at location '" + location + "'");
    }
}

std::vector<TruthRecord> parse_truth(const std::string& csv_text, const Season& season) {
    const std::vector<std::string> lines = split_lines(csv_text);
    std::size_t li = 0;
    while (li < lines.size() && trim(lines[li]).empty()) ++li;
    if (li == lines.size()) {
        throw MalformedRow("truth file is empty");
    }

    const std::vector<std::string> header = split_csv_line(lines[li]);
    int c_loc = -1, c_target = -1, c_week = -1, c_value = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string h = lower(header[c]);
        if (h == "location") c_loc = static_cast<int>(c);
        else if (h == "target") c_target = static_cast<int>(c);
        else if (h == "week") c_week = static_cast<int>(c);
        else if (h == "value") c_value = static_cast<int>(c);
    }
    if (c_loc < 0 || c_target < 0 || c_value < 0) {
        throw MalformedRow("truth header must carry Location, Target, and Value columns");
    }

    std::vector<TruthRecord> out;
    for (++li; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const std::vector<std::string> f = split_csv_line(lines[li]);
        if (f.size() != header.size()) {
            throw MalformedRow("truth row " + std::to_string(li + 1) + " has " +
                               std::to_string(f.size()) + " fields, expected " +
                               std::to_string(header.size()));
        }

        TruthRecord rec;
        rec.location = f[static_cast<std::size_t>(c_loc)];
        const std::string& target_text = f[static_cast<std::size_t>(c_target)];
        const auto id = parse_target_name(target_text);
        if (!id) {
            throw UnknownTarget("unknown target '" + target_text + "' in truth row " +
                                std::to_string(li + 1));
        }
        rec.target_id = *id;

        if (c_week >= 0) {
            const std::string& wtext = f[static_cast<std::size_t>(c_week)];
            if (!wtext.empty()) {
                rec.issue_week = parse_week_label(wtext, season);
            }
        }

        const std::string& vtext = f[static_cast<std::size_t>(c_value)];
        if (is_week_target(*id)) {
            if (ci_equal(vtext, "none")) {
                rec.observed = Observation::of_none();
            } else {
                rec.observed = Observation::of_week(parse_week_label(vtext, season));
            }
        } else {
            double v = 0.0;
            if (!parse_double(vtext, v)) {
                throw MalformedRow("non-numeric truth Value '" + vtext + "' in row " +
                                   std::to_string(li + 1));
            }
            rec.observed = Observation::of_value(v);
        }
        rec.resolved_bin = outcome_to_bin(rec.observed, target_spec(*id, season));
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TruthRecord> load_truth_file(const std::string& path, const Season& season) {
    return parse_truth(read_file(path), season);
}

} // namespace mbscore
