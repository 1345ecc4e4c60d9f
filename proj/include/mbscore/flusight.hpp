#pragma once

#include "mbscore/epiweek.hpp"
#include "mbscore/forecast.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mbscore {

inline constexpr std::array<TargetId, 7> kAllTargets{
    TargetId::wili_1wk,   TargetId::wili_2wk,  TargetId::wili_3wk, TargetId::wili_4wk,
    TargetId::onset_week, TargetId::peak_week, TargetId::peak_intensity,
};

/// Canonical submission-file target name, e.g. "Season peak percentage".
std::string target_name(TargetId id);

/// Inverse of target_name, case-insensitive. nullopt for unknown names.
std::optional<TargetId> parse_target_name(const std::string& name);

/// Bin grid, window half-width, and season for one target. Week-valued
/// targets use the season's weeks in season order (plus a trailing isolated
/// "none" bin for onset); percentage targets use the 0.1-wide grid up to 13
/// with a final catch-all bin [13, 100].
TargetSpec target_spec(TargetId id, const Season& season);

/// One parsed forecast: a single (team, location, target, issue week)
/// distribution aligned bin-for-bin with its target grid.
struct ForecastRecord {
    std::string team;
    std::string location;
    TargetId target_id = TargetId::wili_1wk;
    EpiWeek issue_week{};
    CategoricalForecast forecast;
};

/// One resolved observation. Week-ahead truths carry the issue week they
/// serve (the observed value is the wILI of issue week + horizon); season
/// targets leave it empty and apply to every issue week.
struct TruthRecord {
    std::string location;
    TargetId target_id = TargetId::wili_1wk;
    std::optional<EpiWeek> issue_week;
    Observation observed{};
    std::size_t resolved_bin = 0;
};

/// One CSV row of a submission file, kept verbatim so files round-trip
/// (Point rows included).
struct SubmissionRow {
    std::string location;
    std::string target;
    std::string type;
    std::string unit;
    std::string bin_start;
    std::string bin_end;
    std::string value;
};

struct Submission {
    std::string team;
    EpiWeek issue_week{};
    std::vector<SubmissionRow> rows;
};

/// Team name and issue week recovered from a submission filename such as
/// "EW50-2016-TeamName.csv" or "EW50-TeamName-2016-12-19.csv". The season
/// resolves bare week numbers to calendar years when the name has neither
/// a year nor a date.
struct SubmissionMeta {
    std::string team;
    EpiWeek issue_week{};
};
SubmissionMeta submission_meta_from_filename(const std::string& filename, const Season& season);

/// Parses submission CSV text into verbatim rows. The header must carry the
/// seven standard columns (case-insensitive); row order is preserved.
Submission parse_submission_rows(const std::string& csv_text);

/// Groups Bin rows into one ForecastRecord per (location, target) pair, in
/// order of first appearance. Point rows are ignored; bins missing from a
/// grid get probability zero; probabilities are renormalized within
/// extract_forecast's submission tolerance (files carry rounding slack).
/// team and issue_week are left default; load_submission_file fills them
/// from the filename.
std::vector<ForecastRecord> parse_submission(const std::string& csv_text, const Season& season);

/// parse_submission on a file's content, with team and issue week taken
/// from the filename.
std::vector<ForecastRecord> load_submission_file(const std::string& path, const Season& season);

/// Row-preserving variants, for rewriting files in place.
Submission load_submission_rows(const std::string& path, const Season& season);
std::string serialize_submission(const Submission& sub);

/// Collects the Bin rows for (location, target) into a forecast on the
/// target's grid. Throws MissingForecast when no Bin rows match,
/// BinGridMismatch for an off-grid bin boundary, DuplicateForecast for a
/// repeated bin, NotNormalized when the sum is off by more than tol. The
/// default tolerance is half a percent: submitted files round bins to a few
/// decimals and routinely land near 1.002, which must still parse, while a
/// sum like 0.9 signals a broken file.
CategoricalForecast extract_forecast(const Submission& sub,
                                     const std::string& location,
                                     const TargetSpec& spec,
                                     double tol = 5e-3);

/// Writes `probs` back into the matching Bin rows' Value fields. The vector
/// must be on the target's grid; rows keep their order and Point rows are
/// untouched.
void replace_forecast(Submission& sub,
                      const std::string& location,
                      const TargetSpec& spec,
                      const std::vector<double>& probs);

/// Parses truth CSV with columns Location,Target[,Week],Value. Week-ahead
/// rows put the issue week they serve in Week; Value is a number for
/// percentage targets and a week label (or "none" for onset) otherwise.
/// Every row's outcome is resolved to a bin index on parse.
std::vector<TruthRecord> parse_truth(const std::string& csv_text, const Season& season);
std::vector<TruthRecord> load_truth_file(const std::string& path, const Season& season);

/// Parses a week written either as "YYYY-EWww" or as a bare number resolved
/// within the season. Throws MalformedRow otherwise.
EpiWeek parse_week_label(const std::string& text, const Season& season);

} // namespace mbscore
