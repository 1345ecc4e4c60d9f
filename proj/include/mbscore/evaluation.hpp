#pragma once

#include "mbscore/flusight.hpp"
#include "mbscore/hedging.hpp"
#include "mbscore/scoring.hpp"

#include <array>
#include <string>
#include <vector>

namespace mbscore {

/// The issue weeks whose forecasts of one target count toward the seasonal
/// average. Weeks are in season order and unique.
struct EvaluationWindow {
    TargetId target_id = TargetId::wili_1wk;
    std::vector<EpiWeek> included_issue_weeks;
};

struct ScoreCell {
    /// Mean score over the included weeks; -inf propagates, NaN when the
    /// target has no window.
    double mean = 0.0;
    int count = 0;
};

/// One table row: a labeled variant's cells in kAllTargets order.
struct ScoreRow {
    std::string label;
    std::array<ScoreCell, 7> cells{};
};

/// Original-vs-hedged comparison; gains are hedged minus original per
/// target, filled by compare_table.
struct ScoreTable {
    std::vector<ScoreRow> rows;
    std::vector<double> gains;
};

/// Scores one forecast vector on its target grid. The multibin window runs
/// over the grid's ordered bins only; the onset "none" bin is isolated, so
/// an observed "none" scores log of its own mass and week windows never
/// include it. A negative rule.d resolves to spec.d.
double target_score(const TargetSpec& spec,
                    const std::vector<double>& probs,
                    std::size_t outcome_bin,
                    const ScoreRule& rule);

struct PerForecastScore {
    std::string team;
    std::string location;
    TargetId target_id = TargetId::wili_1wk;
    EpiWeek issue_week{};
    double score = 0.0;
};

/// Scores every (target, included issue week) pair of the windows, in
/// window order. Exactly one forecast record must match each pair and a
/// truth row must resolve it (a week-specific row for week-ahead targets,
/// otherwise a season-level row).
std::vector<PerForecastScore> score_season(const std::vector<ForecastRecord>& forecasts,
                                           const std::vector<TruthRecord>& truth,
                                           const std::vector<EvaluationWindow>& windows,
                                           const ScoreRule& rule,
                                           const Season& season);

/// Per-target mean of score_season. A window with no weeks is refused
/// (MissingForecast); a target with no window gets an empty cell.
ScoreRow evaluate_season(const std::vector<ForecastRecord>& forecasts,
                         const std::vector<TruthRecord>& truth,
                         const std::vector<EvaluationWindow>& windows,
                         const ScoreRule& rule,
                         const Season& season,
                         const std::string& label = "original");

/// Result of hedging one forecast on its target grid.
struct TargetHedge {
    CategoricalForecast g;
    double expected_gain = 0.0;
    HedgeResult::Method method = HedgeResult::Method::iterative;
    int iterations = 0;
    bool converged = true;
};

/// Optimal hedge for the target's own d, mapped back to the original grid
/// (padding added for regularity carries no mass in the optimum). The onset
/// target decomposes: the isolated "none" bin keeps its probability exactly
/// and the week block is hedged conditionally.
TargetHedge hedge_forecast(const TargetSpec& spec,
                           const CategoricalForecast& f,
                           const OptimizerConfig& cfg = {});

/// hedge_forecast applied to every record, preserving order and metadata.
std::vector<ForecastRecord> hedge_season(const std::vector<ForecastRecord>& forecasts,
                                         const Season& season,
                                         const OptimizerConfig& cfg = {});

/// Two-row table plus per-target gains (hedged minus original). The rows
/// must have identical per-target counts.
ScoreTable compare_table(const ScoreRow& original, const ScoreRow& hedged);

/// Window-derivation rules approximating the FluSight evaluation procedure:
/// timing targets count until shortly after their event is decided, and a
/// week-ahead forecast counts when its target week falls in the season's
/// active stretch.
struct WindowRules {
    /// Onset forecasts count for issue weeks up to onset + this many weeks.
    int onset_grace = 6;
    /// Peak week and intensity count up to peak + this many weeks.
    int peak_grace = 6;
    /// Week-ahead forecasts count when target week >= onset - this.
    int weekahead_before_onset = 4;
    /// ... and target week <= peak + this.
    int weekahead_after_peak = 3;
};

/// Builds windows for all seven targets from season-level truth (onset and
/// peak week) and the available issue weeks. An onset of "none" lifts the
/// onset-based bounds.
std::vector<EvaluationWindow> derive_windows(const std::vector<TruthRecord>& truth,
                                             const std::vector<EpiWeek>& issue_weeks,
                                             const Season& season,
                                             const std::string& location,
                                             const WindowRules& rules = {});

/// Windows as data: CSV with columns Target,Issue_week, one row per
/// included week, grouped in order of first appearance.
std::vector<EvaluationWindow> parse_windows(const std::string& csv_text, const Season& season);
std::vector<EvaluationWindow> load_windows_file(const std::string& path, const Season& season);
std::string serialize_windows(const std::vector<EvaluationWindow>& windows);

/// Fixed-format renderings; byte-stable across runs on equal inputs.
std::string render_table_text(const ScoreTable& table, int precision = 3);
std::string render_table_csv(const ScoreTable& table, int precision = 6);
std::string render_score_log_csv(const std::vector<PerForecastScore>& original,
                                 const std::vector<PerForecastScore>& hedged,
                                 int precision = 6);

} // namespace mbscore
