#include "mbscore/errors.hpp"
#include "mbscore/evaluation.hpp"
#include "mbscore/examples.hpp"
#include "mbscore/flusight.hpp"
#include "mbscore/hedging.hpp"
#include "mbscore/scoring.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace mbscore;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct CommonOpts {
    std::string rule = "mblog";
    int d = -1;
    double floor = 0.0;
    std::string format = "text";
    int precision = 3;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool with_rule = true) {
    if (with_rule) {
        cmd->add_option("--rule", o.rule, "Scoring rule: log or mblog")
            ->check(CLI::IsMember({ "log", "mblog" }));
        cmd->add_option("--d", o.d, "Window half-width override (mblog only)");
        cmd->add_option("--floor", o.floor, "Probability floor applied before the log");
    }
    cmd->add_option("--format", o.format, "Output format: text or csv")
        ->check(CLI::IsMember({ "text", "csv" }));
    cmd->add_option("--precision", o.precision, "Decimal places in printed numbers")
        ->check(CLI::Range(0, 17));
}

ScoreRule make_rule(const CommonOpts& o, const CLI::App* cmd) {
    ScoreRule rule;
    rule.kind = o.rule == "log" ? ScoreRule::Kind::log : ScoreRule::Kind::multibin;
    rule.floor = o.floor;
    if (rule.kind == ScoreRule::Kind::log) {
        if (cmd->count("--d") > 0) {
            std::cerr << "warning: --d is ignored with --rule log\n";
        }
        rule.d = -1;
    } else {
        rule.d = o.d;
    }
    return rule;
}

std::string fmt(double v, int precision) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::vector<std::string> expand_csv_paths(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> dir_files;
            for (const auto& e : fs::directory_iterator(p)) {
                if (!e.is_regular_file()) continue;
                std::string ext = e.path().extension().string();
                std::transform(ext.begin(), ext.end(), ext.begin(),
                               [](unsigned char c) { return std::tolower(c); });
                if (ext == ".csv") dir_files.push_back(e.path().string());
            }
            std::sort(dir_files.begin(), dir_files.end());
            files.insert(files.end(), dir_files.begin(), dir_files.end());
        } else {
            files.push_back(p);
        }
    }
    if (files.empty()) {
        throw MalformedRow("no submission files found");
    }
    return files;
}

std::vector<ForecastRecord> load_records(const std::vector<std::string>& files,
                                         const Season& season,
                                         const std::string& location) {
    std::vector<ForecastRecord> recs;
    for (const auto& f : files) {
        for (auto& r : load_submission_file(f, season)) {
            recs.push_back(std::move(r));
        }
    }
    std::erase_if(recs, [&](const ForecastRecord& r) {
        return lower(r.location) != lower(location);
    });
    if (recs.empty()) {
        throw MissingForecast("no forecasts for location '" + location + "'");
    }
    return recs;
}

std::vector<EvaluationWindow> resolve_windows(const std::string& windows_path,
                                              const std::vector<ForecastRecord>& recs,
                                              const std::vector<TruthRecord>& truth,
                                              const Season& season,
                                              const std::string& location) {
    if (!windows_path.empty()) {
        return load_windows_file(windows_path, season);
    }
    std::vector<EpiWeek> weeks;
    for (const auto& r : recs) {
        if (std::find(weeks.begin(), weeks.end(), r.issue_week) == weeks.end()) {
            weeks.push_back(r.issue_week);
        }
    }
    return derive_windows(truth, weeks, season, location);
}

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw MalformedRow("cannot write file: " + path);
    }
    out << content;
}

// ---------------------------------------------------------------- examples

void print_example_text(const WorkedExample& ex, int precision) {
    const CategoricalForecast& f = ex.belief;

    const CategoricalForecast padded = pad_support(f, ex.d);
    const HedgeResult res = optimize_hedged(padded, ex.d, {});
    const CategoricalForecast g = unpad_support(res.g, f.size());

    const std::vector<double> f_blur = blur(f.probs, ex.d);
    const std::vector<double> g_blur = blur(g.probs, ex.d);

    const ScoreRule rule{ ScoreRule::Kind::multibin, ex.d, 0.0 };
    const double honest = expected_score(rule, f, f.probs);
    CategoricalForecast g_full = f;
    g_full.probs = g.probs;
    const double hedged = expected_score(rule, g_full, f.probs);

    std::printf("Example %d: %s\n", ex.number, ex.description.c_str());
    const int w = std::max(precision + 4, 7);
    std::printf("  %-10s", "week");
    for (const auto& l : f.bin_labels) std::printf(" %*s", w, l.c_str());
    std::printf("\n");
    const auto print_series = [&](const char* name, const std::vector<double>& v) {
        std::printf("  %-10s", name);
        for (double x : v) std::printf(" %*s", w, fmt(x, precision).c_str());
        std::printf("\n");
    };
    print_series("F", f.probs);
    print_series("G", g.probs);
    print_series("F blurred", f_blur);
    print_series("G blurred", g_blur);
    std::printf("  expected multibin score (d=%d): honest %s, hedged %s, gain %s\n",
                ex.d, fmt(honest, precision).c_str(), fmt(hedged, precision).c_str(),
                fmt(hedged - honest, precision).c_str());
    std::printf("  method: %s, iterations: %d\n\n",
                res.method == HedgeResult::Method::exact ? "exact deconvolution"
                                                         : "iterative ascent",
                res.iterations);
}

int run_examples(const CommonOpts& o) {
    if (o.format == "csv") {
        std::printf("example,series,bin,value\n");
    }
    for (const auto& ex : worked_examples()) {
        if (o.format == "text") {
            print_example_text(ex, o.precision);
            continue;
        }
        const CategoricalForecast& f = ex.belief;
        const CategoricalForecast padded = pad_support(f, ex.d);
        const HedgeResult res = optimize_hedged(padded, ex.d, {});
        const CategoricalForecast g = unpad_support(res.g, f.size());
        const std::vector<double> f_blur = blur(f.probs, ex.d);
        const std::vector<double> g_blur = blur(g.probs, ex.d);

        const auto emit = [&](const char* series, const std::vector<double>& v) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                std::printf("%d,%s,%s,%s\n", ex.number, series, f.bin_labels[i].c_str(),
                            fmt(v[i], o.precision).c_str());
            }
        };
        emit("F", f.probs);
        emit("G", g.probs);
        emit("F_blurred", f_blur);
        emit("G_blurred", g_blur);

        const ScoreRule rule{ ScoreRule::Kind::multibin, ex.d, 0.0 };
        CategoricalForecast g_full = f;
        g_full.probs = g.probs;
        std::printf("%d,expected_honest,,%s\n", ex.number,
                    fmt(expected_score(rule, f, f.probs), o.precision).c_str());
        std::printf("%d,expected_hedged,,%s\n", ex.number,
                    fmt(expected_score(rule, g_full, f.probs), o.precision).c_str());
    }
    return 0;
}

// -------------------------------------------------------------------- blur

int run_blur(const std::string& input, int d, const CommonOpts& o) {
    std::string text;
    if (input.empty() || input == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        text = buf.str();
    } else {
        std::ifstream in(input, std::ios::binary);
        if (!in) {
            throw MalformedRow("cannot open file: " + input);
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    for (char& c : text) {
        if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream in(text);
    std::vector<double> probs;
    double v;
    while (in >> v) probs.push_back(v);

    const CategoricalForecast f = validate_forecast(std::move(probs));
    const std::vector<double> blurred = blur(f.probs, d);
    if (o.format == "csv") {
        std::printf("bin,original,blurred\n");
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::printf("%s,%s,%s\n", f.bin_labels[i].c_str(),
                        fmt(f.probs[i], o.precision).c_str(),
                        fmt(blurred[i], o.precision).c_str());
        }
    } else {
        const int w = std::max(o.precision + 4, 8);
        std::printf("%-6s %*s %*s\n", "bin", w, "original", w, "blurred");
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::printf("%-6s %*s %*s\n", f.bin_labels[i].c_str(), w,
                        fmt(f.probs[i], o.precision).c_str(), w,
                        fmt(blurred[i], o.precision).c_str());
        }
    }
    return 0;
}

// ------------------------------------------------------------------- score

int run_score(const std::vector<std::string>& paths,
              const std::string& truth_path,
              const std::string& windows_path,
              const std::string& location,
              const std::string& scores_out,
              const CommonOpts& o,
              const CLI::App* cmd) {
    const Season season{};
    const ScoreRule rule = make_rule(o, cmd);
    const std::vector<std::string> files = expand_csv_paths(paths);
    const std::vector<ForecastRecord> recs = load_records(files, season, location);
    const std::vector<TruthRecord> truth = load_truth_file(truth_path, season);
    const std::vector<EvaluationWindow> windows =
        resolve_windows(windows_path, recs, truth, season, location);

    const std::vector<PerForecastScore> scores =
        score_season(recs, truth, windows, rule, season);
    const ScoreRow row = evaluate_season(recs, truth, windows, rule, season, "score");

    ScoreTable table;
    table.rows = { row };

    if (o.format == "csv") {
        std::cout << render_table_csv(table, o.precision);
    } else {
        std::printf("per-forecast scores (%zu):\n", scores.size());
        for (const auto& s : scores) {
            std::printf("  %-12s %-24s %s  %s\n", to_string(s.issue_week).c_str(),
                        target_name(s.target_id).c_str(), s.team.c_str(),
                        fmt(s.score, o.precision).c_str());
        }
        std::printf("\n%s", render_table_text(table, o.precision).c_str());
    }
    if (!scores_out.empty()) {
        write_or_print(scores_out, render_score_log_csv(scores, {}, o.precision));
    }
    return 0;
}

// ------------------------------------------------------------------- hedge

int run_hedge(const std::string& path,
              const std::string& output,
              const std::string& location_filter,
              const std::string& target_filter,
              const OptimizerConfig& cfg,
              bool strict,
              const CommonOpts& o) {
    const Season season{};
    Submission sub = load_submission_rows(path, season);

    // (location, target) pairs with Bin rows, in order of first appearance;
    // Point-only pairs carry no distribution to hedge.
    std::vector<std::pair<std::string, TargetId>> pairs;
    for (const auto& r : sub.rows) {
        if (lower(r.type) != "bin") continue;
        const auto id = parse_target_name(r.target);
        if (!id) {
            throw UnknownTarget("unknown target '" + r.target + "'");
        }
        std::pair<std::string, TargetId> key{ r.location, *id };
        if (std::find(pairs.begin(), pairs.end(), key) == pairs.end()) {
            pairs.push_back(std::move(key));
        }
    }

    std::ostream& report = output.empty() ? std::cerr : std::cout;
    report << "location,target,method,iterations,converged,expected_gain\n";
    bool all_converged = true;
    for (const auto& [location, id] : pairs) {
        if (!location_filter.empty() &&
            lower(location) != lower(location_filter)) {
            continue;
        }
        if (!target_filter.empty() &&
            parse_target_name(target_filter) != std::optional<TargetId>(id)) {
            continue;
        }
        const TargetSpec spec = target_spec(id, season);
        const CategoricalForecast f = extract_forecast(sub, location, spec);
        const TargetHedge h = hedge_forecast(spec, f, cfg);
        replace_forecast(sub, location, spec, h.g.probs);
        all_converged = all_converged && h.converged;
        report << location << ',' << target_name(id) << ','
               << (h.method == HedgeResult::Method::exact ? "exact" : "iterative") << ','
               << h.iterations << ',' << (h.converged ? "yes" : "no") << ','
               << fmt(h.expected_gain, std::max(o.precision, 6)) << '\n';
    }

    write_or_print(output, serialize_submission(sub));
    if (strict && !all_converged) {
        std::cerr << "error: optimizer did not converge within the iteration budget\n";
        return 2;
    }
    return 0;
}

// ------------------------------------------------------------------ table1

int run_table1(const std::string& data_dir,
               const std::string& truth_path,
               const std::string& windows_path,
               const std::string& location,
               const std::string& scores_out,
               const OptimizerConfig& cfg,
               bool strict,
               const CommonOpts& o,
               const CLI::App* cmd) {
    const Season season{};
    const ScoreRule rule = make_rule(o, cmd);
    const std::vector<std::string> files = expand_csv_paths({ data_dir });
    const std::vector<ForecastRecord> recs = load_records(files, season, location);
    const std::vector<TruthRecord> truth = load_truth_file(truth_path, season);
    const std::vector<EvaluationWindow> windows =
        resolve_windows(windows_path, recs, truth, season, location);

    bool all_converged = true;
    std::vector<ForecastRecord> hedged;
    hedged.reserve(recs.size());
    for (const auto& rec : recs) {
        const TargetSpec spec = target_spec(rec.target_id, season);
        const TargetHedge h = hedge_forecast(spec, rec.forecast, cfg);
        all_converged = all_converged && h.converged;
        ForecastRecord hr = rec;
        hr.forecast = h.g;
        hedged.push_back(std::move(hr));
    }

    const ScoreRow orig = evaluate_season(recs, truth, windows, rule, season, "original");
    const ScoreRow opt = evaluate_season(hedged, truth, windows, rule, season, "optimized");
    const ScoreTable table = compare_table(orig, opt);

    if (o.format == "csv") {
        std::cout << render_table_csv(table, o.precision);
    } else {
        std::cout << render_table_text(table, o.precision);
    }
    if (!scores_out.empty()) {
        const auto s_orig = score_season(recs, truth, windows, rule, season);
        const auto s_hedge = score_season(hedged, truth, windows, rule, season);
        write_or_print(scores_out, render_score_log_csv(s_orig, s_hedge, o.precision));
    }
    if (strict && !all_converged) {
        std::cerr << "error: optimizer did not converge within the iteration budget\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{ "Scoring and hedging of categorical forecasts "
                  "(log score and multibin log score)" };
    app.require_subcommand(1);

    // score
    auto* score_cmd = app.add_subcommand("score", "Score submission files against truth");
    std::vector<std::string> score_paths;
    std::string score_truth, score_windows, score_location = "US National", score_out;
    CommonOpts score_opts;
    score_cmd->add_option("submissions", score_paths, "Submission CSV files or directories")
        ->required();
    score_cmd->add_option("--truth", score_truth, "Truth CSV path")->required();
    score_cmd->add_option("--windows", score_windows, "Evaluation windows CSV path");
    score_cmd->add_option("--location", score_location, "Location to score");
    score_cmd->add_option("--scores-out", score_out, "Write the per-forecast score log CSV here");
    add_common_flags(score_cmd, score_opts);

    // hedge
    auto* hedge_cmd = app.add_subcommand("hedge", "Optimize a submission for the multibin rule");
    std::string hedge_path, hedge_output, hedge_location, hedge_target;
    OptimizerConfig hedge_cfg;
    bool hedge_strict = false;
    CommonOpts hedge_opts;
    hedge_cmd->add_option("submission", hedge_path, "Submission CSV to hedge")->required();
    hedge_cmd->add_option("--output", hedge_output,
                          "Hedged submission path (stdout when omitted)");
    hedge_cmd->add_option("--location", hedge_location, "Only hedge this location");
    hedge_cmd->add_option("--target", hedge_target, "Only hedge this target");
    hedge_cmd->add_option("--max-iter", hedge_cfg.max_iterations, "Iteration budget");
    hedge_cmd->add_option("--tol", hedge_cfg.rel_tol, "Relative convergence tolerance");
    hedge_cmd->add_flag("--strict", hedge_strict, "Exit 2 if the optimizer fails to converge");
    add_common_flags(hedge_cmd, hedge_opts, false);

    // blur
    auto* blur_cmd = app.add_subcommand("blur", "Moving-average smoothing of a probability vector");
    std::string blur_input;
    int blur_d = 1;
    CommonOpts blur_opts;
    blur_cmd->add_option("input", blur_input, "File of probabilities (stdin when omitted)");
    blur_cmd->add_option("--d", blur_d, "Window half-width")->required();
    add_common_flags(blur_cmd, blur_opts, false);

    // examples
    auto* ex_cmd = app.add_subcommand("examples", "Reproduce the bundled worked examples");
    CommonOpts ex_opts;
    add_common_flags(ex_cmd, ex_opts, false);

    // table1
    auto* t1_cmd = app.add_subcommand(
        "table1", "Season evaluation: original-vs-optimized average scores");
    std::string t1_data, t1_truth, t1_windows, t1_location = "US National", t1_out;
    OptimizerConfig t1_cfg;
    bool t1_strict = false;
    CommonOpts t1_opts;
    t1_cmd->add_option("--data", t1_data, "Directory of submission CSVs")->required();
    t1_cmd->add_option("--truth", t1_truth, "Truth CSV path")->required();
    t1_cmd->add_option("--windows", t1_windows, "Evaluation windows CSV path");
    t1_cmd->add_option("--location", t1_location, "Location to evaluate");
    t1_cmd->add_option("--scores-out", t1_out, "Write the per-forecast score log CSV here");
    t1_cmd->add_option("--max-iter", t1_cfg.max_iterations, "Iteration budget");
    t1_cmd->add_option("--tol", t1_cfg.rel_tol, "Relative convergence tolerance");
    t1_cmd->add_flag("--strict", t1_strict, "Exit 2 if the optimizer fails to converge");
    add_common_flags(t1_cmd, t1_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*score_cmd) {
            return run_score(score_paths, score_truth, score_windows, score_location,
                             score_out, score_opts, score_cmd);
        }
        if (*hedge_cmd) {
            return run_hedge(hedge_path, hedge_output, hedge_location, hedge_target,
                             hedge_cfg, hedge_strict, hedge_opts);
        }
        if (*blur_cmd) {
            return run_blur(blur_input, blur_d, blur_opts);
        }
        if (*ex_cmd) {
            return run_examples(ex_opts);
        }
        if (*t1_cmd) {
            return run_table1(t1_data, t1_truth, t1_windows, t1_location, t1_out,
                              t1_cfg, t1_strict, t1_opts, t1_cmd);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
