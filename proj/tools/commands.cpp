#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gfmlab/analysis.hpp"
#include "gfmlab/engine.hpp"
#include "gfmlab/errors.hpp"
#include "gfmlab/scenario.hpp"
#include "gfmlab/trace.hpp"
#include "svg_plot.hpp"

namespace gfm::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string available_names() {
    std::string names;
    for (const auto& b : builtin_scenarios()) {
        names += (names.empty() ? "" : ", ") + b.name;
    }
    return names;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Builtin name first, then a JSON config path.
Scenario resolve_scenario(const std::string& name_or_path) {
    for (const auto& b : builtin_scenarios()) {
        if (b.name == name_or_path) {
            return b.scenario;
        }
    }
    if (fs::is_regular_file(name_or_path)) {
        return scenario_from_json(read_file(name_or_path));
    }
    throw UsageError("unknown scenario '" + name_or_path + "'; builtin scenarios: " + available_names() +
                     " (or pass a JSON config path)");
}

Scenario resolve_base(const std::string& name) {
    return name == "table1" ? table1_scenario() : resolve_scenario(name);
}

std::string parameter_path(const std::string& p) { return p == "rocof" ? "profile.rocof" : p; }

/// Shared knobs of run and sweep.
struct RunKnobs {
    std::optional<double> dt;
    std::optional<double> t_end;
    std::vector<std::string> overrides;
    double window = kDefaultMetricsWindow;
    bool seedless = false;

    void add_to(CLI::App& app) {
        app.add_option("--dt", dt, "Integration step in seconds");
        app.add_option("--t-end", t_end, "Recorded duration in seconds");
        app.add_option("--set", overrides, "Override a numeric field, KEY=VALUE (repeatable)");
        app.add_option("--window", window, "Trailing metrics window in seconds");
        app.add_flag("--seedless", seedless, "Accepted for scripts; every run is deterministic");
    }

    Scenario apply(Scenario s) const {
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw UsageError("--set expects KEY=VALUE, got '" + kv + "'");
            }
            double value = 0.0;
            try {
                std::size_t used = 0;
                value = std::stod(kv.substr(eq + 1), &used);
                if (used != kv.size() - eq - 1) {
                    throw std::invalid_argument(kv);
                }
            } catch (const std::exception&) {
                throw UsageError("--set value is not a number: '" + kv + "'");
            }
            s = with_parameter(s, parameter_path(kv.substr(0, eq)), value);
        }
        if (dt) {
            s.dt = *dt;
        }
        if (t_end) {
            s.t_end = *t_end;
            s.t_end_auto = false;
        }
        s.validate();
        return s;
    }
};

void write_trace_file(const std::string& path, const Trace& trace) {
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_file_atomically(path, csv.str());
}

int cmd_list(std::ostream& out) {
    for (const auto& b : builtin_scenarios()) {
        out << b.name << "  " << b.description;
        if (!b.rocof_family.empty()) {
            out << "  [rocof:";
            for (double r : b.rocof_family) {
                out << ' ' << num(r);
            }
            out << ']';
        }
        out << '\n';
    }
    return kExitOk;
}

int cmd_run(const std::string& target, const std::string& out_path, const RunKnobs& knobs, std::ostream& out,
            std::ostream& err) {
    const Scenario s = knobs.apply(resolve_scenario(target));
    try {
        const Trace trace = run_scenario(s);
        if (!out_path.empty()) {
            write_trace_file(out_path, trace);
        }
        out << format_report(analyze_trace(trace, std::min(knobs.window, trace.duration())));
        return kExitOk;
    } catch (const DivergedRun& e) {
        if (!out_path.empty()) {
            write_trace_file(out_path, e.partial_trace());
        }
        err << "error: " << e.what() << '\n';
        return kExitDiverged;
    }
}

int cmd_sweep(const std::string& target, const std::string& param, const std::vector<double>& values,
              const std::string& out_dir, const RunKnobs& knobs, std::ostream& out, std::ostream& err) {
    if (values.empty()) {
        throw UsageError("sweep needs at least one value (--values a,b,c)");
    }
    const Scenario base = resolve_scenario(target);
    const std::string path = parameter_path(param);
    std::vector<Scenario> runs;
    for (double v : values) {
        runs.push_back(knobs.apply(with_parameter(base, path, v)));
    }
    fs::create_directories(out_dir);

    const auto results = run_batch(runs);
    std::ostringstream summary;
    summary << "index,value,status,steady_state_mean,peak_to_peak,oscillation_detected,pole_slip_count,max_power,"
               "soc_final,soc_violated,sync_held,trace,error\n";
    int code = kExitOk;
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        const std::string file = base.name + "_" + std::to_string(k) + ".csv";
        std::string status = "ok";
        std::optional<MetricsReport> report;
        if (r.trace) {
            write_trace_file((fs::path(out_dir) / file).string(), *r.trace);
            if (r.diverged) {
                status = "diverged";
                code = kExitDiverged;
            } else {
                report = analyze_trace(*r.trace, std::min(knobs.window, r.trace->duration()));
            }
        } else {
            status = "error";
            code = std::max(code, kExitUsage);
        }
        summary << k << ',' << num(values[k]) << ',' << status;
        if (report) {
            summary << ',' << num(report->steady_state_mean) << ',' << num(report->peak_to_peak) << ','
                    << report->oscillation_detected << ',' << report->pole_slip_count << ','
                    << num(report->max_power) << ',' << num(report->soc_final) << ',' << report->soc_violated << ','
                    << report->sync_held;
        } else {
            summary << ",,,,,,,,";
        }
        std::string error = r.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        summary << ',' << (r.trace ? file : "") << ',' << error << '\n';
        out << path << '=' << num(values[k]) << ": " << status
            << (report ? " max_power=" + num(report->max_power) + " sync_held=" + (report->sync_held ? "true" : "false")
                       : " " + error)
            << '\n';
        if (!r.error.empty()) {
            err << "run " << k << ": " << r.error << '\n';
        }
    }
    write_file_atomically((fs::path(out_dir) / "summary.csv").string(), summary.str());
    return code;
}

GridRegime parse_regime(const std::string& r) {
    if (r == "weak") return GridRegime::weak_grid;
    if (r == "strong") return GridRegime::strong_grid;
    if (r == "exact") return GridRegime::exact;
    throw UsageError("regime must be weak, strong or exact, got '" + r + "'");
}

std::string poly_text(const Polynomial& p) {
    std::string s = "[";
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
        s += (k ? ", " : "") + num(p.coeffs()[k]);
    }
    return s + "]";
}

int cmd_linear(const std::string& regime_name, const std::string& base, const std::string& config,
               std::optional<double> scr, double horizon, const std::string& out_path, std::ostream& out) {
    const GridRegime regime = parse_regime(regime_name);
    Scenario s = config.empty() ? resolve_base(base) : scenario_from_json(read_file(config));
    if (scr) {
        s = with_parameter(s, "circuit.scr", *scr);
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw UsageError("--horizon must be > 0");
    }
    const LinearModel m = build_closed_loop(regime, closed_loop_params(s));
    const auto poles = m.poles();
    const bool stable = m.stable();

    std::ostringstream model;
    model << "regime=" << regime_name << '\n';
    model << "num_ascending=" << poly_text(m.num()) << '\n';
    model << "den_ascending=" << poly_text(m.den()) << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", m.dc_gain());
    model << "dc_gain=" << buf << '\n';
    for (const auto& p : poles) {
        model << "pole=" << num(p.real()) << (p.imag() < 0 ? " - " : " + ") << num(std::abs(p.imag())) << "j\n";
    }
    model << "stable=" << (stable ? "true" : "false") << '\n';
    out << model.str();

    if (!out_path.empty()) {
        std::vector<double> grid;
        const auto n = static_cast<std::size_t>(std::llround(horizon / 1e-3));
        for (std::size_t k = 0; k <= n; ++k) {
            grid.push_back(static_cast<double>(k) * 1e-3);
        }
        const StepResponse step = step_response(m, grid);
        std::ostringstream csv;
        csv << "time_s,value\n";
        for (std::size_t k = 0; k < grid.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", step.values[k]);
            csv << num(grid[k]) << ',' << buf << '\n';
        }
        write_file_atomically(out_path, csv.str());
        write_file_atomically(fs::path(out_path).replace_extension(".model.txt").string(), model.str());
    }
    return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::vector<std::string>& columns, const std::string& out_path,
             const std::string& title, const std::vector<double>& hlines) {
    if (columns.empty()) {
        throw UsageError("plot needs at least one column");
    }
    for (const auto& c : columns) {
        if (std::find(kTraceColumns.begin(), kTraceColumns.end(), c) == kTraceColumns.end()) {
            throw UsageError("unknown column '" + c + "'");
        }
    }
    std::istringstream in(read_file(csv_path));
    const Trace trace = read_trace_csv(in);
    PlotOptions opts;
    opts.title = title;
    opts.hlines = hlines;
    write_file_atomically(out_path, render_svg(trace, columns, opts));
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"gfmlab: grid-forming converter simulator (P-f GFM vs hybrid f-P & Q-V)"};
    app.name("gfmlab");
    app.require_subcommand(1);

    std::string target, out_path, param, out_dir, regime, base = "table1", config, csv, title;
    std::vector<double> values;
    std::vector<std::string> columns;
    std::optional<double> scr;
    double horizon = 10.0;
    RunKnobs run_knobs, sweep_knobs;

    auto* list = app.add_subcommand("list", "List builtin scenarios");

    auto* run = app.add_subcommand("run", "Simulate one scenario, write its trace CSV and print metrics");
    run->add_option("scenario", target, "Builtin name or JSON config path")->required();
    run->add_option("-o,--out", out_path, "Trace CSV path");
    run_knobs.add_to(*run);

    auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
    sweep->add_option("scenario", target, "Builtin name or JSON config path")->required();
    sweep->add_option("parameter", param, "Field path, e.g. rocof, p_ref, hybrid.d")->required();
    sweep->add_option("--values", values, "Comma-separated values")->delimiter(',');
    sweep->add_option("-o,--out", out_dir, "Output directory")->required();
    sweep_knobs.add_to(*sweep);

    auto* linear = app.add_subcommand("linear", "Closed-loop small-signal model of the hybrid power loop");
    linear->add_option("regime", regime, "weak, strong or exact")->required();
    linear->add_option("--base", base, "table1 or a builtin scenario");
    linear->add_option("--config", config, "JSON config instead of --base");
    linear->add_option("--scr", scr, "Short-circuit ratio override");
    linear->add_option("--horizon", horizon, "Step-response duration in seconds");
    linear->add_option("-o,--out", out_path, "Step-response CSV path (model written beside it)");

    auto* plot = app.add_subcommand("plot", "Render trace columns as an SVG line chart");
    plot->add_option("trace", csv, "Trace CSV")->required();
    plot->add_option("-c,--columns", columns, "Columns to plot")->delimiter(',')->required();
    plot->add_option("-o,--out", out_path, "SVG path")->required();
    plot->add_option("--title", title, "Chart title");
    std::vector<double> hlines;
    plot->add_option("--hline", hlines, "Dashed reference line at this y value (repeatable)")->delimiter(',');

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (list->parsed()) return cmd_list(out);
        if (run->parsed()) return cmd_run(target, out_path, run_knobs, out, err);
        if (sweep->parsed()) return cmd_sweep(target, param, values, out_dir, sweep_knobs, out, err);
        if (linear->parsed()) return cmd_linear(regime, base, config, scr, horizon, out_path, out);
        if (plot->parsed()) return cmd_plot(csv, columns, out_path, title, hlines);
    } catch (const DivergedRun& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace gfm::cli
