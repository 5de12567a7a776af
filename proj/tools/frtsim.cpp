// frtsim command-line driver.
//
// Exit codes: 0 ok, 1 verification failed or inconclusive, 2 usage, 3 input error,
// 4 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "frtsim/coordination.hpp"
#include "frtsim/error.hpp"
#include "frtsim/plot.hpp"
#include "frtsim/report.hpp"
#include "frtsim/scenario.hpp"
#include "frtsim/simulation.hpp"
#include "frtsim/trace.hpp"

namespace fs = std::filesystem;
using namespace frtsim;

namespace {

enum Exit { kOk = 0, kVerifyFail = 1, kUsage = 2, kInput = 3, kNumerical = 4 };

struct Overrides {
    double dt = 0.0;
    int decimate = 0;
    double duration = 0.0;
    double k_gfl = -1.0;
};

ScenarioFile load(const std::string& path, const Overrides& o) {
    std::vector<std::string> warnings;
    ScenarioFile s = load_scenario(path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    if (o.dt > 0.0) {
        if (o.dt > 1e-3) throw InputError("--dt must not exceed 0.001 s");
        s.input.config.dt = o.dt;
    }
    if (o.decimate > 0) s.input.config.decimate = o.decimate;
    if (o.duration > 0.0) s.input.config.duration = o.duration;
    if (o.k_gfl >= 0.0) {
        s.coordination.auto_gain = false;
        s.coordination.k_gfl_mw_per_hz = o.k_gfl;
        apply_coordination(s);
    }
    return s;
}

fs::path output_dir(const std::string& flag, const ScenarioFile& s) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("FRTSIM_OUTPUT_DIR"); env && *env) return fs::path(env) / s.metadata.name;
    return fs::path("out") / (s.metadata.name.empty() ? "scenario" : s.metadata.name);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
}

void write_run_outputs(const fs::path& dir, const ScenarioFile& s, const RunResult& r) {
    fs::create_directories(dir);
    std::ostringstream trace, events;
    r.trace.write_csv(trace);
    write_event_csv(events, r.markers);
    write_file(dir / "trace.csv", trace.str());
    write_file(dir / "events.csv", events.str());
    write_file(dir / "scenario.yaml", dump_scenario(s));
}

int cmd_run(const std::string& path, const std::string& out_flag, const Overrides& o) {
    const ScenarioFile s = load(path, o);
    const RunResult r = run_scenario(s.input);
    const fs::path dir = output_dir(out_flag, s);
    write_run_outputs(dir, s, r);
    std::printf("%s: %zu steps, %zu trace rows -> %s\n", s.metadata.name.c_str(), r.stats.steps, r.trace.rows.size(),
                dir.string().c_str());
    std::printf("max |I| (pu):");
    std::printf(" %s=%.6f", s.input.gfm.id.c_str(), r.stats.max_current[0]);
    for (std::size_t i = 0; i < s.input.gfl.size(); ++i) {
        std::printf(" %s=%.6f", s.input.gfl[i].id.c_str(), r.stats.max_current[i + 1]);
    }
    std::printf("\nmax conservation residual: %.3e pu\n", r.stats.max_conservation_residual);
    if (!r.completed) {
        std::fprintf(stderr, "numerical failure: %s\n", r.failure.c_str());
        return kNumerical;
    }
    return kOk;
}

void print_plan_yaml(const ScenarioFile& s, const DispatchPlan& plan) {
    const double k = s.coordination.k_gfl_mw_per_hz;
    std::cout << "scenario: " << s.metadata.name << '\n'
              << "p_exp_mw: " << format_number(plan.p_exp_mw) << '\n'
              << "p_gfm_nom_mw: " << format_number(plan.p_gfm_nom_mw) << '\n'
              << "p_gfm_0_mw: " << format_number(plan.p_gfm_0_mw) << '\n'
              << "gfm_limit_mw: " << format_number(plan.gfm_limit_mw()) << '\n'
              << "n_wf: " << plan.n_wf << '\n'
              << "surplus_mw: " << format_number(plan.surplus_mw()) << '\n'
              << "max_frequency_rise_hz: "
              << format_number(max_frequency_deviation(plan, s.coordination.gain_formula)) << '\n'
              << "k_gfl_mw_per_hz: " << format_number(k) << '\n'
              << "auto_gain: " << (s.coordination.auto_gain ? "true" : "false") << '\n'
              << "contingencies:\n";
    for (const auto& c : check_n1_survivability(plan, k)) {
        const auto& p = c.prediction;
        std::cout << "  - label: \"" << c.label << "\"\n"
                  << "    tripped_export_mw: " << format_number(c.tripped_export_mw) << '\n'
                  << "    frequency_hz: " << format_number(p.frequency_hz) << '\n'
                  << "    gfm_export_mw: " << format_number(p.gfm_export_mw) << '\n'
                  << "    feasible: " << (p.feasible ? "true" : "false") << '\n'
                  << "    wf_outputs_mw: [";
        for (std::size_t i = 0; i < p.wf_outputs_mw.size(); ++i) {
            std::cout << (i ? ", " : "") << format_number(p.wf_outputs_mw[i]);
        }
        std::cout << "]\n";
    }
}

int cmd_plan(const std::string& path, const std::string& format) {
    const ScenarioFile s = load(path, {});
    const DispatchPlan plan = dispatch_plan(s);
    if (format == "yaml") {
        print_plan_yaml(s, plan);
        return kOk;
    }
    const double k = s.coordination.k_gfl_mw_per_hz;
    std::printf("scenario:           %s\n", s.metadata.name.c_str());
    std::printf("GFL link export:    %.6g MW\n", plan.p_exp_mw);
    std::printf("GFM nominal/limit:  %.6g / %.6g MW (pre-fault %.6g MW)\n", plan.p_gfm_nom_mw, plan.gfm_limit_mw(),
                plan.p_gfm_0_mw);
    std::printf("surplus on full trip: %.6g MW over %d wind farms\n", std::max(0.0, plan.surplus_mw()), plan.n_wf);
    std::printf("max frequency rise: %.6g Hz\n", max_frequency_deviation(plan, s.coordination.gain_formula));
    std::printf("WF droop gain:      %.6g MW/Hz (%s)\n", k, s.coordination.auto_gain ? "auto" : "fixed");
    std::printf("\n%-40s %10s %10s %12s %9s\n", "contingency", "trip MW", "f (Hz)", "GFM MW", "feasible");
    for (const auto& c : check_n1_survivability(plan, k)) {
        std::printf("%-40s %10.6g %10.6g %12.6g %9s\n", c.label.c_str(), c.tripped_export_mw,
                    c.prediction.frequency_hz, c.prediction.gfm_export_mw, c.prediction.feasible ? "yes" : "NO");
        for (std::size_t i = 0; i < c.prediction.wf_outputs_mw.size(); ++i) {
            std::printf("    WF %zu: %.6g MW (curtailed %.6g MW)\n", i + 1, c.prediction.wf_outputs_mw[i],
                        c.prediction.delta_p_mw[i]);
        }
    }
    return kOk;
}

int cmd_verify(const std::string& path, const std::string& out_flag, const Overrides& o) {
    const ScenarioFile s = load(path, o);
    const RunResult r = run_scenario(s.input);
    if (!out_flag.empty()) write_run_outputs(out_flag, s, r);
    const RunReport report = emit_run_report(s, r);
    write_report(std::cout, report);
    return report.verdict == Verdict::Pass ? kOk : kVerifyFail;
}

int cmd_dump_ybus(const std::string& path, const std::string& out) {
    ScenarioFile s = load(path, {});
    const ComplexMatrix& y = s.input.network.admittance();
    std::ostringstream os;
    os << "row,col,g,b\n";
    const auto& buses = s.input.network.buses();
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            if (y(i, j) == Complex{}) continue;
            os << buses[static_cast<std::size_t>(i)].id << ',' << buses[static_cast<std::size_t>(j)].id << ','
               << format_number(y(i, j).real()) << ',' << format_number(y(i, j).imag()) << '\n';
        }
    }
    if (out.empty()) {
        std::cout << os.str();
    } else {
        write_file(out, os.str());
    }
    return kOk;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int cmd_plot(const std::string& trace_path, const std::vector<std::string>& column_groups,
             const std::string& events_path, const std::string& out, const std::string& title, double t0, double t1) {
    std::ifstream in(trace_path);
    if (!in) throw InputError("cannot open trace '" + trace_path + "'");
    const Trace trace = Trace::read_csv(in);
    std::vector<PlotPanel> panels;
    for (const auto& group : column_groups) {
        PlotPanel p;
        p.columns = split(group, ',');
        for (const auto& c : p.columns) p.title += (p.title.empty() ? "" : ", ") + c;
        panels.push_back(p);
    }
    if (panels.empty()) panels = default_panels(trace);
    PlotOptions opt;
    opt.title = title;
    opt.t_begin = t0;
    opt.t_end = t1;
    if (!events_path.empty()) {
        std::ifstream ev(events_path);
        if (!ev) throw InputError("cannot open events '" + events_path + "'");
        std::string line;
        std::getline(ev, line);
        while (std::getline(ev, line)) {
            const auto cells = split(line, ',');
            if (cells.size() >= 2) opt.markers.push_back({std::stod(cells[0]), cells[1], cells.size() > 2 ? cells[2] : ""});
        }
    }
    std::ostringstream svg;
    write_svg(svg, trace, panels, opt);
    if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
    write_file(out, svg.str());
    std::printf("wrote %s (%zu panels)\n", out.c_str(), panels.size());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offshore AC island FRT coordination simulator"};
    app.require_subcommand(1);

    std::string scenario, out, trace_path, events_path, title, format = "table";
    std::vector<std::string> columns;
    Overrides ov;
    double t0 = -1.0, t1 = -1.0;

    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--dt", ov.dt, "Step size in seconds (at most 0.001)");
        sub->add_option("--decimate", ov.decimate, "Steps per trace row");
        sub->add_option("--duration", ov.duration, "Simulated duration in seconds");
        sub->add_option("--k-gfl", ov.k_gfl, "Override the WF droop gain in MW/Hz (disables auto_gain)");
    };

    auto* run = app.add_subcommand("run", "Simulate a scenario and write trace.csv, events.csv, scenario.yaml");
    run->add_option("scenario", scenario, "Scenario YAML")->required();
    run->add_option("-o,--output", out, "Output directory (default: $FRTSIM_OUTPUT_DIR/<name> or out/<name>)");
    add_overrides(run);

    auto* plan = app.add_subcommand("plan", "Print the droop gains and the N-1 report");
    plan->add_option("scenario", scenario, "Scenario YAML")->required();
    plan->add_option("--format", format, "table or yaml")->check(CLI::IsMember({"table", "yaml"}));

    auto* verify = app.add_subcommand("verify", "Run and compare the endpoint against its reference");
    verify->add_option("scenario", scenario, "Scenario YAML")->required();
    verify->add_option("-o,--output", out, "Also write the run outputs to this directory");
    add_overrides(verify);

    auto* ybus = app.add_subcommand("dump-ybus", "Write the nodal admittance matrix as CSV");
    ybus->add_option("scenario", scenario, "Scenario YAML")->required();
    ybus->add_option("-o,--output", out, "CSV file (default: stdout)");

    auto* plot = app.add_subcommand("plot", "Render trace columns to SVG");
    plot->add_option("trace", trace_path, "Trace CSV")->required();
    plot->add_option("--columns", columns, "Comma-separated columns for one panel; repeat for more panels");
    plot->add_option("--events", events_path, "Event marker CSV");
    plot->add_option("--title", title, "Figure title");
    plot->add_option("--t0", t0, "Start time");
    plot->add_option("--t1", t1, "End time");
    plot->add_option("-o,--output", out, "SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return cmd_run(scenario, out, ov);
        if (*plan) return cmd_plan(scenario, format);
        if (*verify) return cmd_verify(scenario, out, ov);
        if (*ybus) return cmd_dump_ybus(scenario, out);
        if (*plot) return cmd_plot(trace_path, columns, events_path, out, title, t0, t1);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const InitializationError& e) {
        std::cerr << "initialization failed: " << e.what() << '\n';
        return kInput;
    } catch (const Error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInput;
    }
    return kUsage;
}
