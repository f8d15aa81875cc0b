#include "cli_app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "hiercon/delay.hpp"
#include "hiercon/powershare.hpp"
#include "hiercon/scenario_io.hpp"
#include "hiercon/spectral.hpp"

namespace hiercon::cli {

int exit_code(Status status, std::optional<Regime> regime, bool allow_unstable) {
    switch (status) {
        case Status::IoError:
        case Status::ParseError:
            return kExitIo;
        case Status::InvalidScenario:
            return kExitInvalid;
        case Status::Ok:
            break;
    }
    if (regime == Regime::Diverging && !allow_unstable) {
        return kExitDiverged;
    }
    return kExitOk;
}

int batch_exit_code(const std::vector<int>& codes) {
    return codes.empty() ? kExitOk : *std::max_element(codes.begin(), codes.end());
}

namespace {

struct Failure {
    Status status;
    std::string message;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) {
        throw Failure{Status::IoError, "cannot write " + path};
    }
    f << text;
    if (!f) {
        throw Failure{Status::IoError, "error writing " + path};
    }
}

// A bare `fig1` that is not an existing file names the built-in scenario.
Scenario builtin_fig1() {
    Scenario s;
    s.name = "fig1";
    s.spec = fig1();
    s.fleet = fig1_fleet();
    return s;
}

Scenario load_checked(const std::string& path) {
    Scenario s;
    try {
        s = path == "fig1" && !std::filesystem::exists(path) ? builtin_fig1() : load_scenario(path);
    } catch (const SchemaError& e) {
        throw Failure{Status::ParseError, path + ": schema error at " + e.what()};
    } catch (const std::exception& e) {
        throw Failure{Status::IoError, e.what()};
    }
    const auto violations = validate_scenario(s);
    if (!violations.empty()) {
        std::string msg = path + ": invalid scenario";
        for (const auto& v : violations) {
            msg += "\n  " + v.describe();
        }
        throw Failure{Status::InvalidScenario, msg};
    }
    return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct SimRun {
    Scenario scenario;
    LayerMatrices matrices;
    SimOptions options;
    Trajectory trajectory;
    Json report;
};

SimRun simulate(const Options& opts, const std::string& path) {
    SimRun run;
    run.scenario = load_checked(path);
    const auto& s = run.scenario;
    run.matrices = assemble(s.spec);
    run.options = sim_options(s);
    if (opts.step) {
        run.options.step = opts.step;
    }
    if (opts.t_end) {
        run.options.t_end = *opts.t_end;
    }
    std::string x0_source;
    const Vector x0 = initial_state(s, &x0_source);
    const auto delays = effective_delays(s.spec);
    const auto spectral = analyze_spectrum(run.matrices, x0);
    const auto bounds = stability_verdict(s.spec, spectral);
    spdlog::info("{}: delay verdict {}", path, to_string(bounds.verdict));

    try {
        run.trajectory = integrate(run.matrices, delays, x0, run.options);
    } catch (const DomainError& e) {
        throw Failure{Status::InvalidScenario, path + ": " + e.what()};
    }
    const auto& traj = run.trajectory;

    Json report = Json::object();
    report["scenario"] = s.name ? Json(*s.name) : Json(path);
    if (!s.sim) {
        report["note"] = "no sim block; defaults applied";
    }
    report["initial_state_source"] = x0_source;
    report["options"] = Json{{"step", traj.step},
                             {"t_end", run.options.t_end},
                             {"tolerance", run.options.convergence_tol},
                             {"sample_stride", run.options.sample_stride},
                             {"window_fraction", run.options.window_fraction},
                             {"align_activation", run.options.align_activation}};
    report["delay_verdict"] = to_string(bounds.verdict);
    report["classification"] = to_json(traj.classification);
    Json final_state = Json::array();
    if (!traj.states.empty()) {
        for (Eigen::Index i = 0; i < traj.states.back().size(); ++i) {
            final_state.push_back(traj.states.back()(i));
        }
    }
    report["final_time"] = traj.times.empty() ? 0.0 : traj.times.back();
    report["final_state"] = std::move(final_state);
    report["conservation_max_dev"] = conservation_series(traj, run.matrices.conservation_weights());
    report["aborted"] = traj.aborted;
    report["samples"] = traj.times.size();
    run.report = std::move(report);
    return run;
}

void emit_outputs(const Options& opts, const Scenario& s, const Json& report, const Trajectory* traj, FileResult& r) {
    const auto out_path = opts.out ? opts.out : (s.output ? s.output->report : std::nullopt);
    if (out_path) {
        write_file(*out_path, dump(report));
    }
    const auto csv_path = opts.csv ? opts.csv : (s.output ? s.output->csv : std::nullopt);
    if (traj && csv_path) {
        std::ostringstream os;
        write_csv(os, *traj);
        write_file(*csv_path, os.str());
    }
    if (!out_path || opts.command == "spectrum") {
        r.out += dump(report);
    }
}

void run_command(const Options& opts, const std::string& path, FileResult& r) {
    const auto& cmd = opts.command;
    if (cmd == "validate") {
        (void)load_checked(path);
        r.out = path + ": valid\n";
        return;
    }
    if (cmd == "spectrum") {
        const auto s = load_checked(path);
        const auto m = assemble(s.spec);
        std::optional<Vector> x0;
        if ((s.sim && s.sim->initial_state) || s.fleet) {
            x0 = initial_state(s);
        }
        Json report = to_json(analyze_spectrum(m, x0));
        if (opts.c_trials > 0) {
            const auto c = c_invariance_check(s.spec, opts.c_trials, opts.seed);
            report["c_invariance"] = Json{{"passed", c.passed},
                                          {"trials", c.trials},
                                          {"seed", opts.seed},
                                          {"worst_layer_deviation", c.worst_layer_deviation},
                                          {"worst_spectrum_deviation", c.worst_spectrum_deviation}};
        }
        emit_outputs(opts, s, report, nullptr, r);
        return;
    }
    if (cmd == "bounds") {
        const auto s = load_checked(path);
        const auto m = assemble(s.spec);
        const auto report = stability_verdict(s.spec, analyze_spectrum(m));
        std::string line = to_string(report.verdict);
        if (!report.binding_layers.empty() && report.verdict != Verdict::Stable) {
            line += " (binding layers";
            for (auto l : report.binding_layers) {
                line += " " + std::to_string(l + 1);
            }
            line += ")";
        }
        r.out = line + "\n";
        const auto out_path = opts.out ? opts.out : (s.output ? s.output->report : std::nullopt);
        if (out_path) {
            write_file(*out_path, dump(to_json(report)));
        }
        return;
    }
    if (cmd == "simulate" || cmd == "powershare") {
        auto run = simulate(opts, path);
        if (cmd == "powershare") {
            if (!run.scenario.fleet) {
                throw Failure{Status::InvalidScenario, path + ": powershare needs a generators block"};
            }
            run.report["power"] = to_json(power_report(run.trajectory, *run.scenario.fleet));
        }
        r.regime = run.trajectory.classification.regime;
        if (r.regime == Regime::Inconclusive) {
            r.err += path + ": classification inconclusive: " + run.trajectory.classification.note + "\n";
        }
        emit_outputs(opts, run.scenario, run.report, &run.trajectory, r);
        return;
    }
    throw Failure{Status::ParseError, "unknown command " + cmd};
}

}  // namespace

FileResult run_file(const Options& opts, const std::string& path) {
    FileResult r;
    try {
        run_command(opts, path, r);
    } catch (const Failure& f) {
        r.status = f.status;
        r.err += f.message + "\n";
    } catch (const StructuralError& e) {
        r.status = Status::InvalidScenario;
        r.err += path + ": " + e.what() + "\n";
    } catch (const DomainError& e) {
        r.status = Status::InvalidScenario;
        r.err += path + ": " + e.what() + "\n";
    } catch (const std::exception& e) {
        r.status = Status::IoError;
        r.err += path + ": " + e.what() + "\n";
    }
    r.code = exit_code(r.status, r.regime, opts.allow_unstable);
    if (r.code == kExitDiverged) {
        r.err += path + ": trajectory diverges (pass --allow-unstable to accept)\n";
    }
    return r;
}

int run_batch(const Options& opts, std::ostream& out, std::ostream& err) {
    std::vector<FileResult> results(opts.paths.size());
    const std::size_t workers = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(1, opts.paths.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < opts.paths.size(); i = next++) {
            results[i] = run_file(opts, opts.paths[i]);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    std::vector<int> codes;
    for (const auto& r : results) {
        out << r.out;
        err << r.err;
        codes.push_back(r.code);
    }
    return batch_exit_code(codes);
}

namespace {

void configure_logging() {
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("HIERCON_LOG")) {
        level = spdlog::level::from_str(env);
    }
    spdlog::set_level(level);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    configure_logging();
    CLI::App app{"Hierarchical consensus analysis and simulation"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("scenarios", opts.paths, "Scenario JSON files")->required();
        sub->add_option("--out", opts.out, "Write the JSON report to this path");
        sub->add_option("--jobs", opts.jobs, "Scenarios processed concurrently")->check(CLI::PositiveNumber);
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--csv", opts.csv, "Write the trajectory CSV to this path");
        sub->add_option("--step", opts.step, "Integration step (s)")->check(CLI::PositiveNumber);
        sub->add_option("--t-end", opts.t_end, "Simulation horizon (s)")->check(CLI::PositiveNumber);
        sub->add_flag("--allow-unstable", opts.allow_unstable, "Exit 0 even if the trajectory diverges");
    };

    add_common(app.add_subcommand("validate", "Check a scenario against every structural invariant"));
    auto* spectrum = app.add_subcommand("spectrum", "Layer spectra, union check and consensus value");
    add_common(spectrum);
    spectrum->add_option("--seed", opts.seed, "Seed for the collecting-vector redraws");
    spectrum->add_option("--c-trials", opts.c_trials, "Number of collecting-vector redraws to test");
    add_common(app.add_subcommand("bounds", "Delay bounds and stability verdict"));
    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate the delayed system");
    add_common(simulate_cmd);
    add_sim(simulate_cmd);
    auto* power_cmd = app.add_subcommand("powershare", "Simulate and report generator power sharing");
    add_common(power_cmd);
    add_sim(power_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitIo;
    }
    opts.command = app.get_subcommands().front()->get_name();
    if (opts.paths.size() > 1 && (opts.out || opts.csv)) {
        err << "--out and --csv take a single scenario\n";
        return kExitIo;
    }
    return run_batch(opts, out, err);
}

}  // namespace hiercon::cli
