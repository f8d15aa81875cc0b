// Acceptance gate: one PASS/FAIL line per criterion, each checked at its
// stated tolerance and runtime budget. Exit status is nonzero if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hiercon/dde_sim.hpp"
#include "hiercon/delay.hpp"
#include "hiercon/expm.hpp"
#include "hiercon/powershare.hpp"
#include "hiercon/random_hierarchy.hpp"
#include "hiercon/scenario_io.hpp"
#include "hiercon/spectral.hpp"
#include "oracles.hpp"

using namespace hiercon;
using std::numbers::pi;

namespace {

std::string scenario(const std::string& name) { return std::string(HIERCON_SCENARIO_DIR) + "/" + name; }

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct CaseRun {
    Scenario scenario;
    LayerMatrices matrices;
    Trajectory trajectory;
    DelayStabilityReport bounds;
};

CaseRun run_case(const std::string& file) {
    CaseRun r;
    r.scenario = load_scenario(scenario(file));
    r.matrices = assemble(r.scenario.spec);
    const Vector x0 = initial_state(r.scenario);
    r.bounds = stability_verdict(r.scenario.spec, analyze_spectrum(r.matrices, x0));
    r.trajectory = integrate(r.matrices, effective_delays(r.scenario.spec), x0, sim_options(r.scenario));
    return r;
}

double balance_deviation(const CaseRun& r) { return power_report(r.trajectory, *r.scenario.fleet).balance_max_dev; }

Outcome eigenvalues() {
    Outcome v;
    const auto s = load_scenario(scenario("fig1.json"));
    const auto rep = analyze_spectrum(assemble(s.spec));
    const double e2 = std::abs(rep.lambda_max.at(1) - 4.0 / 3.0);
    const double e3 = std::abs(rep.lambda_max.at(2) - 0.75);
    v.require(e2 < 1e-12, "lambda2 error " + fmt("%.3g", e2));
    v.require(e3 < 1e-12, "lambda3 error " + fmt("%.3g", e3));
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("lambda2=%.15g", rep.lambda_max[1]) +
                fmt(" lambda3=%.15g", rep.lambda_max[2]);
    return v;
}

std::vector<CaseRun> g_cases;

Outcome consensus_case1() {
    Outcome v;
    g_cases.push_back(run_case("fig1_case1.json"));
    const auto& r = g_cases.back();
    const auto& cl = r.trajectory.classification;
    v.require(r.trajectory.step <= 1e-3, "step above default");
    v.require(r.scenario.sim && r.scenario.sim->t_end == 60.0, "t_end is not 60");
    v.require(cl.regime == Regime::Converged, std::string("regime ") + to_string(cl.regime));
    v.require(std::abs(cl.consensus - 0.566667) <= 1e-3, "consensus " + fmt("%.6f", cl.consensus));
    const double max_dev = (r.trajectory.states.back().array() - 0.566667).abs().maxCoeff();
    v.require(max_dev <= 1e-3, "final ratio deviation " + fmt("%.3g", max_dev));
    const auto power = power_report(r.trajectory, *r.scenario.fleet);
    const std::array<double, 6> expected = {0.4533, 0.3967, 0.85, 0.5667, 0.4533, 0.68};
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        worst = std::max(worst, std::abs(power.final_powers(i) - expected[static_cast<std::size_t>(i)]));
    }
    v.require(worst <= 1e-3, "final power error " + fmt("%.3g", worst));
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("c=%.6f", cl.consensus) + fmt(" power err=%.2e", worst);
    return v;
}

Outcome criticality() {
    Outcome v;
    const std::array<const char*, 3> files = {"fig1_case2.json", "fig1_case3.json", "fig1_case4.json"};
    const std::array<std::vector<std::size_t>, 3> binding = {std::vector<std::size_t>{2}, std::vector<std::size_t>{1},
                                                             std::vector<std::size_t>{1, 2}};
    for (std::size_t k = 0; k < files.size(); ++k) {
        g_cases.push_back(run_case(files[k]));
        const auto& r = g_cases.back();
        const auto& cl = r.trajectory.classification;
        const std::string tag = "case " + std::to_string(k + 2);
        v.require(r.scenario.sim && r.scenario.sim->t_end == 120.0, tag + " t_end is not 120");
        v.require(cl.regime == Regime::CriticalOscillation, tag + " regime " + to_string(cl.regime));
        const double ratio = cl.last_window_amplitude / cl.previous_window_amplitude;
        v.require(ratio >= 0.8 && ratio <= 1.2, tag + " amplitude ratio " + fmt("%.4f", ratio));
        v.require(cl.last_window_amplitude > 1e-4, tag + " amplitude " + fmt("%.3g", cl.last_window_amplitude));
        v.require(r.bounds.verdict == hiercon::Verdict::Critical, tag + " verdict " + to_string(r.bounds.verdict));
        v.require(r.bounds.binding_layers == binding[k], tag + " binding layers differ");
        v.detail += (v.detail.empty() ? "" : "; ") + tag + fmt(" ratio=%.4f", ratio);
    }
    return v;
}

Outcome conservation() {
    Outcome v;
    double worst = 0.0;
    v.require(g_cases.size() == 4, "case runs missing");
    for (const auto& r : g_cases) {
        const double dev = balance_deviation(r);
        v.require(r.scenario.fleet && r.scenario.fleet->total_demand() == 3.4, "demand is not 3.4 MW");
        worst = std::max(worst, dev);
    }
    v.require(worst < 1e-6, "balance deviation " + fmt("%.3g", worst));
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("max |sum p - 3.4| = %.2e MW", worst);
    return v;
}

Outcome spectrum_union() {
    Outcome v;
    const auto fig = union_check(assemble(load_scenario(scenario("fig1.json")).spec));
    v.require(fig.passed && fig.zero_count == 1, "fig1 union check failed");
    std::mt19937_64 rng(kDefaultSeed);
    int passed = 0;
    for (int k = 0; k < 100; ++k) {
        const auto spec = random_hierarchy(rng);
        const auto u = union_check(assemble(spec));
        if (u.passed && u.zero_count == 1) {
            ++passed;
        } else {
            v.require(false, "random hierarchy " + std::to_string(k));
        }
    }
    v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(passed) + "/100 random hierarchies";
    return v;
}

Outcome c_invariance() {
    Outcome v;
    const auto spec = load_scenario(scenario("fig1.json")).spec;
    const auto c = c_invariance_check(spec, 50, kDefaultSeed, 1e-8);
    v.require(c.passed && c.trials == 50, "check failed");
    v.require(c.worst_layer_deviation <= 1e-8, "layer deviation " + fmt("%.3g", c.worst_layer_deviation));
    v.require(c.worst_spectrum_deviation <= 1e-8, "spectrum deviation " + fmt("%.3g", c.worst_spectrum_deviation));
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("worst deviation %.2e", std::max(c.worst_layer_deviation,
                                                                                      c.worst_spectrum_deviation));
    return v;
}

Outcome sign_law() {
    Outcome v;
    const std::array<double, 6> lambdas = {0.25, 0.5, 1.0, 4.0 / 3.0, 2.0, 5.0};
    const std::array<double, 6> fractions = {0.1, 0.5, 0.99, 1.0, 1.01, 2.0};
    double worst_residual = 0.0;
    double worst_newton = 0.0;
    for (double lambda : lambdas) {
        for (double f : fractions) {
            const double t_star = critical_delay(lambda);
            const double T = f * t_star;
            const auto s = rightmost_root(T, lambda);
            const double res = std::abs(s * std::exp(T * s) + lambda);
            worst_residual = std::max(worst_residual, res / lambda);
            v.require(res < 1e-10 * lambda, "residual at lambda=" + fmt("%g", lambda) + fmt(" f=%g", f));
            if (f == 1.0) {
                v.require(std::abs(s.real()) < 1e-9, "Re at T* = " + fmt("%.3g", s.real()));
            } else {
                const bool right = s.real() > 0.0;
                v.require(right == (T > t_star) && s.real() != 0.0,
                          "sign at lambda=" + fmt("%g", lambda) + fmt(" f=%g", f));
            }
            const auto n = oracles::newton_root(T, lambda, s * 1.05);
            v.require(n.has_value(), "newton failed at lambda=" + fmt("%g", lambda) + fmt(" f=%g", f));
            if (n) {
                worst_newton = std::max(worst_newton, std::abs(*n - s));
            }
        }
    }
    v.require(worst_newton < 1e-8, "newton disagreement " + fmt("%.3g", worst_newton));
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("residual/lambda=%.2e", worst_residual) +
                fmt(" newton diff=%.2e", worst_newton);
    return v;
}

Outcome zero_delay() {
    Outcome v;
    const auto s = load_scenario(scenario("fig1.json"));
    const auto m = assemble(s.spec);
    const Vector x0 = initial_state(s);
    SimOptions opts;
    opts.t_end = 200.0;
    opts.sample_stride = 100;
    const auto tr = integrate(m, effective_delays(s.spec), x0, opts);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        worst = std::max(worst, (tr.states[k] - expm_oracle(m.total, x0, tr.times[k])).cwiseAbs().maxCoeff());
    }
    const double c = 0.566667;
    const double sim_end = (tr.states.back().array() - 3.4 / 6.0).abs().maxCoeff();
    const double oracle_end = (expm_oracle(m.total, x0, 200.0).array() - 3.4 / 6.0).abs().maxCoeff();
    v.require(worst < 1e-6, "trajectory vs oracle " + fmt("%.3g", worst));
    v.require(sim_end < 1e-8, "simulation at t=200 off by " + fmt("%.3g", sim_end));
    v.require(oracle_end < 1e-8, "oracle at t=200 off by " + fmt("%.3g", oracle_end));
    v.require(std::abs(tr.classification.consensus - c) < 1e-6, "consensus prediction");
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("max |x - expm| = %.2e", worst) + fmt(" end dev=%.2e", sim_end);
    return v;
}

struct Criterion {
    int id;
    const char* name;
    double budget_ms;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    // Criterion 3 reuses the case runs of criteria 2 and 4; its budget covers only the check.
    const std::vector<Criterion> criteria = {
        {1, "eigenvalue reproduction", 10.0, eigenvalues},
        {2, "case 1 consensus and final powers", 5000.0, consensus_case1},
        {4, "criticality classification, cases 2-4", 15000.0, criticality},
        {3, "power balance on all four cases", 1000.0, conservation},
        {5, "spectrum union on fig1 and 100 random hierarchies", 30000.0, spectrum_union},
        {6, "collecting-vector invariance, 50 redraws", 10000.0, c_invariance},
        {7, "transcendental sign law", 1000.0, sign_law},
        {8, "zero-delay matrix exponential equivalence", 5000.0, zero_delay},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome v;
        const auto start = std::chrono::steady_clock::now();
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.ok = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (ms > c.budget_ms) {
            v.ok = false;
            v.detail += fmt("; over budget (%.0f ms", c.budget_ms) + ")";
        }
        failures += v.ok ? 0 : 1;
        std::printf("%s [%d] %s (%.1f ms): %s\n", v.ok ? "PASS" : "FAIL", c.id, c.name, ms, v.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
