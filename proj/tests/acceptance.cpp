// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only (exit code 0 iff it passes)

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "fris/fris.hpp"
#include "oracles.hpp"

namespace {

using fris::validation::CheckResult;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* format, double a, double b = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

fris::RunConfig default_run() {
    fris::RunConfig run;
    run.validate();
    return run;
}

/// Default transmit-power sweep with only the FIXED + STATIC scheme simulated.
fris::SweepResult fixed_sweep() {
    fris::RunConfig run = default_run();
    run.modes = fris::ModeFlags{true, false, false};
    return fris::run_sweep(run);
}

CheckResult criterion_1() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ux(-200.0, 200.0);
    double worst_j0 = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = ux(rng);
        worst_j0 = std::max(worst_j0, std::abs(fris::specfun::bessel_j0(x) - oracle::bessel_j0(x)));
    }
    std::uniform_real_distribution<double> uk(0.1, 100.0), ug(0.0, 300.0);
    double worst_p = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double k = uk(rng), x = ug(rng);
        worst_p = std::max(worst_p, std::abs(fris::specfun::reg_lower_incomplete_gamma(k, x) -
                                             oracle::reg_lower_incomplete_gamma(k, x)));
    }
    const double elapsed = seconds_since(t0);
    return {"special functions vs extended-precision series oracles (1e-9, < 5 s)",
            worst_j0 <= 1e-9 && worst_p <= 1e-9 && elapsed < 5.0,
            fmt("max |dJ0| = %.2e, max |dP| = %.2e", worst_j0, worst_p) + fmt(", %.2f s", elapsed)};
}

CheckResult criterion_2() {
    const auto t0 = Clock::now();
    const fris::RunConfig run = default_run();
    std::vector<fris::validation::GammaBridge> bridges;
    for (std::size_t m_o : {16u, 36u}) bridges.push_back(fris::validation::gamma_bridge(run, m_o, 1000000, 100000));
    CheckResult r = fris::validation::check_gamma_bridge(bridges);
    const double elapsed = seconds_since(t0);
    r.passed = r.passed && elapsed < 120.0;
    r.detail += fmt(", %.1f s", elapsed);
    return r;
}

CheckResult criterion_3() {
    const auto t0 = Clock::now();
    CheckResult r = fris::validation::check_closed_form_op(fris::validation::closed_form_deviation(fixed_sweep()));
    const double elapsed = seconds_since(t0);
    r.passed = r.passed && elapsed < 300.0;
    r.detail += fmt(", %.1f s", elapsed);
    return r;
}

CheckResult criterion_4() {
    return fris::validation::check_closed_form_cop_success(fris::validation::closed_form_deviation(fixed_sweep()));
}

fris::SweepResult analytic_sweep() {
    fris::RunConfig run = default_run();
    run.modes = fris::ModeFlags{false, false, false};
    return fris::run_sweep(run);
}

CheckResult criterion_5() { return fris::validation::check_op_shape(analytic_sweep()); }

CheckResult criterion_6() { return fris::validation::check_cop_shape(analytic_sweep()); }

CheckResult criterion_7() { return fris::validation::check_success_shape(fixed_sweep(), default_run().mu_factor); }

CheckResult criterion_8() {
    const auto t0 = Clock::now();
    fris::RunConfig run = default_run();
    run.modes = fris::ModeFlags{false, true, true};
    run.sweep.m_o_values = {36};
    run.sweep.mu_factors = {run.mu_factor};
    CheckResult r = fris::validation::check_fris_vs_ris(fris::run_sweep(run), 36, run.mu_factor);
    const double elapsed = seconds_since(t0);
    r.passed = r.passed && elapsed < 600.0;
    r.detail += fmt(", %.1f s", elapsed);
    return r;
}

CheckResult criterion_9() {
    CheckResult r{"exact corner values (bit-exact)", true, ""};
    auto expect = [&r](bool ok, const std::string& what) {
        if (!ok) {
            r.passed = false;
            r.detail += what + "; ";
        }
    };
    const fris::SurfaceGeometry geom;
    const fris::GammaFit fit =
        fris::gamma_moment_match(fris::reduce(fris::correlation_matrix(geom), fris::fixed_preset(geom, 36)));
    for (double p1 : {0.5, 0.7, 0.1}) {
        fris::ScenarioConfig cfg;
        cfg.p1 = p1;
        cfg.p0 = 1.0 - p1;
        for (double zeta : {0.0, 0.5 * cfg.sigma2_w, cfg.sigma2_w}) {
            const double p_fa = fris::fa_probability(cfg, zeta);
            const double p_md = fris::md_probability(fit, cfg, zeta);
            expect(p_fa == 1.0, "P_FA != 1 at zeta <= sigma2_w");
            expect(p_md == 0.0, "P_MD != 0 at zeta <= sigma2_w");
            expect(fris::cop(cfg, p_fa, p_md) == cfg.p1, "COP != p1 at zeta <= sigma2_w");
            expect(fris::evaluate_analytics(fit, cfg, zeta).cop == cfg.p1, "evaluated COP != p1");
        }
        cfg.r_b = 0.0;
        expect(fris::outage_probability(fit, cfg) == 0.0, "analytic OP != 0 at R_B = 0");
    }
    fris::ScenarioConfig cfg;
    cfg.r_b = 0.0;
    fris::MCConfig mc;
    mc.trials = 2000;
    const fris::GainSamples s = fris::simulate(mc, cfg, geom);
    expect(fris::op_from_samples(s, cfg).value == 0.0, "empirical OP != 0 at R_B = 0");
    expect(fris::cop_from_samples(s, cfg, cfg.sigma2_w).value == cfg.p1, "empirical COP != p1 at zeta = sigma2_w");
    if (r.passed) r.detail = "P_FA = 1, P_MD = 0, COP = p1 for zeta <= sigma2_w; OP = 0 at R_B = 0 (analytic and empirical)";
    return r;
}

CheckResult criterion_10() {
    const auto t0 = Clock::now();
    fris::RunConfig run = default_run();
    run.mc.workers = 1;
    const std::string a = fris::render_csv(fris::run_sweep(run));
    run.mc.workers = 3;
    const std::string b = fris::render_csv(fris::run_sweep(run));
    return {"byte-identical CSV for worker counts 1 and 3", a == b && !a.empty(),
            std::to_string(a.size()) + " bytes" + fmt(", %.1f s", seconds_since(t0))};
}

const std::vector<std::function<CheckResult()>>& criteria() {
    static const std::vector<std::function<CheckResult()>> all = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    return all;
}

bool run_one(std::size_t n) {
    CheckResult r;
    try {
        r = criteria()[n - 1]();
    } catch (const std::exception& e) {
        r = {"(exception)", false, e.what()};
    }
    std::cout << "criterion " << n << ": " << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail << "]"
              << std::endl;
    return r.passed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::size_t only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    if (only != 0) return run_one(only) ? 0 : 1;
    std::size_t failed = 0;
    for (std::size_t n = 1; n <= criteria().size(); ++n) failed += run_one(n) ? 0 : 1;
    std::cout << (criteria().size() - failed) << "/" << criteria().size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
