#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fris/analytics.hpp"
#include "fris/montecarlo.hpp"

using namespace fris;

namespace {

MCConfig small_mc(std::size_t trials, std::uint64_t seed = 1) {
    MCConfig mc;
    mc.trials = trials;
    mc.master_seed = seed;
    return mc;
}

} // namespace

TEST_CASE("Wilson interval") {
    const EstimateWithCI half = wilson_estimate(50, 100);
    CHECK(half.value == 0.5);
    CHECK(half.ci_low == Catch::Approx(0.40383153).epsilon(1e-7));
    CHECK(half.ci_high == Catch::Approx(0.59616847).epsilon(1e-7));
    const EstimateWithCI zero = wilson_estimate(0, 1000);
    CHECK(zero.value == 0.0);
    CHECK(zero.ci_low == 0.0);
    CHECK(zero.ci_high > 0.0);
    CHECK(zero.ci_high < 0.01);
    const EstimateWithCI all = wilson_estimate(10, 10);
    CHECK(all.ci_high == 1.0);
    CHECK(all.ci_low < 1.0);
    for (std::size_t k = 0; k <= 37; ++k) {
        const EstimateWithCI e = wilson_estimate(k, 37);
        CHECK(e.ci_low <= e.value);
        CHECK(e.value <= e.ci_high);
    }
    CHECK_THROWS_AS(wilson_estimate(0, 0), DomainError);
    CHECK_THROWS_AS(wilson_estimate(3, 2), DomainError);
}

TEST_CASE("substream seeds") {
    CHECK(substream_seed(1, 0) != substream_seed(1, 1));
    CHECK(substream_seed(1, 5) != substream_seed(2, 5));
    CHECK(substream_seed(42, 7) == substream_seed(42, 7));
    // Reference value of the splitmix64 finaliser at 0.
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("empirical CDF") {
    const std::vector<double> s{3.0, 1.0, 2.0};
    const EmpiricalCdf f = empirical_cdf(s);
    CHECK(f(2.0) == Catch::Approx(2.0 / 3.0));
    CHECK(f(0.5) == 0.0);
    CHECK(f(3.0) == 1.0);
    CHECK(f(100.0) == 1.0);
    CHECK_THROWS_AS(empirical_cdf(std::vector<double>{}), DomainError);
}

TEST_CASE("KS distance examples") {
    const GammaFit fit{2.5, 1.7};
    // Median of Gamma(2.5, 1.7) by bisection on the CDF.
    double lo = 0.0, hi = 50.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gamma_cdf(fit, mid) < 0.5 ? lo : hi) = mid;
    }
    const std::vector<double> median{0.5 * (lo + hi)};
    CHECK(std::abs(ks_distance(median, fit) - 0.5) <= 1e-12);
    CHECK(ks_distance(std::vector<double>(10, 0.0), fit) == 1.0);
    CHECK_THROWS_AS(ks_distance(std::vector<double>{}, fit), DomainError);

    std::mt19937_64 rng(123);
    std::gamma_distribution<double> gamma(fit.kappa, fit.theta);
    std::vector<double> sample(100000);
    for (double& v : sample) v = gamma(rng);
    CHECK(ks_distance(sample, fit) <= 0.01);
    // A wrong scale is clearly rejected.
    CHECK(ks_distance(sample, GammaFit{fit.kappa, 1.3 * fit.theta}) > 0.05);
}

TEST_CASE("results do not depend on the worker count") {
    const LinkSimulator sim(SurfaceGeometry{}, 16, 16);
    const std::array<Scheme, 3> schemes{Scheme{SelectionMode::Fixed, PhaseMode::Static},
                                        Scheme{SelectionMode::BestProduct, PhaseMode::Coherent},
                                        Scheme{SelectionMode::RisFull, PhaseMode::Coherent}};
    MCConfig mc = small_mc(1000, 17);
    mc.workers = 1;
    const auto one = sim.run(mc, schemes);
    for (std::size_t w : {2u, 3u, 7u, 64u}) {
        mc.workers = w;
        const auto many = sim.run(mc, schemes);
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            CHECK(many[s].bob == one[s].bob);
            CHECK(many[s].willie == one[s].willie);
        }
    }
}

TEST_CASE("requested schemes do not change each other's samples") {
    const LinkSimulator sim(SurfaceGeometry{}, 36, 36);
    const MCConfig mc = small_mc(2000, 5);
    const std::array<Scheme, 3> all{Scheme{SelectionMode::Fixed, PhaseMode::Static},
                                    Scheme{SelectionMode::BestProduct, PhaseMode::Coherent},
                                    Scheme{SelectionMode::RisFull, PhaseMode::Coherent}};
    const auto joint = sim.run(mc, all);
    const GainSamples fixed_only = sim.run(mc, all[0]);
    const GainSamples ris_only = sim.run(mc, all[2]);
    for (std::size_t t = 0; t < mc.trials; ++t) {
        CHECK(fixed_only.bob[t] == Catch::Approx(joint[0].bob[t]).epsilon(1e-12));
        CHECK(ris_only.willie[t] == Catch::Approx(joint[2].willie[t]).epsilon(1e-12));
    }
}

TEST_CASE("estimator corners") {
    const SurfaceGeometry g;
    ScenarioConfig cfg;
    cfg.active_ports = 16;
    const MCConfig mc = small_mc(500);

    ScenarioConfig zero_rate = cfg;
    zero_rate.r_b = 0.0;
    CHECK(estimate_op(mc, zero_rate, g).value == 0.0);

    ScenarioConfig loud = cfg;
    loud.p_a = 1e9;
    CHECK(estimate_op(mc, loud, g).value == 0.0);

    CHECK(estimate_cop(mc, cfg, g, cfg.sigma2_w).value == cfg.p1);
    CHECK(estimate_cop(mc, cfg, g, 0.5 * cfg.sigma2_w).value == cfg.p1);
    CHECK(estimate_cop(mc, cfg, g, 1e300).value == cfg.p0);

    CHECK(estimate_success(mc, zero_rate, g, cfg.sigma2_w).value == cfg.p0);

    ScenarioConfig quiet = cfg;
    quiet.p_a = 1e-30;
    CHECK(estimate_success(mc, quiet, g, optimal_threshold(quiet)).value == 0.0);
    CHECK(estimate_success(mc, loud, g, optimal_threshold(loud)).value == 0.0);
}

TEST_CASE("estimates lie in [0, 1] and bracket their value") {
    const SurfaceGeometry g;
    ScenarioConfig cfg;
    cfg.active_ports = 36;
    const GainSamples s = simulate(small_mc(5000, 3), cfg, g);
    for (double dbm = -80.0; dbm <= 0.0; dbm += 5.0) {
        cfg.p_a = dbm_to_watt(dbm);
        const double zeta = optimal_threshold(cfg);
        for (const EstimateWithCI& e : {op_from_samples(s, cfg), cop_from_samples(s, cfg, zeta), success_from_samples(s, cfg, zeta)}) {
            CHECK(e.ci_low >= 0.0);
            CHECK(e.ci_high <= 1.0);
            CHECK(e.ci_low <= e.value);
            CHECK(e.value <= e.ci_high);
        }
    }
}

TEST_CASE("Monte Carlo matches the closed forms at 0 dBm") {
    const SurfaceGeometry g;
    ScenarioConfig cfg;
    cfg.active_ports = 36;
    cfg.p_a = dbm_to_watt(0.0);
    const GammaFit fit = gamma_moment_match(reduce(correlation_matrix(g), fixed_preset(g, 36)));
    const AnalyticPoint pt = evaluate_analytics(fit, cfg);
    const GainSamples s = simulate(small_mc(100000, 8), cfg, g);
    CHECK(std::abs(op_from_samples(s, cfg).value - pt.op) <= 0.02);
    CHECK(std::abs(cop_from_samples(s, cfg, pt.zeta).value - pt.cop) <= 0.02);
}

TEST_CASE("invalid Monte Carlo configuration") {
    MCConfig mc;
    mc.trials = 0;
    CHECK_THROWS_AS(mc.validate(), ConfigError);
    mc.trials = 1;
    mc.workers = 0;
    CHECK_THROWS_AS(mc.validate(), ConfigError);
}
