#pragma once

// Trial orchestration and statistical estimation. Every trial draws from its
// own substream derived from (master seed, trial index), so results do not
// depend on how trials are split across worker threads.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "fris/analytics.hpp"
#include "fris/channel.hpp"
#include "fris/error.hpp"
#include "fris/surface.hpp"

namespace fris {

struct MCConfig {
    std::size_t trials = 100000;
    std::uint64_t master_seed = 1;
    PhaseMode phase_mode = PhaseMode::Static;
    SelectionMode selection_mode = SelectionMode::Fixed;
    std::size_t workers = 1;

    void validate() const {
        if (trials == 0) throw ConfigError("montecarlo.trials", "must be at least 1");
        if (workers == 0) throw ConfigError("montecarlo.workers", "must be at least 1");
    }
};

/// Proportion estimate with a Wilson 95% score interval.
struct EstimateWithCI {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t trials = 0;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

inline EstimateWithCI wilson_estimate(std::size_t successes, std::size_t trials) {
    if (trials == 0) throw DomainError("wilson_estimate: no trials");
    if (successes > trials) throw DomainError("wilson_estimate: more successes than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kWilsonZ95 * kWilsonZ95;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = kWilsonZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    EstimateWithCI e;
    e.value = p;
    e.ci_low = std::clamp(std::min(centre - half, p), 0.0, 1.0);
    e.ci_high = std::clamp(std::max(centre + half, p), 0.0, 1.0);
    if (successes == 0) e.ci_low = 0.0;
    if (successes == trials) e.ci_high = 1.0;
    e.trials = trials;
    return e;
}

/// splitmix64 finaliser.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the random substream owned by `trial`: mix64(master ^ mix64(trial)).
inline constexpr std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t trial) noexcept {
    return mix64(master_seed ^ mix64(trial));
}

/// A (selection, phase) configuration whose gains are recorded for every trial.
struct Scheme {
    SelectionMode selection = SelectionMode::Fixed;
    PhaseMode phase = PhaseMode::Static;

    friend bool operator==(const Scheme&, const Scheme&) = default;
};

struct GainSamples {
    Scheme scheme;
    std::vector<double> bob;
    std::vector<double> willie;
};

/// Generates paired per-trial gains for several schemes from shared fading draws.
///
/// Trial t draws h_af, h_fb, h_fw over the FRIS ports from its own substream.
/// The RIS baseline reuses those draws at its element positions when its grid
/// nests in the FRIS grid; otherwise it continues drawing from the same substream.
class LinkSimulator {
public:
    static constexpr std::size_t kBlockTrials = 64;

    LinkSimulator(const SurfaceGeometry& geom, std::size_t active_ports, std::size_t ris_elements,
                  double ris_max_density = 0.0)
        : fris_(geom, active_ports), ris_(geom, ris_elements == 0 ? active_ports : ris_elements, ris_max_density) {}

    LinkSimulator(const SurfaceGeometry& geom, const ScenarioConfig& cfg)
        : LinkSimulator(geom, cfg.active_ports, cfg.ris_element_count(), cfg.ris_max_density) {}

    const FrisChannel& fris() const noexcept { return fris_; }
    const RisBaseline& ris() const noexcept { return ris_; }

    std::vector<GainSamples> run(const MCConfig& mc, std::span<const Scheme> schemes) const {
        mc.validate();
        std::vector<GainSamples> out(schemes.size());
        for (std::size_t s = 0; s < schemes.size(); ++s) {
            out[s].scheme = schemes[s];
            out[s].bob.resize(mc.trials);
            out[s].willie.resize(mc.trials);
        }
        const RowPlan plan = plan_rows(schemes);
        const std::size_t blocks = (mc.trials + kBlockTrials - 1) / kBlockTrials;
        const std::size_t workers = std::min(mc.workers, blocks);

        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&](std::size_t worker) {
            try {
                for (std::size_t block = worker; block < blocks; block += workers) run_block(mc, block, schemes, plan, out);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        if (workers <= 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);
        return out;
    }

    GainSamples run(const MCConfig& mc, Scheme scheme) const {
        return std::move(run(mc, std::span<const Scheme>(&scheme, 1)).front());
    }

private:
    // Rows of J^{1/2} h the requested schemes read. Best-product selection needs
    // every port; FIXED and a nested RIS only touch their own ports.
    struct RowPlan {
        Eigen::MatrixXd root;
        std::size_t dim = 0;
        PortSelection preset;
        std::vector<std::size_t> ris_ports;
    };

    RowPlan plan_rows(std::span<const Scheme> schemes) const {
        auto uses = [&](SelectionMode m) {
            return std::any_of(schemes.begin(), schemes.end(), [m](const Scheme& s) { return s.selection == m; });
        };
        const std::size_t m = fris_.port_count();
        RowPlan plan;
        if (uses(SelectionMode::BestProduct)) {
            plan.root = fris_.sqrt_correlation();
            plan.dim = m;
            plan.preset = fris_.preset();
            plan.ris_ports.assign(ris_.fris_ports().begin(), ris_.fris_ports().end());
            return plan;
        }
        std::vector<std::size_t> rows;
        if (uses(SelectionMode::Fixed)) rows.assign(fris_.preset().indices().begin(), fris_.preset().indices().end());
        if (uses(SelectionMode::RisFull)) rows.insert(rows.end(), ris_.fris_ports().begin(), ris_.fris_ports().end());
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        std::vector<std::size_t> local(m, m);
        for (std::size_t k = 0; k < rows.size(); ++k) local[rows[k]] = k;
        plan.dim = rows.size();
        plan.root.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < rows.size(); ++k)
            plan.root.row(static_cast<Eigen::Index>(k)) = fris_.sqrt_correlation().row(static_cast<Eigen::Index>(rows[k]));
        if (uses(SelectionMode::Fixed)) {
            std::vector<std::size_t> idx;
            for (std::size_t p : fris_.preset().indices()) idx.push_back(local[p]);
            plan.preset = PortSelection(std::move(idx), plan.dim);
        }
        for (std::size_t p : ris_.fris_ports()) plan.ris_ports.push_back(local[p]);
        return plan;
    }

    static void fill_raw(Eigen::MatrixXd& raw, std::size_t column0, std::mt19937_64& rng) {
        // Same draw order as sample_iid_fading: (re, im) per element, one distribution per link.
        for (std::size_t link = 0; link < 3; ++link) {
            boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
            const auto re = static_cast<Eigen::Index>(column0 + 2 * link);
            for (Eigen::Index i = 0; i < raw.rows(); ++i) {
                raw(i, re) = normal(rng);
                raw(i, re + 1) = normal(rng);
            }
        }
    }

    static ComplexVector column_pair(const Eigen::MatrixXd& m, std::size_t column) {
        const auto c = static_cast<Eigen::Index>(column);
        ComplexVector v(m.rows());
        for (Eigen::Index i = 0; i < m.rows(); ++i) v(i) = {m(i, c), m(i, c + 1)};
        return v;
    }

    static ComplexVector gather(const ComplexVector& v, std::span<const std::size_t> idx) {
        ComplexVector out(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(static_cast<Eigen::Index>(idx[k]));
        return out;
    }

    void run_block(const MCConfig& mc, std::size_t block, std::span<const Scheme> schemes, const RowPlan& plan,
                   std::vector<GainSamples>& out) const {
        const std::size_t first = block * kBlockTrials;
        const std::size_t count = std::min(kBlockTrials, mc.trials - first);
        const bool need_ris = std::any_of(schemes.begin(), schemes.end(),
                                          [](const Scheme& s) { return s.selection == SelectionMode::RisFull; });
        const bool ris_own_draw = need_ris && !ris_.nests_in_fris();
        const std::size_t m = fris_.port_count();
        const std::size_t mr = ris_.element_count();

        Eigen::MatrixXd raw(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(6 * count));
        Eigen::MatrixXd raw_ris;
        if (ris_own_draw) raw_ris.resize(static_cast<Eigen::Index>(mr), static_cast<Eigen::Index>(6 * count));
        for (std::size_t t = 0; t < count; ++t) {
            std::mt19937_64 rng(substream_seed(mc.master_seed, first + t));
            fill_raw(raw, 6 * t, rng);
            if (ris_own_draw) fill_raw(raw_ris, 6 * t, rng);
        }
        const Eigen::MatrixXd corr = plan.root * raw;
        Eigen::MatrixXd corr_ris;
        if (ris_own_draw) corr_ris = ris_.sqrt_correlation() * raw_ris;

        const PortSelection ris_all = PortSelection::all(mr);
        for (std::size_t t = 0; t < count; ++t) {
            const ComplexVector a = column_pair(corr, 6 * t);
            const ComplexVector b = column_pair(corr, 6 * t + 2);
            const ComplexVector c = column_pair(corr, 6 * t + 4);
            for (std::size_t s = 0; s < schemes.size(); ++s) {
                const Scheme& scheme = schemes[s];
                double g_b = 0.0;
                double g_w = 0.0;
                if (scheme.selection == SelectionMode::RisFull) {
                    ComplexVector ar, br, cr;
                    if (ris_own_draw) {
                        ar = column_pair(corr_ris, 6 * t);
                        br = column_pair(corr_ris, 6 * t + 2);
                        cr = column_pair(corr_ris, 6 * t + 4);
                    } else {
                        ar = gather(a, plan.ris_ports);
                        br = gather(b, plan.ris_ports);
                        cr = gather(c, plan.ris_ports);
                    }
                    const auto phases = phases_for(scheme.phase, ar, br, ris_all);
                    g_b = cascaded_gain(ar, br, ris_all, scheme.phase);
                    g_w = willie_gain(ar, cr, ris_all, phases);
                } else {
                    const PortSelection sel =
                        select_ports(a, b, fris_.active_ports(), scheme.selection, plan.preset);
                    const auto phases = phases_for(scheme.phase, a, b, sel);
                    g_b = cascaded_gain(a, b, sel, scheme.phase);
                    g_w = willie_gain(a, c, sel, phases);
                }
                out[s].bob[first + t] = g_b;
                out[s].willie[first + t] = g_w;
            }
        }
    }

    FrisChannel fris_;
    RisBaseline ris_;
};

namespace detail {

inline bool is_outage(const ScenarioConfig& cfg, double bob_link, double g_b) {
    return std::log2(1.0 + bob_link * g_b / cfg.sigma2_b) < cfg.r_b;
}

// Missed detection with the infinite-observation power statistic.
inline bool is_missed_detection(const ScenarioConfig& cfg, double willie_link, double g_w, double zeta) {
    return zeta > cfg.sigma2_w && willie_link * g_w + cfg.sigma2_w <= zeta;
}

inline EstimateWithCI affine(const EstimateWithCI& e, double offset, double slope) {
    EstimateWithCI out = e;
    out.value = offset + slope * e.value;
    const double lo = offset + slope * e.ci_low;
    const double hi = offset + slope * e.ci_high;
    out.ci_low = std::clamp(std::min({lo, hi, out.value}), 0.0, 1.0);
    out.ci_high = std::clamp(std::max({lo, hi, out.value}), 0.0, 1.0);
    return out;
}

} // namespace detail

/// Fraction of draws with log2(1 + SNR_B) < R_B.
inline EstimateWithCI op_from_samples(const GainSamples& samples, const ScenarioConfig& cfg) {
    const double link = detail::bob_link_gain(cfg);
    std::size_t outages = 0;
    for (double g : samples.bob) outages += detail::is_outage(cfg, link, g) ? 1 : 0;
    return wilson_estimate(outages, samples.bob.size());
}

/// p0 (1 - P_FA) + p1 (1 - empirical P_MD); the H0 term is deterministic.
inline EstimateWithCI cop_from_samples(const GainSamples& samples, const ScenarioConfig& cfg, double zeta) {
    const double link = detail::willie_link_gain(cfg);
    std::size_t missed = 0;
    for (double g : samples.willie) missed += detail::is_missed_detection(cfg, link, g, zeta) ? 1 : 0;
    const double p_fa = fa_probability(cfg, zeta);
    return detail::affine(wilson_estimate(missed, samples.willie.size()), cfg.p0 * (1.0 - p_fa) + cfg.p1, -cfg.p1);
}

/// Per-draw score 1[no outage] (p0 1[FA] + p1 1[MD]) averaged over trials, using paired gains.
inline EstimateWithCI success_from_samples(const GainSamples& samples, const ScenarioConfig& cfg, double zeta) {
    const double bob_link = detail::bob_link_gain(cfg);
    const double willie_link = detail::willie_link_gain(cfg);
    const bool false_alarm = fa_probability(cfg, zeta) == 1.0;
    // A false alarm forces MD = 0, so the score is p0 or p1 times an indicator.
    std::size_t hits = 0;
    for (std::size_t t = 0; t < samples.bob.size(); ++t) {
        if (detail::is_outage(cfg, bob_link, samples.bob[t])) continue;
        if (false_alarm || detail::is_missed_detection(cfg, willie_link, samples.willie[t], zeta)) ++hits;
    }
    const double weight = false_alarm ? cfg.p0 : cfg.p1;
    return detail::affine(wilson_estimate(hits, samples.bob.size()), 0.0, weight);
}

inline GainSamples simulate(const MCConfig& mc, const ScenarioConfig& cfg, const SurfaceGeometry& geom) {
    cfg.validate();
    return LinkSimulator(geom, cfg).run(mc, Scheme{mc.selection_mode, mc.phase_mode});
}

inline EstimateWithCI estimate_op(const MCConfig& mc, const ScenarioConfig& cfg, const SurfaceGeometry& geom) {
    return op_from_samples(simulate(mc, cfg, geom), cfg);
}

inline EstimateWithCI estimate_cop(const MCConfig& mc, const ScenarioConfig& cfg, const SurfaceGeometry& geom,
                                   double zeta) {
    return cop_from_samples(simulate(mc, cfg, geom), cfg, zeta);
}

inline EstimateWithCI estimate_success(const MCConfig& mc, const ScenarioConfig& cfg, const SurfaceGeometry& geom,
                                       double zeta) {
    return success_from_samples(simulate(mc, cfg, geom), cfg, zeta);
}

/// Right-continuous empirical CDF.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
        if (sorted_.empty()) throw DomainError("EmpiricalCdf: empty sample");
        std::sort(sorted_.begin(), sorted_.end());
    }

    double operator()(double x) const {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    std::span<const double> sorted() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
};

inline EmpiricalCdf empirical_cdf(std::span<const double> samples) {
    return EmpiricalCdf(std::vector<double>(samples.begin(), samples.end()));
}

/// Kolmogorov-Smirnov statistic between the sample and Gamma(kappa, theta),
/// comparing both one-sided limits of the empirical CDF at every distinct sample value.
inline double ks_distance(std::span<const double> samples, const GammaFit& fit) {
    if (samples.empty()) throw DomainError("ks_distance: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double f = gamma_cdf(fit, std::max(sorted[i], 0.0));
        const double below = static_cast<double>(i) / n;
        const double at = static_cast<double>(j) / n;
        d = std::max({d, std::abs(at - f), std::abs(f - below)});
        i = j;
    }
    return d;
}

} // namespace fris
