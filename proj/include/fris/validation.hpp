#pragma once

// Cross-checks between the closed forms and the Monte Carlo simulator, plus
// the qualitative curve-shape checks on a sweep. Tolerances are fixed here.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fris/analytics.hpp"
#include "fris/config.hpp"
#include "fris/montecarlo.hpp"
#include "fris/surface.hpp"
#include "fris/sweep.hpp"

namespace fris::validation {

inline constexpr double kGammaMeanRelTol = 0.02;
inline constexpr double kGammaKsTol = 0.05;
inline constexpr double kClosedFormAbsTol = 0.02;
inline constexpr double kCiBandLow = 0.05;
inline constexpr double kCiBandHigh = 0.95;

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

/// Rows grouped by curve family, each group ordered as in the sweep.
inline std::map<std::pair<std::size_t, double>, std::vector<const SweepRow*>> families(const SweepResult& r) {
    std::map<std::pair<std::size_t, double>, std::vector<const SweepRow*>> out;
    for (const auto& row : r.rows) out[{row.m_o, row.mu_factor}].push_back(&row);
    return out;
}

template <typename Get>
bool non_increasing(const std::vector<const SweepRow*>& rows, Get get) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (get(*rows[i]) > get(*rows[i - 1])) return false;
    return true;
}

template <typename Get>
bool non_decreasing(const std::vector<const SweepRow*>& rows, Get get) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (get(*rows[i]) < get(*rows[i - 1])) return false;
    return true;
}

/// Peak value when some interior point strictly exceeds both endpoints, NaN otherwise.
template <typename Get>
double interior_peak(const std::vector<const SweepRow*>& rows, Get get) {
    if (rows.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    const double first = get(*rows.front());
    const double last = get(*rows.back());
    double peak = -1.0;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) peak = std::max(peak, get(*rows[i]));
    return (peak > first && peak > last) ? peak : std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

struct GammaBridge {
    std::size_t m_o = 0;
    double trace2 = 0.0;
    double mean = 0.0;
    double rel_error = 0.0;
    double ks = 0.0;
    std::size_t mean_trials = 0;
    std::size_t ks_trials = 0;
};

/// Mean of the FIXED + STATIC Bob gain against tr(J~^2) = kappa * theta, and the
/// KS distance of its first `ks_trials` samples to Gamma(kappa, theta).
inline GammaBridge gamma_bridge(const RunConfig& run, std::size_t m_o, std::size_t mean_trials, std::size_t ks_trials) {
    ScenarioConfig cfg = run.scenario;
    cfg.active_ports = m_o;
    MCConfig mc = run.mc;
    mc.trials = std::max(mean_trials, ks_trials);
    const LinkSimulator sim(run.surface, cfg);
    const GainSamples s = sim.run(mc, Scheme{SelectionMode::Fixed, PhaseMode::Static});
    const GammaFit fit = gamma_moment_match(reduce(sim.fris().correlation(), sim.fris().preset()));

    GammaBridge out;
    out.m_o = m_o;
    out.trace2 = fit.kappa * fit.theta;
    double sum = 0.0;
    for (std::size_t t = 0; t < mean_trials; ++t) sum += s.bob[t];
    out.mean = sum / static_cast<double>(mean_trials);
    out.rel_error = std::abs(out.mean - out.trace2) / out.trace2;
    out.ks = ks_distance(std::span<const double>(s.bob.data(), ks_trials), fit);
    out.mean_trials = mean_trials;
    out.ks_trials = ks_trials;
    return out;
}

inline CheckResult check_gamma_bridge(const std::vector<GammaBridge>& bridges) {
    CheckResult r{"gamma-fit bridge (mean within 2%, KS <= 0.05)", true, ""};
    for (const auto& b : bridges) {
        const bool ok = b.rel_error <= kGammaMeanRelTol && b.ks <= kGammaKsTol;
        r.passed = r.passed && ok;
        if (!r.detail.empty()) r.detail += "; ";
        r.detail += "M_O=" + std::to_string(b.m_o) +
                    detail::fmt(": mean %.4g vs tr(J~^2) %.4g", b.mean, b.trace2) +
                    detail::fmt(" (rel %.4f), KS %.4f", b.rel_error, b.ks);
    }
    return r;
}

struct ClosedFormDeviation {
    double op = 0.0;
    double cop = 0.0;
    double success = 0.0;
    std::size_t rows = 0;
};

/// Largest |analytic - empirical| over rows carrying FIXED + STATIC estimates.
inline ClosedFormDeviation closed_form_deviation(const SweepResult& result) {
    ClosedFormDeviation d;
    for (const auto& row : result.rows) {
        if (!row.fixed) continue;
        d.op = std::max(d.op, std::abs(row.analytic.op - row.fixed->op.value));
        d.cop = std::max(d.cop, std::abs(row.analytic.cop - row.fixed->cop.value));
        d.success = std::max(d.success, std::abs(row.analytic.success - row.fixed->success.value));
        ++d.rows;
    }
    return d;
}

inline CheckResult check_closed_form_op(const ClosedFormDeviation& d) {
    return {"closed-form vs Monte Carlo OP (FIXED+STATIC, max |dev| <= 0.02)", d.rows > 0 && d.op <= kClosedFormAbsTol,
            detail::fmt("max |dOP| = %.4f over %.0f rows", d.op, static_cast<double>(d.rows))};
}

inline CheckResult check_closed_form_cop_success(const ClosedFormDeviation& d) {
    return {"closed-form vs Monte Carlo COP and P_SUC at zeta* (max |dev| <= 0.02)",
            d.rows > 0 && d.cop <= kClosedFormAbsTol && d.success <= kClosedFormAbsTol,
            detail::fmt("max |dCOP| = %.4f, max |dP_SUC| = %.4f over %.0f rows", d.cop, d.success,
                        static_cast<double>(d.rows))};
}

/// Analytic OP non-increasing along every family; the largest-M_O curve at or
/// below the smallest-M_O curve for every mu.
inline CheckResult check_op_shape(const SweepResult& result) {
    CheckResult r{"OP non-increasing in P_A; larger M_O at or below smaller M_O", true, ""};
    const auto fam = detail::families(result);
    auto op = [](const SweepRow& row) { return row.analytic.op; };
    for (const auto& [key, rows] : fam) {
        if (!detail::non_increasing(rows, op)) {
            r.passed = false;
            r.detail += "OP increases along M_O=" + std::to_string(key.first) + "; ";
        }
    }
    std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
    for (const auto& [key, rows] : fam) {
        lo = std::min(lo, key.first);
        hi = std::max(hi, key.first);
    }
    std::size_t compared = 0;
    for (const auto& [key, rows] : fam) {
        if (key.first != hi || lo == hi) continue;
        const auto it = fam.find({lo, key.second});
        if (it == fam.end() || it->second.size() != rows.size()) continue;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            ++compared;
            if (rows[i]->analytic.op > it->second[i]->analytic.op) {
                r.passed = false;
                r.detail += detail::fmt("OP(M_O=hi) > OP(M_O=lo) at x=%.3g; ", rows[i]->x);
            }
        }
    }
    if (compared == 0) {
        r.passed = false;
        r.detail += "no pair of M_O curves to compare; ";
    }
    r.detail += "M_O " + std::to_string(lo) + " vs " + std::to_string(hi) + ", " + std::to_string(compared) + " points compared";
    return r;
}

/// Analytic COP non-decreasing along every family; the largest-mu curve at or
/// below the smallest-mu curve for every M_O.
inline CheckResult check_cop_shape(const SweepResult& result) {
    CheckResult r{"COP non-decreasing in P_A; larger mu at or below smaller mu", true, ""};
    const auto fam = detail::families(result);
    auto cop = [](const SweepRow& row) { return row.analytic.cop; };
    double mu_lo = std::numeric_limits<double>::infinity(), mu_hi = 0.0;
    for (const auto& [key, rows] : fam) {
        mu_lo = std::min(mu_lo, key.second);
        mu_hi = std::max(mu_hi, key.second);
        if (!detail::non_decreasing(rows, cop)) {
            r.passed = false;
            r.detail += detail::fmt("COP decreases along mu=%.3g; ", key.second);
        }
    }
    std::size_t compared = 0;
    for (const auto& [key, rows] : fam) {
        if (key.second != mu_hi || mu_lo == mu_hi) continue;
        const auto it = fam.find({key.first, mu_lo});
        if (it == fam.end() || it->second.size() != rows.size()) continue;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            ++compared;
            if (rows[i]->analytic.cop > it->second[i]->analytic.cop) {
                r.passed = false;
                r.detail += detail::fmt("COP(mu_hi) > COP(mu_lo) at x=%.3g; ", rows[i]->x);
            }
        }
    }
    if (compared == 0) {
        r.passed = false;
        r.detail += "no pair of mu curves to compare; ";
    }
    r.detail += detail::fmt("mu %.3g vs %.3g, ", mu_lo, mu_hi) + std::to_string(compared) + " points compared";
    return r;
}

/// Unimodal analytic and FIXED+STATIC empirical P_SUC at the given mu factor,
/// with the peak rising from the smallest to the largest M_O.
inline CheckResult check_success_shape(const SweepResult& result, double mu_factor) {
    CheckResult r{"P_SUC unimodal; peak rises with M_O", true, ""};
    const auto fam = detail::families(result);
    auto analytic = [](const SweepRow& row) { return row.analytic.success; };
    auto empirical = [](const SweepRow& row) { return row.fixed ? row.fixed->success.value : 0.0; };
    std::map<std::size_t, std::pair<double, double>> peaks;
    for (const auto& [key, rows] : fam) {
        if (key.second != mu_factor) continue;
        const double pa = detail::interior_peak(rows, analytic);
        const double pe = rows.front()->fixed ? detail::interior_peak(rows, empirical) : std::numeric_limits<double>::quiet_NaN();
        peaks[key.first] = {pa, pe};
        r.detail += "M_O=" + std::to_string(key.first) + detail::fmt(": peak analytic %.4f, empirical %.4f; ", pa, pe);
        if (std::isnan(pa) || std::isnan(pe)) r.passed = false;
    }
    if (peaks.size() < 2) {
        r.passed = false;
        r.detail += "fewer than two M_O curves at this mu";
        return r;
    }
    const auto& lo = peaks.begin()->second;
    const auto& hi = peaks.rbegin()->second;
    if (!(hi.first > lo.first) || !(hi.second > lo.second)) {
        r.passed = false;
        r.detail += "peak does not rise with M_O";
    } else {
        r.detail += "peak rises with M_O";
    }
    return r;
}

/// Best-product FRIS outage at or below the RIS baseline at every point (coherent
/// phases, paired draws), with disjoint 95% intervals on at least half of the
/// points where both lie inside (0.05, 0.95).
inline CheckResult check_fris_vs_ris(const SweepResult& result, std::size_t m_o, double mu_factor) {
    CheckResult r{"FRIS (best product) OP <= RIS OP at every point", true, ""};
    std::size_t points = 0, banded = 0, separated = 0;
    for (const auto& row : result.rows) {
        if (row.m_o != m_o || row.mu_factor != mu_factor || !row.fris || !row.ris) continue;
        ++points;
        const auto& f = row.fris->op;
        const auto& g = row.ris->op;
        if (f.value > g.value) {
            r.passed = false;
            r.detail += detail::fmt("FRIS OP %.4f > RIS OP %.4f at x=%.3g; ", f.value, g.value, row.x);
        }
        if (f.value > kCiBandLow && f.value < kCiBandHigh && g.value > kCiBandLow && g.value < kCiBandHigh) {
            ++banded;
            if (f.ci_high < g.ci_low) ++separated;
        }
    }
    if (points == 0) {
        r.passed = false;
        r.detail += "no rows with both FRIS and RIS estimates; ";
    }
    if (2 * separated < banded) r.passed = false;
    r.detail += std::to_string(points) + " points, " + std::to_string(banded) + " inside (0.05, 0.95), " +
                std::to_string(separated) + " with disjoint CIs";
    return r;
}

} // namespace fris::validation
