#pragma once

// Closed-form covertness and reliability metrics under the Gamma
// moment-matched approximation of the cascaded channel gain.

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "fris/error.hpp"
#include "fris/specfun.hpp"
#include "fris/surface.hpp"

namespace fris {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

/// Link budget, detector and traffic parameters. All powers in watts.
struct ScenarioConfig {
    double d_af = 50.0;
    double d_fb = 100.0;
    double d_fw = 100.0;
    double alpha = 2.1;
    double rho0 = 1.0;
    double r_b = 0.1;
    double sigma2_b = 1e-12;
    double sigma2_w = 1e-12;
    double p0 = 0.5;
    double p1 = 0.5;
    double mu_offset = 1e-12;
    double p_a = 1e-3;
    std::size_t active_ports = 36;
    /// Element count of the fixed-position RIS baseline; 0 means "same as active_ports".
    std::size_t ris_elements = 0;
    /// Baseline elements per square wavelength allowed; 0 means the FRIS port density.
    double ris_max_density = 0.0;

    std::size_t ris_element_count() const noexcept { return ris_elements == 0 ? active_ports : ris_elements; }

    void validate() const {
        auto positive = [](double v, const char* field) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be strictly positive");
        };
        positive(d_af, "scenario.d_af");
        positive(d_fb, "scenario.d_fb");
        positive(d_fw, "scenario.d_fw");
        positive(alpha, "scenario.alpha");
        positive(rho0, "scenario.rho0");
        positive(sigma2_b, "scenario.sigma2_b");
        positive(sigma2_w, "scenario.sigma2_w");
        positive(mu_offset, "scenario.mu");
        positive(p_a, "scenario.p_a");
        if (!(r_b >= 0.0) || !std::isfinite(r_b)) throw ConfigError("scenario.r_b", "must be non-negative");
        if (!(p0 >= 0.0 && p0 <= 1.0)) throw ConfigError("scenario.p0", "must lie in [0, 1]");
        if (!(p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("scenario.p1", "must lie in [0, 1]");
        if (std::abs(p0 + p1 - 1.0) > 1e-12) throw ConfigError("scenario.p0+p1", "hypothesis priors must sum to 1");
        if (active_ports == 0) throw ConfigError("scenario.m_o", "must be a positive integer");
    }
};

/// Shape/scale of the Gamma law matched to the first two trace moments.
struct GammaFit {
    double kappa = 1.0;
    double theta = 1.0;
};

/// kappa = tr(J^2)^2 / tr(J^4), theta = tr(J^4) / tr(J^2), with tr(J^4) = ||J^2||_F^2.
inline GammaFit gamma_moment_match(const Eigen::MatrixXd& j_tilde) {
    if (j_tilde.rows() == 0 || j_tilde.rows() != j_tilde.cols())
        throw DomainError("gamma_moment_match: matrix must be square and non-empty");
    const Eigen::MatrixXd j2 = j_tilde * j_tilde;
    const double tr2 = j2.trace();
    const double tr4 = j2.squaredNorm();
    if (!(tr2 > 0.0) || !(tr4 > 0.0)) throw DegenerateFitError("gamma_moment_match: vanishing trace moments");
    return GammaFit{tr2 * tr2 / tr4, tr4 / tr2};
}

inline GammaFit gamma_moment_match(const CorrelationMatrix& j_tilde) { return gamma_moment_match(j_tilde.matrix()); }

inline double gamma_cdf(const GammaFit& fit, double g) {
    if (std::isnan(g) || g < 0.0) throw DomainError("gamma_cdf: argument must be non-negative");
    return specfun::reg_lower_incomplete_gamma(fit.kappa, g / fit.theta);
}

/// Large-scale gain rho0 * d^-alpha.
inline double path_loss(double d, double alpha, double rho0) {
    if (!(d > 0.0)) throw DomainError("path_loss: distance must be positive");
    return rho0 * std::pow(d, -alpha);
}

namespace detail {

inline double willie_link_gain(const ScenarioConfig& cfg) {
    return cfg.p_a * path_loss(cfg.d_af, cfg.alpha, cfg.rho0) * path_loss(cfg.d_fw, cfg.alpha, cfg.rho0);
}

inline double bob_link_gain(const ScenarioConfig& cfg) {
    return cfg.p_a * path_loss(cfg.d_af, cfg.alpha, cfg.rho0) * path_loss(cfg.d_fb, cfg.alpha, cfg.rho0);
}

} // namespace detail

/// Normalised detector threshold eta = (zeta - sigma2_w) / (P_A L_AF L_FW).
inline double normalized_threshold(const ScenarioConfig& cfg, double zeta) {
    return (zeta - cfg.sigma2_w) / detail::willie_link_gain(cfg);
}

/// Outage gain threshold (2^R_B - 1) sigma2_b / (P_A L_AF L_FB).
inline double outage_gain_threshold(const ScenarioConfig& cfg) {
    const double snr_target = std::exp2(cfg.r_b) - 1.0;
    return snr_target * cfg.sigma2_b / detail::bob_link_gain(cfg);
}

/// Probability that the warden misses an active transmission.
inline double md_probability(const GammaFit& fit, const ScenarioConfig& cfg, double zeta) {
    if (std::isnan(zeta) || zeta < 0.0) throw DomainError("md_probability: threshold must be non-negative");
    if (zeta <= cfg.sigma2_w) return 0.0;
    return gamma_cdf(fit, normalized_threshold(cfg, zeta));
}

/// Probability that the warden flags a silent slot; the H0 statistic is exactly sigma2_w.
inline double fa_probability(const ScenarioConfig& cfg, double zeta) {
    if (std::isnan(zeta) || zeta < 0.0) throw DomainError("fa_probability: threshold must be non-negative");
    return zeta <= cfg.sigma2_w ? 1.0 : 0.0;
}

/// Worst-case warden threshold sigma2_w + mu.
inline double optimal_threshold(const ScenarioConfig& cfg) {
    if (!(cfg.mu_offset > 0.0)) throw DomainError("optimal_threshold: threshold offset must be positive");
    return cfg.sigma2_w + cfg.mu_offset;
}

/// Covertness outage: probability that the warden decides correctly.
inline double cop(const ScenarioConfig& cfg, double p_fa, double p_md) {
    if (!(p_fa >= 0.0 && p_fa <= 1.0) || !(p_md >= 0.0 && p_md <= 1.0))
        throw DomainError("cop: probabilities must lie in [0, 1]");
    return cfg.p0 * (1.0 - p_fa) + cfg.p1 * (1.0 - p_md);
}

inline double outage_probability(const GammaFit& fit, const ScenarioConfig& cfg) {
    return gamma_cdf(fit, outage_gain_threshold(cfg));
}

/// Unconditional warden error probability.
inline double error_probability_xi(const ScenarioConfig& cfg, double p_fa, double p_md) {
    if (!(p_fa >= 0.0 && p_fa <= 1.0) || !(p_md >= 0.0 && p_md <= 1.0))
        throw DomainError("error_probability_xi: probabilities must lie in [0, 1]");
    return cfg.p0 * p_fa + cfg.p1 * p_md;
}

inline double success_probability(const ScenarioConfig& /*cfg*/, double p_out, double xi) {
    if (!(p_out >= 0.0 && p_out <= 1.0) || !(xi >= 0.0 && xi <= 1.0))
        throw DomainError("success_probability: probabilities must lie in [0, 1]");
    return (1.0 - p_out) * xi;
}

/// Every closed-form quantity for one operating point, evaluated at threshold `zeta`.
struct AnalyticPoint {
    GammaFit fit;
    double zeta = 0.0;
    double eta = 0.0;
    double rbar = 0.0;
    double p_fa = 0.0;
    double p_md = 0.0;
    double cop = 0.0;
    double op = 0.0;
    double xi = 0.0;
    double success = 0.0;
};

inline AnalyticPoint evaluate_analytics(const GammaFit& fit, const ScenarioConfig& cfg, double zeta) {
    AnalyticPoint pt;
    pt.fit = fit;
    pt.zeta = zeta;
    pt.eta = normalized_threshold(cfg, zeta);
    pt.rbar = outage_gain_threshold(cfg);
    pt.p_fa = fa_probability(cfg, zeta);
    pt.p_md = md_probability(fit, cfg, zeta);
    pt.cop = cop(cfg, pt.p_fa, pt.p_md);
    pt.op = outage_probability(fit, cfg);
    pt.xi = error_probability_xi(cfg, pt.p_fa, pt.p_md);
    pt.success = success_probability(cfg, pt.op, pt.xi);
    return pt;
}

inline AnalyticPoint evaluate_analytics(const GammaFit& fit, const ScenarioConfig& cfg) {
    return evaluate_analytics(fit, cfg, optimal_threshold(cfg));
}

} // namespace fris
