#pragma once

// Monte Carlo realisation of the cascaded Alice -> surface -> receiver
// channel: correlated fading, fluid port selection, phase configuration and
// the fixed-position RIS baseline.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include "fris/error.hpp"
#include "fris/surface.hpp"

namespace fris {

using ComplexVector = Eigen::VectorXcd;
using ComplexRef = Eigen::Ref<const Eigen::VectorXcd>;

enum class PhaseMode {
    Static,   ///< Phi = I
    Coherent, ///< each selected product term co-phased toward Bob
};

enum class SelectionMode {
    BestProduct, ///< top-M_O ports by |a_i| |b_i|
    Fixed,       ///< deterministic preset of M_O ports
    RisFull,     ///< every element of the fixed-position baseline
};

inline std::string_view to_string(PhaseMode m) { return m == PhaseMode::Static ? "static" : "coherent"; }

inline std::string_view to_string(SelectionMode m) {
    switch (m) {
    case SelectionMode::BestProduct: return "best_product";
    case SelectionMode::Fixed: return "fixed";
    case SelectionMode::RisFull: return "ris_full";
    }
    return "?";
}

/// Unit-variance circularly-symmetric complex normal samples (variance 1/2 per component).
inline ComplexVector sample_iid_fading(std::size_t m, std::mt19937_64& rng) {
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexVector h(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        h(i) = {re, im};
    }
    return h;
}

/// J^{1/2} h with h ~ CN(0, I).
inline ComplexVector sample_correlated_fading(const Eigen::MatrixXd& sqrt_j, std::mt19937_64& rng) {
    if (sqrt_j.rows() == 0 || sqrt_j.rows() != sqrt_j.cols())
        throw DomainError("sample_correlated_fading: square root must be square and non-empty");
    const ComplexVector h = sample_iid_fading(static_cast<std::size_t>(sqrt_j.cols()), rng);
    return sqrt_j.cast<std::complex<double>>() * h;
}

/// Port selection for one draw. `a` and `b` are the correlated Alice- and Bob-side vectors.
///
/// BestProduct picks the `m_o` largest |a_i||b_i| (ties to the lower index),
/// which maximises the co-phased cascade sum over all subsets of size m_o.
inline PortSelection select_ports(const ComplexRef& a, const ComplexRef& b, std::size_t m_o, SelectionMode mode,
                                  const PortSelection& preset = {}) {
    const auto m = static_cast<std::size_t>(a.size());
    if (static_cast<std::size_t>(b.size()) != m) throw DomainError("select_ports: vector length mismatch");
    if (m_o > m) throw DomainError("select_ports: more active ports than available");
    switch (mode) {
    case SelectionMode::Fixed:
        if (preset.size() != m_o) throw DomainError("select_ports: preset size differs from m_o");
        if (!preset.empty() && preset.indices().back() >= m) throw DomainError("select_ports: preset out of range");
        return preset;
    case SelectionMode::RisFull:
        return PortSelection::all(m);
    case SelectionMode::BestProduct:
        break;
    }
    std::vector<double> score(m);
    for (std::size_t i = 0; i < m; ++i) score[i] = std::abs(a(static_cast<Eigen::Index>(i))) * std::abs(b(static_cast<Eigen::Index>(i)));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t x, std::size_t y) { return score[x] > score[y] || (score[x] == score[y] && x < y); };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m_o), order.end(), better);
    order.resize(m_o);
    return PortSelection(std::move(order), m);
}

/// Phases -arg(conj(b_i) a_i) that co-phase every selected term toward Bob.
inline std::vector<double> coherent_phases(const ComplexRef& a, const ComplexRef& b, const PortSelection& sel) {
    std::vector<double> phases(sel.size());
    for (std::size_t k = 0; k < sel.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(sel[k]);
        phases[k] = -std::arg(std::conj(b(i)) * a(i));
    }
    return phases;
}

inline std::vector<double> phases_for(PhaseMode mode, const ComplexRef& a, const ComplexRef& b, const PortSelection& sel) {
    return mode == PhaseMode::Coherent ? coherent_phases(a, b, sel) : std::vector<double>(sel.size(), 0.0);
}

/// |H|^2 of the cascade toward the receiver whose correlated vector is `b`.
inline double cascaded_gain(const ComplexRef& a, const ComplexRef& b, const PortSelection& sel, PhaseMode mode) {
    if (sel.empty()) throw DomainError("cascaded_gain: empty selection");
    if (a.size() != b.size()) throw DomainError("cascaded_gain: vector length mismatch");
    if (sel.indices().back() >= static_cast<std::size_t>(a.size())) throw DomainError("cascaded_gain: selection out of range");
    if (mode == PhaseMode::Coherent) {
        double sum = 0.0;
        for (std::size_t i : sel.indices()) {
            const auto k = static_cast<Eigen::Index>(i);
            sum += std::abs(a(k)) * std::abs(b(k));
        }
        return sum * sum;
    }
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t i : sel.indices()) {
        const auto k = static_cast<Eigen::Index>(i);
        sum += std::conj(b(k)) * a(k);
    }
    return std::norm(sum);
}

/// Warden gain under the Bob-serving selection and phases.
inline double willie_gain(const ComplexRef& a, const ComplexRef& c, const PortSelection& sel,
                          std::span<const double> bob_phases) {
    if (bob_phases.size() != sel.size()) throw DomainError("willie_gain: phase/selection length mismatch");
    if (a.size() != c.size()) throw DomainError("willie_gain: vector length mismatch");
    if (!sel.empty() && sel.indices().back() >= static_cast<std::size_t>(a.size()))
        throw DomainError("willie_gain: selection out of range");
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t k = 0; k < sel.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(sel[k]);
        sum += std::polar(1.0, bob_phases[k]) * std::conj(c(i)) * a(i);
    }
    return std::norm(sum);
}

/// One realisation: raw fading (before correlation), the active ports, their phases and both gains.
struct ChannelDraw {
    ComplexVector h_af;
    ComplexVector h_fb;
    ComplexVector h_fw;
    PortSelection selection;
    std::vector<double> phases;
    double g_b = 0.0;
    double g_w = 0.0;
};

namespace detail {

inline ChannelDraw finish_draw(ComplexVector h_af, ComplexVector h_fb, ComplexVector h_fw, const ComplexRef& a,
                               const ComplexRef& b, const ComplexRef& c, PortSelection sel, PhaseMode phase) {
    ChannelDraw d;
    d.phases = phases_for(phase, a, b, sel);
    d.g_b = cascaded_gain(a, b, sel, phase);
    d.g_w = willie_gain(a, c, sel, d.phases);
    d.selection = std::move(sel);
    d.h_af = std::move(h_af);
    d.h_fb = std::move(h_fb);
    d.h_fw = std::move(h_fw);
    return d;
}

} // namespace detail

/// Immutable FRIS channel model: port grid, correlation, its square root and the fixed preset.
class FrisChannel {
public:
    FrisChannel(const SurfaceGeometry& geom, std::size_t active_ports)
        : geom_(geom), j_(correlation_matrix(geom)), sqrt_j_(psd_sqrt(j_)), preset_(fixed_preset(geom, active_ports)) {}

    const SurfaceGeometry& geometry() const noexcept { return geom_; }
    const CorrelationMatrix& correlation() const noexcept { return j_; }
    const Eigen::MatrixXd& sqrt_correlation() const noexcept { return sqrt_j_; }
    const PortSelection& preset() const noexcept { return preset_; }
    std::size_t active_ports() const noexcept { return preset_.size(); }
    std::size_t port_count() const noexcept { return j_.dim(); }

    /// Draws h_af, h_fb, h_fw in that order from `rng`. RisFull activates every port.
    ChannelDraw draw(std::mt19937_64& rng, SelectionMode selection, PhaseMode phase) const {
        const std::size_t m = port_count();
        ComplexVector h_af = sample_iid_fading(m, rng);
        ComplexVector h_fb = sample_iid_fading(m, rng);
        ComplexVector h_fw = sample_iid_fading(m, rng);
        const Eigen::MatrixXcd root = sqrt_j_.cast<std::complex<double>>();
        const ComplexVector a = root * h_af;
        const ComplexVector b = root * h_fb;
        const ComplexVector c = root * h_fw;
        PortSelection sel = select_ports(a, b, selection == SelectionMode::RisFull ? m : active_ports(), selection, preset_);
        return detail::finish_draw(std::move(h_af), std::move(h_fb), std::move(h_fw), a, b, c, std::move(sel), phase);
    }

private:
    SurfaceGeometry geom_;
    CorrelationMatrix j_;
    Eigen::MatrixXd sqrt_j_;
    PortSelection preset_;
};

/// Fixed-position RIS over the same aperture as a FRIS, with all elements active.
class RisBaseline {
public:
    /// `max_density` caps elements per square wavelength; 0 uses the FRIS port density.
    RisBaseline(const SurfaceGeometry& fris, std::size_t elements, double max_density = 0.0) {
        fris.validate();
        if (elements == 0) throw DomainError("RisBaseline: element count must be positive");
        const double area = fris.w_x * fris.w_z;
        const double cap = max_density > 0.0 ? max_density : static_cast<double>(fris.element_count()) / area;
        if (static_cast<double>(elements) / area > cap * (1.0 + 1e-12))
            throw DomainError("RisBaseline: element count exceeds the density cap");
        const auto [rows, cols] = grid_factorisation(elements, fris.w_x / fris.w_z, elements, elements);
        grid_ = SurfaceGeometry{cols, rows, fris.w_x, fris.w_z, fris.wavelength};
        j_ = correlation_matrix(grid_);
        sqrt_j_ = psd_sqrt(j_);
        if (fris.m_x % cols == 0 && fris.m_z % rows == 0) {
            const std::size_t stride_x = fris.m_x / cols;
            const std::size_t stride_z = fris.m_z / rows;
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) fris_ports_.push_back(r * stride_z * fris.m_x + c * stride_x);
        }
    }

    const SurfaceGeometry& grid() const noexcept { return grid_; }
    const CorrelationMatrix& correlation() const noexcept { return j_; }
    const Eigen::MatrixXd& sqrt_correlation() const noexcept { return sqrt_j_; }
    std::size_t element_count() const noexcept { return j_.dim(); }

    /// FRIS port coinciding with each RIS element, or empty when the grids do not nest.
    std::span<const std::size_t> fris_ports() const noexcept { return fris_ports_; }
    bool nests_in_fris() const noexcept { return !fris_ports_.empty(); }

    ChannelDraw draw(std::mt19937_64& rng, PhaseMode phase = PhaseMode::Coherent) const {
        const std::size_t m = element_count();
        ComplexVector h_af = sample_iid_fading(m, rng);
        ComplexVector h_fb = sample_iid_fading(m, rng);
        ComplexVector h_fw = sample_iid_fading(m, rng);
        const Eigen::MatrixXcd root = sqrt_j_.cast<std::complex<double>>();
        const ComplexVector a = root * h_af;
        const ComplexVector b = root * h_fb;
        const ComplexVector c = root * h_fw;
        return detail::finish_draw(std::move(h_af), std::move(h_fb), std::move(h_fw), a, b, c, PortSelection::all(m), phase);
    }

private:
    SurfaceGeometry grid_;
    CorrelationMatrix j_;
    Eigen::MatrixXd sqrt_j_;
    std::vector<std::size_t> fris_ports_;
};

/// Baseline draw: all `m_hat` elements active, co-phased toward Bob.
inline ChannelDraw ris_baseline_draw(const SurfaceGeometry& geom, std::size_t m_hat, std::mt19937_64& rng,
                                     double max_density = 0.0) {
    return RisBaseline(geom, m_hat, max_density).draw(rng, PhaseMode::Coherent);
}

} // namespace fris
