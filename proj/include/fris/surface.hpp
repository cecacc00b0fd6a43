#pragma once

// Planar port grid of a fluid RIS: geometry, Jakes spatial correlation, its
// PSD square root and principal-submatrix reduction for a port selection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fris/error.hpp"
#include "fris/specfun.hpp"

namespace fris {

/// Rectangular port grid spanning `w_x * wavelength` by `w_z * wavelength`.
///
/// Ports are indexed row-major from one corner: column `i % m_x`, row `i / m_x`.
struct SurfaceGeometry {
    std::size_t m_x = 12;
    std::size_t m_z = 12;
    double w_x = 2.0;
    double w_z = 2.0;
    double wavelength = 0.125;

    std::size_t element_count() const noexcept { return m_x * m_z; }
    double spacing_x() const noexcept { return w_x * wavelength / static_cast<double>(m_x); }
    double spacing_z() const noexcept { return w_z * wavelength / static_cast<double>(m_z); }

    void validate() const {
        if (m_x == 0) throw ConfigError("surface.m_x", "must be a positive integer");
        if (m_z == 0) throw ConfigError("surface.m_z", "must be a positive integer");
        if (!(w_x > 0.0) || !std::isfinite(w_x)) throw ConfigError("surface.w_x", "must be positive");
        if (!(w_z > 0.0) || !std::isfinite(w_z)) throw ConfigError("surface.w_z", "must be positive");
        if (!(wavelength > 0.0) || !std::isfinite(wavelength))
            throw ConfigError("surface.wavelength", "must be positive");
    }
};

/// Distance in meters between ports `i` and `j`.
inline double inter_element_distance(const SurfaceGeometry& geom, std::size_t i, std::size_t j) {
    const std::size_t m = geom.element_count();
    if (i >= m || j >= m) throw DomainError("inter_element_distance: port index out of range");
    const double dcol = static_cast<double>(i % geom.m_x) - static_cast<double>(j % geom.m_x);
    const double drow = static_cast<double>(i / geom.m_x) - static_cast<double>(j / geom.m_x);
    const double dx = geom.spacing_x();
    const double dz = geom.spacing_z();
    return std::sqrt(dx * dx * dcol * dcol + dz * dz * drow * drow);
}

/// Symmetric correlation matrix with unit diagonal and entries in [-1, 1].
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;

    explicit CorrelationMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
        const auto n = entries_.rows();
        if (n == 0 || entries_.cols() != n) throw DomainError("CorrelationMatrix: must be square and non-empty");
        for (Eigen::Index i = 0; i < n; ++i) {
            if (entries_(i, i) != 1.0) throw DomainError("CorrelationMatrix: diagonal must be exactly 1");
            for (Eigen::Index j = i + 1; j < n; ++j) {
                if (entries_(i, j) != entries_(j, i)) throw DomainError("CorrelationMatrix: must be symmetric");
                if (!(std::abs(entries_(i, j)) <= 1.0))
                    throw DomainError("CorrelationMatrix: entries must lie in [-1, 1]");
            }
        }
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXd entries_;
};

/// Jakes correlation J0(2*pi*d/lambda) between every pair of ports.
inline CorrelationMatrix correlation_matrix(const SurfaceGeometry& geom) {
    geom.validate();
    const std::size_t m = geom.element_count();
    const double k = 2.0 * std::numbers::pi / geom.wavelength;
    Eigen::MatrixXd j(m, m);
    for (std::size_t r = 0; r < m; ++r) {
        j(r, r) = 1.0;
        for (std::size_t c = r + 1; c < m; ++c) {
            const double mu = specfun::bessel_j0(k * inter_element_distance(geom, r, c));
            j(r, c) = mu;
            j(c, r) = mu;
        }
    }
    return CorrelationMatrix(std::move(j));
}

/// Relative eigenvalue floor below which a symmetric matrix is rejected as indefinite.
inline constexpr double kPsdClampTolerance = 1e-8;

/// Symmetric PSD square root Q diag(sqrt(max(lambda, 0))) Q^T.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
    if (a.rows() == 0 || a.rows() != a.cols()) throw NotPsdError("psd_sqrt: matrix must be square and non-empty");
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NotPsdError("psd_sqrt: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    if (eig.info() != Eigen::Success) throw NotPsdError("psd_sqrt: eigendecomposition failed");
    Eigen::VectorXd lambda = eig.eigenvalues();
    const double lambda_max = std::max(lambda.maxCoeff(), 0.0);
    if (lambda.minCoeff() < -kPsdClampTolerance * lambda_max || (lambda_max == 0.0 && lambda.minCoeff() < 0.0))
        throw NotPsdError("psd_sqrt: eigenvalue below clamping tolerance");
    lambda = lambda.cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd& q = eig.eigenvectors();
    Eigen::MatrixXd root = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (root + root.transpose());
}

inline Eigen::MatrixXd psd_sqrt(const CorrelationMatrix& j) { return psd_sqrt(j.matrix()); }

/// Sorted set of distinct active port indices; stands in for the 0/1 selection matrix.
class PortSelection {
public:
    PortSelection() = default;

    /// Validates that `indices` are distinct and below `dim`; stores them sorted.
    PortSelection(std::vector<std::size_t> indices, std::size_t dim) : indices_(std::move(indices)) {
        std::sort(indices_.begin(), indices_.end());
        if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
            throw DomainError("PortSelection: duplicate port index");
        if (!indices_.empty() && indices_.back() >= dim) throw DomainError("PortSelection: port index out of range");
    }

    static PortSelection all(std::size_t dim) {
        std::vector<std::size_t> idx(dim);
        for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
        return PortSelection(std::move(idx), dim);
    }

    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::size_t operator[](std::size_t k) const { return indices_[k]; }

    friend bool operator==(const PortSelection&, const PortSelection&) = default;

private:
    std::vector<std::size_t> indices_;
};

/// Principal submatrix of `j` on the selected ports.
inline CorrelationMatrix reduce(const CorrelationMatrix& j, const PortSelection& sel) {
    if (sel.empty()) throw DomainError("reduce: empty selection");
    const std::size_t n = sel.size();
    Eigen::MatrixXd out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        if (sel[r] >= j.dim()) throw DomainError("reduce: port index out of range");
        for (std::size_t c = 0; c < n; ++c) out(r, c) = j(sel[r], sel[c]);
    }
    return CorrelationMatrix(std::move(out));
}

/// Factor `count` into (rows, cols) with rows * cols == count, rows <= max_rows,
/// cols <= max_cols and cols/rows closest to `aspect` (ties: fewer rows).
/// Returns {0, 0} when no such factorisation exists.
inline std::pair<std::size_t, std::size_t> grid_factorisation(std::size_t count, double aspect, std::size_t max_rows,
                                                              std::size_t max_cols) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    double best_score = 0.0;
    for (std::size_t rows = 1; rows <= count; ++rows) {
        if (count % rows != 0) continue;
        const std::size_t cols = count / rows;
        if (rows > max_rows || cols > max_cols) continue;
        const double score = std::abs(std::log(static_cast<double>(cols) / static_cast<double>(rows) / aspect));
        if (best.first == 0 || score < best_score - 1e-12) {
            best = {rows, cols};
            best_score = score;
        }
    }
    return best;
}

/// Deterministic preset of `m_o` ports spread evenly over the aperture.
///
/// When `m_o` factors into an r x c grid that fits, port (row, col) of the
/// sub-grid is at grid row floor(row * m_z / r) and column floor(col * m_x / c);
/// otherwise ports are spaced evenly through the row-major index range.
inline PortSelection fixed_preset(const SurfaceGeometry& geom, std::size_t m_o) {
    const std::size_t m = geom.element_count();
    if (m_o == 0 || m_o > m) throw DomainError("fixed_preset: active port count must lie in [1, M]");
    const auto [rows, cols] = grid_factorisation(m_o, geom.w_x / geom.w_z, geom.m_z, geom.m_x);
    std::vector<std::size_t> idx;
    idx.reserve(m_o);
    if (rows != 0) {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                idx.push_back((r * geom.m_z / rows) * geom.m_x + c * geom.m_x / cols);
            }
        }
    } else {
        for (std::size_t k = 0; k < m_o; ++k) idx.push_back(k * m / m_o);
    }
    return PortSelection(std::move(idx), m);
}

} // namespace fris
