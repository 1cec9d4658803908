#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "schottky/geometry.hpp"

namespace schottky {

using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

/// Bergman kernel of a disk: r² / (π [r² - (z1-c)(conj(z2)-c)]²).
inline cplx bergman_kernel(const Disk& disk, cplx z1, cplx z2) {
    const double r2 = disk.radius * disk.radius;
    const cplx den = r2 - (z1 - disk.center) * std::conj(z2 - disk.center);
    return r2 / (std::numbers::pi * den * den);
}

/// Truncated orthonormal basis of H(D_a) on every Schottky disk:
/// e_{a,k}(z) = sqrt((k+1)/π) (z - c_a)^k / r_a^{k+1}, k = 0..M-1.
///
/// Global coefficient index of e_{a,k} is a*M + k.
class BergmanBasis {
public:
    BergmanBasis(SchottkyData data, int degree) : data_(std::move(data)), degree_(degree) {
        if (degree < 1) throw GeometryError("Bergman truncation degree must be >= 1");
        nodes_ = std::max(64, 4 * degree);
        const double pi = std::numbers::pi;
        roots_.resize(static_cast<std::size_t>(nodes_));
        for (int q = 0; q < nodes_; ++q) {
            roots_[q] = std::polar(1.0, 2.0 * pi * q / nodes_);
        }
        norm_factor_.resize(degree);
        for (int k = 0; k < degree; ++k) norm_factor_[k] = std::sqrt((k + 1) / pi);
        // Projection weights: ⟨g, e_j⟩ = sqrt(π/(j+1)) r^{j+1} g_j with g_j from the
        // trapezoid rule on |z-c| = r/2, so the radius enters as r·2^j.
        projection_.resize(degree, nodes_);
        for (int j = 0; j < degree; ++j) {
            const double scale = std::sqrt(pi / (j + 1)) * std::pow(2.0, j) / nodes_;
            for (int q = 0; q < nodes_; ++q) {
                projection_(j, q) = scale * std::conj(std::pow(roots_[q], j));
            }
        }
    }

    const SchottkyData& data() const noexcept { return data_; }
    int degree() const noexcept { return degree_; }
    int slots() const noexcept { return data_.alphabet_size(); }
    int dimension() const noexcept { return slots() * degree_; }
    int quadrature_nodes() const noexcept { return nodes_; }

    /// Contour node q on |z - c_a| = r_a/2.
    cplx node(Letter a, int q) const {
        const Disk& d = data_.disk(a);
        return d.center + 0.5 * d.radius * roots_[static_cast<std::size_t>(q)];
    }

    cplx evaluate(Letter a, int k, cplx z) const {
        const Disk& d = data_.disk(a);
        const cplx t = (z - d.center) / d.radius;
        return norm_factor_[k] * std::pow(t, k) / d.radius;
    }

    /// Writes e_{a,0..M-1}(z) into out.
    template <typename Row>
    void evaluate_all(Letter a, cplx z, Row&& out) const {
        const Disk& d = data_.disk(a);
        const cplx t = (z - d.center) / d.radius;
        cplx p = 1.0 / d.radius;
        for (int k = 0; k < degree_; ++k) {
            out(k) = norm_factor_[k] * p;
            p *= t;
        }
    }

    /// Maps contour samples (length Q, on disk a) to the M Bergman coefficients.
    template <typename Samples>
    VectorC project_samples(Letter a, const Samples& samples) const {
        return data_.disk(a).radius * (projection_ * samples);
    }

    /// Q×M samples to M×M coefficients, column by column.
    MatrixC project_sample_matrix(Letter a, const MatrixC& samples) const {
        return data_.disk(a).radius * (projection_ * samples);
    }

private:
    SchottkyData data_;
    int degree_;
    int nodes_;
    std::vector<cplx> roots_;
    std::vector<double> norm_factor_;
    MatrixC projection_;
};

/// Coefficients ⟨g, e_{a,j}⟩, j = 0..M-1, of a function holomorphic on D_a.
template <typename F>
VectorC taylor_project(F&& g, Letter a, const BergmanBasis& basis) {
    const int q_nodes = basis.quadrature_nodes();
    VectorC samples(q_nodes);
    for (int q = 0; q < q_nodes; ++q) {
        const cplx v = g(basis.node(a, q));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw NumericalError("taylor_project: non-finite sample value");
        }
        samples(q) = v;
    }
    return basis.project_samples(a, samples);
}

}  // namespace schottky
