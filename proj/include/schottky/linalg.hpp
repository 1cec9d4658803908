#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "schottky/bergman.hpp"

namespace schottky {

/// Largest singular value by bidiagonal divide-and-conquer SVD.
inline double operator_norm(const MatrixC& t) {
    if (t.size() == 0) return 0.0;
    Eigen::BDCSVD<MatrixC> svd(t);
    return svd.singularValues()(0);
}

/// Independent route: sqrt of the top eigenvalue of T*T.
inline double operator_norm_gram(const MatrixC& t) {
    if (t.size() == 0) return 0.0;
    const MatrixC gram = t.adjoint() * t;
    Eigen::SelfAdjointEigenSolver<MatrixC> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Power iteration on T*T.
inline double operator_norm_power(const MatrixC& t, double tol = 1e-14, int max_iter = 100000) {
    if (t.size() == 0) return 0.0;
    VectorC x = VectorC::Ones(t.cols()).normalized();
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const VectorC y = t.adjoint() * (t * x);
        const double lam = y.norm();
        if (lam == 0.0) return 0.0;
        x = y / lam;
        if (std::abs(lam - prev) <= tol * lam) return std::sqrt(lam);
        prev = lam;
    }
    throw NumericalError("operator_norm_power: no convergence");
}

inline bool all_finite(const MatrixC& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const cplx v = t.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

/// det(I - T) by partial-pivot LU.
inline cplx fredholm_det(const MatrixC& t) {
    if (t.rows() != t.cols()) throw NumericalError("fredholm_det: matrix is not square");
    if (!all_finite(t)) throw NumericalError("fredholm_det: non-finite entries");
    if (t.size() == 0) return {1.0, 0.0};
    const MatrixC a = MatrixC::Identity(t.rows(), t.cols()) - t;
    return Eigen::PartialPivLU<MatrixC>(a).determinant();
}

struct LanczosOptions {
    double tol = 1e-10;  ///< relative change of the top Ritz value between checks
    int max_steps = 200;
    int check_every = 2;
    std::uint64_t seed = 0x9E3779B97F4A7C15ull;
};

struct LanczosResult {
    double sigma = 0.0;
    int steps = 0;
    bool converged = false;
};

/// Deterministic pseudo-random start vector (splitmix64 stream, platform independent).
inline VectorC lanczos_start(Eigen::Index n, std::uint64_t seed) {
    VectorC v(n);
    std::uint64_t state = seed;
    auto next = [&state]() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = next();
        const double im = next();
        v(i) = cplx{re, im};
    }
    return v;
}

/// Top singular value of a matrix-free operator by Golub–Kahan–Lanczos
/// bidiagonalization with full reorthogonalization.
///
/// `apply(x)` and `apply_adjoint(y)` return A x and A* y; `restrict(v)` projects
/// onto an invariant subspace (identity if unused) and is applied to every
/// Krylov vector.
template <typename Apply, typename ApplyAdj, typename Restrict>
LanczosResult largest_singular_value(Apply&& apply, ApplyAdj&& apply_adjoint, Restrict&& restrict,
                                     Eigen::Index cols, const LanczosOptions& opt = {}) {
    LanczosResult res;
    if (cols == 0) {
        res.converged = true;
        return res;
    }
    VectorC v = lanczos_start(cols, opt.seed);
    restrict(v);
    double nv = v.norm();
    if (nv == 0.0) {
        res.converged = true;
        return res;
    }
    v /= nv;
    std::vector<VectorC> vs{v};
    std::vector<VectorC> us;
    std::vector<double> alpha, beta;
    VectorC u = apply(v);
    double prev = -1.0;
    const int max_steps = static_cast<int>(std::min<Eigen::Index>(opt.max_steps, cols));
    for (int k = 0; k < max_steps; ++k) {
        for (const auto& uj : us) u -= uj * uj.dot(u);
        const double a = u.norm();
        alpha.push_back(a);
        if (a == 0.0) break;
        u /= a;
        us.push_back(u);

        VectorC w = apply_adjoint(u) - a * vs.back();
        restrict(w);
        for (const auto& vj : vs) w -= vj * vj.dot(w);
        for (const auto& vj : vs) w -= vj * vj.dot(w);
        const double b = w.norm();

        res.steps = k + 1;
        if ((k + 1) % opt.check_every == 0 || b == 0.0 || k + 1 == max_steps) {
            const int m = static_cast<int>(alpha.size());
            Eigen::MatrixXd bd = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                bd(i, i) = alpha[i];
                if (i + 1 < m) bd(i, i + 1) = beta[i];
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(bd);
            const double sigma = svd.singularValues()(0);
            res.sigma = sigma;
            if (prev >= 0.0 && std::abs(sigma - prev) <= opt.tol * sigma) {
                res.converged = true;
                break;
            }
            prev = sigma;
        }
        if (b <= 1e-14 * std::max(1.0, res.sigma)) {
            res.converged = true;
            break;
        }
        beta.push_back(b);
        w /= b;
        vs.push_back(w);
        u = apply(w) - b * us.back();
    }
    return res;
}

template <typename Apply, typename ApplyAdj>
LanczosResult largest_singular_value(Apply&& apply, ApplyAdj&& apply_adjoint, Eigen::Index cols,
                                     const LanczosOptions& opt = {}) {
    return largest_singular_value(apply, apply_adjoint, [](VectorC&) {}, cols, opt);
}

/// Kronecker product A ⊗ B with row index i*rows(B) + k.
inline MatrixC kron(const MatrixC& a, const MatrixC& b) {
    MatrixC out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace schottky
