#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "schottky/transfer.hpp"

namespace schottky {

/// Spectral radius of the untwisted L̂_s at real s, by power iteration.
///
/// The start vector is the positive function equal to e_{a,0} on every disk.
inline double leading_eigenvalue(double s, const BergmanBasis& basis, double tol = 1e-13,
                                 int max_iter = 10000) {
    const MatrixC l = base_transfer(cplx{s, 0.0}, 1, basis);
    VectorC x = VectorC::Zero(l.cols());
    for (int a = 0; a < basis.slots(); ++a) x(a * basis.degree()) = 1.0;
    x.normalize();
    double prev = 0.0;
    double lam = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        VectorC y = l * x;
        lam = y.norm();
        if (lam == 0.0) return 0.0;
        x = y / lam;
        if (it > 2 && std::abs(lam - prev) <= tol * lam) return lam;
        prev = lam;
    }
    std::ostringstream os;
    os << "leading_eigenvalue: power iteration did not converge at s = " << s << " (last estimate "
       << lam << ", previous " << prev << ")";
    throw NumericalError(os.str());
}

struct DimensionResult {
    double delta = 0.0;
    double residual = 0.0;  ///< |λ(delta) - 1|
    int degree = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int evaluations = 0;
};

/// Solves λ(s) = 1 on (0,1) by bisection followed by secant polishing.
inline DimensionResult bowen_dim(const BergmanBasis& basis, double tol = 1e-10) {
    if (!(tol >= 1e-12)) throw NumericalError("bowen_dim: tolerance must be >= 1e-12");
    DimensionResult res;
    res.degree = basis.degree();
    auto f = [&](double s) {
        ++res.evaluations;
        return leading_eigenvalue(s, basis) - 1.0;
    };

    double lo = 0.01, hi = 0.99;
    double flo = f(lo), fhi = f(hi);
    for (int k = 0; k < 4 && flo <= 0.0; ++k) {
        lo /= 10.0;
        flo = f(lo);
    }
    for (int k = 0; k < 4 && fhi >= 0.0; ++k) {
        hi = 1.0 - (1.0 - hi) / 10.0;
        fhi = f(hi);
    }
    if (!(flo > 0.0 && fhi < 0.0)) {
        throw NumericalError("bowen_dim: no root of lambda(s) = 1 bracketed in (0,1)");
    }

    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    res.bracket_lo = lo;
    res.bracket_hi = hi;

    // Secant polish started from the bracket endpoints.
    double s0 = lo, s1 = hi, f0 = flo, f1 = fhi;
    double best = std::abs(f0) < std::abs(f1) ? s0 : s1;
    double best_f = std::min(std::abs(f0), std::abs(f1));
    for (int it = 0; it < 50 && best_f > tol; ++it) {
        if (f1 == f0) break;
        const double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        const double f2 = f(s2);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = f2;
        if (std::abs(f2) < best_f) {
            best = s2;
            best_f = std::abs(f2);
        }
    }
    res.delta = best;
    res.residual = best_f;
    if (!(res.residual < tol)) {
        throw NumericalError("bowen_dim: secant polish did not reach the requested tolerance");
    }
    return res;
}

}  // namespace schottky
