#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "schottky/geometry.hpp"
#include "schottky/transfer.hpp"

namespace schottky {

/// Running [lo, hi] of a positive ratio family.
struct RatioInterval {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    long samples = 0;

    void include(double x) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        ++samples;
    }
    /// Smallest C with the family inside [1/C, C].
    double constant() const { return std::max(hi, 1.0 / lo); }
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;  ///< largest |y - fit| over the data
};

/// Least-squares line through (x_i, y_i).
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        f.max_residual = std::max(f.max_residual, std::abs(y[i] - (f.intercept + f.slope * x[i])));
    }
    return f;
}

/// 50 points of a disk: the centre and rings at 0.25, 0.5, 0.75, 0.95 of the radius.
inline std::vector<cplx> disk_grid(const Disk& d) {
    std::vector<cplx> pts{cplx{d.center, 0.0}};
    const double radii[4] = {0.25, 0.5, 0.75, 0.95};
    const int counts[4] = {7, 14, 14, 14};
    for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < counts[r]; ++k) {
            const double angle = 2.0 * std::numbers::pi * (k + 0.5 * r) / counts[r];
            pts.push_back(cplx{d.center, 0.0} + radii[r] * d.radius * std::polar(1.0, angle));
        }
    }
    return pts;
}

/// Empirical constants of the coarse word geometry.
struct CoarseGeometryReport {
    int max_length = 0;
    RatioInterval multiplicativity;  ///< Υ_{w1 w2} / (Υ_{w1} Υ_{w2}), |w1 w2| ≤ max_length
    RatioInterval mirror;            ///< Υ_w / Υ_{w⁻¹}, |w| ≤ max_length
    RatioInterval derivative;        ///< |backspace(w)'(z)| / Υ_w, 2 ≤ |w| ≤ max_length, z on disk_grid(D_{E(w)})
    std::vector<int> lengths;        ///< ℓ for the exponential bound
    std::vector<double> min_upsilon, max_upsilon;
    double theta_hat = 0.0;          ///< fitted rate of min Υ over Γ_ℓ
    double tau_hat = 0.0;            ///< fitted rate of max Υ over Γ_ℓ
};

inline CoarseGeometryReport coarse_geometry_report(const SchottkyData& data, int max_length, int exp_min = 2,
                                                   int exp_max = 8) {
    const Alphabet& alpha = data.alphabet();
    CoarseGeometryReport rep;
    rep.max_length = max_length;
    const int cache_len = std::max(max_length, exp_max);
    std::vector<double> ups(static_cast<std::size_t>(alpha.ball_size(cache_len)), 0.0);
    for (int k = 1; k <= cache_len; ++k) {
        for_each_word(alpha, k, [&](const Word& w) { ups[word_rank(w)] = word_geometry(data, w).upsilon; });
    }
    auto upsilon = [&](const Word& w) { return ups[word_rank(w)]; };

    for (int k = 1; k <= max_length; ++k) {
        for_each_word(alpha, k, [&](const Word& w) {
            rep.mirror.include(upsilon(w) / upsilon(w.inverse()));
            const auto& letters = w.letters();
            for (int cut = 1; cut < k; ++cut) {
                const Word w1(alpha, std::vector<Letter>(letters.begin(), letters.begin() + cut));
                const Word w2(alpha, std::vector<Letter>(letters.begin() + cut, letters.end()));
                rep.multiplicativity.include(upsilon(w) / (upsilon(w1) * upsilon(w2)));
            }
            if (k >= 2) {
                const MobiusMap g = word_map(data, w.backspace());
                for (const cplx z : disk_grid(data.disk(w.end()))) {
                    rep.derivative.include(std::abs(derivative_finite(g, z)) / upsilon(w));
                }
            }
        });
    }

    std::vector<double> x, lmin, lmax;
    for (int k = exp_min; k <= exp_max; ++k) {
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        for_each_word(alpha, k, [&](const Word& w) {
            mn = std::min(mn, upsilon(w));
            mx = std::max(mx, upsilon(w));
        });
        rep.lengths.push_back(k);
        rep.min_upsilon.push_back(mn);
        rep.max_upsilon.push_back(mx);
        x.push_back(k);
        lmin.push_back(std::log(mn));
        lmax.push_back(std::log(mx));
    }
    rep.theta_hat = std::exp(fit_line(x, lmin).slope);
    rep.tau_hat = std::exp(fit_line(x, lmax).slope);
    return rep;
}

/// Points of a rectangle on an n_re × n_im grid (cell centres).
inline std::vector<cplx> s_grid(double re_min, double re_max, double im_min, double im_max, int n_re, int n_im) {
    std::vector<cplx> pts;
    for (int i = 0; i < n_re; ++i) {
        for (int j = 0; j < n_im; ++j) {
            pts.emplace_back(re_min + (i + 0.5) * (re_max - re_min) / n_re,
                             im_min + (j + 0.5) * (im_max - im_min) / n_im);
        }
    }
    return pts;
}

/// Constants of the s-Lipschitz bound
///   ‖L̂^ℓ_{s1} − L̂^ℓ_{s2}‖ ≤ J |s1 − s2| (ℓ+1) [(2N−1) C_K^B]^{ℓ+1}.
struct LipschitzConstants {
    double J = 0.0;
    double B = 0.0;    ///< max |τ(backspace(w)'(z))| / (ℓ+1) over calibration words and samples
    double C_K = 0.0;  ///< max_{s∈K} e^{|s|}
    int rank = 2;

    double rhs(double ds, int ell) const {
        return J * ds * (ell + 1) * std::pow((2 * rank - 1) * std::pow(C_K, B), ell + 1);
    }
};

/// max_{s∈K} e^{|s|} for a rectangle (the maximum of |s| is at a corner).
inline double compact_constant(double re_min, double re_max, double im_min, double im_max) {
    double m = 0.0;
    for (double re : {re_min, re_max}) {
        for (double im : {im_min, im_max}) m = std::max(m, std::abs(cplx{re, im}));
    }
    return std::exp(m);
}

/// B from the θ samples of every w ∈ Γ_{ℓ+1} on the quadrature nodes of D_{E(w)}.
inline double fit_log_derivative_rate(const BergmanBasis& basis, int ell) {
    double b = 0.0;
    for_each_word(basis.data().alphabet(), ell + 1, [&](const Word& w) {
        for (int q = 0; q < basis.quadrature_nodes(); ++q) {
            b = std::max(b, std::abs(theta(basis.data(), w, basis.node(w.end(), q))) / (ell + 1));
        }
    });
    return b;
}

/// Fits J at power `ell` over all pairs of `points`, with B and C_K as above.
inline LipschitzConstants fit_lipschitz(const std::vector<MatrixC>& powers, const std::vector<cplx>& points,
                                        int ell, double b, double c_k, int rank) {
    LipschitzConstants c;
    c.B = b;
    c.C_K = c_k;
    c.rank = rank;
    c.J = 1.0;
    double j = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t q = p + 1; q < points.size(); ++q) {
            const double ds = std::abs(points[p] - points[q]);
            j = std::max(j, operator_norm(powers[p] - powers[q]) / c.rhs(ds, ell));
        }
    }
    c.J = j;
    return c;
}

/// Largest ratio lhs / rhs over all pairs (≤ 1 means the bound holds).
inline double lipschitz_worst_ratio(const LipschitzConstants& c, const std::vector<MatrixC>& powers,
                                    const std::vector<cplx>& points, int ell) {
    double worst = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t q = p + 1; q < points.size(); ++q) {
            const double ds = std::abs(points[p] - points[q]);
            worst = std::max(worst, operator_norm(powers[p] - powers[q]) / c.rhs(ds, ell));
        }
    }
    return worst;
}

}  // namespace schottky
