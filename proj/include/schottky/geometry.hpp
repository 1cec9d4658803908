#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "schottky/schottky_data.hpp"

namespace schottky {

/// γ_{a_1} ∘ ... ∘ γ_{a_k}; the empty word maps to the identity.
inline MobiusMap word_map(const SchottkyData& data, const Word& w) {
    MobiusMap m = MobiusMap::identity();
    for (Letter a : w.letters()) m = compose(m, data.generator(a));
    return m;
}

/// D_w = backspace(w) D_{E(w)} with its real diameter I_w and Υ_w = |I_w|.
struct WordGeometry {
    Word word;
    Disk disk;
    double left = 0.0;
    double right = 0.0;
    double upsilon = 0.0;
};

inline WordGeometry word_geometry(const SchottkyData& data, const Word& w) {
    if (w.is_empty()) throw GeometryError("word geometry needs |w| >= 1");
    const Disk& src = data.disk(w.end());
    const MobiusMap m = word_map(data, w.backspace());
    // The image of the closed source interval must avoid the pole -d/c.
    if (m.c != 0.0) {
        const double pole = -m.d / m.c;
        if (pole >= src.left() && pole <= src.right()) {
            throw GeometryError("Mobius pole inside the interval of word " + w.to_string());
        }
    }
    double x0 = apply_finite(m, src.left()).real();
    double x1 = apply_finite(m, src.right()).real();
    if (x0 > x1) std::swap(x0, x1);
    WordGeometry g;
    g.word = w;
    g.left = x0;
    g.right = x1;
    // |m(r) - m(l)| = (r - l) / |(cr+d)(cl+d)| for det m = 1; the endpoint difference
    // itself loses all digits once Υ_w drops near eps·|x|.
    g.upsilon = (src.right() - src.left()) / std::abs((m.c * src.right() + m.d) * (m.c * src.left() + m.d));
    g.disk = Disk{0.5 * (x0 + x1), 0.5 * g.upsilon};
    return g;
}

/// Principal logarithm ℂ∖(-∞,0] → ℝ ⊕ i(-π,π); rejects the cut.
inline cplx principal_log(cplx z, const char* what = "value") {
    if (z.imag() == 0.0 && z.real() <= 0.0) {
        throw NumericalError(std::string("branch cut violation: ") + what + " lies on (-inf, 0]");
    }
    return std::log(z);
}

/// θ(w,z) together with backspace(w) z.
struct ThetaValue {
    cplx theta;
    cplx image;
};

/// For w = a_1 ... a_{ℓ+1} and z ∈ D_{E(w)}: θ(w,z) = Σ_{j=1}^{ℓ} τ(a_j'(a_{j+1}...a_ℓ z)),
/// evaluated from j = ℓ downward while building backspace(w) z.
inline ThetaValue theta_and_image(const SchottkyData& data, const Word& w, cplx z) {
    if (w.is_empty()) throw GeometryError("theta needs a non-empty word");
    cplx u = z;
    cplx acc{0.0, 0.0};
    for (int j = w.length() - 2; j >= 0; --j) {
        const MobiusMap& g = data.generator(w[static_cast<std::size_t>(j)]);
        const cplx den = g.c * u + g.d;
        if (den == cplx{0.0, 0.0}) throw NumericalError("theta: pole hit in word " + w.to_string());
        const cplx deriv = 1.0 / (den * den);
        if (deriv.imag() == 0.0 && deriv.real() <= 0.0) {
            throw NumericalError("branch cut violation in theta: factor a_" + std::to_string(j + 1) +
                                 "'(...) of word " + w.to_string());
        }
        acc += std::log(deriv);
        u = (g.a * u + g.b) / den;
    }
    return {acc, u};
}

inline cplx theta(const SchottkyData& data, const Word& w, cplx z) {
    return theta_and_image(data, w, z).theta;
}

}  // namespace schottky
