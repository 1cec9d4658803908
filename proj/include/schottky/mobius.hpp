#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "schottky/error.hpp"

namespace schottky {

using cplx = std::complex<double>;

/// A point of the Riemann sphere: either a finite complex number or infinity.
struct SpherePoint {
    cplx value{};
    bool infinite = false;

    static SpherePoint at_infinity() { return {cplx{}, true}; }
};

/// Real Möbius map z -> (az+b)/(cz+d), stored as a unit-determinant
/// representative of its PSL(2,R) class.
///
/// The representative is fixed by requiring d > 0, or c > 0 when d == 0.
struct MobiusMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static MobiusMap identity() { return {}; }

    /// Builds the normalized representative of (a b; c d). Requires ad - bc > 0.
    static MobiusMap from_entries(double a, double b, double c, double d) {
        MobiusMap m{a, b, c, d};
        m.normalize();
        return m;
    }

    double det() const { return a * d - b * c; }

    void normalize() {
        const double dt = det();
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw GeometryError("Mobius map has non-positive determinant");
        }
        // Leave entries untouched when det = 1 up to its own rounding error, so
        // normalizing a map that is already unit-determinant is the identity.
        const double det_err = 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(a * d) + std::abs(b * c));
        if (std::abs(dt - 1.0) > det_err) {
            const double scale = 1.0 / std::sqrt(dt);
            a *= scale;
            b *= scale;
            c *= scale;
            d *= scale;
        }
        if (d < 0.0 || (d == 0.0 && c < 0.0)) {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
    }

    /// Exact inverse of a unit-determinant representative (no rescaling).
    MobiusMap inverse() const { return MobiusMap{d, -b, -c, a}.with_sign_convention(); }

    /// Applies the sign rule only. Rescaling products by their computed determinant
    /// would cost O(entry² · eps) through cancellation in ad - bc.
    MobiusMap with_sign_convention() const {
        if (d < 0.0 || (d == 0.0 && c < 0.0)) return MobiusMap{-a, -b, -c, -d};
        return *this;
    }

    /// Entrywise distance between PSL(2,R) representatives (sign-insensitive).
    double distance(const MobiusMap& o) const {
        const double plus = std::max({std::abs(a - o.a), std::abs(b - o.b),
                                      std::abs(c - o.c), std::abs(d - o.d)});
        const double minus = std::max({std::abs(a + o.a), std::abs(b + o.b),
                                       std::abs(c + o.c), std::abs(d + o.d)});
        return std::min(plus, minus);
    }

    double max_abs_entry() const {
        return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    }
};

/// Composition (lhs ∘ rhs). The product of unit-determinant maps is unit-determinant,
/// so only the sign convention is reapplied.
inline MobiusMap compose(const MobiusMap& lhs, const MobiusMap& rhs) {
    return MobiusMap{lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
                     lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d}
        .with_sign_convention();
}

inline MobiusMap operator*(const MobiusMap& lhs, const MobiusMap& rhs) {
    return compose(lhs, rhs);
}

inline SpherePoint mobius_apply(const MobiusMap& m, const SpherePoint& p) {
    if (p.infinite) {
        if (m.c == 0.0) return SpherePoint::at_infinity();
        return {cplx{m.a / m.c, 0.0}, false};
    }
    const cplx den = m.c * p.value + m.d;
    if (den == cplx{0.0, 0.0}) return SpherePoint::at_infinity();
    return {(m.a * p.value + m.b) / den, false};
}

inline SpherePoint mobius_apply(const MobiusMap& m, cplx z) {
    return mobius_apply(m, SpherePoint{z, false});
}

/// Finite-valued application; throws when z is the pole of m.
inline cplx apply_finite(const MobiusMap& m, cplx z) {
    const cplx den = m.c * z + m.d;
    if (den == cplx{0.0, 0.0}) throw NumericalError("Mobius map evaluated at its pole");
    return (m.a * z + m.b) / den;
}

/// m'(z) = 1/(cz+d)^2 for a unit-determinant map. Infinite at the pole.
inline SpherePoint mobius_derivative(const MobiusMap& m, cplx z) {
    const cplx den = m.c * z + m.d;
    if (den == cplx{0.0, 0.0}) return SpherePoint::at_infinity();
    return {1.0 / (den * den), false};
}

inline cplx derivative_finite(const MobiusMap& m, cplx z) {
    const cplx den = m.c * z + m.d;
    if (den == cplx{0.0, 0.0}) throw NumericalError("Mobius derivative evaluated at its pole");
    return 1.0 / (den * den);
}

}  // namespace schottky
