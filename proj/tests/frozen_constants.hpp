#pragma once

// Calibration values for the F1 fixture, produced by tests/oracles/coarse_geometry.py
// (60-digit arithmetic, disks recovered from three image points). Frozen: tests
// compare against these, they never refit them.

namespace schottky::frozen {

struct Interval {
    double lo, hi;
};

// Ratio families over |w| <= 6.
inline constexpr Interval kMultiplicativity6{0.0036812221162927459, 0.1035226013055795};
inline constexpr Interval kMirror6{0.83633699195741073, 1.1956902655465987};
inline constexpr Interval kDerivative6{0.21552433008550193, 1.0686425395765818};

// Geometric rates of max/min Υ over Γ_ℓ, ℓ = 2..8.
inline constexpr double kThetaHat = 0.01516670351044375;
inline constexpr double kTauHat = 0.17147797242851711;

// Υ of the word (1,2).
inline constexpr double kUpsilon12 = 0.017203585702680226;

// Allowed widening when the word length grows from 6 to 7.
inline constexpr double kWidening = 1.10;

}  // namespace schottky::frozen
