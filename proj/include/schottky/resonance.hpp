#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "schottky/dimension.hpp"
#include "schottky/random_reps.hpp"

namespace schottky {

using DetFn = std::function<cplx(cplx)>;

struct Rect {
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

    bool contains_strictly(cplx s) const {
        return s.real() > re_min && s.real() < re_max && s.imag() > im_min && s.imag() < im_max;
    }
    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    bool symmetric() const { return im_min == -im_max; }
};

struct ScanConfig {
    Rect K;
    int n_re = 8;
    int n_im = 8;
    int ell = 12;           ///< first power tried by the norm certificate
    int ell_cap = 24;       ///< escalation stops here
    double refine_tol = 1e-8;
    std::uint64_t seed = 0;
    double isolate_size = 1e-3;  ///< nonzero-winding cells are split until this size
    int max_edge_depth = 24;     ///< bisection depth for argument tracking on one edge
    int cert_depth = 6;          ///< quadtree depth of the norm certificate

    /// Default grid of 40 cells per unit length in each direction.
    static ScanConfig with_default_grid(const Rect& k) {
        ScanConfig c;
        c.K = k;
        c.n_re = std::max(1, static_cast<int>(std::ceil(40.0 * k.width())));
        c.n_im = std::max(1, static_cast<int>(std::ceil(40.0 * k.height())));
        return c;
    }

    void validate() const {
        if (!(K.re_min > 0.0)) {
            throw RefusalError("half-plane", "scan rectangle must satisfy re_min > 0 (got re_min = " +
                                                 std::to_string(K.re_min) + ")");
        }
        if (!(K.re_max > K.re_min && K.im_max > K.im_min)) throw GeometryError("scan rectangle is empty");
        if (n_re < 1 || n_im < 1) throw GeometryError("scan grid must have at least one cell per direction");
        if (ell < 1 || ell_cap < ell) throw GeometryError("certificate powers must satisfy 1 <= ell <= ell_cap");
        if (!(refine_tol > 0.0)) throw GeometryError("refine_tol must be positive");
    }
};

// ---------------------------------------------------------------------------
// Argument principle
// ---------------------------------------------------------------------------

/// Thrown when argument tracking meets a (numerical) zero on the contour.
class ContourError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Memoized evaluations of f and of phase increments along straight edges.
class ArgumentTracker {
public:
    explicit ArgumentTracker(DetFn f, int max_depth = 24) : f_(std::move(f)), max_depth_(max_depth) {}

    cplx value(cplx s) {
        const auto key = std::make_pair(s.real(), s.imag());
        auto it = values_.find(key);
        if (it != values_.end()) return it->second;
        const cplx v = f_(s);
        ++evaluations_;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw NumericalError("determinant is not finite at s = " + format(s));
        }
        values_.emplace(key, v);
        return v;
    }

    /// Continuous change of arg f along the segment a → b.
    double edge_phase(cplx a, cplx b) {
        const auto key = std::make_pair(std::make_pair(a.real(), a.imag()), std::make_pair(b.real(), b.imag()));
        if (auto it = edges_.find(key); it != edges_.end()) return it->second;
        const auto rkey = std::make_pair(key.second, key.first);
        if (auto it = edges_.find(rkey); it != edges_.end()) return -it->second;
        const double phase = track(a, value(a), b, value(b), 0);
        edges_.emplace(key, phase);
        return phase;
    }

    /// Winding number about a polygon (closed implicitly).
    double winding(const std::vector<cplx>& vertices) {
        double total = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            total += edge_phase(vertices[i], vertices[(i + 1) % vertices.size()]);
        }
        return total / (2.0 * std::numbers::pi);
    }

    long evaluations() const noexcept { return evaluations_; }

    std::vector<std::pair<cplx, cplx>> samples() const {
        std::vector<std::pair<cplx, cplx>> out;
        out.reserve(values_.size());
        for (const auto& [k, v] : values_) out.emplace_back(cplx{k.first, k.second}, v);
        return out;
    }

    static std::string format(cplx s) {
        std::ostringstream os;
        os.precision(17);
        os << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i";
        return os.str();
    }

private:
    double track(cplx a, cplx fa, cplx b, cplx fb, int depth) {
        const double tiny = 1e-300;
        if (std::abs(fa) < tiny || std::abs(fb) < tiny) {
            throw ContourError("determinant vanishes on the contour near s = " + format(a));
        }
        const cplx ratio = fb / fa;
        const double jump = std::arg(ratio);
        // A modulus change beyond a factor 4 also triggers refinement: it signals
        // a zero close to the segment.
        if (std::abs(jump) <= std::numbers::pi / 2 && std::abs(std::log(std::abs(ratio))) <= std::log(4.0)) {
            return jump;
        }
        if (depth >= max_depth_) {
            throw ContourError("argument tracking failed to resolve the phase between " + format(a) + " and " +
                               format(b));
        }
        const cplx mid = 0.5 * (a + b);
        const cplx fm = value(mid);
        return track(a, fa, mid, fm, depth + 1) + track(mid, fm, b, fb, depth + 1);
    }

    DetFn f_;
    int max_depth_;
    long evaluations_ = 0;
    std::map<std::pair<double, double>, cplx> values_;
    std::map<std::pair<std::pair<double, double>, std::pair<double, double>>, double> edges_;
};

/// Counterclockwise boundary of r with each side cut into `segments` pieces.
inline std::vector<cplx> rectangle_vertices(const Rect& r, int segments = 1) {
    const std::array<cplx, 4> corners{cplx{r.re_min, r.im_min}, cplx{r.re_max, r.im_min},
                                      cplx{r.re_max, r.im_max}, cplx{r.re_min, r.im_max}};
    std::vector<cplx> v;
    for (int side = 0; side < 4; ++side) {
        const cplx a = corners[side];
        const cplx b = corners[(side + 1) % 4];
        for (int k = 0; k < segments; ++k) v.push_back(a + (b - a) * (static_cast<double>(k) / segments));
    }
    return v;
}

/// Winding number of f about ∂r, counterclockwise; not rounded.
inline double winding_number(ArgumentTracker& tracker, const Rect& r, int segments = 1) {
    return tracker.winding(rectangle_vertices(r, segments));
}

inline double winding_number(const DetFn& f, const Rect& r, int segments = 16, int max_depth = 24) {
    ArgumentTracker t(f, max_depth);
    return winding_number(t, r, segments);
}

/// Winding number of f about the circle |s - c| = radius, sampled as a polygon
/// with adaptive refinement of each chord. The polygon approximates the circle;
/// every zero within `radius·cos(π/nodes)` of c is enclosed.
inline double winding_number_circle(const DetFn& f, cplx center, double radius, int nodes = 64,
                                    int max_depth = 24) {
    ArgumentTracker t(f, max_depth);
    std::vector<cplx> v;
    for (int k = 0; k < nodes; ++k) {
        v.push_back(center + radius * std::polar(1.0, 2.0 * std::numbers::pi * k / nodes));
    }
    return t.winding(v);
}

/// Rounds a winding number, rejecting values farther than 1e-3 from an integer.
inline int integral_winding(double w) {
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-3) {
        throw NumericalError("winding number " + std::to_string(w) + " is not within 1e-3 of an integer");
    }
    return static_cast<int>(r);
}

// ---------------------------------------------------------------------------
// Zero scanning
// ---------------------------------------------------------------------------

struct ZeroRecord {
    cplx s{};
    int multiplicity = 0;
    double residual = 0.0;  ///< |f(s)| at the polished point
};

struct NormCertificate {
    int ell = 0;
    double max_norm = 0.0;    ///< max of ‖L̂^ℓ‖ over the evaluated s-points
    double max_bound = 0.0;   ///< max over certificate cells of the cell bound
    bool certified = false;
    long evaluations = 0;
};

struct ZeroReport {
    std::vector<ZeroRecord> zeros;
    bool certified_empty = false;
    std::optional<NormCertificate> norm_certificate;
    int total_winding = 0;
    std::vector<std::pair<cplx, cplx>> samples;  ///< (s, f(s)) for every evaluation
    std::vector<std::string> failures;           ///< unresolved cells, never dropped silently
    int perturbation = 0;                        ///< index into the edge-shift schedule used

    int zero_count() const {
        int c = 0;
        for (const auto& z : zeros) c += z.multiplicity;
        return c;
    }
};

namespace detail {

/// Newton iteration with central-difference derivative, step h = 1e-7;
/// the multiplicity m gives the modified step s ← s − m f/f'.
inline cplx newton_polish(const DetFn& f, cplx s0, int m, const Rect& cell, double tol, double* residual) {
    const double h = 1e-7;
    cplx s = s0;
    cplx fs = f(s);
    cplx best = s;
    double best_r = std::abs(fs);
    // Up to three iterations continue past `tol`, keeping the best iterate.
    int extra = 0;
    for (int it = 0; it < 50 && extra < 3; ++it) {
        if (best_r < tol) ++extra;
        const cplx df = (f(s + h) - f(s - h)) / (2.0 * h);
        if (df == cplx{0.0, 0.0}) break;
        const cplx step = static_cast<double>(m) * fs / df;
        const cplx next = s - step;
        if (!cell.contains_strictly(next)) break;
        s = next;
        fs = f(s);
        if (std::abs(fs) < best_r) {
            best = s;
            best_r = std::abs(fs);
        }
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) break;
    }
    *residual = best_r;
    return best;
}

inline std::array<Rect, 4> quadrisect(const Rect& r, double ratio = 0.5) {
    const double xm = r.re_min + ratio * r.width();
    const double ym = r.im_min + ratio * r.height();
    return {Rect{r.re_min, xm, r.im_min, ym}, Rect{xm, r.re_max, r.im_min, ym}, Rect{r.re_min, xm, ym, r.im_max},
            Rect{xm, r.re_max, ym, r.im_max}};
}

/// Split ratios tried in turn when a subdivision line passes through a zero.
inline constexpr std::array<double, 4> kSplitRatios{0.5, 0.4375, 0.5625, 0.40625};

inline void isolate(ArgumentTracker& tracker, const DetFn& f, const Rect& cell, int winding,
                    const ScanConfig& cfg, ZeroReport& report) {
    if (std::max(cell.width(), cell.height()) <= cfg.isolate_size) {
        const cplx centre{0.5 * (cell.re_min + cell.re_max), 0.5 * (cell.im_min + cell.im_max)};
        double residual = 0.0;
        const cplx z = newton_polish(f, centre, winding, cell, cfg.refine_tol, &residual);
        report.zeros.push_back({z, winding, residual});
        return;
    }
    for (std::size_t k = 0; k < kSplitRatios.size(); ++k) {
        std::array<int, 4> counts{};
        const auto subs = quadrisect(cell, kSplitRatios[k]);
        try {
            int accounted = 0;
            for (std::size_t q = 0; q < 4; ++q) {
                counts[q] = integral_winding(winding_number(tracker, subs[q]));
                if (counts[q] < 0) throw ContourError("negative winding number on a subcell");
                accounted += counts[q];
            }
            if (accounted != winding) throw ContourError("subcell winding numbers do not add up to the parent count");
        } catch (const ContourError&) {
            if (k + 1 == kSplitRatios.size()) throw;
            continue;
        }
        for (std::size_t q = 0; q < 4; ++q) {
            if (counts[q] > 0) isolate(tracker, f, subs[q], counts[q], cfg, report);
        }
        return;
    }
}

inline ZeroReport scan_attempt(const ScanConfig& cfg, const DetFn& f, int attempt) {
    static constexpr std::array<double, 4> kShift{0.0, 0.5, 0.25, 0.125};
    const double hx = cfg.K.width() / cfg.n_re;
    const double hy = cfg.K.height() / cfg.n_im;
    const double dx = kShift[attempt] * hx;
    const double dy = kShift[attempt] * hy;
    // Interior lines move by the shift; the outer boundary moves inward by 1/16 of it.
    std::vector<double> xs(cfg.n_re + 1), ys(cfg.n_im + 1);
    for (int i = 0; i <= cfg.n_re; ++i) xs[i] = cfg.K.re_min + i * hx + dx;
    for (int j = 0; j <= cfg.n_im; ++j) ys[j] = cfg.K.im_min + j * hy + dy;
    xs.front() = cfg.K.re_min + dx / 16;
    xs.back() = cfg.K.re_max - dx / 16;
    ys.front() = cfg.K.im_min + dy / 16;
    ys.back() = cfg.K.im_max - dy / 16;

    ZeroReport report;
    report.perturbation = attempt;
    ArgumentTracker tracker(f, cfg.max_edge_depth);
    // Boundary of K through the grid vertices, so that the count shares edges with the cells.
    std::vector<cplx> boundary;
    for (int i = 0; i < cfg.n_re; ++i) boundary.emplace_back(xs[i], ys.front());
    for (int j = 0; j < cfg.n_im; ++j) boundary.emplace_back(xs.back(), ys[j]);
    for (int i = cfg.n_re; i > 0; --i) boundary.emplace_back(xs[i], ys.back());
    for (int j = cfg.n_im; j > 0; --j) boundary.emplace_back(xs.front(), ys[j]);
    report.total_winding = integral_winding(tracker.winding(boundary));
    int accounted = 0;
    for (int i = 0; i < cfg.n_re; ++i) {
        for (int j = 0; j < cfg.n_im; ++j) {
            const Rect cell{xs[i], xs[i + 1], ys[j], ys[j + 1]};
            const int w = integral_winding(winding_number(tracker, cell));
            if (w < 0) throw ContourError("negative winding number on a grid cell");
            if (w > 0) isolate(tracker, f, cell, w, cfg, report);
            accounted += w;
        }
    }
    if (accounted != report.total_winding) {
        throw ContourError("grid winding numbers do not add up to the boundary count");
    }
    report.samples = tracker.samples();
    return report;
}

}  // namespace detail

/// Zeros of f in K by the argument principle on a grid of cells.
///
/// On a contour failure the grid is retried with interior lines shifted by
/// half, a quarter and an eighth of a grid step; if every attempt fails the
/// failure is recorded in the report.
inline ZeroReport scan_zeros(const ScanConfig& cfg, const DetFn& f) {
    cfg.validate();
    std::vector<std::string> failures;
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            ZeroReport r = detail::scan_attempt(cfg, f, attempt);
            r.failures = failures;
            r.certified_empty = r.zeros.empty() && r.total_winding == 0;
            return r;
        } catch (const ContourError& e) {
            failures.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
        }
    }
    ZeroReport r;
    r.failures = failures;
    r.perturbation = -1;
    return r;
}

/// s ↦ det(I − L̂_{s,ρ}) with ℓ = 1.
inline DetFn transfer_determinant(const Representation& rep, const BergmanBasis& basis) {
    return [rep, &basis](cplx s) { return fredholm_det(assemble_transfer(s, rep, 1, basis)); };
}

inline ZeroReport scan_zeros(const ScanConfig& cfg, const Representation& rep, const BergmanBasis& basis) {
    return scan_zeros(cfg, transfer_determinant(rep, basis));
}

// ---------------------------------------------------------------------------
// Norm certificate
// ---------------------------------------------------------------------------

/// ‖A(s)‖ and ‖A'(s)‖ for A(s) = L̂^ℓ_{s,ρ}.
struct NormSample {
    double norm = 0.0;
    double derivative = 0.0;
};

/// Evaluates NormSample at (s, ℓ). `conjugate_symmetric` allows folding K onto Im s ≥ 0.
struct NormOracle {
    std::function<NormSample(cplx, int)> eval;
    bool conjugate_symmetric = false;
};

/// Dense oracle for a general representation (small dimensions).
inline NormOracle dense_norm_oracle(const Representation& rep, const BergmanBasis& basis, bool real_rep) {
    NormOracle o;
    o.conjugate_symmetric = real_rep;
    o.eval = [rep, &basis](cplx s, int ell) {
        const MatrixC l = assemble_transfer(s, rep, 1, basis).entries;
        MatrixC dl = MatrixC::Zero(l.rows(), l.cols());
        const int m = basis.degree();
        for_each_word(basis.data().alphabet(), 2, [&](const Word& w) {
            detail::add_twisted_block(dl, assemble_mws_ds(w, s, basis), word_twist(rep, w), w.end(), w.start(), m);
        });
        MatrixC a = l, da = dl;
        for (int k = 1; k < ell; ++k) {
            da = l * da + dl * a;
            a = l * a;
        }
        return NormSample{operator_norm(a), operator_norm(da)};
    };
    return o;
}

/// Matrix-free oracle on H ⊗ V_n^0 for a permutation representation.
inline NormOracle cover_norm_oracle(const PermutationRep& rep, const BergmanBasis& basis,
                                    const LanczosOptions& opt = LanczosOptions{1e-7, 300, 2}) {
    NormOracle o;
    o.conjugate_symmetric = true;
    o.eval = [rep, &basis, opt](cplx s, int ell) {
        if (rep.n == 1) return NormSample{};
        const CoverTransferOperator op(basis, rep, s, ell, true);
        auto restrict = [&](VectorC& v) { op.restrict_to_new(v); };
        const double nu = largest_singular_value([&](const VectorC& x) { return op.apply(x); },
                                                 [&](const VectorC& y) { return op.apply_adjoint(y); },
                                                 restrict, op.size(), opt)
                              .sigma;
        const double dnu = largest_singular_value([&](const VectorC& x) { return op.apply_derivative(x); },
                                                  [&](const VectorC& y) { return op.apply_derivative_adjoint(y); },
                                                  restrict, op.size(), opt)
                               .sigma;
        return NormSample{nu, dnu};
    };
    return o;
}

/// Relative slack added to every computed norm before it enters a bound.
inline constexpr double kNormSlack = 1e-6;
/// Safety factor on the derivative norm when transferring from a cell centre to the cell.
inline constexpr double kDerivativeSafety = 2.0;

namespace detail {

struct CertCell {
    Rect r;
    int depth;
};

inline bool certify_at(const NormOracle& oracle, const Rect& k, const ScanConfig& cfg, int ell,
                       NormCertificate& out) {
    Rect domain = k;
    const bool folded = oracle.conjugate_symmetric && k.symmetric();
    if (folded) domain.im_min = 0.0;
    const int ny = folded ? std::max(1, cfg.n_im / 2) : cfg.n_im;
    const double hx = domain.width() / cfg.n_re;
    const double hy = domain.height() / ny;
    std::vector<CertCell> stack;
    for (int i = cfg.n_re - 1; i >= 0; --i) {
        for (int j = ny - 1; j >= 0; --j) {
            stack.push_back({Rect{domain.re_min + i * hx, domain.re_min + (i + 1) * hx, domain.im_min + j * hy,
                                  domain.im_min + (j + 1) * hy},
                             0});
        }
    }
    out.ell = ell;
    out.max_norm = 0.0;
    out.max_bound = 0.0;
    while (!stack.empty()) {
        const CertCell c = stack.back();
        stack.pop_back();
        const cplx centre{0.5 * (c.r.re_min + c.r.re_max), 0.5 * (c.r.im_min + c.r.im_max)};
        const NormSample ns = oracle.eval(centre, ell);
        ++out.evaluations;
        const double nu = ns.norm * (1.0 + kNormSlack);
        out.max_norm = std::max(out.max_norm, nu);
        const double half_diag = 0.5 * std::hypot(c.r.width(), c.r.height());
        const double bound = nu + kDerivativeSafety * half_diag * ns.derivative * (1.0 + kNormSlack);
        if (bound < 1.0) {
            out.max_bound = std::max(out.max_bound, bound);
            continue;
        }
        if (nu >= 1.0 || c.depth >= cfg.cert_depth) {
            out.max_bound = std::max(out.max_bound, bound);
            return false;
        }
        for (const Rect& sub : quadrisect(c.r)) stack.push_back({sub, c.depth + 1});
    }
    return true;
}

}  // namespace detail

/// Certifies sup_{s∈K} ‖L̂^ℓ_{s,ρ}‖ < 1, doubling ℓ from cfg.ell up to cfg.ell_cap.
///
/// Each cell is bounded by ‖A(c)‖ + 2·(half diagonal)·‖A'(c)‖ at its centre c;
/// cells whose bound is ≥ 1 are split in four up to cfg.cert_depth levels.
inline NormCertificate norm_certificate(const ScanConfig& cfg, const NormOracle& oracle) {
    cfg.validate();
    NormCertificate out;
    long evals = 0;
    for (int ell = cfg.ell; ell <= cfg.ell_cap; ell *= 2) {
        NormCertificate attempt;
        const bool ok = detail::certify_at(oracle, cfg.K, cfg, ell, attempt);
        evals += attempt.evaluations;
        out = attempt;
        out.certified = ok;
        if (ok) break;
    }
    out.evaluations = evals;
    return out;
}

// ---------------------------------------------------------------------------
// Random-cover experiment
// ---------------------------------------------------------------------------

/// Orbits of the group generated by the permutations, each sorted ascending,
/// ordered by smallest element.
inline std::vector<std::vector<int>> orbits(const PermutationRep& rep) {
    std::vector<int> label(rep.n, -1);
    std::vector<std::vector<int>> out;
    for (int start = 0; start < rep.n; ++start) {
        if (label[start] >= 0) continue;
        std::vector<int> orbit{start};
        label[start] = static_cast<int>(out.size());
        for (std::size_t k = 0; k < orbit.size(); ++k) {
            for (const auto& p : rep.perms) {
                const int img = p[orbit[k]];
                if (label[img] < 0) {
                    label[img] = static_cast<int>(out.size());
                    orbit.push_back(img);
                }
            }
        }
        std::sort(orbit.begin(), orbit.end());
        out.push_back(std::move(orbit));
    }
    return out;
}

/// Restriction of `rep` to one orbit, relabelled 0..|orbit|-1.
inline PermutationRep restrict_to_orbit(const PermutationRep& rep, const std::vector<int>& orbit) {
    std::vector<int> index(rep.n, -1);
    for (std::size_t i = 0; i < orbit.size(); ++i) index[orbit[i]] = static_cast<int>(i);
    PermutationRep r;
    r.n = static_cast<int>(orbit.size());
    r.seed = rep.seed;
    for (const auto& p : rep.perms) {
        std::vector<int> q(orbit.size());
        for (std::size_t i = 0; i < orbit.size(); ++i) q[i] = index[p[orbit[i]]];
        r.perms.push_back(std::move(q));
    }
    return r;
}

struct TrialRecord {
    int n = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    bool certified = false;
    int ell = 0;
    double max_norm = 0.0;
    int new_zero_count = 0;
    int orbit_count = 1;
    bool scan_failed = false;

    bool success() const { return certified || (!scan_failed && new_zero_count == 0); }
    double min_gap() const { return 1.0 - max_norm; }
};

struct ExperimentConfig {
    ScanConfig scan;
    std::vector<int> n_list;
    int trials = 50;
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct ExperimentReport {
    std::vector<int> n_list;
    int trials = 0;
    double delta = 0.0;
    int base_zero_count = 0;
    std::vector<TrialRecord> records;  ///< ordered by (n index, trial)

    double success_fraction(int n) const {
        int ok = 0, total = 0;
        for (const auto& r : records) {
            if (r.n != n) continue;
            ++total;
            ok += r.success() ? 1 : 0;
        }
        return total == 0 ? 0.0 : static_cast<double>(ok) / total;
    }
};

/// Seed of trial t at cover degree n under a master seed.
inline std::uint64_t experiment_seed(std::uint64_t master, int n, int trial) {
    return trial_seed(trial_seed(master, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
}

/// Refuses rectangles reaching Re s ≤ δ̂/2.
inline void check_half_plane(const Rect& k, double delta) {
    if (!(k.re_min > delta / 2.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "rectangle must lie in Re s > delta/2 = " << delta / 2.0 << " (computed delta = " << delta
           << ", re_min = " << k.re_min << ")";
        throw RefusalError("half-plane", os.str());
    }
}

namespace detail {

/// Certificate on one transitive component, scanning its determinant only when
/// the certificate fails.
inline void run_component(const PermutationRep& comp, const ScanConfig& cfg, const BergmanBasis& basis,
                          TrialRecord& rec, bool& all_certified) {
    if (comp.n == 1) return;
    const NormCertificate cert = norm_certificate(cfg, cover_norm_oracle(comp, basis));
    rec.ell = std::max(rec.ell, cert.ell);
    rec.max_norm = std::max(rec.max_norm, cert.max_norm);
    if (cert.certified) return;
    all_certified = false;
    const ZeroReport z = scan_zeros(cfg, new_representation(comp), basis);
    if (z.perturbation < 0) rec.scan_failed = true;
    rec.new_zero_count += z.zero_count();
}

}  // namespace detail

/// One trial: sample φ_n, certify or scan each orbit component of ρ_n^0.
///
/// ρ_n^0 splits as ⊕_O ρ_O^0 plus (#orbits − 1) copies of the trivial
/// representation; each trivial copy contributes the base zeros in K.
inline TrialRecord run_trial(const ExperimentConfig& cfg, const BergmanBasis& basis, int n, int trial,
                             int base_zero_count, double base_max_norm) {
    TrialRecord rec;
    rec.n = n;
    rec.trial = trial;
    rec.seed = experiment_seed(cfg.seed, n, trial);
    const PermutationRep rep = sample_hom(n, basis.data().rank(), rec.seed);
    const auto orb = orbits(rep);
    rec.orbit_count = static_cast<int>(orb.size());
    bool all_certified = true;
    if (orb.size() > 1) {
        all_certified = false;
        rec.new_zero_count += (rec.orbit_count - 1) * base_zero_count;
        rec.max_norm = base_max_norm;
    }
    for (const auto& o : orb) detail::run_component(restrict_to_orbit(rep, o), cfg.scan, basis, rec, all_certified);
    rec.certified = all_certified;
    if (rec.ell == 0) rec.ell = cfg.scan.ell;
    return rec;
}

inline ExperimentReport cover_experiment(const ExperimentConfig& cfg, const BergmanBasis& basis, double delta) {
    cfg.scan.validate();
    check_half_plane(cfg.scan.K, delta);
    if (cfg.trials < 1) throw GeometryError("trials must be >= 1");
    ExperimentReport rep;
    rep.n_list = cfg.n_list;
    rep.trials = cfg.trials;
    rep.delta = delta;

    // Base data is only needed for intransitive samples; computed lazily once.
    std::optional<std::pair<int, double>> base;
    auto base_data = [&]() {
        if (!base) {
            const ZeroReport z = scan_zeros(cfg.scan, Representation::trivial(basis.data().alphabet()), basis);
            const NormCertificate c =
                norm_certificate(cfg.scan, dense_norm_oracle(Representation::trivial(basis.data().alphabet()), basis, true));
            base = std::make_pair(z.zero_count(), c.max_norm);
        }
        return *base;
    };

    struct Task {
        int n, trial;
    };
    std::vector<Task> tasks;
    for (int n : cfg.n_list) {
        if (n < 1) throw GeometryError("cover degree must be >= 1");
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({n, t});
    }
    bool need_base = false;
    for (const auto& t : tasks) {
        if (orbits(sample_hom(t.n, basis.data().rank(), experiment_seed(cfg.seed, t.n, t.trial))).size() > 1) {
            need_base = true;
            break;
        }
    }
    if (need_base) base_data();
    const int base_zeros = base ? base->first : 0;
    const double base_norm = base ? base->second : 0.0;

    rep.base_zero_count = base_zeros;
    rep.records.resize(tasks.size());
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    auto worker = [&](int id) {
        try {
            for (std::size_t k = static_cast<std::size_t>(id); k < tasks.size(); k += static_cast<std::size_t>(jobs)) {
                rep.records[k] = run_trial(cfg, basis, tasks[k].n, tasks[k].trial, base_zeros, base_norm);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(id)] = std::current_exception();
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int id = 0; id < jobs; ++id) pool.emplace_back(worker, id);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rep;
}

}  // namespace schottky
