#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "schottky/error.hpp"
#include "schottky/mobius.hpp"
#include "schottky/words.hpp"

namespace schottky {

/// Open disk centered on the real line.
struct Disk {
    double center = 0.0;
    double radius = 1.0;

    bool contains(cplx z) const { return std::abs(z - center) < radius; }
    double left() const { return center - radius; }
    double right() const { return center + radius; }
    cplx boundary_point(double angle) const {
        return cplx{center + radius * std::cos(angle), radius * std::sin(angle)};
    }
};

/// Schottky data: generators γ_a and disks D_a for a ∈ A = {0..2N-1},
/// with γ_{ã} = γ_a^{-1}. Construction checks only structural requirements;
/// geometric validity is established by `validate_schottky`.
class SchottkyData {
public:
    /// `generators` holds γ_1..γ_N (inverses derived); `disks` holds D_1..D_{2N}.
    SchottkyData(std::vector<MobiusMap> generators, std::vector<Disk> disks)
        : alphabet_(static_cast<int>(generators.size())) {
        const int n = static_cast<int>(generators.size());
        if (n < 2) throw GeometryError("Schottky data requires rank N >= 2");
        if (static_cast<int>(disks.size()) != 2 * n) {
            throw GeometryError("expected " + std::to_string(2 * n) + " disks, got " +
                                std::to_string(disks.size()));
        }
        for (const auto& d : disks) {
            if (!(d.radius > 0.0) || !std::isfinite(d.radius) || !std::isfinite(d.center)) {
                throw GeometryError("disk radius must be positive and finite");
            }
        }
        gens_.resize(2 * n);
        for (int a = 0; a < n; ++a) {
            MobiusMap g = generators[a];
            g.normalize();
            gens_[a] = g;
            gens_[a + n] = g.inverse();
        }
        disks_ = std::move(disks);
    }

    /// Full 2N-generator form; fails fatally when γ_{ã}∘γ_a is not the identity.
    static SchottkyData from_all_generators(const std::vector<MobiusMap>& all_gens,
                                            std::vector<Disk> disks) {
        const int n = static_cast<int>(all_gens.size()) / 2;
        if (static_cast<int>(all_gens.size()) != 2 * n || n < 2) {
            throw GeometryError("Schottky data requires 2N generators with N >= 2");
        }
        SchottkyData data(std::vector<MobiusMap>(all_gens.begin(), all_gens.begin() + n),
                          std::move(disks));
        for (int a = 0; a < 2 * n; ++a) {
            MobiusMap g = all_gens[a];
            g.normalize();
            data.gens_[a] = g;
        }
        for (int a = 0; a < n; ++a) {
            const MobiusMap prod = compose(data.gens_[a + n], data.gens_[a]);
            if (prod.distance(MobiusMap::identity()) > 1e-10) {
                throw GeometryError("generator " + std::to_string(a + n + 1) +
                                    " is not the inverse of generator " + std::to_string(a + 1));
            }
        }
        return data;
    }

    int rank() const noexcept { return alphabet_.rank(); }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    int alphabet_size() const noexcept { return alphabet_.size(); }
    Letter mirror(Letter a) const noexcept { return alphabet_.mirror(a); }
    const MobiusMap& generator(Letter a) const { return gens_.at(static_cast<std::size_t>(a)); }
    const Disk& disk(Letter a) const { return disks_.at(static_cast<std::size_t>(a)); }
    const std::vector<MobiusMap>& generators() const noexcept { return gens_; }
    const std::vector<Disk>& disks() const noexcept { return disks_; }

    /// Exchanges the generator slots a and b (used to build corrupted fixtures).
    SchottkyData with_swapped_generators(Letter a, Letter b) const {
        SchottkyData d = *this;
        std::swap(d.gens_.at(a), d.gens_.at(b));
        return d;
    }

    SchottkyData with_disks(std::vector<Disk> disks) const {
        SchottkyData d = *this;
        if (disks.size() != disks_.size()) throw GeometryError("disk count mismatch");
        d.disks_ = std::move(disks);
        return d;
    }

    /// Conjugate by the translation z -> z + shift.
    SchottkyData translated(double shift) const {
        SchottkyData d = *this;
        const MobiusMap t = MobiusMap::from_entries(1.0, shift, 0.0, 1.0);
        const MobiusMap tinv = t.inverse();
        for (auto& g : d.gens_) g = compose(t, compose(g, tinv));
        for (auto& disk : d.disks_) disk.center += shift;
        return d;
    }

private:
    Alphabet alphabet_;
    std::vector<MobiusMap> gens_;
    std::vector<Disk> disks_;
};

/// The F1 fixture: γ_1 = (√2,1,1,√2) pairing disk(-√2,1) to disk(√2,1), and
/// γ_2 = T γ_1 T^{-1} with T(z) = z + translation.
inline SchottkyData fixture_f1(double translation = 8.0) {
    const double r2 = std::numbers::sqrt2;
    const MobiusMap g1 = MobiusMap::from_entries(r2, 1.0, 1.0, r2);
    const MobiusMap t = MobiusMap::from_entries(1.0, translation, 0.0, 1.0);
    const MobiusMap g2 = compose(t, compose(g1, t.inverse()));
    std::vector<Disk> disks = {{r2, 1.0}, {translation + r2, 1.0}, {-r2, 1.0}, {translation - r2, 1.0}};
    return SchottkyData({g1, g2}, disks);
}

struct ValidationReport {
    bool structural_ok = true;
    bool disjoint_ok = true;
    bool mapping_ok = true;
    double margin = 0.0;            ///< min gap between disk closures
    double boundary_residual = 0.0; ///< max over a of dist(γ_a ∂D_ã, ∂D_a) / r_a
    std::vector<std::string> failures;

    bool valid() const { return structural_ok && disjoint_ok && mapping_ok; }
};

/// Sampling density on each boundary circle and relative residual tolerance.
inline constexpr int kBoundarySamples = 100;
inline constexpr double kBoundaryTolerance = 1e-8;

inline ValidationReport validate_schottky(const SchottkyData& data) {
    ValidationReport rep;
    const int n2 = data.alphabet_size();
    const auto label = [](Letter a) { return std::to_string(a + 1); };

    for (Letter a = 0; a < n2; ++a) {
        const MobiusMap prod = compose(data.generator(data.mirror(a)), data.generator(a));
        if (prod.distance(MobiusMap::identity()) > 1e-10) {
            rep.structural_ok = false;
            rep.failures.push_back("structural: generator " + label(data.mirror(a)) +
                                   " is not inverse to generator " + label(a));
        }
    }

    rep.margin = std::numeric_limits<double>::infinity();
    for (Letter a = 0; a < n2; ++a) {
        for (Letter b = a + 1; b < n2; ++b) {
            const Disk& da = data.disk(a);
            const Disk& db = data.disk(b);
            const double gap = std::abs(da.center - db.center) - da.radius - db.radius;
            rep.margin = std::min(rep.margin, gap);
            if (!(gap > 0.0)) {
                rep.disjoint_ok = false;
                std::ostringstream os;
                os << "closure disjointness: disks " << label(a) << " and " << label(b)
                   << " overlap (gap " << gap << ")";
                rep.failures.push_back(os.str());
            }
        }
    }

    // Mapping condition: γ_a maps ∂D_ã onto ∂D_a and γ_a(∞) ∈ D_a.
    for (Letter a = 0; a < n2; ++a) {
        const MobiusMap& g = data.generator(a);
        const Disk& src = data.disk(data.mirror(a));
        const Disk& dst = data.disk(a);
        const SpherePoint at_inf = mobius_apply(g, SpherePoint::at_infinity());
        if (at_inf.infinite || !dst.contains(at_inf.value)) {
            rep.mapping_ok = false;
            rep.failures.push_back("mapping condition: gamma_" + label(a) + "(inf) not in D_" +
                                   label(a));
        }
        double residual = 0.0;
        for (int q = 0; q < kBoundarySamples; ++q) {
            const double angle = 2.0 * std::numbers::pi * q / kBoundarySamples;
            const SpherePoint img = mobius_apply(g, src.boundary_point(angle));
            const double dist = img.infinite ? std::numeric_limits<double>::infinity()
                                             : std::abs(std::abs(img.value - dst.center) - dst.radius);
            residual = std::max(residual, dist / dst.radius);
        }
        rep.boundary_residual = std::max(rep.boundary_residual, residual);
        if (!(residual < kBoundaryTolerance)) {
            rep.mapping_ok = false;
            std::ostringstream os;
            os << "mapping condition: gamma_" << label(a) << " does not map boundary of D_"
               << label(data.mirror(a)) << " onto boundary of D_" << label(a)
               << " (residual " << residual << ")";
            rep.failures.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace schottky
