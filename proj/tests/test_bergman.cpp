#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "schottky/bergman.hpp"

using namespace schottky;

namespace {

constexpr double kPi = std::numbers::pi;

// Data whose first disk is the unit disk; only the disks matter for the basis.
SchottkyData unit_disk_data() {
    const MobiusMap g = MobiusMap::from_entries(std::sqrt(2.0), 1.0, 1.0, std::sqrt(2.0));
    return SchottkyData({g, g}, {{0.0, 1.0}, {10.0, 2.0}, {-10.0, 0.5}, {20.0, 1.0}});
}

// ∫_D f conj(g) dA in polar coordinates: composite Simpson in ρ, trapezoid in angle.
template <typename F, typename G>
cplx area_inner(const Disk& d, F&& f, G&& g, int n_rho = 800, int n_angle = 96) {
    cplx total{0.0, 0.0};
    const double h = d.radius / n_rho;
    for (int i = 0; i <= n_rho; ++i) {
        const double rho = i * h;
        const double w = (i == 0 || i == n_rho) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        cplx ring{0.0, 0.0};
        for (int k = 0; k < n_angle; ++k) {
            const cplx z = d.center + std::polar(rho, 2.0 * kPi * k / n_angle);
            ring += f(z) * std::conj(g(z));
        }
        total += w * rho * ring * (2.0 * kPi / n_angle);
    }
    return total * (h / 3.0);
}

}  // namespace

TEST(Bergman, QuadratureNodeCount) {
    EXPECT_EQ(BergmanBasis(unit_disk_data(), 8).quadrature_nodes(), 64);
    EXPECT_EQ(BergmanBasis(unit_disk_data(), 24).quadrature_nodes(), 96);
}

TEST(Bergman, BasisIsOrthonormalInTheAreaInnerProduct) {
    const BergmanBasis basis(fixture_f1(), 8);
    for (Letter a : {0, 1}) {
        const Disk& d = basis.data().disk(a);
        for (int j = 0; j < 8; ++j) {
            for (int k = j; k < 8; ++k) {
                const cplx ip = area_inner(
                    d, [&](cplx z) { return basis.evaluate(a, j, z); },
                    [&](cplx z) { return basis.evaluate(a, k, z); });
                EXPECT_NEAR(std::abs(ip - (j == k ? 1.0 : 0.0)), 0.0, 1e-8) << "a=" << a << " j=" << j << " k=" << k;
            }
        }
    }
}

TEST(Bergman, ProjectingABasisFunctionGivesAUnitVector) {
    const BergmanBasis basis(fixture_f1(), 16);
    for (Letter a = 0; a < 4; ++a) {
        for (int k = 0; k < 16; ++k) {
            const VectorC c = taylor_project([&](cplx z) { return basis.evaluate(a, k, z); }, a, basis);
            for (int j = 0; j < 16; ++j) EXPECT_NEAR(std::abs(c(j) - (j == k ? 1.0 : 0.0)), 0.0, 1e-10);
        }
    }
}

TEST(Bergman, ConstantOnUnitDisk) {
    const BergmanBasis basis(unit_disk_data(), 12);
    const VectorC c = taylor_project([](cplx) { return cplx{1.0, 0.0}; }, 0, basis);
    EXPECT_NEAR(std::abs(c(0) - std::sqrt(kPi)), 0.0, 1e-12);
    for (int j = 1; j < 12; ++j) EXPECT_LT(std::abs(c(j)), 1e-12);
}

TEST(Bergman, KernelMatchesGeometricSeries) {
    // On the unit disk B(z,z0) = (1/π) Σ_k (k+1) (z conj z0)^k, so
    // ⟨B(·,z0), e_k⟩ = sqrt((k+1)/π) conj(z0)^k.
    const BergmanBasis basis(unit_disk_data(), 20);
    const Disk& d = basis.data().disk(0);
    const cplx z0{0.3, 0.0};
    const VectorC c = taylor_project([&](cplx z) { return bergman_kernel(d, z, z0); }, 0, basis);
    for (int k = 0; k < 20; ++k) {
        const cplx expected = std::sqrt((k + 1) / kPi) * std::pow(std::conj(z0), k);
        EXPECT_NEAR(std::abs(c(k) - expected), 0.0, 1e-9) << "k=" << k;
    }
}

TEST(Bergman, KernelReproducesEvaluation) {
    // Σ_k ⟨f, e_k⟩ e_k(z) = f(z) for a polynomial of degree < M on a shifted disk.
    const BergmanBasis basis(fixture_f1(), 10);
    const Letter a = 1;
    const Disk& d = basis.data().disk(a);
    auto f = [&](cplx z) {
        const cplx t = z - d.center;
        return cplx{1.0, 2.0} + 0.5 * t - cplx{0.0, 3.0} * t * t * t;
    };
    const VectorC c = taylor_project(f, a, basis);
    for (const cplx z : {cplx{d.center + 0.4, 0.1}, cplx{d.center - 0.7, -0.3}}) {
        cplx sum{0.0, 0.0};
        for (int k = 0; k < 10; ++k) sum += c(k) * basis.evaluate(a, k, z);
        EXPECT_NEAR(std::abs(sum - f(z)), 0.0, 1e-12);
    }
}

TEST(Bergman, NonFiniteSampleIsRejected) {
    const BergmanBasis basis(fixture_f1(), 8);
    EXPECT_THROW(taylor_project([](cplx) { return cplx{std::numeric_limits<double>::quiet_NaN(), 0.0}; }, 0, basis),
                 NumericalError);
}

TEST(Bergman, EvaluateAllMatchesEvaluate) {
    const BergmanBasis basis(fixture_f1(), 12);
    VectorC row(12);
    const cplx z{1.2, 0.3};
    basis.evaluate_all(0, z, row);
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(std::abs(row(k) - basis.evaluate(0, k, z)), 0.0, 1e-14);
}
