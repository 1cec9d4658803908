#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "schottky/dimension.hpp"
#include "schottky/estimates.hpp"
#include "schottky/random_reps.hpp"
#include "schottky/transfer.hpp"

using namespace schottky;

namespace {

const BergmanBasis& basis12() {
    static const BergmanBasis b(fixture_f1(), 12);
    return b;
}

double delta12() {
    static const double d = bowen_dim(basis12()).delta;
    return d;
}

// Base operator assembled block by block from assemble_mws, without the twist machinery.
MatrixC hand_assembled(cplx s, int power, const BergmanBasis& basis) {
    const int m = basis.degree();
    MatrixC out = MatrixC::Zero(basis.dimension(), basis.dimension());
    for_each_word(basis.data().alphabet(), power + 1, [&](const Word& w) {
        out.block(w.end() * m, w.start() * m, m, m) += assemble_mws(w, s, basis);
    });
    return out;
}

MatrixC random_matrix(std::mt19937_64& eng, int rows, int cols) {
    std::normal_distribution<double> g;
    MatrixC m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = cplx{g(eng), g(eng)};
    }
    return m;
}

}  // namespace

TEST(Mws, ZeroExponentIsPureComposition) {
    const BergmanBasis& basis = basis12();
    const SchottkyData& data = basis.data();
    for_each_word(data.alphabet(), 2, [&](const Word& w) {
        const MatrixC blk = assemble_mws(w, 0.0, basis);
        const MobiusMap& a = data.generator(w.start());
        // Column k is the projection of e_{S(w),k}∘a onto slot E(w).
        for (int k = 0; k < 12; ++k) {
            const VectorC col = taylor_project(
                [&](cplx z) { return basis.evaluate(w.start(), k, (a.a * z + a.b) / (a.c * z + a.d)); }, w.end(),
                basis);
            EXPECT_LT((blk.col(k) - col).norm(), 1e-13);
        }
        // e_{S,0} is the constant 1/(√π r_S): its image is (r_E / r_S) e_{E,0}.
        const double ratio = data.disk(w.end()).radius / data.disk(w.start()).radius;
        EXPECT_NEAR(std::abs(blk(0, 0) - ratio), 0.0, 1e-13);
        EXPECT_LT(blk.col(0).tail(11).norm(), 1e-12);
    });
}

TEST(Mws, NormTwoWays) {
    for_each_word(basis12().data().alphabet(), 3, [&](const Word& w) {
        const MatrixC blk = assemble_mws(w, cplx{0.4, 1.3}, basis12());
        EXPECT_NEAR(operator_norm(blk), operator_norm_power(blk), 1e-8 * operator_norm(blk));
    });
}

TEST(Mws, NormBoundConstantIsStableInLength) {
    // ‖M̂_{w,s}‖ ≤ C e^{π|Im s|} Υ_w^{Re s}: fit C on |w| ≤ 4; at |w| = 5 the
    // ratio may grow by at most 10%.
    const double d = delta12();
    const SchottkyData& data = basis12().data();
    for (const cplx s : {cplx{d / 2, 0.0}, cplx{d / 2, 1.0}}) {
        auto ratio = [&](const Word& w) {
            return operator_norm(assemble_mws(w, s, basis12())) /
                   (std::exp(std::numbers::pi * std::abs(s.imag())) *
                    std::pow(word_geometry(data, w).upsilon, s.real()));
        };
        double fitted = 0.0;
        for (int len = 2; len <= 4; ++len) for_each_word(data.alphabet(), len, [&](const Word& w) {
            fitted = std::max(fitted, ratio(w));
        });
        double held_out = 0.0;
        for_each_word(data.alphabet(), 5, [&](const Word& w) { held_out = std::max(held_out, ratio(w)); });
        RecordProperty("fitted_C_im" + std::to_string(static_cast<int>(s.imag())), std::to_string(fitted));
        EXPECT_LE(held_out, 1.10 * fitted) << "s = " << s;
    }
}

TEST(Transfer, TrivialOneDimensionalIsTheBaseOperator) {
    const cplx s{0.7, -0.4};
    const MatrixC t = assemble_transfer(s, Representation::trivial(Alphabet(2)), 1, basis12()).entries;
    EXPECT_LT((t - hand_assembled(s, 1, basis12())).norm(), 1e-14);
    EXPECT_LT((base_transfer(s, 2, basis12()) - hand_assembled(s, 2, basis12())).norm(), 1e-14);
}

TEST(Transfer, BlockSparsity) {
    // For ℓ = 1 the block (row E, column S) vanishes exactly when S = mirror(E).
    const MatrixC t = base_transfer(0.6, 1, basis12());
    for (Letter e = 0; e < 4; ++e) {
        for (Letter s = 0; s < 4; ++s) {
            const double mass = t.block(e * 12, s * 12, 12, 12).norm();
            if (s == Alphabet(2).mirror(e)) {
                EXPECT_EQ(mass, 0.0);
            } else {
                EXPECT_GT(mass, 0.0);
            }
        }
    }
}

TEST(Transfer, KroneckerEqualsDirect) {
    const PermutationRep p = sample_hom(3, 2, 99);
    const Representation rho = full_representation(p);
    for (int ell = 1; ell <= 3; ++ell) {
        const MatrixC direct = assemble_transfer(0.8, rho, ell, basis12(), AssemblyMode::direct).entries;
        const MatrixC kron = assemble_transfer(0.8, rho, ell, basis12(), AssemblyMode::kronecker).entries;
        EXPECT_LT((direct - kron).norm(), 1e-12 * direct.norm());
    }
}

TEST(Transfer, DirectVersusMatrixPowerAtLengthThree) {
    const MatrixC direct = base_transfer(0.8, 3, basis12(), AssemblyMode::direct);
    const MatrixC power = base_transfer(0.8, 3, basis12(), AssemblyMode::matrix_power);
    EXPECT_LT((direct - power).norm(), 1e-8);
}

TEST(Transfer, MeanZeroSplittingBlockDiagonalizes) {
    const int n = 3;
    const PermutationRep p = sample_hom(n, 2, 5);
    const cplx s{0.6, 0.9};
    const MatrixC full = assemble_transfer(s, full_representation(p), 1, basis12()).entries;
    // Orthonormal basis of C^3: the constant vector, then the mean-zero staircase basis.
    Eigen::MatrixXd u(n, n);
    u.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    u.col(1) << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
    u.col(2) << 1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0);
    const MatrixC change = kron(MatrixC::Identity(basis12().dimension(), basis12().dimension()), u.cast<cplx>());
    const MatrixC rotated = change.adjoint() * full * change;

    const Eigen::Index dim = basis12().dimension();
    MatrixC c_part(dim, dim), n_part(dim * 2, dim * 2);
    double off = 0.0;
    for (Eigen::Index i = 0; i < dim * n; ++i) {
        for (Eigen::Index j = 0; j < dim * n; ++j) {
            const bool ci = i % n == 0, cj = j % n == 0;
            if (ci && cj) {
                c_part(i / n, j / n) = rotated(i, j);
            } else if (!ci && !cj) {
                n_part((i / n) * 2 + i % n - 1, (j / n) * 2 + j % n - 1) = rotated(i, j);
            } else {
                off += std::norm(rotated(i, j));
            }
        }
    }
    EXPECT_LT(std::sqrt(off), 1e-9);
    EXPECT_LT((c_part - base_transfer(s, 1, basis12())).norm(), 1e-12);
    EXPECT_LT((n_part - assemble_transfer(s, new_representation(p), 1, basis12()).entries).norm(), 1e-12);
}

TEST(Transfer, RejectsBadRepresentations) {
    std::vector<MatrixC> mats(4, MatrixC::Identity(2, 2));
    mats[0](0, 0) = 2.0;
    EXPECT_THROW(Representation(Alphabet(2), mats), GeometryError);
    std::vector<MatrixC> mixed(4, MatrixC::Identity(2, 2));
    mixed[3] = MatrixC::Identity(3, 3);
    EXPECT_THROW(Representation(Alphabet(2), mixed), GeometryError);
    EXPECT_THROW(assemble_transfer(0.5, Representation::trivial(Alphabet(3)), 1, basis12()), GeometryError);
    EXPECT_THROW(assemble_transfer(0.5, Representation::trivial(Alphabet(2)), 0, basis12()), GeometryError);
}

TEST(FredholmDet, TrivialCases) {
    EXPECT_EQ(fredholm_det(MatrixC::Zero(5, 5)), cplx(1.0));
    std::mt19937_64 eng(3);
    MatrixC upper = random_matrix(eng, 6, 6).triangularView<Eigen::StrictlyUpper>();
    EXPECT_NEAR(std::abs(fredholm_det(upper) - 1.0), 0.0, 1e-14);
    const MatrixC diag = Eigen::VectorXcd::Constant(3, 0.5).asDiagonal();
    EXPECT_NEAR(std::abs(fredholm_det(diag) - 0.125), 0.0, 1e-15);
}

TEST(FredholmDet, ConjugateSymmetryForPermutations) {
    const Representation rho = full_representation(sample_hom(3, 2, 17));
    std::mt19937_64 eng(4);
    std::uniform_real_distribution<double> re(0.1, 1.5), im(-3.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        const cplx s{re(eng), im(eng)};
        const cplx d1 = fredholm_det(assemble_transfer(s, rho, 1, basis12()));
        const cplx d2 = fredholm_det(assemble_transfer(std::conj(s), rho, 1, basis12()));
        EXPECT_LT(std::abs(d2 - std::conj(d1)), 1e-10 * std::abs(d1)) << "s = " << s;
    }
}

TEST(OperatorNorm, Basics) {
    EXPECT_NEAR(operator_norm(MatrixC::Identity(7, 7)), 1.0, 1e-15);
    MatrixC d = MatrixC::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 0.5;
    EXPECT_NEAR(operator_norm(d), 3.0, 1e-14);
    std::mt19937_64 eng(9);
    for (int k = 0; k < 10; ++k) {
        const MatrixC m = random_matrix(eng, 9, 6);
        EXPECT_NEAR(operator_norm(m), operator_norm_gram(m), 1e-9 * operator_norm(m));
    }
}

TEST(Truncation, CauchyCriterionReachedByAutoRaise) {
    for (int ell = 1; ell <= 3; ++ell) {
        for (const cplx s : {cplx{0.3, 0.0}, cplx{0.8, 0.0}, cplx{0.5, 1.5}}) {
            const TruncationCheck chk = certify_truncation(fixture_f1(), s, ell, 12);
            EXPECT_LT(chk.difference, 1e-7);
            EXPECT_LE(chk.degree, 32);
            RecordProperty("degree_l" + std::to_string(ell), chk.degree);
        }
    }
}

TEST(Estimates, EvaluationBoundOnLengthTwoDisks) {
    // 200 random unit-norm f in the truncated space; sup over 20 points of each D_w, |w| = 2.
    // Cauchy-Schwarz against the reproducing kernel gives |f(z)| ≤ sqrt(B_{D_S(w)}(z,z)).
    const BergmanBasis& basis = basis12();
    const SchottkyData& data = basis.data();
    std::mt19937_64 eng(21);
    std::vector<VectorC> fs;
    for (int k = 0; k < 200; ++k) {
        VectorC c = random_matrix(eng, basis.dimension(), 1).col(0);
        fs.push_back(c / c.norm());
    }
    double sup100 = 0.0, sup200 = 0.0, kernel_cap = 0.0;
    for_each_word(data.alphabet(), 2, [&](const Word& w) {
        const Disk dw = word_geometry(data, w).disk;
        const Letter a = w.start();
        std::vector<cplx> pts{cplx{dw.center, 0.0}};
        for (int q = 0; q < 19; ++q) pts.push_back(dw.center + (q % 2 ? 0.9 : 0.5) * dw.radius * std::polar(1.0, 0.33 * q));
        for (const cplx z : pts) {
            kernel_cap = std::max(kernel_cap, std::sqrt(std::abs(bergman_kernel(data.disk(a), z, z))));
            for (std::size_t k = 0; k < fs.size(); ++k) {
                cplx v{0.0, 0.0};
                for (int j = 0; j < 12; ++j) v += fs[k](a * 12 + j) * basis.evaluate(a, j, z);
                if (k < 100) sup100 = std::max(sup100, std::abs(v));
                sup200 = std::max(sup200, std::abs(v));
            }
        }
    });
    RecordProperty("sup_eval", std::to_string(sup200));
    EXPECT_LE(sup200, kernel_cap);
    EXPECT_LE(sup200, 1.25 * sup100);
}

TEST(Estimates, RestrictionBoundOverShortWords) {
    // ‖ψ‖_{H(D_w)} / (Υ_w ‖ψ‖_{H(D_S(w))}) for 50 random ψ, |w| ≤ 5, area quadrature on D_w.
    // The kernel bound gives ‖ψ‖²_{H(D_w)} ≤ π r_w² max_{D_w} B_{D_S}(z,z) when ‖ψ‖ = 1.
    const BergmanBasis& basis = basis12();
    const SchottkyData& data = basis.data();
    std::mt19937_64 eng(22);
    std::vector<VectorC> psis;
    for (int k = 0; k < 50; ++k) {
        VectorC c = random_matrix(eng, 12, 1).col(0);
        psis.push_back(c / c.norm());
    }
    double worst = 0.0;
    for (int len = 2; len <= 5; ++len) {
        for_each_word(data.alphabet(), len, [&](const Word& w) {
            const Disk dw = word_geometry(data, w).disk;
            const Letter a = w.start();
            const Disk& ds = data.disk(a);
            // Polar quadrature: midpoint rule in ρ (24 rings), trapezoid in angle (24).
            const int nr = 24, na = 24;
            std::vector<std::pair<cplx, double>> nodes;
            for (int i = 0; i < nr; ++i) {
                const double rho = (i + 0.5) * dw.radius / nr;
                for (int k = 0; k < na; ++k) {
                    nodes.emplace_back(dw.center + std::polar(rho, 2.0 * std::numbers::pi * k / na),
                                       rho * (dw.radius / nr) * (2.0 * std::numbers::pi / na));
                }
            }
            const double far = std::abs(dw.center - ds.center) + dw.radius;
            const double kmax = std::abs(bergman_kernel(ds, ds.center + far, ds.center + far));
            const double cap = std::sqrt(std::numbers::pi * kmax) * dw.radius / word_geometry(data, w).upsilon;
            for (const auto& psi : psis) {
                double sq = 0.0;
                for (const auto& [z, wt] : nodes) {
                    cplx v{0.0, 0.0};
                    for (int j = 0; j < 12; ++j) v += psi(j) * basis.evaluate(a, j, z);
                    sq += std::norm(v) * wt;
                }
                const double ratio = std::sqrt(sq) / word_geometry(data, w).upsilon;
                worst = std::max(worst, ratio);
                EXPECT_LE(ratio, cap * (1.0 + 1e-6));
            }
        });
    }
    RecordProperty("restriction_constant", std::to_string(worst));
    EXPECT_LT(worst, 1.0);
}

TEST(Estimates, LipschitzFitCarriesToNextPower) {
    const std::vector<cplx> pts = s_grid(0.3, 0.5, -1.0, 1.0, 4, 4);
    auto powers = [&](int ell) {
        std::vector<MatrixC> out;
        for (const cplx s : pts) out.push_back(base_transfer(s, ell, basis12()));
        return out;
    };
    const double b = fit_log_derivative_rate(basis12(), 2);
    const double ck = compact_constant(0.3, 0.5, -1.0, 1.0);
    const LipschitzConstants c = fit_lipschitz(powers(2), pts, 2, b, ck, 2);
    EXPECT_LE(lipschitz_worst_ratio(c, powers(2), pts, 2), 1.0 + 1e-12);
    EXPECT_LE(lipschitz_worst_ratio(c, powers(3), pts, 3), 1.0);
}
