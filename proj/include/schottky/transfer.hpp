#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "schottky/bergman.hpp"
#include "schottky/linalg.hpp"

namespace schottky {

/// Finite-dimensional unitary representation given on the letters A,
/// with ρ(ã) = ρ(a)^{-1}.
class Representation {
public:
    Representation() = default;

    Representation(const Alphabet& alphabet, std::vector<MatrixC> letter_matrices)
        : alphabet_(alphabet), mats_(std::move(letter_matrices)) {
        if (static_cast<int>(mats_.size()) != alphabet.size()) {
            throw GeometryError("representation needs one matrix per letter");
        }
        dim_ = static_cast<int>(mats_.front().rows());
        for (Letter a = 0; a < alphabet.size(); ++a) {
            if (mats_[a].rows() != dim_ || mats_[a].cols() != dim_) {
                throw GeometryError("representation block dimension mismatch at letter " +
                                    std::to_string(a + 1));
            }
        }
        for (Letter a = 0; a < alphabet.size(); ++a) {
            const MatrixC& m = mats_[a];
            if (dim_ == 0) continue;
            const MatrixC id = MatrixC::Identity(dim_, dim_);
            if ((m.adjoint() * m - id).cwiseAbs().maxCoeff() > 1e-10) {
                throw GeometryError("representation matrix of letter " + std::to_string(a + 1) +
                                    " is not unitary");
            }
            if ((m * mats_[alphabet.mirror(a)] - id).cwiseAbs().maxCoeff() > 1e-10) {
                throw GeometryError("representation violates rho(mirror a) = rho(a)^-1 at letter " +
                                    std::to_string(a + 1));
            }
        }
    }

    static Representation trivial(const Alphabet& alphabet, int dim = 1) {
        return Representation(alphabet, std::vector<MatrixC>(alphabet.size(), MatrixC::Identity(dim, dim)));
    }

    int dim() const noexcept { return dim_; }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const MatrixC& letter(Letter a) const { return mats_.at(static_cast<std::size_t>(a)); }

    MatrixC of_word(const Word& w) const {
        MatrixC m = MatrixC::Identity(dim_, dim_);
        for (Letter a : w.letters()) m = m * mats_[a];
        return m;
    }

private:
    Alphabet alphabet_{1};
    std::vector<MatrixC> mats_;
    int dim_ = 0;
};

/// M̂_{w,s}: matrix (rows e_{E(w),j}, columns e_{S(w),k}) of
/// ψ ↦ exp(s θ(w,·)) ψ(backspace(w) ·), for |w| ≥ 2.
inline MatrixC assemble_mws(const Word& w, cplx s, const BergmanBasis& basis) {
    if (w.length() < 2) throw GeometryError("assemble_mws needs |w| >= 2");
    const SchottkyData& data = basis.data();
    const int q_nodes = basis.quadrature_nodes();
    const int m = basis.degree();
    const Letter src = w.start();
    const Letter dst = w.end();
    MatrixC samples(q_nodes, m);
    for (int q = 0; q < q_nodes; ++q) {
        const ThetaValue tv = theta_and_image(data, w, basis.node(dst, q));
        const cplx mult = std::exp(s * tv.theta);
        basis.evaluate_all(src, tv.image, samples.row(q));
        samples.row(q) *= mult;
    }
    return basis.project_sample_matrix(dst, samples);
}

/// Same block for ∂/∂s: ψ ↦ θ(w,·) exp(s θ(w,·)) ψ(backspace(w) ·).
inline MatrixC assemble_mws_ds(const Word& w, cplx s, const BergmanBasis& basis) {
    if (w.length() < 2) throw GeometryError("assemble_mws_ds needs |w| >= 2");
    const SchottkyData& data = basis.data();
    const int q_nodes = basis.quadrature_nodes();
    MatrixC samples(q_nodes, basis.degree());
    for (int q = 0; q < q_nodes; ++q) {
        const ThetaValue tv = theta_and_image(data, w, basis.node(w.end(), q));
        basis.evaluate_all(w.start(), tv.image, samples.row(q));
        samples.row(q) *= tv.theta * std::exp(s * tv.theta);
    }
    return basis.project_sample_matrix(w.end(), samples);
}

enum class AssemblyMode { direct, matrix_power, kronecker };

inline std::string to_string(AssemblyMode m) {
    switch (m) {
        case AssemblyMode::direct: return "direct";
        case AssemblyMode::matrix_power: return "matrix-power";
        case AssemblyMode::kronecker: return "kronecker";
    }
    return "?";
}

/// Finite image of L^ℓ_{s,ρ} on span{e_{a,k}} ⊗ V with index (a*M + k)*d + i.
struct TransferMatrix {
    cplx s{};
    int power = 1;
    int rep_dim = 1;
    int degree = 0;
    AssemblyMode mode = AssemblyMode::direct;
    MatrixC entries;
};

namespace detail {

inline void add_twisted_block(MatrixC& out, const MatrixC& block, const MatrixC& twist, Letter row_slot,
                              Letter col_slot, int degree) {
    const Eigen::Index d = twist.rows();
    const Eigen::Index span = degree * d;
    auto dst = out.block(row_slot * span, col_slot * span, span, span);
    for (int j = 0; j < degree; ++j) {
        for (int k = 0; k < degree; ++k) {
            const cplx bjk = block(j, k);
            if (bjk == cplx{0.0, 0.0}) continue;
            dst.block(j * d, k * d, d, d) += bjk * twist;
        }
    }
}

}  // namespace detail

/// Twist carried by a word w ∈ Γ_{ℓ+1}: ρ(backspace(w)^{-1}) = ρ(backspace(w))*.
inline MatrixC word_twist(const Representation& rep, const Word& w) {
    return rep.of_word(w.backspace()).adjoint();
}

inline TransferMatrix assemble_transfer(cplx s, const Representation& rep, int power,
                                        const BergmanBasis& basis,
                                        AssemblyMode mode = AssemblyMode::direct) {
    if (power < 1) throw GeometryError("transfer operator power must be >= 1");
    if (!(rep.alphabet() == basis.data().alphabet())) {
        throw GeometryError("representation alphabet does not match the Schottky data");
    }
    const int m = basis.degree();
    const int d = rep.dim();
    const Eigen::Index dim = static_cast<Eigen::Index>(basis.dimension()) * d;
    TransferMatrix t;
    t.s = s;
    t.power = power;
    t.rep_dim = d;
    t.degree = m;
    t.mode = mode;
    t.entries = MatrixC::Zero(dim, dim);
    const Alphabet& alpha = basis.data().alphabet();

    switch (mode) {
        case AssemblyMode::direct: {
            for_each_word(alpha, power + 1, [&](const Word& w) {
                detail::add_twisted_block(t.entries, assemble_mws(w, s, basis), word_twist(rep, w),
                                          w.end(), w.start(), m);
            });
            break;
        }
        case AssemblyMode::matrix_power: {
            const TransferMatrix one = assemble_transfer(s, rep, 1, basis, AssemblyMode::direct);
            MatrixC acc = one.entries;
            for (int k = 1; k < power; ++k) acc = one.entries * acc;
            t.entries = std::move(acc);
            break;
        }
        case AssemblyMode::kronecker: {
            // Batch by g = backspace(w) ∈ Γ_ℓ: Σ_b M_{gb} ⊗ ρ(g^{-1}).
            const int slots = basis.slots();
            for_each_word(alpha, power, [&](const Word& g) {
                MatrixC grouped = MatrixC::Zero(static_cast<Eigen::Index>(slots) * m, m);
                for (Letter b = 0; b < slots; ++b) {
                    if (!g.concatenates_with(b)) continue;
                    grouped.block(static_cast<Eigen::Index>(b) * m, 0, m, m) =
                        assemble_mws(g.append(b), s, basis);
                }
                const MatrixC twist = rep.of_word(g).adjoint();
                for (Letter b = 0; b < slots; ++b) {
                    if (!g.concatenates_with(b)) continue;
                    detail::add_twisted_block(t.entries,
                                              grouped.block(static_cast<Eigen::Index>(b) * m, 0, m, m),
                                              twist, b, g.start(), m);
                }
            });
            break;
        }
    }
    return t;
}

/// Untwisted operator L̂^ℓ_s (ρ ≡ 1).
inline MatrixC base_transfer(cplx s, int power, const BergmanBasis& basis,
                             AssemblyMode mode = AssemblyMode::direct) {
    return assemble_transfer(s, Representation::trivial(basis.data().alphabet()), power, basis, mode)
        .entries;
}

inline cplx fredholm_det(const TransferMatrix& t) { return fredholm_det(t.entries); }

/// det(I - L̂_s) at degree M and M+4 for a truncation-stability check.
struct TruncationCheck {
    int degree = 0;
    cplx det_lo{}, det_hi{};
    double difference = 0.0;
};

/// Raises M from `start` in steps of 4 until |det_M - det_{M+4}| < tol.
inline TruncationCheck certify_truncation(const SchottkyData& data, cplx s, int power = 1,
                                          int start = 16, double tol = 1e-7, int max_degree = 48) {
    TruncationCheck chk;
    for (int m = start; m <= max_degree; m += 4) {
        const BergmanBasis lo(data, m);
        const BergmanBasis hi(data, m + 4);
        chk.degree = m;
        chk.det_lo = fredholm_det(base_transfer(s, power, lo));
        chk.det_hi = fredholm_det(base_transfer(s, power, hi));
        chk.difference = std::abs(chk.det_lo - chk.det_hi);
        if (chk.difference < tol) return chk;
    }
    throw NumericalError("truncation degree did not stabilize below M = " + std::to_string(max_degree));
}

}  // namespace schottky
