#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "schottky/transfer.hpp"

namespace schottky {

/// splitmix64 finalizer, used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// seed_trial = splitmix64(seed ^ splitmix64(trial)).
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(master ^ splitmix64(trial));
}

/// Unbiased integer in [0, bound) from a 64-bit engine by rejection.
/// std::uniform_int_distribution is implementation-defined, so it is not used.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
        const std::uint64_t x = eng();
        if (x < limit) return x % bound;
    }
}

/// A homomorphism φ: Γ → S_n given on the basis letters 1..N.
/// perms[j][i] = φ(γ_j)(i), 0-based.
struct PermutationRep {
    int n = 1;
    std::vector<std::vector<int>> perms;
    std::uint64_t seed = 0;

    int rank() const noexcept { return static_cast<int>(perms.size()); }

    /// Permutation of any letter a ∈ A (mirrors get the inverse).
    std::vector<int> letter_perm(Letter a) const {
        const int rk = rank();
        if (a < rk) return perms[a];
        const auto& p = perms[a - rk];
        std::vector<int> inv(p.size());
        for (int i = 0; i < n; ++i) inv[p[i]] = i;
        return inv;
    }

    static PermutationRep identity(int n, int rank) {
        PermutationRep r;
        r.n = n;
        r.perms.assign(rank, std::vector<int>(n));
        for (auto& p : r.perms) std::iota(p.begin(), p.end(), 0);
        return r;
    }
};

/// N independent uniform permutations of [n], Fisher–Yates on mt19937_64(seed).
inline PermutationRep sample_hom(int n, int rank, std::uint64_t seed) {
    if (n < 1) throw GeometryError("sample_hom needs n >= 1");
    PermutationRep r = PermutationRep::identity(n, rank);
    r.seed = seed;
    std::mt19937_64 eng(seed);
    for (auto& p : r.perms) {
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(uniform_below(eng, static_cast<std::uint64_t>(i) + 1));
            std::swap(p[i], p[j]);
        }
    }
    return r;
}

/// Permutation matrix P with P e_i = e_{π(i)}.
inline MatrixC permutation_matrix(const std::vector<int>& perm) {
    const auto n = static_cast<Eigen::Index>(perm.size());
    MatrixC p = MatrixC::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) p(perm[i], i) = 1.0;
    return p;
}

/// Orthonormal staircase basis of V_n^0 as columns:
/// v_k = (1,...,1,-k,0,...,0)/sqrt(k(k+1)) with k ones, k = 1..n-1.
inline Eigen::MatrixXd staircase_basis(int n) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, std::max(0, n - 1));
    for (int k = 1; k < n; ++k) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) q(i, k - 1) = scale;
        q(k, k - 1) = -k * scale;
    }
    return q;
}

/// ρ_n^0(γ_a) in the staircase basis; (n-1)×(n-1), empty when n = 1.
inline MatrixC rep0_matrix(const PermutationRep& rep, Letter a) {
    if (rep.n < 1) throw GeometryError("rep0_matrix: n must be positive");
    if (rep.n == 1) return MatrixC(0, 0);
    const Eigen::MatrixXd q = staircase_basis(rep.n);
    return q.transpose().cast<cplx>() * permutation_matrix(rep.letter_perm(a)) * q.cast<cplx>();
}

/// ρ_n on V_n = ℓ²([n]).
inline Representation full_representation(const PermutationRep& rep) {
    const Alphabet alpha(rep.rank());
    std::vector<MatrixC> mats;
    for (Letter a = 0; a < alpha.size(); ++a) mats.push_back(permutation_matrix(rep.letter_perm(a)));
    return Representation(alpha, std::move(mats));
}

/// ρ_n^0 on V_n^0 in the staircase basis.
inline Representation new_representation(const PermutationRep& rep) {
    const Alphabet alpha(rep.rank());
    std::vector<MatrixC> mats;
    for (Letter a = 0; a < alpha.size(); ++a) mats.push_back(rep0_matrix(rep, a));
    return Representation(alpha, std::move(mats));
}

/// Matrix-free (L̂_{s,ρ_n})^ℓ restricted to H ⊗ V_n^0.
///
/// Vectors are stored as (2N·M) × n matrices F with F(a*M+k, i) the coefficient of
/// e_{a,k} ⊗ δ_i. Mean-zero columns span V_n^0, which every permutation preserves.
/// With `derivative` set, apply_derivative realizes ∂/∂s of the ℓ-th power via
/// the product rule (y, y') ↦ (L y, L y' + L' y).
class CoverTransferOperator {
public:
    CoverTransferOperator(const BergmanBasis& basis, const PermutationRep& rep, cplx s, int power,
                          bool derivative = false)
        : degree_(basis.degree()), slots_(basis.slots()), n_(rep.n), power_(power) {
        if (power < 1) throw GeometryError("transfer operator power must be >= 1");
        const Alphabet& alpha = basis.data().alphabet();
        for (Letter a = 0; a < alpha.size(); ++a) perms_.push_back(rep.letter_perm(a));
        for_each_word(alpha, 2, [&](const Word& w) {
            blocks_.push_back({w.start(), w.end(), assemble_mws(w, s, basis)});
            if (derivative) dblocks_.push_back({w.start(), w.end(), assemble_mws_ds(w, s, basis)});
        });
    }

    Eigen::Index size() const { return static_cast<Eigen::Index>(slots_) * degree_ * n_; }
    int power() const noexcept { return power_; }

    VectorC apply(const VectorC& x) const {
        MatrixC f = Eigen::Map<const MatrixC>(x.data(), rows(), n_);
        for (int k = 0; k < power_; ++k) f = step(f, blocks_);
        return Eigen::Map<const VectorC>(f.data(), f.size());
    }

    VectorC apply_adjoint(const VectorC& y) const {
        MatrixC g = Eigen::Map<const MatrixC>(y.data(), rows(), n_);
        for (int k = 0; k < power_; ++k) g = step_adjoint(g, blocks_);
        return Eigen::Map<const VectorC>(g.data(), g.size());
    }

    VectorC apply_derivative(const VectorC& x) const {
        require_derivative();
        MatrixC f = Eigen::Map<const MatrixC>(x.data(), rows(), n_);
        MatrixC df = MatrixC::Zero(rows(), n_);
        for (int k = 0; k < power_; ++k) {
            df = step(df, blocks_) + step(f, dblocks_);
            f = step(f, blocks_);
        }
        return Eigen::Map<const VectorC>(df.data(), df.size());
    }

    VectorC apply_derivative_adjoint(const VectorC& y) const {
        require_derivative();
        MatrixC g = Eigen::Map<const MatrixC>(y.data(), rows(), n_);
        MatrixC dg = MatrixC::Zero(rows(), n_);
        for (int k = 0; k < power_; ++k) {
            dg = step_adjoint(dg, blocks_) + step_adjoint(g, dblocks_);
            g = step_adjoint(g, blocks_);
        }
        return Eigen::Map<const VectorC>(dg.data(), dg.size());
    }

    /// Removes the mean across sheets (projection onto H ⊗ V_n^0).
    void restrict_to_new(VectorC& x) const {
        Eigen::Map<MatrixC> f(x.data(), rows(), n_);
        const VectorC mean = f.rowwise().mean();
        f.colwise() -= mean;
    }

private:
    struct Block {
        Letter src, dst;  // w = (src, dst): source slot S(w), target slot E(w)
        MatrixC mat;
    };

    Eigen::Index rows() const { return static_cast<Eigen::Index>(slots_) * degree_; }

    void require_derivative() const {
        if (dblocks_.empty()) throw NumericalError("operator was built without derivative blocks");
    }

    // One application of L̂_{s,ρ_n}: target column j reads source column σ_src(j).
    MatrixC step(const MatrixC& f, const std::vector<Block>& blocks) const {
        MatrixC out = MatrixC::Zero(rows(), n_);
        MatrixC gathered(degree_, n_);
        for (const Block& b : blocks) {
            const auto& sigma = perms_[b.src];
            for (int j = 0; j < n_; ++j) {
                gathered.col(j) = f.block(static_cast<Eigen::Index>(b.src) * degree_, sigma[j], degree_, 1);
            }
            out.block(static_cast<Eigen::Index>(b.dst) * degree_, 0, degree_, n_).noalias() +=
                b.mat * gathered;
        }
        return out;
    }

    MatrixC step_adjoint(const MatrixC& g, const std::vector<Block>& blocks) const {
        MatrixC out = MatrixC::Zero(rows(), n_);
        MatrixC local(degree_, n_);
        for (const Block& b : blocks) {
            local.noalias() = b.mat.adjoint() * g.block(static_cast<Eigen::Index>(b.dst) * degree_, 0, degree_, n_);
            const auto& sigma = perms_[b.src];
            for (int j = 0; j < n_; ++j) {
                out.block(static_cast<Eigen::Index>(b.src) * degree_, sigma[j], degree_, 1) += local.col(j);
            }
        }
        return out;
    }

    int degree_, slots_, n_, power_;
    std::vector<std::vector<int>> perms_;
    std::vector<Block> blocks_;
    std::vector<Block> dblocks_;
};

/// ‖(L̂_{s,ρ_n^0})^ℓ‖ by Lanczos on the matrix-free cover operator.
inline double twisted_power_norm_iterative(const PermutationRep& rep, cplx s, int power,
                                           const BergmanBasis& basis, const LanczosOptions& opt = {}) {
    if (rep.n == 1) return 0.0;
    const CoverTransferOperator op(basis, rep, s, power);
    const auto res = largest_singular_value([&](const VectorC& x) { return op.apply(x); },
                                            [&](const VectorC& y) { return op.apply_adjoint(y); },
                                            [&](VectorC& v) { op.restrict_to_new(v); }, op.size(), opt);
    return res.sigma;
}

/// ‖L̂^ℓ_{s,ρ_n^0}‖ for the direct ℓ-step assembly (dense; small n only).
inline double twisted_power_norm(const PermutationRep& rep, cplx s, int power, const BergmanBasis& basis,
                                 AssemblyMode mode = AssemblyMode::direct) {
    if (rep.n == 1) return 0.0;
    return operator_norm(assemble_transfer(s, new_representation(rep), power, basis, mode).entries);
}

}  // namespace schottky
