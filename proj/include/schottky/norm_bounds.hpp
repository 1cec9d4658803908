#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "schottky/linalg.hpp"
#include "schottky/transfer.hpp"

namespace schottky {

// ---------------------------------------------------------------------------
// T_{w,s} blocks
// ---------------------------------------------------------------------------

/// T̂_{w,s} = Σ_{b: w⁻¹→b} M̂_{w⁻¹b,s}. Every summand reads the single slot
/// S(w⁻¹) = mirror(E(w)), so the operator is stored as that source slot plus a
/// (2N·M) × M column block whose row-block b holds M̂_{w⁻¹b,s}.
struct TwsBlock {
    Word word;
    Letter source_slot = 0;
    MatrixC column;
    int summands = 0;

    /// Embedding into the full 2N·M space.
    MatrixC dense(int slots, int degree) const {
        MatrixC out = MatrixC::Zero(static_cast<Eigen::Index>(slots) * degree,
                                    static_cast<Eigen::Index>(slots) * degree);
        out.block(0, static_cast<Eigen::Index>(source_slot) * degree, column.rows(), degree) = column;
        return out;
    }

    double norm() const { return operator_norm(column); }
};

inline TwsBlock assemble_tws_block(const Word& w, cplx s, const BergmanBasis& basis) {
    if (w.length() < 1) throw GeometryError("assemble_tws needs |w| >= 1");
    const Word inv = w.inverse();
    const int m = basis.degree();
    TwsBlock t;
    t.word = w;
    t.source_slot = inv.start();
    t.column = MatrixC::Zero(static_cast<Eigen::Index>(basis.slots()) * m, m);
    for (Letter b = 0; b < basis.slots(); ++b) {
        if (!inv.concatenates_with(b)) continue;
        t.column.block(static_cast<Eigen::Index>(b) * m, 0, m, m) = assemble_mws(inv.append(b), s, basis);
        ++t.summands;
    }
    return t;
}

/// Dense T̂_{w,s} in the full 2N·M space.
inline MatrixC assemble_tws(const Word& w, cplx s, const BergmanBasis& basis) {
    return assemble_tws_block(w, s, basis).dense(basis.slots(), basis.degree());
}

/// All T̂_{w,s}, w ∈ Γ_ℓ, in lexicographic order.
inline std::vector<TwsBlock> assemble_tws_sphere(int length, cplx s, const BergmanBasis& basis) {
    std::vector<TwsBlock> out;
    out.reserve(static_cast<std::size_t>(basis.data().alphabet().sphere_size(length)));
    for_each_word(basis.data().alphabet(), length,
                  [&](const Word& w) { out.push_back(assemble_tws_block(w, s, basis)); });
    return out;
}

// ---------------------------------------------------------------------------
// Compressions of the left regular representation
// ---------------------------------------------------------------------------

/// P_R ρ_Γ(·) P_R on ℓ²(B_R), B_R = Γ_{≤R} indexed by `word_rank`.
class CompressedRegularRep {
public:
    struct Action {
        std::vector<std::int32_t> src;
        std::vector<std::int32_t> dst;
    };

    CompressedRegularRep(const Alphabet& alphabet, int radius) : alphabet_(alphabet), radius_(radius) {
        if (radius < 0) throw GeometryError("compression radius must be >= 0");
        for (int k = 0; k <= radius; ++k) {
            for_each_word(alphabet, k, [&](const Word& w) { ball_.push_back(w); });
        }
    }

    int radius() const noexcept { return radius_; }
    std::size_t size() const noexcept { return ball_.size(); }
    const Word& word(std::size_t i) const { return ball_.at(i); }
    const Alphabet& alphabet() const noexcept { return alphabet_; }

    /// Partial permutation δ_w ↦ δ_{γw} over the pairs with |γw| ≤ R.
    Action action(const Word& gamma) const {
        Action act;
        for (std::size_t i = 0; i < ball_.size(); ++i) {
            const Word prod = gamma.times(ball_[i]);
            if (prod.length() <= radius_) {
                act.src.push_back(static_cast<std::int32_t>(i));
                act.dst.push_back(static_cast<std::int32_t>(word_rank(prod)));
            }
        }
        return act;
    }

    /// Dense real matrix of the compression of Σ α_γ ρ_Γ(γ).
    Eigen::MatrixXd dense(const std::vector<Word>& words, const std::vector<double>& coeffs) const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
        for (std::size_t k = 0; k < words.size(); ++k) {
            const Action act = action(words[k]);
            for (std::size_t p = 0; p < act.src.size(); ++p) m(act.dst[p], act.src[p]) += coeffs[k];
        }
        return m;
    }

private:
    Alphabet alphabet_;
    int radius_;
    std::vector<Word> ball_;
};

namespace detail {

/// Matrix-free compression of Σ_w T_w ⊗ ρ_Γ(w) on H ⊗ ℓ²(B_R).
class CompressedOperatorSum {
public:
    CompressedOperatorSum(const std::vector<TwsBlock>& blocks, const CompressedRegularRep& reg, int degree)
        : blocks_(blocks), degree_(degree), ball_(static_cast<Eigen::Index>(reg.size())) {
        for (const auto& b : blocks_) actions_.push_back(reg.action(b.word));
        rows_ = blocks_.empty() ? 0 : blocks_.front().column.rows();
    }

    Eigen::Index size() const { return rows_ * ball_; }

    VectorC apply(const VectorC& x) const {
        Eigen::Map<const MatrixC> f(x.data(), rows_, ball_);
        MatrixC out = MatrixC::Zero(rows_, ball_);
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const auto& act = actions_[k];
            const auto n = static_cast<Eigen::Index>(act.src.size());
            if (n == 0) continue;
            MatrixC gathered(degree_, n);
            const Eigen::Index off = static_cast<Eigen::Index>(blocks_[k].source_slot) * degree_;
            for (Eigen::Index p = 0; p < n; ++p) gathered.col(p) = f.block(off, act.src[p], degree_, 1);
            const MatrixC prod = blocks_[k].column * gathered;
            for (Eigen::Index p = 0; p < n; ++p) out.col(act.dst[p]) += prod.col(p);
        }
        return Eigen::Map<const VectorC>(out.data(), out.size());
    }

    VectorC apply_adjoint(const VectorC& y) const {
        Eigen::Map<const MatrixC> g(y.data(), rows_, ball_);
        MatrixC out = MatrixC::Zero(rows_, ball_);
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const auto& act = actions_[k];
            const auto n = static_cast<Eigen::Index>(act.src.size());
            if (n == 0) continue;
            MatrixC gathered(rows_, n);
            for (Eigen::Index p = 0; p < n; ++p) gathered.col(p) = g.col(act.dst[p]);
            const MatrixC prod = blocks_[k].column.adjoint() * gathered;
            const Eigen::Index off = static_cast<Eigen::Index>(blocks_[k].source_slot) * degree_;
            for (Eigen::Index p = 0; p < n; ++p) out.block(off, act.src[p], degree_, 1) += prod.col(p);
        }
        return Eigen::Map<const VectorC>(out.data(), out.size());
    }

private:
    const std::vector<TwsBlock>& blocks_;
    int degree_;
    Eigen::Index ball_;
    Eigen::Index rows_ = 0;
    std::vector<CompressedRegularRep::Action> actions_;
};

}  // namespace detail

/// ‖P_R (Σ_{w∈Γ_ℓ} T̂_{w,s} ⊗ ρ_Γ(w)) P_R‖, a lower bound for the limit operator norm.
inline double compressed_limit_norm(const std::vector<TwsBlock>& blocks, const CompressedRegularRep& reg,
                                    int degree, const LanczosOptions& opt = {}) {
    const detail::CompressedOperatorSum op(blocks, reg, degree);
    return largest_singular_value([&](const VectorC& x) { return op.apply(x); },
                                  [&](const VectorC& y) { return op.apply_adjoint(y); }, op.size(), opt)
        .sigma;
}

// ---------------------------------------------------------------------------
// Buchholz matrices R(j, ℓ-j) and the Hilbert–Schmidt relaxation
// ---------------------------------------------------------------------------

/// Configured ceiling on the flat entry count of a Buchholz block.
inline constexpr double kBlockBudget = 2e8;

/// (Σ_i ‖Σ_j T_ij T_ij*‖)^{1/2} for a block matrix given row-major.
inline double hs_bound(const std::vector<std::vector<MatrixC>>& blocks) {
    double total = 0.0;
    for (const auto& row : blocks) {
        if (row.empty()) continue;
        MatrixC acc = MatrixC::Zero(row.front().rows(), row.front().rows());
        for (const auto& t : row) acc.noalias() += t * t.adjoint();
        total += operator_norm(acc);
    }
    return std::sqrt(total);
}

inline MatrixC flatten_blocks(const std::vector<std::vector<MatrixC>>& blocks) {
    if (blocks.empty() || blocks.front().empty()) return MatrixC(0, 0);
    const Eigen::Index br = blocks.front().front().rows();
    const Eigen::Index bc = blocks.front().front().cols();
    MatrixC out(br * static_cast<Eigen::Index>(blocks.size()), bc * static_cast<Eigen::Index>(blocks.front().size()));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = 0; j < blocks[i].size(); ++j) {
            out.block(static_cast<Eigen::Index>(i) * br, static_cast<Eigen::Index>(j) * bc, br, bc) = blocks[i][j];
        }
    }
    return out;
}

/// R(j, ℓ-j): L²(Γ_j, H) → L²(Γ_{ℓ-j}, H), block (w_n, w_m) = T̂_{w_m w_n} when
/// w_m → w_n, zero otherwise. Stored sparsely; blocks reference `sphere`.
class BuchholzBlock {
public:
    struct Entry {
        std::int64_t row;  ///< index of w_n in Γ_{ℓ-j}
        std::int64_t col;  ///< index of w_m in Γ_j
        std::size_t block; ///< index into the Γ_ℓ sphere of T blocks
    };

    BuchholzBlock(std::shared_ptr<const std::vector<TwsBlock>> sphere, const Alphabet& alpha, int length,
                  int j, int slots, int degree)
        : sphere_(std::move(sphere)), length_(length), j_(j), slots_(slots), degree_(degree) {
        if (j < 0 || j > length) throw GeometryError("buchholz_block needs 0 <= j <= l");
        rows_words_ = static_cast<std::int64_t>(alpha.sphere_size(length - j));
        cols_words_ = static_cast<std::int64_t>(alpha.sphere_size(j));
        // Every w ∈ Γ_ℓ splits uniquely as w_m w_n with |w_m| = j.
        for (std::size_t k = 0; k < sphere_->size(); ++k) {
            const auto& letters = (*sphere_)[k].word.letters();
            const Word wm(alpha, std::vector<Letter>(letters.begin(), letters.begin() + j));
            const Word wn(alpha, std::vector<Letter>(letters.begin() + j, letters.end()));
            const std::int64_t col = static_cast<std::int64_t>(word_rank(wm) - alpha.ball_size(j - 1));
            const std::int64_t row = static_cast<std::int64_t>(word_rank(wn) - alpha.ball_size(length - j - 1));
            entries_.push_back({row, col, k});
        }
    }

    int length() const noexcept { return length_; }
    int split() const noexcept { return j_; }
    std::size_t nonzero_blocks() const noexcept { return entries_.size(); }
    std::int64_t block_rows() const noexcept { return rows_words_; }
    std::int64_t block_cols() const noexcept { return cols_words_; }
    Eigen::Index space_dim() const { return static_cast<Eigen::Index>(slots_) * degree_; }
    double flat_entries() const {
        return static_cast<double>(rows_words_) * cols_words_ * space_dim() * space_dim();
    }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    /// Flat (|Γ_{ℓ-j}|·2NM) × (|Γ_j|·2NM) matrix; refuses beyond the block budget.
    MatrixC to_dense(double budget = kBlockBudget) const {
        if (flat_entries() > budget) {
            throw RefusalError("block-budget", "Buchholz block exceeds the configured entry budget");
        }
        const Eigen::Index d = space_dim();
        MatrixC out = MatrixC::Zero(rows_words_ * d, cols_words_ * d);
        for (const auto& e : entries_) {
            out.block(e.row * d, e.col * d, d, d) = (*sphere_)[e.block].dense(slots_, degree_);
        }
        return out;
    }

    /// Row-major block list (dense blocks; zeros included), for hs_bound on small cases.
    std::vector<std::vector<MatrixC>> to_blocks() const {
        const Eigen::Index d = space_dim();
        std::vector<std::vector<MatrixC>> blocks(static_cast<std::size_t>(rows_words_),
                                                 std::vector<MatrixC>(static_cast<std::size_t>(cols_words_),
                                                                      MatrixC::Zero(d, d)));
        for (const auto& e : entries_) blocks[e.row][e.col] = (*sphere_)[e.block].dense(slots_, degree_);
        return blocks;
    }

    VectorC apply(const VectorC& x) const {
        const Eigen::Index d = space_dim();
        VectorC y = VectorC::Zero(rows_words_ * d);
        for (const auto& e : entries_) {
            const TwsBlock& t = (*sphere_)[e.block];
            y.segment(e.row * d, d).noalias() +=
                t.column * x.segment(e.col * d + static_cast<Eigen::Index>(t.source_slot) * degree_, degree_);
        }
        return y;
    }

    VectorC apply_adjoint(const VectorC& y) const {
        const Eigen::Index d = space_dim();
        VectorC x = VectorC::Zero(cols_words_ * d);
        for (const auto& e : entries_) {
            const TwsBlock& t = (*sphere_)[e.block];
            x.segment(e.col * d + static_cast<Eigen::Index>(t.source_slot) * degree_, degree_).noalias() +=
                t.column.adjoint() * y.segment(e.row * d, d);
        }
        return x;
    }

    double norm(const LanczosOptions& opt = {}) const {
        return largest_singular_value([&](const VectorC& v) { return apply(v); },
                                      [&](const VectorC& v) { return apply_adjoint(v); },
                                      cols_words_ * space_dim(), opt)
            .sigma;
    }

    /// Row-sum relaxation (Σ_rows ‖Σ_cols T T*‖)^{1/2}, computed sparsely.
    double hs_relaxation() const {
        const Eigen::Index d = space_dim();
        std::map<std::int64_t, MatrixC> rows;
        for (const auto& e : entries_) {
            const TwsBlock& t = (*sphere_)[e.block];
            auto it = rows.try_emplace(e.row, MatrixC::Zero(d, d)).first;
            it->second.noalias() += t.column * t.column.adjoint();
        }
        double total = 0.0;
        for (const auto& [row, acc] : rows) total += operator_norm(acc);
        return std::sqrt(total);
    }

private:
    std::shared_ptr<const std::vector<TwsBlock>> sphere_;
    int length_, j_, slots_, degree_;
    std::int64_t rows_words_ = 0, cols_words_ = 0;
    std::vector<Entry> entries_;
};

inline BuchholzBlock buchholz_block(int length, int j, cplx s, const BergmanBasis& basis) {
    auto sphere = std::make_shared<const std::vector<TwsBlock>>(assemble_tws_sphere(length, s, basis));
    return BuchholzBlock(sphere, basis.data().alphabet(), length, j, basis.slots(), basis.degree());
}

struct BuchholzResult {
    int length = 0;
    cplx s{};
    double bound = 0.0;             ///< (ℓ+1) max_j ‖R(j,ℓ-j)‖ (or its relaxation)
    std::vector<double> block_norms;
    bool fallback = false;          ///< true when any block used the HS relaxation
};

inline BuchholzResult buchholz_bound(int length, cplx s, const BergmanBasis& basis,
                                     double budget = kBlockBudget, const LanczosOptions& opt = {}) {
    if (length < 1) throw GeometryError("buchholz_bound needs l >= 1");
    BuchholzResult res;
    res.length = length;
    res.s = s;
    auto sphere = std::make_shared<const std::vector<TwsBlock>>(assemble_tws_sphere(length, s, basis));
    double best = 0.0;
    for (int j = 0; j <= length; ++j) {
        const BuchholzBlock blk(sphere, basis.data().alphabet(), length, j, basis.slots(), basis.degree());
        double nrm = 0.0;
        if (blk.flat_entries() > budget) {
            nrm = blk.hs_relaxation();
            res.fallback = true;
        } else {
            nrm = blk.norm(opt);
        }
        res.block_norms.push_back(nrm);
        best = std::max(best, nrm);
    }
    res.bound = (length + 1) * best;
    return res;
}

// ---------------------------------------------------------------------------
// Exponential sums and Haagerup compressions
// ---------------------------------------------------------------------------

/// Σ_{w∈Γ_k} Υ_w^{δ+ε}.
inline double exp_sum(const SchottkyData& data, int k, double eps, double delta) {
    if (k < 1) throw GeometryError("exp_sum needs k >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw GeometryError("exp_sum needs eps in (0,1)");
    double total = 0.0;
    for_each_word(data.alphabet(), k,
                  [&](const Word& w) { total += std::pow(word_geometry(data, w).upsilon, delta + eps); });
    return total;
}

struct HaagerupResult {
    double lhs = 0.0;  ///< ‖P_R (Σ α_w ρ_Γ(w)) P_R‖
    double rhs = 0.0;  ///< (m+1)‖α‖₂
};

/// ‖P_R (Σ_k α_k ρ_Γ(w_k)) P_R‖ by Lanczos on the sparse partial permutations.
inline double compressed_norm(const CompressedRegularRep& reg, const std::vector<Word>& words,
                              const std::vector<double>& coeffs, const LanczosOptions& opt = {}) {
    if (coeffs.size() != words.size()) throw GeometryError("coefficient count must equal word count");
    std::vector<CompressedRegularRep::Action> acts;
    for (const auto& w : words) acts.push_back(reg.action(w));
    const auto n = static_cast<Eigen::Index>(reg.size());
    auto apply = [&](const VectorC& x) {
        VectorC y = VectorC::Zero(n);
        for (std::size_t k = 0; k < acts.size(); ++k) {
            for (std::size_t p = 0; p < acts[k].src.size(); ++p) y(acts[k].dst[p]) += coeffs[k] * x(acts[k].src[p]);
        }
        return y;
    };
    auto apply_adj = [&](const VectorC& y) {
        VectorC x = VectorC::Zero(n);
        for (std::size_t k = 0; k < acts.size(); ++k) {
            for (std::size_t p = 0; p < acts[k].src.size(); ++p) x(acts[k].src[p]) += coeffs[k] * y(acts[k].dst[p]);
        }
        return x;
    };
    LanczosOptions o = opt;
    o.max_steps = std::max(o.max_steps, 400);
    return largest_singular_value(apply, apply_adj, n, o).sigma;
}

/// Coefficients α over Γ_m given in lexicographic order.
inline HaagerupResult haagerup_compressed(const Alphabet& alpha, int m, const std::vector<double>& coeffs,
                                          const CompressedRegularRep& reg, const LanczosOptions& opt = {}) {
    if (reg.radius() < m) throw GeometryError("haagerup_compressed needs R >= m");
    const std::vector<Word> words = words_of_length(alpha, m);
    if (coeffs.size() != words.size()) throw GeometryError("coefficient count must equal |Gamma_m|");
    HaagerupResult res;
    res.lhs = compressed_norm(reg, words, coeffs, opt);
    double sq = 0.0;
    for (double c : coeffs) sq += c * c;
    res.rhs = (m + 1) * std::sqrt(sq);
    return res;
}

}  // namespace schottky
