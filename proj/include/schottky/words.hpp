#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "schottky/error.hpp"

namespace schottky {

/// Letters are 0-based indices into A = {0, ..., 2N-1}; letter a and a+N
/// are mutual inverses. User-facing text uses the 1-based labels 1..2N.
using Letter = int;

/// Alphabet of a free group of rank N on the letters A and their mirrors.
class Alphabet {
public:
    explicit Alphabet(int rank) : rank_(rank) {
        if (rank < 1) throw GeometryError("alphabet rank must be positive");
    }

    int rank() const noexcept { return rank_; }
    int size() const noexcept { return 2 * rank_; }
    Letter mirror(Letter a) const noexcept { return (a + rank_) % (2 * rank_); }

    /// |Γ_ℓ| = 2N(2N-1)^(ℓ-1), |Γ_0| = 1.
    std::uint64_t sphere_size(int length) const {
        if (length == 0) return 1;
        std::uint64_t count = static_cast<std::uint64_t>(size());
        for (int i = 1; i < length; ++i) count *= static_cast<std::uint64_t>(size() - 1);
        return count;
    }

    /// |Γ_{≤R}|.
    std::uint64_t ball_size(int radius) const {
        std::uint64_t total = 0;
        for (int k = 0; k <= radius; ++k) total += sphere_size(k);
        return total;
    }

    bool operator==(const Alphabet& o) const noexcept { return rank_ == o.rank_; }

private:
    int rank_;
};

/// Reduced word over an alphabet. Construction rejects non-reduced input.
class Word {
public:
    Word() = default;

    Word(const Alphabet& alphabet, std::vector<Letter> letters)
        : rank_(alphabet.rank()), letters_(std::move(letters)) {
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (letters_[i] < 0 || letters_[i] >= alphabet.size()) {
                throw GeometryError("letter out of range in word");
            }
            if (i > 0 && letters_[i] == alphabet.mirror(letters_[i - 1])) {
                throw GeometryError("word is not reduced at position " + std::to_string(i));
            }
        }
    }

    static Word empty(const Alphabet& alphabet) { return Word(alphabet, {}); }

    int length() const noexcept { return static_cast<int>(letters_.size()); }
    bool is_empty() const noexcept { return letters_.empty(); }
    const std::vector<Letter>& letters() const noexcept { return letters_; }
    Letter operator[](std::size_t i) const { return letters_[i]; }
    Alphabet alphabet() const { return Alphabet(rank_); }

    /// S(w): first letter.
    Letter start() const {
        if (letters_.empty()) throw GeometryError("start letter of the empty word");
        return letters_.front();
    }
    /// E(w): last letter.
    Letter end() const {
        if (letters_.empty()) throw GeometryError("end letter of the empty word");
        return letters_.back();
    }

    /// Word with its last letter erased.
    Word backspace() const {
        if (letters_.empty()) throw GeometryError("backspace of the empty word");
        Word w = *this;
        w.letters_.pop_back();
        return w;
    }

    Word inverse() const {
        Word w = *this;
        const Alphabet alpha(rank_);
        w.letters_.assign(letters_.rbegin(), letters_.rend());
        for (auto& a : w.letters_) a = alpha.mirror(a);
        return w;
    }

    /// True when |this·other| = |this| + |other| (written this → other).
    bool concatenates_with(const Word& other) const {
        if (letters_.empty() || other.letters_.empty()) return true;
        return other.letters_.front() != Alphabet(rank_).mirror(letters_.back());
    }

    bool concatenates_with(Letter b) const {
        return letters_.empty() || b != Alphabet(rank_).mirror(letters_.back());
    }

    /// Concatenation; requires this → other.
    Word concat(const Word& other) const {
        if (!concatenates_with(other)) throw GeometryError("concatenation is not reduced");
        Word w = *this;
        w.letters_.insert(w.letters_.end(), other.letters_.begin(), other.letters_.end());
        return w;
    }

    Word append(Letter b) const {
        if (!concatenates_with(b)) throw GeometryError("appended letter cancels");
        Word w = *this;
        w.letters_.push_back(b);
        return w;
    }

    /// Free-group product with cancellation.
    Word times(const Word& other) const {
        const Alphabet alpha(rank_);
        std::vector<Letter> out = letters_;
        for (Letter b : other.letters_) {
            if (!out.empty() && out.back() == alpha.mirror(b)) {
                out.pop_back();
            } else {
                out.push_back(b);
            }
        }
        Word w;
        w.rank_ = rank_;
        w.letters_ = std::move(out);
        return w;
    }

    /// 1-based labels, e.g. "1.4.2"; "e" for the empty word.
    std::string to_string() const {
        if (letters_.empty()) return "e";
        std::string s;
        for (std::size_t i = 0; i < letters_.size(); ++i) {
            if (i) s += '.';
            s += std::to_string(letters_[i] + 1);
        }
        return s;
    }

    bool operator==(const Word& o) const noexcept {
        return rank_ == o.rank_ && letters_ == o.letters_;
    }
    bool operator<(const Word& o) const noexcept {
        if (letters_.size() != o.letters_.size()) return letters_.size() < o.letters_.size();
        return letters_ < o.letters_;
    }

private:
    int rank_ = 1;
    std::vector<Letter> letters_;
};

/// Streaming lexicographic enumeration of Γ_ℓ (optionally below a fixed prefix).
///
/// Callers can split the stream by prefix to consume Γ_ℓ in parallel; the
/// union over all admissible prefixes of a fixed length is the full sphere.
class WordStream {
public:
    WordStream(const Alphabet& alphabet, int length, std::vector<Letter> prefix = {})
        : alphabet_(alphabet), length_(length), prefix_len_(static_cast<int>(prefix.size())) {
        if (length < 0) throw GeometryError("negative word length");
        if (prefix_len_ > length) throw GeometryError("prefix longer than requested length");
        Word(alphabet, prefix);  // validates the prefix
        current_ = std::move(prefix);
        current_.reserve(static_cast<std::size_t>(length));
        done_ = !fill_from(prefix_len_);
    }

    /// Writes the next word into `out`; returns false when exhausted.
    bool next(Word& out) {
        if (done_) return false;
        out = Word(alphabet_, current_);
        advance();
        return true;
    }

private:
    Letter first_allowed(int pos) const {
        if (pos == 0) return 0;
        return alphabet_.mirror(current_[pos - 1]) == 0 ? 1 : 0;
    }

    Letter next_allowed(int pos, Letter a) const {
        Letter b = a + 1;
        if (pos > 0 && b == alphabet_.mirror(current_[pos - 1])) ++b;
        return b;
    }

    // Fill positions pos..length-1 with the smallest admissible letters.
    bool fill_from(int pos) {
        current_.resize(static_cast<std::size_t>(pos));
        for (int p = pos; p < length_; ++p) current_.push_back(first_allowed(p));
        return true;
    }

    void advance() {
        for (int p = length_ - 1; p >= prefix_len_; --p) {
            const Letter b = next_allowed(p, current_[p]);
            if (b < alphabet_.size()) {
                current_[p] = b;
                fill_from(p + 1);
                return;
            }
        }
        done_ = true;
    }

    Alphabet alphabet_;
    int length_;
    int prefix_len_;
    std::vector<Letter> current_;
    bool done_ = false;
};

/// Calls f(word) for every w ∈ Γ_ℓ in lexicographic order.
template <typename F>
void for_each_word(const Alphabet& alphabet, int length, F&& f) {
    WordStream stream(alphabet, length);
    Word w;
    while (stream.next(w)) f(w);
}

/// Materialized Γ_ℓ in lexicographic order.
inline std::vector<Word> words_of_length(const Alphabet& alphabet, int length) {
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(alphabet.sphere_size(length)));
    for_each_word(alphabet, length, [&](const Word& w) { out.push_back(w); });
    return out;
}

/// Position of a reduced word inside the lexicographic enumeration of Γ_{≤R}:
/// shorter words first, lexicographic within each length.
inline std::uint64_t word_rank(const Word& w) {
    const Alphabet alpha = w.alphabet();
    const int len = w.length();
    std::uint64_t offset = alpha.ball_size(len - 1);
    if (len == 0) return 0;
    std::uint64_t rank = static_cast<std::uint64_t>(w[0]);
    for (int i = 1; i < len; ++i) {
        const Letter forbidden = alpha.mirror(w[i - 1]);
        const Letter digit = w[i] < forbidden ? w[i] : w[i] - 1;
        rank = rank * static_cast<std::uint64_t>(alpha.size() - 1) + static_cast<std::uint64_t>(digit);
    }
    return offset + rank;
}

}  // namespace schottky
