#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qread/code.hpp"

namespace qread {

//! Number of exponent vectors e in [0, q-1]^m with sum(e) <= r, i.e.
//! the dimension of the order-r Reed-Muller code in m variables over
//! GF(q).
inline std::size_t rm_dimension(unsigned r, unsigned m, unsigned q = 2) {
    if (q < 2) throw std::invalid_argument("RM dimension needs q >= 2");
    if (r >= m * (q - 1))
        throw std::invalid_argument("RM order r=" + std::to_string(r) +
                                    " must satisfy r < m(q-1) = " +
                                    std::to_string(m * (q - 1)));
    std::vector<std::size_t> dp(r + 1, 0);
    dp[0] = 1;
    for (unsigned v = 0; v < m; ++v) {
        std::vector<std::size_t> next(r + 1, 0);
        for (unsigned s = 0; s <= r; ++s) {
            if (dp[s] == 0) continue;
            const unsigned emax = std::min(q - 1, r - s);
            for (unsigned e = 0; e <= emax; ++e) next[s + e] += dp[s];
        }
        dp = std::move(next);
    }
    std::size_t total = 0;
    for (auto c : dp) total += c;
    return total;
}

//! Binary Reed-Muller code RM(r, m): evaluations of all multilinear
//! monomials of degree <= r over the 2^m points of F2^m. Point p's i-th
//! coordinate is bit i of p, so monomial S evaluates to [(p & S) == S].
//!
//! Decoding is Reed's majority-logic vote, peeling one degree layer at
//! a time from the top; vote ties resolve to bit 0. Corrects up to
//! 2^(m-r-1) - 1 errors.
class ReedMullerCode : public BlockCode {
public:
    ReedMullerCode(unsigned r, unsigned m) : r_(r), m_(m) {
        if (m_ < 1 || m_ > 20)
            throw std::invalid_argument("RM variable count m=" + std::to_string(m_) +
                                        " out of supported range [1,20]");
        if (r_ >= m_)
            throw std::invalid_argument("RM order r=" + std::to_string(r_) +
                                        " must satisfy r < m(q-1) = " +
                                        std::to_string(m_) + " for q = 2");
        n_ = std::size_t(1) << m_;
        for (std::uint32_t mask = 0; mask < n_; ++mask)
            if (static_cast<unsigned>(__builtin_popcount(mask)) <= r_)
                monomials_.push_back(mask);
        std::sort(monomials_.begin(), monomials_.end(),
                  [](std::uint32_t a, std::uint32_t b) {
                      const int pa = __builtin_popcount(a);
                      const int pb = __builtin_popcount(b);
                      return pa != pb ? pa < pb : a < b;
                  });
        k_ = monomials_.size();
    }

    unsigned order() const noexcept { return r_; }
    unsigned variables() const noexcept { return m_; }
    //! Monomial masks in information-word order (degree, then mask).
    const std::vector<std::uint32_t>& monomials() const noexcept { return monomials_; }

    std::vector<Bits> generator_matrix() const {
        std::vector<Bits> rows(k_, Bits(n_, 0));
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t p = 0; p < n_; ++p)
                rows[i][p] = monomial_eval(monomials_[i], static_cast<std::uint32_t>(p));
        return rows;
    }

    std::string name() const override {
        return "RM(" + std::to_string(r_) + "," + std::to_string(m_) + ")";
    }
    std::size_t length() const override { return n_; }
    std::size_t dimension() const override { return k_; }
    std::size_t design_distance() const override { return std::size_t(1) << (m_ - r_); }
    std::size_t correctable() const override {
        return (std::size_t(1) << (m_ - r_ - 1)) - 1;
    }
    std::size_t cell_length() const override { return n_; }
    std::size_t info_bits() const override { return k_; }

    void encode_bits(const Bits& info, Bits& cells) const override {
        if (info.size() != k_)
            throw std::invalid_argument("expected " + std::to_string(k_) +
                                        " information bits, got " +
                                        std::to_string(info.size()));
        cells.assign(n_, 0);
        for (std::size_t i = 0; i < k_; ++i) {
            if (!info[i]) continue;
            const std::uint32_t mask = monomials_[i];
            for (std::size_t p = 0; p < n_; ++p)
                cells[p] ^= monomial_eval(mask, static_cast<std::uint32_t>(p));
        }
    }

    //! Majority-logic decoding always produces an estimate.
    bool decode_bits(const Bits& cells, Bits& info) const override {
        if (cells.size() != n_)
            throw std::invalid_argument("expected " + std::to_string(n_) +
                                        " cells, got " + std::to_string(cells.size()));
        Bits residual = cells;
        info.assign(k_, 0);
        for (int d = static_cast<int>(r_); d >= 0; --d) {
            for (std::size_t i = 0; i < k_; ++i) {
                const std::uint32_t mask = monomials_[i];
                if (__builtin_popcount(mask) != d) continue;
                info[i] = majority_vote(residual, mask, static_cast<unsigned>(d));
            }
            // Peel the decided layer before voting on lower degrees.
            for (std::size_t i = 0; i < k_; ++i) {
                const std::uint32_t mask = monomials_[i];
                if (__builtin_popcount(mask) != d || !info[i]) continue;
                for (std::size_t p = 0; p < n_; ++p)
                    residual[p] ^= monomial_eval(mask, static_cast<std::uint32_t>(p));
            }
        }
        return true;
    }

private:
    static std::uint8_t monomial_eval(std::uint32_t mask, std::uint32_t point) noexcept {
        return static_cast<std::uint8_t>((point & mask) == mask);
    }

    //! Parity of the residual over each coset that fixes the complement
    //! coordinates; the coefficient is the majority of those parities.
    std::uint8_t majority_vote(const Bits& residual, std::uint32_t mask,
                               unsigned degree) const {
        const std::uint32_t comp = static_cast<std::uint32_t>(n_ - 1) & ~mask;
        std::vector<unsigned> comp_bits;
        for (unsigned i = 0; i < m_; ++i)
            if ((comp >> i) & 1) comp_bits.push_back(i);
        const std::size_t votes = std::size_t(1) << (m_ - degree);
        std::vector<std::uint8_t> parity(votes, 0);
        for (std::size_t p = 0; p < n_; ++p) {
            if (!residual[p]) continue;
            std::size_t key = 0;
            for (std::size_t i = 0; i < comp_bits.size(); ++i)
                key |= static_cast<std::size_t>((p >> comp_bits[i]) & 1) << i;
            parity[key] ^= 1;
        }
        std::size_t ones = 0;
        for (std::uint8_t v : parity) ones += v;
        return static_cast<std::uint8_t>(2 * ones > votes);  // tie -> 0
    }

    unsigned r_;
    unsigned m_;
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<std::uint32_t> monomials_;
};

inline std::shared_ptr<const ReedMullerCode> rm_build(unsigned r, unsigned m) {
    return std::make_shared<const ReedMullerCode>(r, m);
}

}  // namespace qread
