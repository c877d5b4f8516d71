#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "qread/code.hpp"
#include "qread/field.hpp"

namespace qread {

//! Primitive binary BCH code of length n = 2^e - 1 with design
//! distance delta, syndromes computed in the extension field GF(2^e).
//!
//! g(x) = lcm of the minimal polynomials M^(b), ..., M^(b+delta-2);
//! encoding multiplies the information polynomial by g (the rows of the
//! generator matrix are the shifts x^i g(x)), decoding runs
//! Berlekamp-Massey on the extension-field syndromes, flips the located
//! bits, and recovers the information word by exact division by g.
class BchCode : public BlockCode {
public:
    using value_type = Field::value_type;

    BchCode(FieldPtr ext, unsigned delta, unsigned b = 1)
        : ext_(std::move(ext)), n_(ext_->n()), delta_(delta), b_(b) {
        if (delta_ < 1 || delta_ > n_ + 1)
            throw std::invalid_argument("BCH design distance delta=" +
                                        std::to_string(delta_) + " out of range");
        FieldPoly g(ext_, {1});
        for (unsigned e = b_; e + 1 < b_ + delta_; ++e) {
            const unsigned rep = e % n_;
            if (defining_.count(rep)) continue;  // coset already in the lcm
            for (unsigned j : cyclotomic_coset(rep, n_, 2)) defining_.insert(j);
            g = g * minimal_polynomial(rep, base_field(), ext_);
        }
        const int deg = g.degree();
        if (static_cast<std::size_t>(deg) >= n_)
            throw std::invalid_argument(
                "BCH design distance delta=" + std::to_string(delta_) +
                " leaves no information bits (deg g = " + std::to_string(deg) + ")");
        k_ = n_ - static_cast<std::size_t>(deg);
        gen_.resize(static_cast<std::size_t>(deg) + 1);
        for (std::size_t i = 0; i < gen_.size(); ++i)
            gen_[i] = static_cast<std::uint8_t>(g.coeff(i));
    }

    const Field& extension_field() const noexcept { return *ext_; }
    unsigned design_delta() const noexcept { return delta_; }
    unsigned first_root_exponent() const noexcept { return b_; }
    //! g(x) coefficients over F2, lowest degree first.
    const Bits& generator_bits() const noexcept { return gen_; }
    std::set<unsigned> defining_set() const { return defining_; }

    //! k x n generator matrix whose rows are x^i g(x).
    std::vector<Bits> generator_matrix() const {
        std::vector<Bits> rows(k_, Bits(n_, 0));
        for (std::size_t i = 0; i < k_; ++i)
            for (std::size_t j = 0; j < gen_.size(); ++j) rows[i][i + j] = gen_[j];
        return rows;
    }

    std::string name() const override {
        return "BCH[" + std::to_string(n_) + "," + std::to_string(k_) + ",d" +
               std::to_string(delta_) + "]";
    }
    std::size_t length() const override { return n_; }
    std::size_t dimension() const override { return k_; }
    std::size_t design_distance() const override { return delta_; }
    std::size_t correctable() const override { return (delta_ - 1) / 2; }
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
            for (std::size_t j = 0; j < gen_.size(); ++j) cells[i + j] ^= gen_[j];
        }
    }

    bool decode_bits(const Bits& cells, Bits& info) const override {
        if (cells.size() != n_)
            throw std::invalid_argument("expected " + std::to_string(n_) +
                                        " cells, got " + std::to_string(cells.size()));
        Bits corrected = cells;
        if (delta_ > 1 && !correct(corrected)) return false;
        return divide_out_generator(corrected, info);
    }

    //! In-place bounded-distance correction of a received word.
    bool correct(Bits& word) const {
        const Field& f = *ext_;
        const std::size_t n_syn = delta_ - 1;
        if (n_syn == 0) return true;

        const std::vector<value_type> wide(word.begin(), word.end());
        std::vector<value_type> syn;
        if (!detail::compute_syndromes(f, wide, b_, n_syn, syn)) return true;

        const auto bm = detail::berlekamp_massey(f, syn);
        const std::size_t deg = bm.sigma.size() - 1;
        if (deg != bm.errors || bm.errors > correctable()) return false;
        const auto positions = detail::locator_root_positions(f, bm.sigma,
                                                              static_cast<unsigned>(n_));
        if (positions.size() != deg) return false;
        for (unsigned pos : positions) word[pos] ^= 1;
        return true;
    }

private:
    //! Division by g must be exact for a valid codeword; the quotient is
    //! the information polynomial. A nonzero remainder flags a
    //! miscorrected word.
    bool divide_out_generator(const Bits& word, Bits& info) const {
        Bits rem = word;
        info.assign(k_, 0);
        const std::size_t dg = gen_.size() - 1;
        for (std::size_t d = n_; d-- > dg;) {
            if (!rem[d]) continue;
            info[d - dg] = 1;
            for (std::size_t j = 0; j < gen_.size(); ++j) rem[d - dg + j] ^= gen_[j];
        }
        for (std::size_t i = 0; i < dg; ++i)
            if (rem[i]) return false;
        return true;
    }

    static const FieldPtr& base_field() {
        static const FieldPtr f2 = build_field(1);
        return f2;
    }

    FieldPtr ext_;
    std::size_t n_;
    unsigned delta_;
    unsigned b_;
    std::size_t k_ = 0;
    Bits gen_;
    std::set<unsigned> defining_;
};

inline std::shared_ptr<const BchCode> bch_build(FieldPtr ext, unsigned delta,
                                                unsigned b = 1) {
    return std::make_shared<const BchCode>(std::move(ext), delta, b);
}

}  // namespace qread
