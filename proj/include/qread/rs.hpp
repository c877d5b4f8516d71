#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "qread/code.hpp"
#include "qread/field.hpp"

namespace qread {

//! Per-symbol basis expansion of a symbol word into binary cells,
//! least-significant bit of each symbol first.
inline Bits symbols_to_cells(const Field& f,
                             const std::vector<Field::value_type>& symbols) {
    Bits out(symbols.size() * f.s());
    std::size_t at = 0;
    for (Field::value_type v : symbols)
        for (unsigned i = 0; i < f.s(); ++i) out[at++] = (v >> i) & 1;
    return out;
}

inline std::vector<Field::value_type> cells_to_symbols(const Field& f,
                                                       const Bits& cells) {
    if (cells.size() % f.s() != 0)
        throw std::invalid_argument("cell string length " +
                                    std::to_string(cells.size()) +
                                    " is not a multiple of symbol width " +
                                    std::to_string(f.s()));
    std::vector<Field::value_type> out(cells.size() / f.s());
    std::size_t at = 0;
    for (auto& v : out) {
        Field::value_type acc = 0;
        for (unsigned i = 0; i < f.s(); ++i)
            acc = static_cast<Field::value_type>(acc | (cells[at++] << i));
        v = acc;
    }
    return out;
}

//! Reed-Solomon code over GF(2^s), n = q-1, evaluated at the points
//! (alpha^0, alpha^1, ..., alpha^(n-1)).
//!
//! Encoding is the evaluation map: the information symbols are the
//! coefficients of a polynomial f with deg(f) < k, shifted by
//! x^((1-b) mod n) so that the image coincides with the cyclic code
//! generated by (x-alpha^b)...(x-alpha^(b+n-k-1)) for any b. With the
//! default b = 1 the shift vanishes and f is just the plain degree < k
//! information polynomial.
//!
//! Decoding: syndromes at alpha^(b+j), Berlekamp-Massey, root search
//! over the locator, Forney magnitudes, then re-interpolation of the
//! information symbols from the corrected codeword.
class ReedSolomonCode : public BlockCode {
public:
    using value_type = Field::value_type;

    ReedSolomonCode(FieldPtr field, std::size_t k, unsigned b = 1)
        : field_(std::move(field)), n_(field_->n()), k_(k), b_(b),
          generator_(field_, {1}) {
        if (k_ < 1 || k_ > n_)
            throw std::invalid_argument("RS dimension k=" + std::to_string(k_) +
                                        " out of range [1," + std::to_string(n_) + "]");
        shift_ = static_cast<unsigned>(((1 - static_cast<long long>(b_)) %
                                        static_cast<long long>(n_) +
                                        n_) % n_);
        for (std::size_t j = 0; j < n_ - k_; ++j) {
            const value_type root = field_->alpha_pow(static_cast<long long>(b_ + j));
            generator_ = generator_ * FieldPoly(field_, {root, 1});
        }
    }

    const Field& field() const noexcept { return *field_; }
    const FieldPtr& field_ptr() const noexcept { return field_; }
    unsigned first_root_exponent() const noexcept { return b_; }
    const FieldPoly& generator_poly() const noexcept { return generator_; }

    //! The evaluation points P_1..P_n = 1, alpha, ..., alpha^(n-1).
    std::vector<value_type> evaluation_points() const {
        std::vector<value_type> pts(n_);
        for (std::size_t i = 0; i < n_; ++i)
            pts[i] = field_->alpha_pow(static_cast<long long>(i));
        return pts;
    }

    std::string name() const override {
        return "RS[" + std::to_string(n_) + "," + std::to_string(k_) + "]";
    }
    std::size_t length() const override { return n_; }
    std::size_t dimension() const override { return k_; }
    std::size_t design_distance() const override { return n_ - k_ + 1; }
    std::size_t correctable() const override { return (n_ - k_) / 2; }
    std::size_t cell_length() const override { return n_ * field_->s(); }
    std::size_t info_bits() const override { return k_ * field_->s(); }

    //! Exponents i with g(alpha^i) = 0, i.e. the defining set.
    std::set<unsigned> defining_set() const {
        std::set<unsigned> zs;
        for (unsigned i = 0; i < n_; ++i)
            if (generator_.eval(field_->alpha_pow(i)) == 0) zs.insert(i);
        return zs;
    }

    void encode(const std::vector<value_type>& info,
                std::vector<value_type>& codeword) const {
        if (info.size() != k_)
            throw std::invalid_argument("RS encode expects " + std::to_string(k_) +
                                        " information symbols, got " +
                                        std::to_string(info.size()));
        codeword.resize(n_);
        const std::uint32_t* lg = field_->log_table();
        const value_type* ex = field_->exp_table();
        const std::uint32_t n = field_->n();
        for (std::size_t i0 = 0; i0 < n_; i0 += 8) {
            const std::size_t lanes = std::min<std::size_t>(8, n_ - i0);
            std::uint32_t xl[8] = {};
            value_type acc[8] = {};
            for (std::size_t u = 0; u < lanes; ++u)
                xl[u] = static_cast<std::uint32_t>((i0 + u) % n);
            for (std::size_t t = info.size(); t-- > 0;) {
                const value_type c = info[t];
                for (std::size_t u = 0; u < lanes; ++u)
                    acc[u] = static_cast<value_type>(ex[lg[acc[u]] + xl[u]] ^ c);
            }
            for (std::size_t u = 0; u < lanes; ++u) {
                value_type v = acc[u];
                if (shift_ != 0)
                    v = field_->mul(v, field_->alpha_pow(
                                           static_cast<long long>(i0 + u) * shift_));
                codeword[i0 + u] = v;
            }
        }
    }

    std::vector<value_type> encode(const std::vector<value_type>& info) const {
        std::vector<value_type> cw;
        encode(info, cw);
        return cw;
    }

    //! Bounded-distance decoding; nullopt signals decode failure.
    std::optional<std::vector<value_type>> decode(
        const std::vector<value_type>& received) const {
        std::vector<value_type> corrected;
        if (!correct(received, corrected)) return std::nullopt;
        // Re-interpolate the information symbols: coefficient t of the
        // shifted message polynomial is c(alpha^(b-1-t)).
        std::vector<value_type> info(k_);
        const std::uint32_t* lg = field_->log_table();
        const value_type* ex = field_->exp_table();
        const std::uint32_t n = field_->n();
        for (std::size_t t0 = 0; t0 < k_; t0 += 8) {
            const std::size_t lanes = std::min<std::size_t>(8, k_ - t0);
            std::uint32_t xl[8] = {};
            value_type acc[8] = {};
            for (std::size_t u = 0; u < lanes; ++u) {
                const long long e = static_cast<long long>(b_) - 1 -
                                    static_cast<long long>(t0 + u);
                xl[u] = static_cast<std::uint32_t>(((e % n) + n) % n);
            }
            for (std::size_t i = corrected.size(); i-- > 0;) {
                const value_type c = corrected[i];
                for (std::size_t u = 0; u < lanes; ++u)
                    acc[u] = static_cast<value_type>(ex[lg[acc[u]] + xl[u]] ^ c);
            }
            for (std::size_t u = 0; u < lanes; ++u) info[t0 + u] = acc[u];
        }
        return info;
    }

    //! Error correction only: fills `corrected` and reports success.
    bool correct(const std::vector<value_type>& received,
                 std::vector<value_type>& corrected) const {
        if (received.size() != n_)
            throw std::invalid_argument("RS decode expects " + std::to_string(n_) +
                                        " symbols, got " +
                                        std::to_string(received.size()));
        const Field& f = *field_;
        const std::size_t n_syn = n_ - k_;
        corrected = received;
        if (n_syn == 0) return true;

        std::vector<value_type> syn;
        if (!detail::compute_syndromes(f, received, b_, n_syn, syn)) return true;

        const auto bm = detail::berlekamp_massey(f, syn);
        const std::size_t deg = bm.sigma.size() - 1;
        if (deg != bm.errors || bm.errors > correctable()) return false;
        const auto positions = detail::locator_root_positions(f, bm.sigma, n_);
        if (positions.size() != deg) return false;

        const std::uint32_t* lg = f.log_table();
        const value_type* ex = f.exp_table();
        const std::uint32_t n = f.n();

        // omega = S(x) * sigma(x) mod x^(n-k)
        std::vector<value_type> omega(n_syn, 0);
        for (std::size_t i = 0; i < bm.sigma.size(); ++i) {
            if (bm.sigma[i] == 0) continue;
            const std::uint32_t cl = lg[bm.sigma[i]];
            for (std::size_t j = 0; i + j < n_syn; ++j)
                omega[i + j] = static_cast<value_type>(omega[i + j] ^ ex[cl + lg[syn[j]]]);
        }

        // Formal derivative of sigma keeps the odd coefficients:
        // sigma'(x) = D(x^2) with D(y) = sum sigma_{2u+1} y^u.
        std::vector<value_type> dpoly((bm.sigma.size()) / 2);
        for (std::size_t u = 0; u < dpoly.size(); ++u) dpoly[u] = bm.sigma[2 * u + 1];

        const std::size_t nroots = positions.size();
        std::vector<value_type> num(nroots), den(nroots);
        for (std::size_t r0 = 0; r0 < nroots; r0 += 8) {
            const std::size_t lanes = std::min<std::size_t>(8, nroots - r0);
            std::uint32_t xl[8] = {};
            std::uint32_t xl2[8] = {};
            value_type na[8] = {};
            value_type da[8] = {};
            for (std::size_t u = 0; u < lanes; ++u) {
                const std::uint32_t inv_log = (n - positions[r0 + u]) % n;
                xl[u] = inv_log;
                xl2[u] = (2 * inv_log) % n;
            }
            for (std::size_t j = omega.size(); j-- > 0;) {
                const value_type c = omega[j];
                for (std::size_t u = 0; u < lanes; ++u)
                    na[u] = static_cast<value_type>(ex[lg[na[u]] + xl[u]] ^ c);
            }
            for (std::size_t j = dpoly.size(); j-- > 0;) {
                const value_type c = dpoly[j];
                for (std::size_t u = 0; u < lanes; ++u)
                    da[u] = static_cast<value_type>(ex[lg[da[u]] + xl2[u]] ^ c);
            }
            for (std::size_t u = 0; u < lanes; ++u) {
                num[r0 + u] = na[u];
                den[r0 + u] = da[u];
            }
        }

        for (std::size_t r = 0; r < nroots; ++r) {
            if (den[r] == 0) return false;
            value_type magnitude = f.div(num[r], den[r]);
            const long long exp = static_cast<long long>(positions[r]) *
                                  (1 - static_cast<long long>(b_));
            magnitude = f.mul(magnitude, f.alpha_pow(exp));
            corrected[positions[r]] = f.sub(corrected[positions[r]], magnitude);
        }
        return true;
    }

    void encode_bits(const Bits& info, Bits& cells) const override {
        if (info.size() != info_bits())
            throw std::invalid_argument("expected " + std::to_string(info_bits()) +
                                        " information bits, got " +
                                        std::to_string(info.size()));
        std::vector<value_type> syms(k_);
        std::size_t at = 0;
        for (auto& v : syms) {
            value_type acc = 0;
            for (unsigned i = 0; i < field_->s(); ++i)
                acc = static_cast<value_type>(acc | (info[at++] << i));
            v = acc;
        }
        std::vector<value_type> cw;
        encode(syms, cw);
        cells.resize(cell_length());
        at = 0;
        for (value_type v : cw)
            for (unsigned i = 0; i < field_->s(); ++i) cells[at++] = (v >> i) & 1;
    }

    bool decode_bits(const Bits& cells, Bits& info) const override {
        if (cells.size() != cell_length())
            throw std::invalid_argument("expected " + std::to_string(cell_length()) +
                                        " cells, got " + std::to_string(cells.size()));
        std::vector<value_type> recv(n_);
        std::size_t at = 0;
        for (auto& v : recv) {
            value_type acc = 0;
            for (unsigned i = 0; i < field_->s(); ++i)
                acc = static_cast<value_type>(acc | (cells[at++] << i));
            v = acc;
        }
        const auto decoded = decode(recv);
        if (!decoded) return false;
        info.resize(info_bits());
        at = 0;
        for (value_type v : *decoded)
            for (unsigned i = 0; i < field_->s(); ++i) info[at++] = (v >> i) & 1;
        return true;
    }

private:
    FieldPtr field_;
    std::size_t n_;
    std::size_t k_;
    unsigned b_;
    unsigned shift_;
    FieldPoly generator_;
};

inline std::shared_ptr<const ReedSolomonCode> rs_build(FieldPtr field, std::size_t k,
                                                       unsigned b = 1) {
    return std::make_shared<const ReedSolomonCode>(std::move(field), k, b);
}

}  // namespace qread
