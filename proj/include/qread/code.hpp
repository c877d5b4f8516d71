#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qread/field.hpp"

namespace qread {

//! Binary word written to (or read from) a string of memory cells,
//! one value in {0,1} per entry.
using Bits = std::vector<std::uint8_t>;

//! Common cell-level contract for all code families.
//!
//! `length`/`dimension` count code symbols; `cell_length`/`info_bits`
//! count the binary cells and information bits after any basis
//! expansion. For binary codes the two views coincide.
//!
//! Implementations are immutable after construction; encode/decode are
//! const and safe to call concurrently.
class BlockCode {
public:
    virtual ~BlockCode() = default;

    virtual std::string name() const = 0;
    virtual std::size_t length() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::size_t design_distance() const = 0;
    //! Guaranteed-correctable error weight (in code symbols).
    virtual std::size_t correctable() const = 0;

    virtual std::size_t cell_length() const = 0;
    virtual std::size_t info_bits() const = 0;
    double rate() const {
        return static_cast<double>(info_bits()) / static_cast<double>(cell_length());
    }

    virtual void encode_bits(const Bits& info, Bits& cells) const = 0;
    //! Returns false on decode failure; `info` then holds no estimate.
    virtual bool decode_bits(const Bits& cells, Bits& info) const = 0;
};

namespace detail {

struct LocatorSynthesis {
    std::vector<Field::value_type> sigma;  // error locator, sigma[0] == 1
    unsigned errors = 0;                   // LFSR length L
};

//! Berlekamp-Massey synthesis of the shortest LFSR generating the
//! syndrome sequence. Shared by the RS and BCH decoders.
inline LocatorSynthesis berlekamp_massey(const Field& f,
                                         const std::vector<Field::value_type>& S) {
    using V = Field::value_type;
    const std::uint32_t* lg = f.log_table();
    const V* ex = f.exp_table();
    std::vector<V> sigma{1};
    std::vector<V> prev{1};  // B(x), the last length-change locator
    unsigned L = 0;
    unsigned m = 1;
    V b = 1;
    for (std::size_t i = 0; i < S.size(); ++i) {
        V d0 = S[i];
        V d1 = 0;
        const std::size_t terms = std::min<std::size_t>(L, sigma.size() - 1);
        for (std::size_t j = 1; j + 1 <= terms; j += 2) {
            d0 = static_cast<V>(d0 ^ ex[lg[sigma[j]] + lg[S[i - j]]]);
            d1 = static_cast<V>(d1 ^ ex[lg[sigma[j + 1]] + lg[S[i - j - 1]]]);
        }
        if (terms & 1)
            d0 = static_cast<V>(d0 ^ ex[lg[sigma[terms]] + lg[S[i - terms]]]);
        const V d = static_cast<V>(d0 ^ d1);
        if (d == 0) {
            ++m;
            continue;
        }
        const std::uint32_t scale_log = f.log(f.div(d, b));
        std::vector<V> next = sigma;
        if (next.size() < prev.size() + m) next.resize(prev.size() + m, 0);
        for (std::size_t j = 0; j < prev.size(); ++j)
            next[j + m] = static_cast<V>(next[j + m] ^ ex[scale_log + lg[prev[j]]]);
        if (2 * L <= i) {
            prev = std::move(sigma);
            b = d;
            L = static_cast<unsigned>(i + 1) - L;
            m = 1;
        } else {
            ++m;
        }
        sigma = std::move(next);
    }
    while (sigma.size() > 1 && sigma.back() == 0) sigma.pop_back();
    return {std::move(sigma), L};
}

//! Power-sum syndromes of a received word: out[j] = r(alpha^(e0+j)).
//! Horner chains for eight consecutive syndromes run interleaved so the
//! table lookups pipeline instead of serialising.
inline bool compute_syndromes(const Field& f,
                              const std::vector<Field::value_type>& received,
                              unsigned e0, std::size_t count,
                              std::vector<Field::value_type>& out) {
    const std::uint32_t* lg = f.log_table();
    const Field::value_type* ex = f.exp_table();
    const std::uint32_t n = f.n();
    out.assign(count, 0);
    bool any = false;
    for (std::size_t j0 = 0; j0 < count; j0 += 8) {
        const std::size_t lanes = std::min<std::size_t>(8, count - j0);
        std::uint32_t xl[8] = {};
        Field::value_type acc[8] = {};
        for (std::size_t u = 0; u < lanes; ++u)
            xl[u] = (e0 + static_cast<std::uint32_t>(j0 + u)) % n;
        for (std::size_t i = received.size(); i-- > 0;) {
            const Field::value_type r = received[i];
            for (std::size_t u = 0; u < lanes; ++u)
                acc[u] = static_cast<Field::value_type>(ex[lg[acc[u]] + xl[u]] ^ r);
        }
        for (std::size_t u = 0; u < lanes; ++u) {
            out[j0 + u] = acc[u];
            any = any || acc[u] != 0;
        }
    }
    return any;
}

//! Positions i in [0, n) with sigma(alpha^-i) == 0, i.e. the error
//! locations named by the locator's roots. Evaluates eight candidate
//! positions at a time and stops once deg(sigma) roots are in hand.
inline std::vector<unsigned> locator_root_positions(
    const Field& f, const std::vector<Field::value_type>& sigma, unsigned n) {
    std::vector<unsigned> positions;
    const std::size_t wanted = sigma.size() - 1;
    const std::uint32_t* lg = f.log_table();
    const Field::value_type* ex = f.exp_table();
    for (unsigned i0 = 0; i0 < n && positions.size() < wanted; i0 += 8) {
        const unsigned lanes = std::min(8u, n - i0);
        std::uint32_t xl[8] = {};
        Field::value_type acc[8] = {};
        for (unsigned u = 0; u < lanes; ++u) xl[u] = (n - (i0 + u)) % n;
        for (std::size_t j = sigma.size(); j-- > 0;) {
            const Field::value_type c = sigma[j];
            for (unsigned u = 0; u < lanes; ++u)
                acc[u] = static_cast<Field::value_type>(ex[lg[acc[u]] + xl[u]] ^ c);
        }
        for (unsigned u = 0; u < lanes && positions.size() < wanted; ++u)
            if (acc[u] == 0) positions.push_back(i0 + u);
    }
    return positions;
}

}  // namespace detail
}  // namespace qread
