#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qread {

namespace detail {

inline int f2_degree(std::uint64_t p) noexcept {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

//! Remainder of binary-polynomial division (bit i = coefficient of x^i).
inline std::uint64_t f2_mod(std::uint64_t a, std::uint64_t m) noexcept {
    const int dm = f2_degree(m);
    for (int d = f2_degree(a); d >= dm; d = f2_degree(a))
        a ^= m << (d - dm);
    return a;
}

inline std::string f2_to_string(std::uint64_t p) {
    if (p == 0) return "0";
    std::string out;
    for (int d = f2_degree(p); d >= 0; --d) {
        if (!((p >> d) & 1)) continue;
        if (!out.empty()) out += "+";
        if (d == 0)
            out += "1";
        else if (d == 1)
            out += "x";
        else
            out += "x^" + std::to_string(d);
    }
    return out;
}

}  // namespace detail

class Field;
using FieldPtr = std::shared_ptr<const Field>;

//! Arithmetic context for GF(2^s), 1 <= s <= 16.
//!
//! Multiplication runs through log/antilog tables with a zero sentinel so
//! the hot path is branch-free: log[0] is parked past every legitimate
//! index sum and the antilog table is padded with zeros there.
//!
//! Immutable after construction; safe to share across threads.
class Field {
public:
    using value_type = std::uint16_t;

    //! Default primitive polynomials, bit i = coefficient of x^i.
    static constexpr std::uint32_t kDefaultModulus[17] = {
        0,       0x3,    0x7,    0xB,    0x13,   0x25,    0x43,   0x89,
        0x11D,   0x211,  0x409,  0x805,  0x1053, 0x201B,  0x4443, 0x8003,
        0x1100B};

    explicit Field(unsigned s) : Field(s, default_modulus(s)) {}

    Field(unsigned s, std::uint32_t modulus) : s_(s), modulus_(modulus) {
        if (s < 1 || s > 16)
            throw std::invalid_argument("field exponent s must be in [1,16], got " +
                                        std::to_string(s));
        if (detail::f2_degree(modulus) != static_cast<int>(s))
            throw std::invalid_argument(
                "modulus " + detail::f2_to_string(modulus) + " must have degree " +
                std::to_string(s));
        check_irreducible();
        build_tables();
    }

    unsigned s() const noexcept { return s_; }
    std::uint32_t q() const noexcept { return 1u << s_; }
    //! Multiplicative group order q-1 (the natural cyclic-code length).
    std::uint32_t n() const noexcept { return q() - 1; }
    std::uint32_t modulus() const noexcept { return modulus_; }

    value_type add(value_type a, value_type b) const noexcept { return a ^ b; }
    value_type sub(value_type a, value_type b) const noexcept { return a ^ b; }

    value_type mul(value_type a, value_type b) const noexcept {
        return exp_[log_[a] + log_[b]];
    }

    value_type inv(value_type a) const {
        if (a == 0) throw std::domain_error("gf_inv(0) is undefined");
        return exp_[n() - log_[a]];
    }

    value_type div(value_type a, value_type b) const {
        if (b == 0) throw std::domain_error("division by field zero");
        return exp_[log_[a] + n() - log_[b]];
    }

    value_type pow(value_type a, long long e) const {
        if (a == 0) {
            if (e == 0) return 1;
            if (e < 0) throw std::domain_error("negative power of field zero");
            return 0;
        }
        const long long nn = n();
        long long em = ((e % nn) + nn) % nn;
        return exp_[static_cast<std::uint32_t>((log_[a] * em) % nn)];
    }

    //! alpha^e for any integer e (alpha is the primitive element x).
    value_type alpha_pow(long long e) const noexcept {
        const long long nn = n();
        return exp_[static_cast<std::uint32_t>(((e % nn) + nn) % nn)];
    }

    //! Discrete log base alpha; defined for nonzero arguments only.
    std::uint32_t log(value_type a) const {
        if (a == 0) throw std::domain_error("log of field zero");
        return log_[a];
    }

    //! Raw table access for branch-free inner loops. log_table()[0] is a
    //! sentinel past every legitimate index sum and exp_table() is zero
    //! there, so exp[log[a] + log[b]] multiplies with no zero checks.
    const std::uint32_t* log_table() const noexcept { return log_.data(); }
    const value_type* exp_table() const noexcept { return exp_.data(); }

    static std::uint32_t default_modulus(unsigned s) {
        if (s < 1 || s > 16)
            throw std::invalid_argument("field exponent s must be in [1,16], got " +
                                        std::to_string(s));
        return kDefaultModulus[s];
    }

private:
    void check_irreducible() const {
        const unsigned half = s_ / 2;
        for (unsigned d = 1; d <= half; ++d) {
            for (std::uint32_t p = (1u << d); p < (2u << d); ++p) {
                if (detail::f2_mod(modulus_, p) == 0)
                    throw std::invalid_argument(
                        "modulus " + detail::f2_to_string(modulus_) +
                        " is not irreducible: divisible by " + detail::f2_to_string(p));
            }
        }
    }

    void build_tables() {
        const std::uint32_t nn = n();
        log_.assign(q(), 0);
        exp_.assign(4 * nn + 1, 0);
        std::uint32_t cur = 1;
        for (std::uint32_t i = 0; i < nn; ++i) {
            if (i > 0 && cur == 1)
                throw std::invalid_argument(
                    "modulus " + detail::f2_to_string(modulus_) +
                    " is irreducible but not primitive: x has multiplicative order " +
                    std::to_string(i) + ", need " + std::to_string(nn));
            exp_[i] = static_cast<value_type>(cur);
            log_[cur] = i;
            cur <<= 1;
            if (cur & q()) cur ^= modulus_;
        }
        // Wrap one extra period so inverses and quotients index directly,
        // then leave zeros beyond: log[0] sits past every nonzero sum.
        for (std::uint32_t i = nn; i < 2 * nn; ++i) exp_[i] = exp_[i - nn];
        log_[0] = 2 * nn;
    }

    unsigned s_;
    std::uint32_t modulus_;
    std::vector<std::uint32_t> log_;
    std::vector<value_type> exp_;
};

inline FieldPtr build_field(unsigned s) { return std::make_shared<Field>(s); }

inline FieldPtr build_field(unsigned s, std::uint32_t modulus) {
    return std::make_shared<Field>(s, modulus);
}

//! A value bound to its field; cross-field arithmetic is rejected.
class FieldElement {
public:
    using value_type = Field::value_type;

    FieldElement(const Field& field, value_type v) : field_(&field), value_(v) {
        if (v >= field.q())
            throw std::invalid_argument("field element value " + std::to_string(v) +
                                        " out of range for GF(" +
                                        std::to_string(field.q()) + ")");
    }

    value_type value() const noexcept { return value_; }
    const Field& field() const noexcept { return *field_; }

    friend FieldElement operator+(FieldElement a, FieldElement b) {
        a.require_same(b);
        return {*a.field_, a.field_->add(a.value_, b.value_)};
    }
    friend FieldElement operator-(FieldElement a, FieldElement b) { return a + b; }
    friend FieldElement operator*(FieldElement a, FieldElement b) {
        a.require_same(b);
        return {*a.field_, a.field_->mul(a.value_, b.value_)};
    }
    friend FieldElement operator/(FieldElement a, FieldElement b) {
        a.require_same(b);
        return {*a.field_, a.field_->div(a.value_, b.value_)};
    }
    friend bool operator==(FieldElement a, FieldElement b) {
        a.require_same(b);
        return a.value_ == b.value_;
    }
    friend bool operator!=(FieldElement a, FieldElement b) { return !(a == b); }

    FieldElement inverse() const { return {*field_, field_->inv(value_)}; }
    FieldElement pow(long long e) const { return {*field_, field_->pow(value_, e)}; }
    bool is_zero() const noexcept { return value_ == 0; }

private:
    void require_same(const FieldElement& other) const {
        if (field_ != other.field_)
            throw std::invalid_argument("field elements belong to different fields");
    }

    const Field* field_;
    value_type value_;
};

//! Polynomial over a field, lowest-degree coefficient first.
//! Normalized: the leading coefficient is nonzero unless the polynomial
//! is zero (empty coefficient vector).
class FieldPoly {
public:
    using value_type = Field::value_type;

    explicit FieldPoly(FieldPtr field) : field_(std::move(field)) {}

    FieldPoly(FieldPtr field, std::vector<value_type> coeffs)
        : field_(std::move(field)), coeffs_(std::move(coeffs)) {
        for (value_type c : coeffs_)
            if (c >= field_->q())
                throw std::invalid_argument("polynomial coefficient out of field range");
        normalize();
    }

    const FieldPtr& field() const noexcept { return field_; }
    const std::vector<value_type>& coeffs() const noexcept { return coeffs_; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    //! Degree of the zero polynomial is -1.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

    value_type coeff(std::size_t i) const noexcept {
        return i < coeffs_.size() ? coeffs_[i] : 0;
    }

    bool is_monic() const noexcept {
        return !coeffs_.empty() && coeffs_.back() == 1;
    }

    value_type eval(value_type x) const noexcept {
        value_type acc = 0;
        for (std::size_t i = coeffs_.size(); i-- > 0;)
            acc = field_->add(field_->mul(acc, x), coeffs_[i]);
        return acc;
    }

    friend FieldPoly operator+(const FieldPoly& a, const FieldPoly& b) {
        a.require_same(b);
        std::vector<value_type> out(std::max(a.coeffs_.size(), b.coeffs_.size()), 0);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = a.field_->add(a.coeff(i), b.coeff(i));
        return {a.field_, std::move(out)};
    }

    friend FieldPoly operator*(const FieldPoly& a, const FieldPoly& b) {
        a.require_same(b);
        if (a.is_zero() || b.is_zero()) return FieldPoly(a.field_);
        std::vector<value_type> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                out[i + j] = a.field_->add(out[i + j],
                                           a.field_->mul(a.coeffs_[i], b.coeffs_[j]));
        }
        return {a.field_, std::move(out)};
    }

    //! Quotient and remainder; throws on division by the zero polynomial.
    std::pair<FieldPoly, FieldPoly> divmod(const FieldPoly& divisor) const {
        require_same(divisor);
        if (divisor.is_zero())
            throw std::domain_error("polynomial division by zero");
        std::vector<value_type> rem = coeffs_;
        const int dd = divisor.degree();
        const value_type lead_inv = field_->inv(divisor.coeffs_.back());
        std::vector<value_type> quot(
            degree() >= dd ? static_cast<std::size_t>(degree() - dd + 1) : 0, 0);
        for (int d = static_cast<int>(rem.size()) - 1; d >= dd; --d) {
            if (rem[static_cast<std::size_t>(d)] == 0) continue;
            const value_type f =
                field_->mul(rem[static_cast<std::size_t>(d)], lead_inv);
            quot[static_cast<std::size_t>(d - dd)] = f;
            for (int i = 0; i <= dd; ++i)
                rem[static_cast<std::size_t>(d - dd + i)] = field_->sub(
                    rem[static_cast<std::size_t>(d - dd + i)],
                    field_->mul(f, divisor.coeffs_[static_cast<std::size_t>(i)]));
        }
        return {FieldPoly(field_, std::move(quot)), FieldPoly(field_, std::move(rem))};
    }

    friend bool operator==(const FieldPoly& a, const FieldPoly& b) {
        a.require_same(b);
        return a.coeffs_ == b.coeffs_;
    }

private:
    void normalize() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }
    void require_same(const FieldPoly& other) const {
        if (field_.get() != other.field_.get())
            throw std::invalid_argument("polynomials belong to different fields");
    }

    FieldPtr field_;
    std::vector<value_type> coeffs_;
};

//! q-ary cyclotomic coset of i modulo n, q = base field order.
inline std::vector<unsigned> cyclotomic_coset(unsigned i, unsigned n, unsigned q) {
    std::vector<unsigned> coset;
    unsigned x = i % n;
    do {
        coset.push_back(x);
        x = static_cast<unsigned>((static_cast<std::uint64_t>(x) * q) % n);
    } while (x != i % n);
    return coset;
}

//! Minimal polynomial M^(i) of alpha^i over the base subfield.
//!
//! The product runs over the base-order cyclotomic coset of i; the result
//! is monic with every coefficient in the subfield (coefficients are
//! returned as extension-field values, which for base GF(2) are literal
//! 0/1 bits).
inline FieldPoly minimal_polynomial(unsigned i, const FieldPtr& base,
                                    const FieldPtr& ext) {
    if (ext->s() % base->s() != 0)
        throw std::invalid_argument("GF(2^" + std::to_string(base->s()) +
                                    ") is not a subfield of GF(2^" +
                                    std::to_string(ext->s()) + ")");
    const unsigned n = ext->n();
    FieldPoly acc(ext, {1});
    for (unsigned j : cyclotomic_coset(i, n, base->q())) {
        const FieldPoly factor(ext, {ext->alpha_pow(j), 1});  // x - alpha^j
        acc = acc * factor;
    }
    for (Field::value_type c : acc.coeffs()) {
        if (ext->pow(c, base->q()) != c)
            throw std::logic_error("minimal polynomial coefficient escaped the subfield");
    }
    return acc;
}

//! Expand a field element over the polynomial basis {1, alpha, ...,
//! alpha^(s-1)}, least-significant bit first.
inline std::vector<std::uint8_t> basis_expand(const Field& field,
                                              Field::value_type v) {
    std::vector<std::uint8_t> bits(field.s());
    for (unsigned i = 0; i < field.s(); ++i)
        bits[i] = static_cast<std::uint8_t>((v >> i) & 1);
    return bits;
}

inline std::vector<std::uint8_t> basis_expand(const FieldElement& e) {
    return basis_expand(e.field(), e.value());
}

inline Field::value_type basis_compose(const Field& field,
                                       const std::vector<std::uint8_t>& bits) {
    if (bits.size() != field.s())
        throw std::invalid_argument("basis_compose expects " +
                                    std::to_string(field.s()) + " bits, got " +
                                    std::to_string(bits.size()));
    Field::value_type v = 0;
    for (unsigned i = 0; i < field.s(); ++i)
        if (bits[i]) v = static_cast<Field::value_type>(v | (1u << i));
    return v;
}

}  // namespace qread
