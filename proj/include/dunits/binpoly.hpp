#pragma once

// Polynomials over GF(2), bit-packed lowest-degree-first.  Degree of the zero
// polynomial is a sentinel, never a usable integer.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dunits::ff {

class BinPoly {
public:
    static constexpr int kZeroDegree = std::numeric_limits<int>::min();

    BinPoly() = default;

    static BinPoly zero() { return BinPoly{}; }
    static BinPoly one() { return from_bits(1); }
    static BinPoly x() { return from_bits(2); }

    // bit i of `bits` is the coefficient of x^i
    static BinPoly from_bits(std::uint64_t bits) {
        BinPoly p;
        if (bits != 0) p.limbs_.push_back(bits);
        return p;
    }

    // x^e
    static BinPoly monomial(unsigned e) {
        BinPoly p;
        p.set_bit(e);
        return p;
    }

    // x^e + 1
    static BinPoly x_pow_plus_one(unsigned e) {
        BinPoly p = monomial(e);
        p.flip_bit(0);
        return p;
    }

    bool is_zero() const { return limbs_.empty(); }

    int degree() const {
        if (limbs_.empty()) return kZeroDegree;
        std::uint64_t top = limbs_.back();
        int bit = 63;
        while (!(top >> bit & 1)) --bit;
        return static_cast<int>(limbs_.size() - 1) * 64 + bit;
    }

    bool bit(unsigned i) const {
        unsigned limb = i / 64;
        if (limb >= limbs_.size()) return false;
        return limbs_[limb] >> (i % 64) & 1;
    }

    void set_bit(unsigned i) {
        unsigned limb = i / 64;
        if (limb >= limbs_.size()) limbs_.resize(limb + 1, 0);
        limbs_[limb] |= std::uint64_t{1} << (i % 64);
    }

    void flip_bit(unsigned i) {
        unsigned limb = i / 64;
        if (limb >= limbs_.size()) limbs_.resize(limb + 1, 0);
        limbs_[limb] ^= std::uint64_t{1} << (i % 64);
        trim();
    }

    std::uint64_t to_bits() const {
        if (limbs_.size() > 1) throw std::overflow_error("BinPoly: degree > 63 in to_bits");
        return limbs_.empty() ? 0 : limbs_[0];
    }

    friend BinPoly operator+(const BinPoly& a, const BinPoly& b) {
        BinPoly r = a;
        if (r.limbs_.size() < b.limbs_.size()) r.limbs_.resize(b.limbs_.size(), 0);
        for (std::size_t i = 0; i < b.limbs_.size(); ++i) r.limbs_[i] ^= b.limbs_[i];
        r.trim();
        return r;
    }

    // carry-less schoolbook product
    friend BinPoly operator*(const BinPoly& a, const BinPoly& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        BinPoly r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t w = a.limbs_[i];
            while (w) {
                unsigned bit = static_cast<unsigned>(__builtin_ctzll(w));
                w &= w - 1;
                r.xor_shifted(b, static_cast<unsigned>(i) * 64 + bit);
            }
        }
        r.trim();
        return r;
    }

    BinPoly shifted(unsigned k) const {
        BinPoly r;
        if (is_zero()) return r;
        r.limbs_.assign(limbs_.size() + k / 64 + 1, 0);
        r.xor_shifted(*this, k);
        r.trim();
        return r;
    }

    // remainder of *this modulo f (f != 0)
    BinPoly mod(const BinPoly& f) const {
        if (f.is_zero()) throw std::invalid_argument("BinPoly: modulo zero");
        BinPoly r = *this;
        int df = f.degree();
        for (int d = r.degree(); d >= df; d = r.degree())
            r.xor_in_shifted(f, static_cast<unsigned>(d - df));
        return r;
    }

    BinPoly div(const BinPoly& f) const {
        if (f.is_zero()) throw std::invalid_argument("BinPoly: division by zero");
        BinPoly q, r = *this;
        int df = f.degree();
        for (int d = r.degree(); d >= df; d = r.degree()) {
            q.set_bit(static_cast<unsigned>(d - df));
            r.xor_in_shifted(f, static_cast<unsigned>(d - df));
        }
        return q;
    }

    friend BinPoly gcd(BinPoly a, BinPoly b) {
        while (!b.is_zero()) {
            BinPoly r = a.mod(b);
            a = b;
            b = r;
        }
        return a;
    }

    friend bool operator==(const BinPoly& a, const BinPoly& b) { return a.limbs_ == b.limbs_; }

    // total order by encoding, used to pick canonical (smallest) polynomials
    friend bool operator<(const BinPoly& a, const BinPoly& b) {
        if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() < b.limbs_.size();
        for (std::size_t i = a.limbs_.size(); i-- > 0;)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i];
        return false;
    }

    std::string to_hex() const {
        if (limbs_.empty()) return "0";
        static const char* digits = "0123456789abcdef";
        std::string s;
        for (std::size_t i = limbs_.size(); i-- > 0;)
            for (int nib = 15; nib >= 0; --nib)
                s.push_back(digits[limbs_[i] >> (4 * nib) & 0xf]);
        s.erase(0, s.find_first_not_of('0'));
        return s;
    }

    std::string to_string() const {  // human form, highest degree first
        if (is_zero()) return "0";
        std::string s;
        for (int d = degree(); d >= 0; --d) {
            if (!bit(static_cast<unsigned>(d))) continue;
            if (!s.empty()) s += " + ";
            if (d == 0) s += "1";
            else if (d == 1) s += "x";
            else s += "x^" + std::to_string(d);
        }
        return s;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }
    void xor_shifted(const BinPoly& b, unsigned k) {
        unsigned limb = k / 64, off = k % 64;
        if (limbs_.size() < b.limbs_.size() + limb + 1) limbs_.resize(b.limbs_.size() + limb + 1, 0);
        for (std::size_t i = 0; i < b.limbs_.size(); ++i) {
            limbs_[i + limb] ^= b.limbs_[i] << off;
            if (off) limbs_[i + limb + 1] ^= b.limbs_[i] >> (64 - off);
        }
    }
    void xor_in_shifted(const BinPoly& b, unsigned k) {
        xor_shifted(b, k);
        trim();
    }

    std::vector<std::uint64_t> limbs_;
};

inline BinPoly mulmod(const BinPoly& a, const BinPoly& b, const BinPoly& f) {
    return (a * b).mod(f);
}

// x^(2^e) mod f by repeated squaring
inline BinPoly x_pow_2e_mod(unsigned e, const BinPoly& f) {
    BinPoly t = BinPoly::x().mod(f);
    for (unsigned i = 0; i < e; ++i) t = mulmod(t, t, f);
    return t;
}

// Rabin's irreducibility test.
inline bool is_irreducible(const BinPoly& f) {
    int deg = f.degree();
    if (deg < 1) return false;
    unsigned k = static_cast<unsigned>(deg);
    if (!(x_pow_2e_mod(k, f) == BinPoly::x().mod(f))) return false;
    unsigned rest = k;
    for (unsigned q = 2; q * q <= rest; ++q) {
        if (rest % q) continue;
        while (rest % q == 0) rest /= q;
        BinPoly t = x_pow_2e_mod(k / q, f) + BinPoly::x().mod(f);
        if (!(gcd(t, f).degree() == 0)) return false;
    }
    if (rest > 1) {
        BinPoly t = x_pow_2e_mod(k / static_cast<unsigned>(rest), f) + BinPoly::x().mod(f);
        if (!(gcd(t, f).degree() == 0)) return false;
    }
    return true;
}

// Smallest-encoding irreducible of the given degree with nonzero constant
// term (so it is usable as a field modulus; excludes x in degree 1).
// Irreducibles exist in every degree, so the scan always stops inside the
// degree band and cannot overflow even at degree 63.
inline BinPoly find_irreducible(unsigned degree) {
    if (degree < 1) throw std::invalid_argument("find_irreducible: degree must be >= 1");
    if (degree > 63) throw std::invalid_argument("find_irreducible: degree guard (degree <= 63) exceeded");
    for (std::uint64_t c = (std::uint64_t{1} << degree) | 1;; c += 2) {
        BinPoly f = BinPoly::from_bits(c);
        if (is_irreducible(f)) return f;
    }
}

}  // namespace dunits::ff
