#pragma once

// GF(2^k) for k <= 63, bit-packed.  A FieldCtx owns the modulus and any
// declared subfield embeddings and is immutable once built, so contexts can
// be shared freely across threads.  FieldElem is a plain value: one machine
// word of coefficients plus a non-owning pointer to its context; whoever
// builds a context keeps it alive (factories hand out shared_ptr).
//
// Everything canonical is smallest-encoding: moduli, multiplicative
// generators, embedding roots.  Identical inputs give identical bits across
// runs and machines.

#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dunits/binpoly.hpp"
#include "dunits/numtheory.hpp"

namespace dunits::ff {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

class FieldCtx;
using FieldCtxPtr = std::shared_ptr<const FieldCtx>;

// Span of bit-packed GF(2) vectors with coordinate recovery; used to invert
// embeddings and to take coordinates over intermediate subfields.
class Gf2Span {
public:
    // returns false (and does not add) if v is dependent on the current span
    bool add(u64 v) {
        u64 comb = u64{1} << size_;
        for (const Pivot& p : pivots_)
            if (v >> p.bit & 1) {
                v ^= p.vec;
                comb ^= p.comb;
            }
        if (v == 0) return false;
        unsigned bit = 63;
        while (!(v >> bit & 1)) --bit;
        pivots_.push_back({bit, v, comb});
        ++size_;
        return true;
    }

    // coordinates of y over the added vectors (bit i = vector i), if in span
    std::optional<u64> coords(u64 y) const {
        u64 comb = 0;
        for (const Pivot& p : pivots_)
            if (y >> p.bit & 1) {
                y ^= p.vec;
                comb ^= p.comb;
            }
        if (y != 0) return std::nullopt;
        return comb;
    }

    unsigned size() const { return size_; }

private:
    struct Pivot {
        unsigned bit;
        u64 vec, comb;
    };
    std::vector<Pivot> pivots_;
    unsigned size_ = 0;
};

class FieldElem {
public:
    FieldElem() = default;
    FieldElem(const FieldCtx* ctx, u64 bits) : ctx_(ctx), bits_(bits) {}

    u64 bits() const { return bits_; }
    const FieldCtx* ctx() const { return ctx_; }
    bool is_zero() const { return bits_ == 0; }

    inline FieldElem operator+(const FieldElem& o) const;
    inline FieldElem operator*(const FieldElem& o) const;
    inline FieldElem& operator+=(const FieldElem& o) { return *this = *this + o; }
    inline FieldElem& operator*=(const FieldElem& o) { return *this = *this * o; }
    inline FieldElem inverse() const;
    inline FieldElem pow(u64 e) const;

    friend bool operator==(const FieldElem& a, const FieldElem& b) {
        return a.ctx_ == b.ctx_ && a.bits_ == b.bits_;
    }

    std::string to_hex() const {
        std::ostringstream os;
        os << std::hex << bits_;
        return os.str();
    }

private:
    const FieldCtx* ctx_ = nullptr;
    u64 bits_ = 0;
};

class FieldCtx {
public:
    // canonical field: smallest-encoding irreducible modulus
    static FieldCtxPtr make(unsigned degree) { return make(degree, find_irreducible(degree)); }

    static FieldCtxPtr make(unsigned degree, const BinPoly& modulus) {
        return make_extension(degree, {}, modulus);
    }

    // field with declared subfields, each embedded at the smallest root of
    // its modulus (composing a section with its embedding is the identity)
    static FieldCtxPtr make_extension(unsigned degree, const std::vector<FieldCtxPtr>& subfields) {
        return make_extension(degree, subfields, find_irreducible(degree));
    }

    static FieldCtxPtr make_extension(unsigned degree, const std::vector<FieldCtxPtr>& subfields,
                                      const BinPoly& modulus) {
        if (degree < 1 || degree > 63)
            throw std::invalid_argument("FieldCtx: degree guard (1 <= degree <= 63) exceeded");
        if (modulus.degree() != static_cast<int>(degree) || !is_irreducible(modulus))
            throw std::invalid_argument("FieldCtx: modulus must be irreducible of the given degree");
        auto ctx = std::shared_ptr<FieldCtx>(new FieldCtx(degree, modulus));
        for (const auto& sub : subfields) ctx->add_embedding(sub);
        return ctx;
    }

    unsigned degree() const { return degree_; }
    const BinPoly& modulus() const { return modulus_; }
    u64 group_order() const { return (u64{1} << degree_) - 1; }

    FieldElem zero() const { return {this, 0}; }
    FieldElem one() const { return {this, 1}; }
    FieldElem generator() const { return {this, degree_ == 1 ? u64{1} : u64{2}}; }  // residue class of x
    FieldElem from_bits(u64 b) const {
        if (degree_ < 64 && b >> degree_) throw std::invalid_argument("FieldCtx: bits out of range");
        return {this, b};
    }

    // smallest-encoding generator of the multiplicative group
    FieldElem canonical_generator() const { return {this, canonical_gen_bits_}; }

    const std::vector<std::pair<u64, unsigned>>& group_order_factors() const { return group_factors_; }

    u64 mul_bits(u64 a, u64 b) const {
        u128 acc = 0;
        while (b) {
            acc ^= u128(a) << __builtin_ctzll(b);
            b &= b - 1;
        }
        for (int i = 2 * static_cast<int>(degree_) - 2; i >= static_cast<int>(degree_); --i)
            if (acc >> i & 1) acc ^= u128(modulus_bits_) << (i - degree_);
        return static_cast<u64>(acc);
    }

    u64 inv_bits(u64 a) const {
        if (a == 0) throw std::domain_error("field inversion of zero");
        BinPoly r0 = modulus_, r1 = BinPoly::from_bits(a);
        BinPoly s0 = BinPoly::zero(), s1 = BinPoly::one();
        while (!r1.is_zero()) {
            BinPoly q = r0.div(r1);
            BinPoly r2 = r0 + q * r1;
            BinPoly s2 = s0 + q * s1;
            r0 = r1;
            r1 = r2;
            s0 = s1;
            s1 = s2;
        }
        return s0.mod(modulus_).to_bits();
    }

    u64 pow_bits(u64 a, u64 e) const {
        u64 r = 1;
        while (e) {
            if (e & 1) r = mul_bits(r, a);
            a = mul_bits(a, a);
            e >>= 1;
        }
        return r;
    }

    // evaluate a GF(2)-polynomial at an element of this field
    u64 eval_binpoly(const BinPoly& f, u64 x) const {
        if (f.is_zero()) return 0;
        u64 acc = 0;
        for (int d = f.degree(); d >= 0; --d) {
            acc = mul_bits(acc, x);
            if (f.bit(static_cast<unsigned>(d))) acc ^= 1;
        }
        return acc;
    }

    struct Embedding {
        FieldCtxPtr sub;
        std::vector<u64> power_images;  // images of sub-generator^i
        Gf2Span span;

        u64 map_bits(u64 sub_bits) const {
            u64 r = 0;
            while (sub_bits) {
                r ^= power_images[static_cast<unsigned>(__builtin_ctzll(sub_bits))];
                sub_bits &= sub_bits - 1;
            }
            return r;
        }
    };

    const Embedding* embedding_of(const FieldCtx* sub) const {
        for (const auto& e : embeddings_)
            if (e.sub.get() == sub) return &e;
        return nullptr;
    }

    FieldElem embed(const FieldElem& x) const {
        if (x.ctx() == this) return x;
        const Embedding* e = embedding_of(x.ctx());
        if (!e) throw std::invalid_argument("FieldCtx: no embedding registered for that subfield");
        return {this, e->map_bits(x.bits())};
    }

    std::optional<FieldElem> section(const FieldElem& x, const FieldCtx* sub) const {
        if (x.ctx() != this) throw std::invalid_argument("FieldCtx: section argument not in this field");
        if (sub == this) return x;
        const Embedding* e = embedding_of(sub);
        if (!e) throw std::invalid_argument("FieldCtx: no embedding registered for that subfield");
        auto c = e->span.coords(x.bits());
        if (!c) return std::nullopt;
        return FieldElem{sub, *c};
    }

    nlohmann::json to_json() const {
        return {{"degree", degree_}, {"modulus", modulus_.to_hex()}};
    }

private:
    FieldCtx(unsigned degree, const BinPoly& modulus)
        : degree_(degree), modulus_(modulus), modulus_bits_(modulus.to_bits()) {
        group_factors_ = numtheory::factor_u64(group_order());
        canonical_gen_bits_ = find_canonical_generator();
    }

    u64 find_canonical_generator() const {
        if (degree_ == 1) return 1;
        u64 go = group_order();
        for (u64 cand = 2;; ++cand) {
            bool ok = true;
            for (auto [q, e] : group_factors_)
                if (pow_bits(cand, go / q) == 1) {
                    ok = false;
                    break;
                }
            if (ok) return cand;
        }
    }

    void add_embedding(const FieldCtxPtr& sub) {
        unsigned j = sub->degree();
        if (degree_ % j != 0) throw std::invalid_argument("FieldCtx: subfield degree must divide field degree");
        if (j > 24) throw std::invalid_argument("FieldCtx: subfield enumeration guard (degree <= 24) exceeded");
        u64 root;
        if (j == degree_ && sub->modulus() == modulus_) {
            root = sub->generator().bits();  // same presentation: identity embedding
        } else {
            u64 sub_order = (u64{1} << j) - 1;
            u64 w = pow_bits(canonical_gen_bits_, group_order() / sub_order);
            u64 best = 0;
            bool found = false;
            u64 cur = 1;
            for (u64 e = 0; e < sub_order; ++e) {
                if (eval_binpoly(sub->modulus(), cur) == 0 && (!found || cur < best)) {
                    best = cur;
                    found = true;
                }
                cur = mul_bits(cur, w);
            }
            if (!found) throw std::logic_error("FieldCtx: no root of subfield modulus found (bug)");
            root = best;
        }
        Embedding emb;
        emb.sub = sub;
        u64 pw = 1;
        for (unsigned i = 0; i < j; ++i) {
            emb.power_images.push_back(pw);
            if (!emb.span.add(pw)) throw std::logic_error("FieldCtx: embedding basis dependent (bug)");
            pw = mul_bits(pw, root);
        }
        embeddings_.push_back(std::move(emb));
    }

    unsigned degree_;
    BinPoly modulus_;
    u64 modulus_bits_;
    std::vector<std::pair<u64, unsigned>> group_factors_;
    u64 canonical_gen_bits_;
    std::vector<Embedding> embeddings_;
};

inline const FieldCtx* require_same_ctx(const FieldElem& a, const FieldElem& b) {
    if (!a.ctx() || a.ctx() != b.ctx()) throw std::invalid_argument("field context mismatch");
    return a.ctx();
}

inline FieldElem FieldElem::operator+(const FieldElem& o) const {
    return {require_same_ctx(*this, o), bits_ ^ o.bits_};
}

inline FieldElem FieldElem::operator*(const FieldElem& o) const {
    const FieldCtx* c = require_same_ctx(*this, o);
    return {c, c->mul_bits(bits_, o.bits_)};
}

inline FieldElem FieldElem::inverse() const { return {ctx_, ctx_->inv_bits(bits_)}; }

inline FieldElem FieldElem::pow(u64 e) const { return {ctx_, ctx_->pow_bits(bits_, e)}; }

// Least e >= 1 with a^e = 1; divides 2^k - 1.
inline u64 element_order(const FieldElem& a) {
    if (a.is_zero()) throw std::domain_error("element_order of zero");
    const FieldCtx* c = a.ctx();
    u64 e = c->group_order();
    for (auto [q, exp] : c->group_order_factors())
        while (e % q == 0 && c->pow_bits(a.bits(), e / q) == 1) e /= q;
    return e;
}

// Element of exact multiplicative order `order`, derived from the canonical
// generator; requires order | 2^k - 1.
inline FieldElem primitive_root_of_unity(u64 order, const FieldCtxPtr& ctx) {
    if (order == 0 || ctx->group_order() % order != 0)
        throw std::invalid_argument("primitive_root_of_unity: order does not divide 2^k - 1");
    return ctx->canonical_generator().pow(ctx->group_order() / order);
}

}  // namespace dunits::ff
