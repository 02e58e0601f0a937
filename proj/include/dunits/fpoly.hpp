#pragma once

// Polynomials with coefficients in one FieldCtx, plus minimal polynomials of
// field elements over declared subfields (Frobenius-orbit products).

#include <stdexcept>
#include <string>
#include <vector>

#include "dunits/field.hpp"

namespace dunits::ff {

class FPoly {
public:
    static constexpr int kZeroDegree = BinPoly::kZeroDegree;

    explicit FPoly(const FieldCtx* ctx) : ctx_(ctx) {}
    FPoly(const FieldCtx* ctx, std::vector<FieldElem> coeffs) : ctx_(ctx), coeffs_(std::move(coeffs)) {
        for (const auto& c : coeffs_)
            if (c.ctx() != ctx_) throw std::invalid_argument("FPoly: coefficient context mismatch");
        trim();
    }

    static FPoly zero(const FieldCtx* ctx) { return FPoly{ctx}; }
    static FPoly constant(const FieldElem& c) { return FPoly{c.ctx(), {c}}; }
    static FPoly one(const FieldCtx* ctx) { return constant(ctx->one()); }

    // x + a  (monic linear)
    static FPoly x_plus(const FieldElem& a) { return FPoly{a.ctx(), {a, a.ctx()->one()}}; }

    const FieldCtx* ctx() const { return ctx_; }
    int degree() const { return coeffs_.empty() ? kZeroDegree : static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }

    FieldElem coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : ctx_->zero(); }
    FieldElem constant_term() const { return coeff(0); }
    bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == ctx_->one(); }

    friend FPoly operator+(const FPoly& a, const FPoly& b) {
        if (a.ctx_ != b.ctx_) throw std::invalid_argument("FPoly: context mismatch");
        FPoly r{a.ctx_};
        const auto& lo = a.coeffs_.size() < b.coeffs_.size() ? a : b;
        const auto& hi = a.coeffs_.size() < b.coeffs_.size() ? b : a;
        r.coeffs_ = hi.coeffs_;
        for (std::size_t i = 0; i < lo.coeffs_.size(); ++i) r.coeffs_[i] += lo.coeffs_[i];
        r.trim();
        return r;
    }

    friend FPoly operator*(const FPoly& a, const FPoly& b) {
        if (a.ctx_ != b.ctx_) throw std::invalid_argument("FPoly: context mismatch");
        if (a.is_zero() || b.is_zero()) return zero(a.ctx_);
        FPoly r{a.ctx_};
        r.coeffs_.assign(a.coeffs_.size() + b.coeffs_.size() - 1, a.ctx_->zero());
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
                r.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
        r.trim();
        return r;
    }

    FPoly scaled(const FieldElem& s) const {
        FPoly r{ctx_};
        r.coeffs_.reserve(coeffs_.size());
        for (const auto& c : coeffs_) r.coeffs_.push_back(c * s);
        r.trim();
        return r;
    }

    FieldElem eval(const FieldElem& x) const {
        if (x.ctx() != ctx_) throw std::invalid_argument("FPoly: eval context mismatch");
        FieldElem acc = ctx_->zero();
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
        return acc;
    }

    // Horner in an extension field, embedding each coefficient.
    FieldElem eval_in(const FieldCtx* ambient, const FieldElem& x) const {
        if (x.ctx() != ambient) throw std::invalid_argument("FPoly: eval_in context mismatch");
        FieldElem acc = ambient->zero();
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + ambient->embed(coeffs_[i]);
        return acc;
    }

    friend bool operator==(const FPoly& a, const FPoly& b) {
        return a.ctx_ == b.ctx_ && a.coeffs_ == b.coeffs_;
    }

    std::string to_string() const {  // highest degree first, coefficients in hex
        if (is_zero()) return "0";
        std::string s;
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            if (coeffs_[i].is_zero()) continue;
            if (!s.empty()) s += " + ";
            bool unit_coeff = coeffs_[i] == ctx_->one();
            if (i == 0) {
                s += "0x" + coeffs_[i].to_hex();
            } else {
                if (!unit_coeff) s += "0x" + coeffs_[i].to_hex() + "*";
                s += i == 1 ? "x" : "x^" + std::to_string(i);
            }
        }
        return s;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    const FieldCtx* ctx_;
    std::vector<FieldElem> coeffs_;
};

// The minimal polynomial of `a` over a declared subfield of its context:
// monic, irreducible, degree = size of the Frobenius orbit of `a` under
// x -> x^(2^j) where 2^j is the subfield size.
inline FPoly min_poly_over_subfield(const FieldElem& a, const FieldCtxPtr& sub) {
    const FieldCtx* amb = a.ctx();
    if (!amb) throw std::invalid_argument("min_poly_over_subfield: null element");
    if (sub.get() != amb && !amb->embedding_of(sub.get()))
        throw std::invalid_argument("min_poly_over_subfield: missing subfield embedding");
    unsigned j = sub->degree();

    std::vector<FieldElem> orbit;
    FieldElem cur = a;
    do {
        orbit.push_back(cur);
        for (unsigned i = 0; i < j; ++i) cur = cur * cur;  // Frobenius over the subfield
    } while (!(cur == a));

    FPoly prod = FPoly::one(amb);
    for (const auto& conj : orbit) prod = prod * FPoly::x_plus(conj);  // char 2: x - c = x + c

    std::vector<FieldElem> coeffs;
    for (int i = 0; i <= prod.degree(); ++i) {
        auto c = amb->section(prod.coeff(static_cast<std::size_t>(i)), sub.get());
        if (!c) throw std::logic_error("min_poly_over_subfield: coefficient outside subfield (bug)");
        coeffs.push_back(*c);
    }
    FPoly result{sub.get(), std::move(coeffs)};
    if (!result.is_monic() || result.degree() != static_cast<int>(orbit.size()))
        throw std::logic_error("min_poly_over_subfield: malformed result (bug)");
    return result;
}

}  // namespace dunits::ff
