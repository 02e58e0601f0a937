#pragma once

// Exact arithmetic in FD_{2p^m}: an element is two length-p^m coefficient
// vectors (rotations a^i, reflections a^i b) over GF(2^n).  Multiplication is
// direct convolution with index reflection under b a^i = a^-i b; no FFT, the
// oracle sizes do not warrant one.

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dunits/field.hpp"
#include "dunits/linalg.hpp"
#include "dunits/numtheory.hpp"

namespace dunits::grpalg {

using u64 = std::uint64_t;

// D_{2p^m} = <a, b | a^{p^m} = 1, b^2 = 1, b^-1 a b = a^-1>
struct GroupParams {
    unsigned p = 0, m = 0, n = 0;
    u64 pm = 0;  // p^m
};

class AlgebraCtx;
using AlgebraCtxPtr = std::shared_ptr<const AlgebraCtx>;

class AlgebraCtx {
public:
    static AlgebraCtxPtr make(unsigned p, unsigned m, unsigned n) {
        return make(p, m, n, ff::FieldCtx::make(n));
    }

    static AlgebraCtxPtr make(unsigned p, unsigned m, unsigned n, ff::FieldCtxPtr field) {
        if (p < 3 || p % 2 == 0 || !numtheory::is_prime_u64(p))
            throw std::invalid_argument("AlgebraCtx: p must be an odd prime");
        if (m < 1 || n < 1) throw std::invalid_argument("AlgebraCtx: m and n must be >= 1");
        if (field->degree() != n) throw std::invalid_argument("AlgebraCtx: field degree must equal n");
        auto ctx = std::shared_ptr<AlgebraCtx>(new AlgebraCtx);
        ctx->params_ = {p, m, n, numtheory::pow_u64_checked(p, m)};
        ctx->field_ = std::move(field);
        return ctx;
    }

    const GroupParams& params() const { return params_; }
    const ff::FieldCtxPtr& field() const { return field_; }
    u64 pm() const { return params_.pm; }

private:
    AlgebraCtx() = default;
    GroupParams params_;
    ff::FieldCtxPtr field_;
};

class AlgebraElem {
public:
    explicit AlgebraElem(AlgebraCtxPtr ctx)
        : ctx_(std::move(ctx)),
          rot_(ctx_->pm(), ctx_->field()->zero()),
          ref_(ctx_->pm(), ctx_->field()->zero()) {}

    static AlgebraElem zero(const AlgebraCtxPtr& ctx) { return AlgebraElem{ctx}; }

    static AlgebraElem one(const AlgebraCtxPtr& ctx) {
        AlgebraElem e{ctx};
        e.rot_[0] = ctx->field()->one();
        return e;
    }

    // a^exp (reflected = false) or a^exp b (reflected = true), scaled
    static AlgebraElem monomial(const AlgebraCtxPtr& ctx, bool reflected, u64 exp,
                                ff::FieldElem coeff) {
        AlgebraElem e{ctx};
        (reflected ? e.ref_ : e.rot_)[exp % ctx->pm()] = coeff;
        return e;
    }

    static AlgebraElem monomial(const AlgebraCtxPtr& ctx, bool reflected, u64 exp) {
        return monomial(ctx, reflected, exp, ctx->field()->one());
    }

    // Ghat = sum of all 2p^m group elements
    static AlgebraElem group_sum(const AlgebraCtxPtr& ctx) {
        AlgebraElem e{ctx};
        for (u64 i = 0; i < ctx->pm(); ++i) e.rot_[i] = e.ref_[i] = ctx->field()->one();
        return e;
    }

    const AlgebraCtxPtr& ctx() const { return ctx_; }
    const ff::FieldElem& rot(u64 i) const { return rot_[i]; }
    const ff::FieldElem& ref(u64 i) const { return ref_[i]; }
    void set_rot(u64 i, const ff::FieldElem& v) { rot_[i] = v; }
    void set_ref(u64 i, const ff::FieldElem& v) { ref_[i] = v; }

    friend AlgebraElem operator+(const AlgebraElem& x, const AlgebraElem& y) {
        require_same(x, y);
        AlgebraElem r = x;
        for (u64 i = 0; i < r.ctx_->pm(); ++i) {
            r.rot_[i] += y.rot_[i];
            r.ref_[i] += y.ref_[i];
        }
        return r;
    }

    friend AlgebraElem operator*(const AlgebraElem& x, const AlgebraElem& y) {
        require_same(x, y);
        const u64 pm = x.ctx_->pm();
        AlgebraElem r{x.ctx_};
        for (u64 i = 0; i < pm; ++i) {
            if (!x.rot_[i].is_zero()) {
                for (u64 j = 0; j < pm; ++j) {
                    if (!y.rot_[j].is_zero()) r.rot_[add_mod(i, j, pm)] += x.rot_[i] * y.rot_[j];
                    if (!y.ref_[j].is_zero()) r.ref_[add_mod(i, j, pm)] += x.rot_[i] * y.ref_[j];
                }
            }
            if (!x.ref_[i].is_zero()) {
                // a^i b * a^j = a^{i-j} b,  a^i b * a^j b = a^{i-j}
                for (u64 j = 0; j < pm; ++j) {
                    if (!y.rot_[j].is_zero()) r.ref_[sub_mod(i, j, pm)] += x.ref_[i] * y.rot_[j];
                    if (!y.ref_[j].is_zero()) r.rot_[sub_mod(i, j, pm)] += x.ref_[i] * y.ref_[j];
                }
            }
        }
        return r;
    }

    AlgebraElem scaled(const ff::FieldElem& s) const {
        AlgebraElem r = *this;
        for (u64 i = 0; i < ctx_->pm(); ++i) {
            r.rot_[i] *= s;
            r.ref_[i] *= s;
        }
        return r;
    }

    AlgebraElem pow(u64 e) const {
        AlgebraElem r = one(ctx_), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    friend bool operator==(const AlgebraElem& x, const AlgebraElem& y) {
        return x.ctx_ == y.ctx_ && x.rot_ == y.rot_ && x.ref_ == y.ref_;
    }

    bool is_zero() const {
        for (u64 i = 0; i < ctx_->pm(); ++i)
            if (!rot_[i].is_zero() || !ref_[i].is_zero()) return false;
        return true;
    }

    unsigned support_size() const {
        unsigned s = 0;
        for (u64 i = 0; i < ctx_->pm(); ++i) s += !rot_[i].is_zero() + !ref_[i].is_zero();
        return s;
    }

    // coefficient bits in canonical order, for hashing and set membership
    std::vector<u64> packed_bits() const {
        std::vector<u64> v;
        v.reserve(2 * ctx_->pm());
        for (const auto& c : rot_) v.push_back(c.bits());
        for (const auto& c : ref_) v.push_back(c.bits());
        return v;
    }

    // canonical textual form: terms ordered 1, a, ..., a^{p^m-1}, b, a*b, ...
    std::string to_string() const {
        std::string s;
        auto term = [&](bool reflected, u64 i, const ff::FieldElem& c) {
            if (c.is_zero()) return;
            if (!s.empty()) s += " + ";
            bool unit = c == ctx_->field()->one();
            std::string gen;
            if (!reflected)
                gen = i == 0 ? "1" : i == 1 ? "a" : "a^" + std::to_string(i);
            else
                gen = i == 0 ? "b" : i == 1 ? "a*b" : "a^" + std::to_string(i) + "*b";
            if (unit)
                s += gen;
            else
                s += "0x" + c.to_hex() + "*" + gen;
        };
        for (u64 i = 0; i < ctx_->pm(); ++i) term(false, i, rot_[i]);
        for (u64 i = 0; i < ctx_->pm(); ++i) term(true, i, ref_[i]);
        return s.empty() ? "0" : s;
    }

    nlohmann::json to_json() const {
        nlohmann::json rot = nlohmann::json::array(), ref = nlohmann::json::array();
        for (const auto& c : rot_) rot.push_back(c.to_hex());
        for (const auto& c : ref_) ref.push_back(c.to_hex());
        return {{"rot", rot}, {"ref", ref}};
    }

    static AlgebraElem from_json(const AlgebraCtxPtr& ctx, const nlohmann::json& j) {
        AlgebraElem e{ctx};
        const auto& rot = j.at("rot");
        const auto& ref = j.at("ref");
        if (rot.size() != ctx->pm() || ref.size() != ctx->pm())
            throw std::invalid_argument("AlgebraElem: JSON vector length mismatch");
        for (u64 i = 0; i < ctx->pm(); ++i) {
            e.rot_[i] = ctx->field()->from_bits(std::stoull(rot[i].get<std::string>(), nullptr, 16));
            e.ref_[i] = ctx->field()->from_bits(std::stoull(ref[i].get<std::string>(), nullptr, 16));
        }
        return e;
    }

private:
    static void require_same(const AlgebraElem& x, const AlgebraElem& y) {
        if (x.ctx_ != y.ctx_) throw std::invalid_argument("AlgebraElem: parameter mismatch");
    }
    static u64 add_mod(u64 i, u64 j, u64 pm) { return (i + j) % pm; }
    static u64 sub_mod(u64 i, u64 j, u64 pm) { return (i + pm - j % pm) % pm; }

    AlgebraCtxPtr ctx_;
    std::vector<ff::FieldElem> rot_, ref_;
};

// canonical involution: linear extension of g -> g^-1
inline AlgebraElem star(const AlgebraElem& x) {
    const u64 pm = x.ctx()->pm();
    AlgebraElem r{x.ctx()};
    for (u64 i = 0; i < pm; ++i) {
        r.set_rot((pm - i) % pm, x.rot(i));
        r.set_ref(i, x.ref(i));  // each a^i b is an involution
    }
    return r;
}

// coefficient sum; a ring homomorphism onto F
inline ff::FieldElem augmentation(const AlgebraElem& x) {
    ff::FieldElem s = x.ctx()->field()->zero();
    for (u64 i = 0; i < x.ctx()->pm(); ++i) s += x.rot(i) + x.ref(i);
    return s;
}

// Inverse via the regular representation (x acting on the group basis) and
// exact Gaussian elimination; nullopt = NotAUnit, not an error.
inline std::optional<AlgebraElem> try_invert(const AlgebraElem& x) {
    const u64 pm = x.ctx()->pm();
    const std::size_t dim = 2 * pm;
    const ff::FieldCtx* f = x.ctx()->field().get();

    // column g holds the coordinates of x * g
    ff::Matrix mat(dim, std::vector<ff::FieldElem>(dim, f->zero()));
    for (u64 j = 0; j < pm; ++j) {
        for (u64 k = 0; k < pm; ++k) {
            // x * a^j
            mat[k][j] = x.rot((k + pm - j % pm) % pm);
            mat[pm + k][j] = x.ref((k + j) % pm);
            // x * a^j b
            mat[k][pm + j] = x.ref((k + j) % pm);
            mat[pm + k][pm + j] = x.rot((k + pm - j % pm) % pm);
        }
    }
    std::vector<ff::FieldElem> e1(dim, f->zero());
    e1[0] = f->one();
    auto sol = ff::solve_square(std::move(mat), std::move(e1));
    if (!sol) return std::nullopt;

    AlgebraElem y{x.ctx()};
    for (u64 i = 0; i < pm; ++i) {
        y.set_rot(i, (*sol)[i]);
        y.set_ref(i, (*sol)[pm + i]);
    }
    if (!(x * y == AlgebraElem::one(x.ctx())) || !(y * x == AlgebraElem::one(x.ctx())))
        throw std::logic_error("try_invert: inverse verification failed (bug)");
    return y;
}

inline bool is_unitary(const AlgebraElem& x) { return x * star(x) == AlgebraElem::one(x.ctx()); }

// --- element-expression parser (CLI-facing) ---------------------------------
//
//   Expr  ::= Term ('+' Term)*
//   Term  ::= Coeff '*'? Gen? | Gen
//   Gen   ::= 'a' ('^' Int)? ('*'? 'b')? | 'b' | '1'
//   Coeff ::= hex field element: plain digits 0-9, or 0x-prefixed full hex
//
// Whitespace-insensitive; exponents are reduced mod p^m.  Bare letters a/b
// are always generators, which is why letter hex digits need the 0x prefix.

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t column, const std::string& msg)
        : std::runtime_error("line 1, column " + std::to_string(column) + ": " + msg), column_(column) {}
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

namespace detail {

class ExprParser {
public:
    ExprParser(AlgebraCtxPtr ctx, std::string_view s) : ctx_(std::move(ctx)), s_(s) {}

    AlgebraElem parse() {
        AlgebraElem acc = AlgebraElem::zero(ctx_);
        acc = acc + parse_term();
        skip_ws();
        while (!eof() && peek() == '+') {
            ++pos_;
            acc = acc + parse_term();
            skip_ws();
        }
        if (!eof()) fail("unexpected character");
        return acc;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_ + 1, msg); }
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    AlgebraElem parse_term() {
        skip_ws();
        if (eof()) fail("expected a term");
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            ff::FieldElem coeff = parse_coeff();
            skip_ws();
            bool star_seen = false;
            if (!eof() && peek() == '*') {
                ++pos_;
                star_seen = true;
                skip_ws();
            }
            if (!eof() && (peek() == 'a' || peek() == 'b' || (star_seen && peek() == '1'))) {
                auto [reflected, exp] = parse_gen();
                return AlgebraElem::monomial(ctx_, reflected, exp, coeff);
            }
            if (star_seen) fail("expected a generator after '*'");
            return AlgebraElem::monomial(ctx_, false, 0, coeff);  // bare coefficient = coeff * 1
        }
        if (c == 'a' || c == 'b') {
            auto [reflected, exp] = parse_gen();
            return AlgebraElem::monomial(ctx_, reflected, exp);
        }
        fail("expected a coefficient or generator");
    }

    ff::FieldElem parse_coeff() {
        std::size_t start = pos_;
        bool hex_prefixed = s_.substr(pos_).starts_with("0x") || s_.substr(pos_).starts_with("0X");
        u64 v = 0;
        if (hex_prefixed) {
            pos_ += 2;
            if (eof() || !std::isxdigit(static_cast<unsigned char>(peek()))) fail("expected hex digits after 0x");
            while (!eof() && std::isxdigit(static_cast<unsigned char>(peek()))) {
                char d = static_cast<char>(std::tolower(peek()));
                v = v * 16 + static_cast<u64>(d <= '9' ? d - '0' : d - 'a' + 10);
                ++pos_;
            }
        } else {
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 16 + static_cast<u64>(peek() - '0');  // digits are hex digits
                ++pos_;
            }
        }
        if (ctx_->field()->degree() < 64 && v >> ctx_->field()->degree()) {
            pos_ = start;
            fail("coefficient out of field range");
        }
        return ctx_->field()->from_bits(v);
    }

    std::pair<bool, u64> parse_gen() {
        skip_ws();
        if (eof()) fail("expected a generator");
        char c = peek();
        if (c == '1') {
            ++pos_;
            return {false, 0};
        }
        if (c == 'b') {
            ++pos_;
            return {true, 0};
        }
        if (c != 'a') fail("expected 'a', 'b' or '1'");
        ++pos_;
        long long exp = 1;
        skip_ws();
        if (!eof() && peek() == '^') {
            ++pos_;
            skip_ws();
            bool neg = false;
            if (!eof() && peek() == '-') {
                neg = true;
                ++pos_;
            }
            if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected an exponent");
            long long v = 0;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 10 + (peek() - '0');
                ++pos_;
            }
            exp = neg ? -v : v;
        }
        const long long pm = static_cast<long long>(ctx_->pm());
        u64 reduced = static_cast<u64>((exp % pm + pm) % pm);
        skip_ws();
        std::size_t save = pos_;
        if (!eof() && peek() == '*') {
            ++pos_;
            skip_ws();
            if (!eof() && peek() == 'b') {
                ++pos_;
                return {true, reduced};
            }
            pos_ = save;  // the '*' belongs to the next construct; not ours
            return {false, reduced};
        }
        if (!eof() && peek() == 'b') {
            ++pos_;
            return {true, reduced};
        }
        return {false, reduced};
    }

    AlgebraCtxPtr ctx_;
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline AlgebraElem parse_element(const AlgebraCtxPtr& ctx, std::string_view expr) {
    return detail::ExprParser(ctx, expr).parse();
}

}  // namespace dunits::grpalg
