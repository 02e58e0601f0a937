#pragma once

// The generator set B = {1 + alpha^i (a^j + a^-j)(1 + a^k b)}, the subgroup
// it generates (isomorphic to a product of SL2's), the explicit product
// identities behind D cap <B> = <a>, constructive preimages of elementary
// matrices, and the direct-product structure report.

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "dunits/detail_keys.hpp"
#include "dunits/grpalg.hpp"
#include "dunits/numtheory.hpp"
#include "dunits/wedderburn.hpp"

namespace dunits::unitary {

using u64 = std::uint64_t;
using grpalg::AlgebraCtxPtr;
using grpalg::AlgebraElem;
using wedderburn::Mat2;
using wedderburn::WedderburnCtx;
using wedderburn::WedderburnImage;

// u_{a^k b, a^j} = 1 + c (a^j + a^-j)(1 + a^k b)
inline AlgebraElem b_generator(const AlgebraCtxPtr& ctx, const ff::FieldElem& coeff, u64 j, u64 k) {
    const u64 pm = ctx->pm();
    AlgebraElem sym = AlgebraElem::monomial(ctx, false, j % pm, coeff) +
                      AlgebraElem::monomial(ctx, false, (pm - j % pm) % pm, coeff);
    AlgebraElem tail = AlgebraElem::one(ctx) + AlgebraElem::monomial(ctx, true, k);
    return AlgebraElem::one(ctx) + sym * tail;
}

struct Generator {
    unsigned i = 0;  // coefficient alpha^i, 0 <= i < n
    u64 j = 0;       // 1 <= j <= (p^m - 1)/2
    u64 k = 0;       // 0 <= k < p^m
    AlgebraElem elem;
};

struct GeneratorSet {
    AlgebraCtxPtr ctx;
    std::vector<Generator> gens;

    // deterministic flat index for (i, j, k)
    const Generator& at(unsigned i, u64 j, u64 k) const {
        const u64 pm = ctx->pm();
        const u64 half = (pm - 1) / 2;
        std::size_t idx = static_cast<std::size_t>((i * half + (j - 1)) * pm + k);
        return gens.at(idx);
    }
};

// Full index-range enumeration of B; unitarity of each member is asserted.
inline GeneratorSet build_B(const AlgebraCtxPtr& ctx) {
    const u64 pm = ctx->pm();
    const unsigned n = ctx->params().n;
    GeneratorSet set;
    set.ctx = ctx;
    set.gens.reserve(static_cast<std::size_t>(n) * ((pm - 1) / 2) * pm);
    for (unsigned i = 0; i < n; ++i)
        for (u64 j = 1; j <= (pm - 1) / 2; ++j)
            for (u64 k = 0; k < pm; ++k) {
                Generator g{i, j, k, b_generator(ctx, ctx->field()->generator().pow(i), j, k)};
                if (!grpalg::is_unitary(g.elem))
                    throw std::logic_error("build_B: generator not unitary (bug)");
                set.gens.push_back(std::move(g));
            }
    return set;
}

// The three product identities behind D cap <B> = <a>:
//   u_{ab,a} ... u_{ab,a^{(p^m-1)/2}} = ab (1 + Ghat)
//   u_{b,a}  ... u_{b,a^{(p^m-1)/2}}  = b  (1 + Ghat)
//   a = u_{ab,a} ... u_{ab,a^{(p^m-1)/2}} u_{b,a^{(p^m-1)/2}} ... u_{b,a}
inline bool verify_generator_product_identities(const AlgebraCtxPtr& ctx) {
    const u64 pm = ctx->pm();
    const ff::FieldElem one = ctx->field()->one();
    const AlgebraElem ghat1 = AlgebraElem::one(ctx) + AlgebraElem::group_sum(ctx);

    AlgebraElem prod_ab = AlgebraElem::one(ctx), prod_b = AlgebraElem::one(ctx);
    for (u64 i = 1; i <= (pm - 1) / 2; ++i) prod_ab = prod_ab * b_generator(ctx, one, i, 1);
    for (u64 i = 1; i <= (pm - 1) / 2; ++i) prod_b = prod_b * b_generator(ctx, one, i, 0);

    bool ok = prod_ab == AlgebraElem::monomial(ctx, true, 1) * ghat1;
    ok = ok && prod_b == AlgebraElem::monomial(ctx, true, 0) * ghat1;

    AlgebraElem prod_a = prod_ab;
    for (u64 i = (pm - 1) / 2; i >= 1; --i) prod_a = prod_a * b_generator(ctx, one, i, 0);
    ok = ok && prod_a == AlgebraElem::monomial(ctx, false, 1);
    return ok;
}

struct ClosureOutcome {
    bool cap_exceeded = false;
    numtheory::BigCount order = 0;
};

// Breadth-first closure of <B> in the image space (tuples of 2x2 blocks),
// which is faithful on B since ker T''' = {1}.  Returns the packed-image key
// set, empty on cap overrun.
inline std::unordered_set<std::string> closure_keys(const WedderburnCtx& w, const GeneratorSet& gens,
                                                    u64 cap, bool* cap_exceeded) {
    std::vector<WedderburnImage> gen_images;
    gen_images.reserve(gens.gens.size());
    for (const auto& g : gens.gens) {
        WedderburnImage img = w.decompose(g.elem);
        if (!w.image_is_unit(img)) throw std::invalid_argument("closure_order: generator is not a unit");
        gen_images.push_back(std::move(img));
    }

    std::unordered_set<std::string> seen;
    std::deque<WedderburnImage> frontier;
    WedderburnImage id = w.identity_image();
    seen.insert(detail::pack_key(id.packed_bits()));
    frontier.push_back(std::move(id));
    *cap_exceeded = false;

    while (!frontier.empty()) {
        WedderburnImage cur = std::move(frontier.front());
        frontier.pop_front();
        for (const auto& g : gen_images) {
            WedderburnImage next;
            next.scalar = cur.scalar * g.scalar;
            next.blocks.reserve(cur.blocks.size());
            for (std::size_t i = 0; i < cur.blocks.size(); ++i) next.blocks.push_back(cur.blocks[i] * g.blocks[i]);
            std::string key = detail::pack_key(next.packed_bits());
            if (seen.insert(std::move(key)).second) {
                if (seen.size() > cap) {
                    *cap_exceeded = true;
                    return {};
                }
                frontier.push_back(std::move(next));
            }
        }
    }
    return seen;
}

inline ClosureOutcome closure_order(const WedderburnCtx& w, const GeneratorSet& gens, u64 cap = 10'000'000) {
    bool exceeded = false;
    auto keys = closure_keys(w, gens, cap, &exceeded);
    if (exceeded) return {true, 0};
    return {false, numtheory::BigCount(keys.size())};
}

// Word over B; generators are involutions, so the inversion flag is always
// false here, but it is part of the serialized schema.
struct WordRef {
    unsigned i = 0;
    u64 j = 0, k = 0;
    bool inverted = false;
};

struct Word {
    std::vector<WordRef> refs;

    nlohmann::json to_json() const {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& r : refs) a.push_back({{"i", r.i}, {"j", r.j}, {"k", r.k}, {"inv", r.inverted}});
        return a;
    }
};

inline AlgebraElem word_product(const GeneratorSet& gens, const Word& word) {
    AlgebraElem prod = AlgebraElem::one(gens.ctx);
    for (const auto& r : word.refs) prod = prod * gens.at(r.i, r.j, r.k).elem;  // involutions: inverse = self
    return prod;
}

// Preimage in <B> of (1, I, ..., E, ..., I) with E elementary unitriangular in
// one component.  Follows the interpolation route: a polynomial over F that
// vanishes at every other component's trace, expanded in the symmetric basis
// {1, a^q + a^-q} and realized as a product of B generators with k = 0
// (lower) or k = p^m - 2 (upper).
inline Word sl2_preimage(const WedderburnCtx& w, const GeneratorSet& gens, const WedderburnImage& target) {
    const auto& comps = w.components();
    if (target.blocks.size() != comps.size() || !(target.scalar == w.algebra()->field()->one()))
        throw std::invalid_argument("sl2_preimage: target not in SL2 product shape");

    std::size_t idx = comps.size();
    bool lower = true;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const Mat2& b = target.blocks[i];
        if (b.is_identity()) continue;
        const ff::FieldCtx* amb = comps[i].ambient.get();
        bool is_lower = b.e00 == amb->one() && b.e11 == amb->one() && b.e01.is_zero();
        bool is_upper = b.e00 == amb->one() && b.e11 == amb->one() && b.e10.is_zero();
        if (idx != comps.size() || (!is_lower && !is_upper))
            throw std::invalid_argument("sl2_preimage: target block not elementary unitriangular");
        idx = i;
        lower = is_lower;
    }
    Word word;
    if (idx == comps.size()) return word;  // identity target

    const ff::FieldCtxPtr& F = w.algebra()->field();
    const u64 pm = w.algebra()->pm();
    const u64 half = (pm - 1) / 2;
    const u64 k0 = lower ? 0 : pm - 2;
    const wedderburn::ComponentSpec& comp = comps[idx];
    const ff::FieldElem entry = lower ? target.blocks[idx].e10 : target.blocks[idx].e01;

    // P(c_rs) = entry / c_rs, P = 0 at the other components; the generator
    // with symmetric part z contributes a triangular entry z(gamma) * c.
    ff::FPoly P = w.vanishing_interpolant(idx, entry * comp.trace.inverse());

    // expand P(c) = sum_h A_h (gamma + gamma^-1)^h over {1, gamma^e + gamma^-e}
    ff::FieldElem acc0 = F->zero();
    std::vector<ff::FieldElem> acc(half + 1, F->zero());
    for (int h = 0; h <= P.degree(); ++h) {
        ff::FieldElem A = P.coeff(static_cast<std::size_t>(h));
        if (A.is_zero()) continue;
        for (int i = 0; i <= h; ++i) {
            if ((static_cast<unsigned>(i) & static_cast<unsigned>(h - i)) != 0) continue;  // C(h,i) even
            int e = h - 2 * i;
            if (e < 0) continue;  // mirrored term of a positive exponent
            if (e == 0) {
                acc0 += A;
            } else {
                u64 em = static_cast<u64>(e) % pm;
                if (em == 0) continue;  // gamma^e + gamma^-e = 0 when p^m | e
                acc[std::min(em, pm - em)] += A;
            }
        }
    }

    auto push_bits = [&](const ff::FieldElem& coeff, u64 j) {
        u64 bits = coeff.bits();
        while (bits) {
            unsigned i = static_cast<unsigned>(__builtin_ctzll(bits));
            bits &= bits - 1;
            word.refs.push_back({i, j, k0, false});
        }
    };
    for (u64 e = 1; e <= half; ++e)
        if (!acc[e].is_zero()) push_bits(acc[e], e);
    if (!acc0.is_zero())  // constant part: sum over every symmetric index is 1 at each component
        for (u64 e = 1; e <= half; ++e) push_bits(acc0, e);

    if (!(w.decompose(word_product(gens, word)) == target))
        throw std::logic_error("sl2_preimage: constructed word does not hit the target (bug)");
    return word;
}

// Orders of every factor in U = U_* x W x <x> and U_* = B x (1 + F*Ghat).
struct StructureReport {
    numtheory::BigCount unit_order;     // |U|
    numtheory::BigCount unitary_order;  // |U_*|
    numtheory::BigCount b_order;        // |B| = prod (q_r (q_r^2 - 1))^{k_r'}
    numtheory::BigCount kernel_order;   // |1 + F*Ghat| = 2^n
    numtheory::BigCount w_order;        // |W| = prod (2^{n t_r} - 1)^{k_r'}
    numtheory::BigCount x_order;        // |<x>| = 2^n - 1
    std::vector<std::string> labels;

    nlohmann::json to_json() const {
        return {{"unit_order", unit_order.str()},     {"unitary_order", unitary_order.str()},
                {"b_order", b_order.str()},           {"kernel_order", kernel_order.str()},
                {"w_order", w_order.str()},           {"x_order", x_order.str()},
                {"labels", labels}};
    }
};

inline StructureReport structure_report(const numtheory::OrderTower& tw) {
    StructureReport rep;
    rep.unit_order = numtheory::unit_group_order(tw);
    rep.unitary_order = numtheory::unitary_group_order(tw);
    rep.b_order = numtheory::b_subgroup_order(tw);
    rep.kernel_order = numtheory::BigCount(1) << tw.n;
    rep.w_order = numtheory::w_subgroup_order(tw);
    rep.x_order = (numtheory::BigCount(1) << tw.n) - 1;

    if (rep.unit_order != rep.unitary_order * rep.w_order * rep.x_order)
        throw std::logic_error("structure_report: |U| != |U_*||W||<x>| (bug)");
    if (rep.unitary_order != rep.b_order * rep.kernel_order)
        throw std::logic_error("structure_report: |U_*| != |B| 2^n (bug)");

    rep.labels.push_back("U = U_* x W x <x>");
    rep.labels.push_back("U_* = B x (1 + F*Ghat)");
    std::string b = "B = ";
    for (unsigned r = 0; r < tw.m; ++r)
        for (u64 s = 0; s < tw.kp[r]; ++s) {
            if (b.size() > 4) b += " x ";
            b += "SL2(GF(" + tw.q[r].str() + "))";
        }
    rep.labels.push_back(b);
    return rep;
}

}  // namespace dunits::unitary
