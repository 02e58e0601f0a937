#pragma once

// Brute-force ground truth: exhaustive enumeration of FD_{2p^m} at desk
// scale, counting units (through the block-determinant test, spot-checked
// against the regular representation) and unitary units, plus commutator
// closures at the smallest scales.
//
// Enumeration is Gray-coded over the 2 n p^m coefficient bits: successive
// elements differ in one basis coefficient, so each step updates the
// decomposition image with one precomputed XOR instead of a full decompose.

#include <chrono>
#include <cstdint>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "dunits/detail_keys.hpp"
#include "dunits/grpalg.hpp"
#include "dunits/numtheory.hpp"
#include "dunits/wedderburn.hpp"

namespace dunits::oracle {

using u64 = std::uint64_t;
using grpalg::AlgebraElem;
using wedderburn::WedderburnCtx;

struct SweepOptions {
    unsigned threads = 1;
    u64 spot_check_stride = 1024;  // every stride-th element re-verified with try_invert
    bool record_units = false;     // fill SweepData::unit_bitmap
};

struct SweepData {
    std::vector<u64> unit_bitmap;  // bit per coefficient mask
    bool unit_bit(u64 mask) const { return unit_bitmap[mask >> 6] >> (mask & 63) & 1; }
};

struct SweepResult {
    unsigned p = 0, m = 0, n = 0;
    numtheory::BigCount total = 0;  // 2^{2 n p^m}
    u64 units = 0, unitary = 0;
    double elapsed_seconds = 0;
    bool unit_formula_match = false;
    bool unitary_formula_match = false;

    nlohmann::json to_json(bool include_elapsed = true) const {
        nlohmann::json j{{"p", p},
                         {"m", m},
                         {"n", n},
                         {"total", total.str()},
                         {"units", units},
                         {"unitary", unitary},
                         {"unit_formula_match", unit_formula_match},
                         {"unitary_formula_match", unitary_formula_match}};
        if (include_elapsed) j["elapsed_ms"] = elapsed_seconds * 1000.0;
        return j;
    }

    static std::string csv_header() {
        return "p,m,n,total,units,unitary,unit_formula_match,unitary_formula_match,elapsed_ms";
    }
    std::string csv_row() const {
        return std::to_string(p) + "," + std::to_string(m) + "," + std::to_string(n) + "," + total.str() +
               "," + std::to_string(units) + "," + std::to_string(unitary) + "," +
               (unit_formula_match ? "1" : "0") + "," + (unitary_formula_match ? "1" : "0") + "," +
               std::to_string(elapsed_seconds * 1000.0);
    }
};

// coefficient mask -> algebra element; bit (g_idx * n + w) is the alpha^w
// component of basis element g_idx (rotations first, then reflections)
inline AlgebraElem element_from_mask(const grpalg::AlgebraCtxPtr& ctx, u64 mask) {
    const u64 pm = ctx->pm();
    const unsigned n = ctx->params().n;
    AlgebraElem e{ctx};
    for (u64 g = 0; g < 2 * pm; ++g) {
        u64 bits = mask >> (g * n) & ((u64{1} << n) - 1);
        if (!bits) continue;
        if (g < pm)
            e.set_rot(g, ctx->field()->from_bits(bits));
        else
            e.set_ref(g - pm, ctx->field()->from_bits(bits));
    }
    return e;
}

// Iterates every coefficient assignment of FD_{2p^m}.  Guard: 2 n p^m <= 20.
inline SweepResult sweep(const WedderburnCtx& w, const SweepOptions& opt = {}, SweepData* data = nullptr) {
    const auto& tw = w.tower();
    const grpalg::AlgebraCtxPtr& ctx = w.algebra();
    const u64 pm = ctx->pm();
    const unsigned n = tw.n;
    const unsigned nbits = static_cast<unsigned>(2 * n * pm);
    if (nbits > 20) throw std::invalid_argument("sweep: guard (2*n*p^m <= 20) exceeded");

    const auto t0 = std::chrono::steady_clock::now();

    // flattened image layout: [scalar, comp0 e00,e01,e10,e11, comp1 ...]
    const auto& comps = w.components();
    const std::size_t flat_len = 1 + 4 * comps.size();
    std::vector<std::vector<u64>> delta(nbits, std::vector<u64>(flat_len, 0));
    for (u64 g = 0; g < 2 * pm; ++g)
        for (unsigned wbit = 0; wbit < n; ++wbit) {
            auto& d = delta[g * n + wbit];
            ff::FieldElem coeff = ctx->field()->generator().pow(wbit);
            d[0] = coeff.bits();
            for (std::size_t c = 0; c < comps.size(); ++c) {
                ff::FieldElem emb = comps[c].ambient->embed(coeff);
                wedderburn::Mat2 mg = g < pm ? comps[c].rep_rot[g] : comps[c].rep_ref[g - pm];
                mg = mg.scaled(emb);
                d[1 + 4 * c + 0] = mg.e00.bits();
                d[1 + 4 * c + 1] = mg.e01.bits();
                d[1 + 4 * c + 2] = mg.e10.bits();
                d[1 + 4 * c + 3] = mg.e11.bits();
            }
        }
    std::vector<const ff::FieldCtx*> amb_ctx;
    for (const auto& c : comps) amb_ctx.push_back(c.ambient.get());

    const u64 count = u64{1} << nbits;
    const unsigned threads = std::max(1u, opt.threads);
    const u64 bitmap_words = (count + 63) / 64;

    struct WorkerOut {
        u64 units = 0, unitary = 0, spot_mismatch = 0;
        std::vector<u64> bitmap;
    };
    std::vector<WorkerOut> outs(threads);
    const bool want_bitmap = opt.record_units || data != nullptr;

    auto run_range = [&](u64 lo, u64 hi, WorkerOut& out) {
        if (want_bitmap) out.bitmap.assign(bitmap_words, 0);
        u64 mask = lo ^ (lo >> 1);  // Gray code of lo
        std::vector<u64> flat(flat_len, 0);
        for (unsigned b = 0; b < nbits; ++b)
            if (mask >> b & 1)
                for (std::size_t i = 0; i < flat_len; ++i) flat[i] ^= delta[b][i];

        for (u64 idx = lo; idx < hi; ++idx) {
            if (idx != lo) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(idx));
                mask ^= u64{1} << b;
                for (std::size_t i = 0; i < flat_len; ++i) flat[i] ^= delta[b][i];
            }
            bool unit = flat[0] != 0;
            for (std::size_t c = 0; unit && c < comps.size(); ++c) {
                const u64* e = &flat[1 + 4 * c];
                u64 det = amb_ctx[c]->mul_bits(e[0], e[3]) ^ amb_ctx[c]->mul_bits(e[1], e[2]);
                unit = det != 0;
            }
            if (unit) {
                ++out.units;
                if (want_bitmap) out.bitmap[mask >> 6] |= u64{1} << (mask & 63);
                AlgebraElem el = element_from_mask(ctx, mask);
                if (el * grpalg::star(el) == AlgebraElem::one(ctx)) ++out.unitary;
            }
            if (opt.spot_check_stride && idx % opt.spot_check_stride == 0) {
                AlgebraElem el = element_from_mask(ctx, mask);
                if (grpalg::try_invert(el).has_value() != unit) ++out.spot_mismatch;
            }
        }
    };

    if (threads == 1) {
        run_range(0, count, outs[0]);
    } else {
        std::vector<std::thread> pool;
        const u64 chunk = (count + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] { run_range(t * chunk, std::min(count, (t + 1) * chunk), outs[t]); });
        for (auto& th : pool) th.join();
    }

    SweepResult res;
    res.p = tw.p;
    res.m = tw.m;
    res.n = tw.n;
    res.total = numtheory::BigCount(1) << nbits;
    for (const auto& o : outs) {
        res.units += o.units;
        res.unitary += o.unitary;
        if (o.spot_mismatch)
            throw std::logic_error("sweep: block-determinant and regular-representation unit tests disagree (bug)");
    }
    if (data) {
        data->unit_bitmap.assign(bitmap_words, 0);
        for (const auto& o : outs)
            if (!o.bitmap.empty())
                for (u64 i = 0; i < bitmap_words; ++i) data->unit_bitmap[i] |= o.bitmap[i];
    }
    res.unit_formula_match = numtheory::BigCount(res.units) == numtheory::unit_group_order(tw);
    res.unitary_formula_match = numtheory::BigCount(res.unitary) == numtheory::unitary_group_order(tw);
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline SweepResult sweep(unsigned p, unsigned m, unsigned n, const SweepOptions& opt = {},
                         SweepData* data = nullptr) {
    WedderburnCtx w = WedderburnCtx::build(numtheory::build_tower(p, m, n));
    return sweep(w, opt, data);
}

// All units as algebra elements, in ascending mask order.
inline std::vector<AlgebraElem> units_from_sweep(const WedderburnCtx& w, const SweepData& data) {
    const grpalg::AlgebraCtxPtr& ctx = w.algebra();
    std::vector<AlgebraElem> units;
    for (u64 word = 0; word < data.unit_bitmap.size(); ++word) {
        u64 bits = data.unit_bitmap[word];
        while (bits) {
            unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
            bits &= bits - 1;
            units.push_back(element_from_mask(ctx, word * 64 + b));
        }
    }
    return units;
}

// Subgroup generated by all commutators [u,v] = u^-1 v^-1 u v of the given
// units, as a set of packed coefficient keys.  Guard: at most 10^5 elements.
inline std::set<std::string> commutator_subgroup_keys(const std::vector<AlgebraElem>& elems) {
    if (elems.empty()) throw std::invalid_argument("commutator closure: empty input");
    if (elems.size() > 100000) throw std::invalid_argument("commutator closure: guard (|U| <= 10^5) exceeded");
    const grpalg::AlgebraCtxPtr& ctx = elems[0].ctx();

    std::vector<AlgebraElem> inverses;
    inverses.reserve(elems.size());
    for (const auto& e : elems) {
        auto inv = grpalg::try_invert(e);
        if (!inv) throw std::invalid_argument("commutator closure: input contains a non-unit");
        inverses.push_back(std::move(*inv));
    }

    std::set<std::string> comm_keys;
    std::vector<AlgebraElem> generators;
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = 0; j < elems.size(); ++j) {
            AlgebraElem c = inverses[i] * inverses[j] * elems[i] * elems[j];
            if (comm_keys.insert(detail::pack_key(c.packed_bits())).second) generators.push_back(std::move(c));
        }

    std::set<std::string> seen;
    std::deque<AlgebraElem> frontier;
    AlgebraElem id = AlgebraElem::one(ctx);
    seen.insert(detail::pack_key(id.packed_bits()));
    frontier.push_back(std::move(id));
    while (!frontier.empty()) {
        AlgebraElem cur = std::move(frontier.front());
        frontier.pop_front();
        for (const auto& g : generators) {
            AlgebraElem next = cur * g;
            if (seen.insert(detail::pack_key(next.packed_bits())).second) frontier.push_back(std::move(next));
        }
    }
    return seen;
}

inline numtheory::BigCount commutator_closure(const std::vector<AlgebraElem>& elems) {
    return numtheory::BigCount(commutator_subgroup_keys(elems).size());
}

}  // namespace dunits::oracle
