#pragma once

// Command-line front end.  Exit codes: 0 success, 1 verification failure,
// 2 usage error (including named guard violations).  Identical flags produce
// byte-identical stdout; timing goes to stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dunits/oracle.hpp"
#include "dunits/unitary.hpp"

namespace dunits::cli {

using u64 = std::uint64_t;

namespace detail_cli {

inline std::string mat_to_string(const wedderburn::Mat2& m) {
    return "[[" + m.e00.to_hex() + "," + m.e01.to_hex() + "],[" + m.e10.to_hex() + "," + m.e11.to_hex() +
           "]]";
}

inline std::string image_to_string(const wedderburn::WedderburnImage& img) {
    std::string s = "scalar " + img.scalar.to_hex();
    for (const auto& b : img.blocks) s += ", block " + mat_to_string(b);
    return s;
}

inline grpalg::AlgebraElem random_element(const grpalg::AlgebraCtxPtr& ctx, std::mt19937_64& rng) {
    grpalg::AlgebraElem e{ctx};
    const u64 mask = (u64{1} << ctx->params().n) - 1;
    for (u64 i = 0; i < ctx->pm(); ++i) {
        e.set_rot(i, ctx->field()->from_bits(rng() & mask));
        e.set_ref(i, ctx->field()->from_bits(rng() & mask));
    }
    return e;
}

// order-formula size guard: results beyond ~10^6 bits are not printable
inline void check_order_size(const numtheory::OrderTower& tw) {
    u64 bits = 2 * tw.n;
    for (unsigned r = 0; r < tw.m; ++r) {
        bits += 4 * tw.n * tw.t[r] * tw.kp[r];
        if (bits > 1000000)
            throw std::invalid_argument("order size guard (result exceeds 10^6 bits) exceeded");
    }
}

struct VerifyRun {
    std::ostream& out;
    bool all_ok = true;
    void check(const std::string& name, bool ok) {
        out << (ok ? "ok   " : "FAIL ") << name << "\n";
        all_ok = all_ok && ok;
    }
};

}  // namespace detail_cli

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"unit group and unitary subgroup of F_{2^n} D_{2p^m}"};
    app.require_subcommand(1);

    unsigned p = 0, m = 0, n = 0;
    bool json = false;
    std::string element;
    u64 cap = 10'000'000;
    u64 seed = 0;
    int threads = 0;
    std::string csv_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--p", p, "odd prime p")->required();
        sub->add_option("--m", m, "prime-power exponent m")->required();
        sub->add_option("--n", n, "field exponent n (F = GF(2^n))")->required();
        sub->add_flag("--json", json, "machine-readable JSON output");
    };

    CLI::App* c_order = app.add_subcommand("order", "orders of U and U_* from the closed formulas");
    add_common(c_order);
    CLI::App* c_tower = app.add_subcommand("tower", "the multiplicative-order tower and derived parameters");
    add_common(c_tower);
    CLI::App* c_dec = app.add_subcommand("decompose", "image of an element under the 2x2 decomposition");
    add_common(c_dec);
    c_dec->add_option("--element", element, "element expression, e.g. \"1 + a + a^2*b\"")->required();
    CLI::App* c_gens = app.add_subcommand("generators", "list the unitary generator set B");
    add_common(c_gens);
    CLI::App* c_clo = app.add_subcommand("closure", "order of <B> by breadth-first closure");
    add_common(c_clo);
    c_clo->add_option("--cap", cap, "closure element cap");
    CLI::App* c_ver = app.add_subcommand("verify", "run the structural verification suite");
    add_common(c_ver);
    c_ver->add_option("--seed", seed, "seed for randomized property sampling");
    CLI::App* c_sw = app.add_subcommand("sweep", "exhaustive brute-force enumeration (desk scale)");
    add_common(c_sw);
    c_sw->add_option("--threads", threads, "worker threads (default: DUNITS_THREADS or 1)");
    c_sw->add_option("--csv", csv_path, "append the result row to a CSV file");
    CLI::App* c_rep = app.add_subcommand("report", "direct-product structure report");
    add_common(c_rep);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        auto tower = numtheory::build_tower(p, m, n);

        if (*c_order) {
            detail_cli::check_order_size(tower);
            auto u = numtheory::unit_group_order(tower);
            auto us = numtheory::unitary_group_order(tower);
            if (json)
                out << nlohmann::json{{"p", p},
                                      {"m", m},
                                      {"n", n},
                                      {"unit_group_order", u.str()},
                                      {"unitary_group_order", us.str()}}
                           .dump()
                    << "\n";
            else
                out << "|U| = " << u.str() << ", |U_*| = " << us.str() << "\n";
            return 0;
        }

        if (*c_tower) {
            for (unsigned r = 0; r < tower.m; ++r)
                if (static_cast<u64>(n) * tower.t[r] > 100000)
                    throw std::invalid_argument("tower print guard (n*t_r <= 10^5) exceeded");
            if (json) {
                out << tower.to_json().dump() << "\n";
            } else {
                out << "p=" << p << " m=" << m << " n=" << n << " d=" << tower.d << " jump=" << tower.jump
                    << " parity=" << (tower.d_even ? "even" : "odd") << "\n";
                out << "r o_r k_r t_r k_r' q_r\n";
                for (unsigned r = 0; r < tower.m; ++r)
                    out << r + 1 << " " << tower.o[r] << " " << tower.k[r] << " " << tower.t[r] << " "
                        << tower.kp[r] << " " << tower.q[r].str() << "\n";
            }
            return 0;
        }

        auto w = wedderburn::WedderburnCtx::build(tower);

        if (*c_dec) {
            grpalg::AlgebraElem x = grpalg::parse_element(w.algebra(), element);
            auto img = w.decompose(x);
            if (json)
                out << w.image_to_json(img).dump() << "\n";
            else
                out << detail_cli::image_to_string(img) << "\n";
            return 0;
        }

        if (*c_gens) {
            auto B = unitary::build_B(w.algebra());
            if (json) {
                nlohmann::json a = nlohmann::json::array();
                for (const auto& g : B.gens)
                    a.push_back({{"i", g.i}, {"j", g.j}, {"k", g.k}, {"element", g.elem.to_json()}});
                out << a.dump() << "\n";
            } else {
                for (const auto& g : B.gens)
                    out << "i=" << g.i << " j=" << g.j << " k=" << g.k << "  " << g.elem.to_string() << "\n";
            }
            return 0;
        }

        if (*c_clo) {
            auto B = unitary::build_B(w.algebra());
            auto res = unitary::closure_order(w, B, cap);
            if (res.cap_exceeded) {
                err << "closure cap exceeded (--cap " << cap << ")\n";
                return 1;
            }
            if (json)
                out << nlohmann::json{{"order", res.order.str()}, {"cap_exceeded", false}}.dump() << "\n";
            else
                out << "|<B>| = " << res.order.str() << "\n";
            return 0;
        }

        if (*c_ver) {
            detail_cli::VerifyRun run{out};
            // tower recurrence against direct order computation, per level
            bool rec = true;
            for (unsigned r = 1; r <= m; ++r) {
                u64 pr = numtheory::pow_u64_checked(p, r);
                rec = rec && tower.o[r - 1] == numtheory::mult_order(numtheory::powmod_u64(2, n, pr), pr);
            }
            run.check("tower recurrence vs direct orders", rec);
            // pairing predicate vs literal coset membership
            bool parity = true;
            for (unsigned r = 1; r <= m; ++r) {
                u64 pr = numtheory::pow_u64_checked(p, r);
                auto cosets = numtheory::cyclotomic_cosets(pr, numtheory::powmod_u64(2, n, pr), p);
                for (const auto& c : cosets) {
                    bool has_neg = std::find(c.begin(), c.end(), pr - c.front()) != c.end();
                    parity = parity && has_neg == numtheory::pairs_with_inverse(tower);
                }
            }
            run.check("pairing predicate vs coset membership", parity);

            bool diag = true, rep_ok = true;
            const u64 pm = w.algebra()->pm();
            for (const auto& comp : w.components()) {
                diag = diag && w.diag_conjugacy_check(comp);
                const auto I = wedderburn::Mat2::identity(comp.ambient.get());
                rep_ok = rep_ok && comp.rep_rot[pm - 1] * comp.rep_rot[1] == I;
                rep_ok = rep_ok && w.rep_T(comp, true, 0) * w.rep_T(comp, true, 0) == I;
                rep_ok = rep_ok && w.rep_T(comp, true, 0) * comp.rep_rot[1] * w.rep_T(comp, true, 0) ==
                                       comp.rep_rot[pm - 1];
                for (u64 i = 0; i < pm && rep_ok; ++i)
                    rep_ok = rep_ok && comp.rep_rot[i].det() == comp.ambient->one() &&
                             comp.rep_ref[i].det() == comp.ambient->one();
            }
            run.check("diagonalization identity T = M S M^-1", diag);
            run.check("representation sanity (orders, dihedral relation, det 1)", rep_ok);

            auto kc = w.kernel_rank_check();
            run.check("dimension identity 1 + 4 sum t_r k_r' = 2p^m - 1", kc.dimension_identity);
            run.check("decomposition rank 2p^m - 1, kernel = span{Ghat}",
                      kc.rank == 2 * pm - 1 && kc.kernel_is_ghat_span);
            run.check("generator product identities (a, ab(1+Ghat), b(1+Ghat))",
                      unitary::verify_generator_product_identities(w.algebra()));

            std::mt19937_64 rng(seed);
            bool assoc = true, anti = true, aug_hom = true, dec_mult = true, unit_agree = true;
            for (int it = 0; it < 200; ++it) {
                auto x = detail_cli::random_element(w.algebra(), rng);
                auto y = detail_cli::random_element(w.algebra(), rng);
                auto z = detail_cli::random_element(w.algebra(), rng);
                assoc = assoc && (x * y) * z == x * (y * z) && x * (y + z) == x * y + x * z;
                anti = anti && grpalg::star(x * y) == grpalg::star(y) * grpalg::star(x);
                aug_hom = aug_hom && grpalg::augmentation(x * y) ==
                                         grpalg::augmentation(x) * grpalg::augmentation(y);
                auto ix = w.decompose(x), iy = w.decompose(y), ixy = w.decompose(x * y);
                bool mult = ixy.scalar == ix.scalar * iy.scalar;
                for (std::size_t c = 0; c < ix.blocks.size(); ++c)
                    mult = mult && ixy.blocks[c] == ix.blocks[c] * iy.blocks[c];
                dec_mult = dec_mult && mult;
                unit_agree = unit_agree && w.image_is_unit(ix) == grpalg::try_invert(x).has_value();
            }
            run.check("associativity / distributivity (200 random triples)", assoc);
            run.check("star is an anti-automorphism (200 random pairs)", anti);
            run.check("augmentation is multiplicative (200 random pairs)", aug_hom);
            run.check("decomposition is multiplicative (200 random pairs)", dec_mult);
            run.check("block-determinant unit test agrees with inversion (200 samples)", unit_agree);
            return run.all_ok ? 0 : 1;
        }

        if (*c_sw) {
            oracle::SweepOptions opt;
            if (threads > 0) {
                opt.threads = static_cast<unsigned>(threads);
            } else if (const char* env = std::getenv("DUNITS_THREADS")) {
                int v = std::atoi(env);
                if (v > 0) opt.threads = static_cast<unsigned>(v);
            }
            auto res = oracle::sweep(w, opt);
            if (!csv_path.empty()) {
                std::ifstream probe(csv_path);
                bool need_header = !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
                probe.close();
                std::ofstream f(csv_path, std::ios::app);
                if (need_header) f << oracle::SweepResult::csv_header() << "\n";
                f << res.csv_row() << "\n";
            }
            if (json) {
                out << res.to_json(false).dump() << "\n";  // stdout stays byte-identical across runs
            } else {
                out << "total " << res.total.str() << "\n";
                out << "units " << res.units << " (formula " << numtheory::unit_group_order(tower).str()
                    << ") " << (res.unit_formula_match ? "OK" : "MISMATCH") << "\n";
                out << "unitary " << res.unitary << " (formula "
                    << numtheory::unitary_group_order(tower).str() << ") "
                    << (res.unitary_formula_match ? "OK" : "MISMATCH") << "\n";
            }
            err << "elapsed " << res.elapsed_seconds << " s\n";
            return res.unit_formula_match && res.unitary_formula_match ? 0 : 1;
        }

        if (*c_rep) {
            detail_cli::check_order_size(tower);
            auto rep = unitary::structure_report(tower);
            if (json) {
                out << rep.to_json().dump() << "\n";
            } else {
                out << "|U|        = " << rep.unit_order.str() << "\n";
                out << "|U_*|      = " << rep.unitary_order.str() << "\n";
                out << "|B|        = " << rep.b_order.str() << "\n";
                out << "|1+FGhat|  = " << rep.kernel_order.str() << "\n";
                out << "|W|        = " << rep.w_order.str() << "\n";
                out << "|<x>|      = " << rep.x_order.str() << "\n";
                for (const auto& l : rep.labels) out << l << "\n";
            }
            return 0;
        }
    } catch (const grpalg::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace dunits::cli
