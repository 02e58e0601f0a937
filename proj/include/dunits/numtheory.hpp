#pragma once

// Multiplicative-order towers mod p^s, cyclotomic-coset bookkeeping, and the
// closed-form orders of the unit group and its unitary subgroup.  All counts
// are exact arbitrary-precision integers; no floating point anywhere.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace dunits::numtheory {

using BigCount = boost::multiprecision::cpp_int;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod_u64(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

inline u64 powmod_u64(u64 base, u64 exp, u64 m) {
    u64 r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return r;
}

// deterministic Miller-Rabin for 64-bit inputs
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while (!(d & 1)) d >>= 1, ++s;
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

inline u64 pollard_rho(u64 n) {
    if (!(n & 1)) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 x) { return (mulmod_u64(x, x, n) + c) % n; };
        u64 x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

inline void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace detail

// prime factorization as (prime, exponent) pairs, primes ascending
inline std::vector<std::pair<u64, unsigned>> factor_u64(u64 n) {
    std::vector<u64> primes;
    u64 rest = n;
    for (u64 d = 2; d < (1u << 16) && d * d <= rest; ++d)
        while (rest % d == 0) {
            primes.push_back(d);
            rest /= d;
        }
    if (rest > 1) detail::factor_rec(rest, primes);
    std::sort(primes.begin(), primes.end());
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 p : primes) {
        if (!out.empty() && out.back().first == p)
            ++out.back().second;
        else
            out.emplace_back(p, 1);
    }
    return out;
}

inline u64 euler_phi(u64 n) {
    u64 r = n;
    for (auto [p, e] : factor_u64(n)) r = r / p * (p - 1);
    return r;
}

// Least e >= 1 with base^e = 1 mod modulus.  Starts from the group order and
// strips primes rather than stepping, so large moduli stay instant.
inline u64 mult_order(u64 base, u64 modulus) {
    if (modulus < 2) throw std::invalid_argument("mult_order: modulus must be >= 2");
    base %= modulus;
    if (std::gcd(base, modulus) != 1) throw std::invalid_argument("mult_order: inputs not coprime");
    u64 e = euler_phi(modulus);
    for (auto [p, exp] : factor_u64(e))
        while (e % p == 0 && powmod_u64(base, e / p, modulus) == 1) e /= p;
    return e;
}

// Orbits of multiplication by `mult` on the units of Z/modulus that are
// coprime to p (i.e. on exponents of primitive p^r-th roots of unity when
// modulus = p^r).  Each orbit is sorted ascending; orbits sorted by smallest
// member.  `p` may be 1 to keep every unit.
inline std::vector<std::vector<u64>> cyclotomic_cosets(u64 modulus, u64 mult, u64 p = 1) {
    std::vector<bool> seen(modulus, false);
    std::vector<std::vector<u64>> cosets;
    for (u64 j = 1; j < modulus; ++j) {
        if (seen[j] || (p > 1 && j % p == 0)) continue;
        std::vector<u64> orbit;
        u64 cur = j;
        do {
            seen[cur] = true;
            orbit.push_back(cur);
            cur = mulmod_u64(cur, mult % modulus, modulus);
        } while (cur != j);
        std::sort(orbit.begin(), orbit.end());
        cosets.push_back(std::move(orbit));
    }
    return cosets;
}

// All order-tower parameters for one (p, m, n).
struct OrderTower {
    unsigned p = 0, m = 0, n = 0;
    u64 d = 0;           // o_{p}(2^n)
    unsigned jump = 0;   // largest level with o = d (m if no jump in range)
    bool d_even = false;
    std::vector<u64> o;   // o[r-1] = o_{p^r}(2^n)
    std::vector<u64> k;   // number of irreducible factors of the p^r-th cyclotomic polynomial
    std::vector<u64> t;   // [F(gamma+gamma^-1):F] at level r
    std::vector<u64> kp;  // k_r' = number of 2x2 components at level r
    std::vector<BigCount> q;  // q_r = 2^{n t_r} = size of the component field

    u64 pm() const {
        u64 v = 1;
        for (unsigned i = 0; i < m; ++i) v *= p;
        return v;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"p", p}, {"m", m}, {"n", n},        {"d", d},
                         {"jump", jump},     {"d_even", d_even}};
        j["o"] = o;
        j["k"] = k;
        j["t"] = t;
        j["kp"] = kp;
        std::vector<std::string> qs;
        for (const auto& v : q) qs.push_back(v.str());
        j["q"] = qs;
        return j;
    }
};

inline u64 pow_u64_checked(u64 base, unsigned exp) {
    u64 r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (r > std::numeric_limits<u64>::max() / base) throw std::overflow_error("p^r overflows 64 bits");
        r *= base;
    }
    return r;
}

// Builds the tower, computing every o_r directly via mult_order and again via
// the jump recurrence; a mismatch means an arithmetic bug, not new math.
inline OrderTower build_tower(unsigned p, unsigned m, unsigned n) {
    if (p < 3 || p % 2 == 0 || !is_prime_u64(p)) throw std::invalid_argument("build_tower: p must be an odd prime");
    if (m < 1) throw std::invalid_argument("build_tower: m must be >= 1");
    if (n < 1) throw std::invalid_argument("build_tower: n must be >= 1");

    OrderTower tw;
    tw.p = p;
    tw.m = m;
    tw.n = n;

    for (unsigned r = 1; r <= m; ++r) {
        u64 mod = pow_u64_checked(p, r);
        tw.o.push_back(mult_order(powmod_u64(2, n, mod), mod));
    }
    tw.d = tw.o[0];
    tw.d_even = tw.d % 2 == 0;

    tw.jump = m;
    for (unsigned r = 1; r < m; ++r)
        if (tw.o[r] != tw.d) {
            tw.jump = r;
            break;
        }
    // tower shape: constant d up to the jump, then one factor p per level
    for (unsigned r = 1; r <= m; ++r) {
        u64 expected = r <= tw.jump ? tw.d : tw.d * pow_u64_checked(p, r - tw.jump);
        if (tw.o[r - 1] != expected) throw std::logic_error("build_tower: tower recurrence mismatch (bug)");
    }

    for (unsigned r = 1; r <= m; ++r) {
        u64 phi = pow_u64_checked(p, r - 1) * (p - 1);
        if (phi % tw.o[r - 1] != 0) throw std::logic_error("build_tower: o_r does not divide phi(p^r) (bug)");
        u64 kr = phi / tw.o[r - 1];
        u64 tr = tw.d_even ? tw.o[r - 1] / 2 : tw.o[r - 1];
        u64 kpr;
        if (tw.d_even) {
            kpr = kr;
        } else {
            if (kr % 2 != 0) throw std::logic_error("build_tower: k_r odd with d odd (bug)");
            kpr = kr / 2;
        }
        tw.k.push_back(kr);
        tw.t.push_back(tr);
        tw.kp.push_back(kpr);
        tw.q.push_back(BigCount(1) << static_cast<unsigned>(n * tr));
    }
    return tw;
}

// zeta^j and zeta^-j are roots of the same irreducible factor iff 2 | d
inline bool pairs_with_inverse(const OrderTower& tw) { return tw.d_even; }

inline BigCount pow_big(const BigCount& base, u64 exp) {
    BigCount r = 1, b = base;
    while (exp) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

// |U(FD_{2p^m})| = 2^n (2^n - 1) prod_r ((q_r^2 - 1)(q_r^2 - q_r))^{k_r'}
inline BigCount unit_group_order(const OrderTower& tw) {
    BigCount r = (BigCount(1) << tw.n) * ((BigCount(1) << tw.n) - 1);
    for (unsigned i = 0; i < tw.m; ++i) {
        const BigCount& q = tw.q[i];
        r *= pow_big((q * q - 1) * (q * q - q), tw.kp[i]);
    }
    return r;
}

// |B(FD_{2p^m})| = prod_r (q_r (q_r^2 - 1))^{k_r'}  (product of SL2 orders)
inline BigCount b_subgroup_order(const OrderTower& tw) {
    BigCount r = 1;
    for (unsigned i = 0; i < tw.m; ++i) {
        const BigCount& q = tw.q[i];
        r *= pow_big(q * (q * q - 1), tw.kp[i]);
    }
    return r;
}

// |U_*(FD_{2p^m})| = 2^n |B|  (B times the elementary abelian 1 + F*Ghat)
inline BigCount unitary_group_order(const OrderTower& tw) {
    return (BigCount(1) << tw.n) * b_subgroup_order(tw);
}

// |W| = prod_r (2^{n t_r} - 1)^{k_r'}  (order of the central complement W)
inline BigCount w_subgroup_order(const OrderTower& tw) {
    BigCount r = 1;
    for (unsigned i = 0; i < tw.m; ++i) r *= pow_big(tw.q[i] - 1, tw.kp[i]);
    return r;
}

}  // namespace dunits::numtheory
