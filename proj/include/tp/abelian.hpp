#pragma once

#include "tp/int_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_set>
#include <vector>

namespace tp {

struct FactorizationLimit : std::runtime_error {
    explicit FactorizationLimit(const std::string &m) : std::runtime_error(m) {}
};
struct OracleBound : std::runtime_error {
    explicit OracleBound(const std::string &m) : std::runtime_error(m) {}
};

// Finitely generated abelian group in canonical form: free rank plus the
// invariant-factor chain d_1 | d_2 | ... with every d_i >= 2.
struct FgAbelianGroup {
    std::size_t free_rank = 0;
    std::vector<Int> invariant_factors;

    bool is_trivial() const { return free_rank == 0 && invariant_factors.empty(); }
    bool operator==(const FgAbelianGroup &o) const {
        return free_rank == o.free_rank && invariant_factors == o.invariant_factors;
    }

    static FgAbelianGroup trivial() { return {}; }
    static FgAbelianGroup free(std::size_t r) { return {r, {}}; }
    static FgAbelianGroup cyclic(const Int &n) {
        if (n == 0)
            return free(1);
        FgAbelianGroup g;
        if (abs(n) > 1)
            g.invariant_factors.push_back(abs(n));
        return g;
    }

    std::string str() const {
        if (is_trivial())
            return "0";
        std::string s;
        for (std::size_t i = 0; i < free_rank; ++i)
            s += (s.empty() ? "Z" : " + Z");
        for (const Int &d : invariant_factors)
            s += (s.empty() ? "Z/" : " + Z/") + d.str();
        return s;
    }
};

// Presents Z^g modulo the column lattice of `relations` (g rows).  SNF
// diagonal entries equal to 1 are dropped, entries >= 2 become invariant
// factors, zero rows contribute free rank.
inline FgAbelianGroup cokernel(const IntMatrix &relations) {
    FgAbelianGroup g;
    if (relations.cols == 0) {
        g.free_rank = relations.rows;
        return g;
    }
    IntMatrix D = smith_normal_form(relations).D;
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < std::min(D.rows, D.cols); ++i) {
        const Int &d = D.at(i, i);
        if (d == 0)
            continue;
        ++nonzero;
        if (d >= 2)
            g.invariant_factors.push_back(d);
    }
    g.free_rank = relations.rows - nonzero;
    return g;
}

// Per-prime descending exponent partitions of the torsion part.
using PrimaryView = std::map<Int, std::vector<unsigned>>;

namespace detail {

constexpr std::int64_t trial_division_bound = 1000000;

// Complete factorization by trial division up to the bound.  A leftover
// below bound^2 is necessarily prime; anything larger is refused.
inline std::map<Int, unsigned> factorize(Int n) {
    std::map<Int, unsigned> f;
    for (std::int64_t p = 2; p <= trial_division_bound && Int(p) * p <= n; p == 2 ? p = 3 : p += 2)
        while (n % p == 0) {
            ++f[Int(p)];
            n /= p;
        }
    if (n > 1) {
        if (n > Int(trial_division_bound) * trial_division_bound)
            throw FactorizationLimit("invariant factor " + n.str() +
                                     " exceeds the trial-division bound");
        ++f[n];
    }
    return f;
}

} // namespace detail

inline PrimaryView primary_view(const FgAbelianGroup &g) {
    PrimaryView v;
    for (const Int &d : g.invariant_factors)
        for (const auto &[p, e] : detail::factorize(d))
            v[p].push_back(e);
    for (auto &[p, part] : v)
        std::sort(part.begin(), part.end(), std::greater<unsigned>());
    return v;
}

// Inverse of primary_view: the j-th largest invariant factor multiplies the
// j-th largest exponent of every prime.
inline FgAbelianGroup reconstruct(std::size_t free_rank, const PrimaryView &v) {
    std::size_t m = 0;
    for (const auto &[p, part] : v)
        m = std::max(m, part.size());
    std::vector<Int> factors(m, 1);
    for (const auto &[p, part] : v)
        for (std::size_t j = 0; j < part.size(); ++j) {
            Int q = 1;
            for (unsigned e = 0; e < part[j]; ++e)
                q *= p;
            factors[j] *= q;
        }
    std::reverse(factors.begin(), factors.end()); // ascending divisibility chain
    return FgAbelianGroup{free_rank, std::move(factors)};
}

// Decides whether a subgroup S of A and a surjection S -> B exist.  For
// finitely generated abelian groups this is equivalent to B being a quotient
// of A: passing to a subgroup never helps beyond what the counting rule
// already allows.  Rule: free_rank(B) <= free_rank(A), and for every prime p
// and j >= 1 the number of B-factors with p-exponent >= j may exceed the
// number of A-factors with p-exponent >= j by at most w = rank(A) - rank(B);
// the w spare free generators of A can each cover one factor simultaneously
// at every prime (Chinese remainder).
inline bool is_subquotient(const FgAbelianGroup &target, const FgAbelianGroup &source) {
    if (target.free_rank > source.free_rank)
        return false;
    const std::size_t w = source.free_rank - target.free_rank;
    PrimaryView mu = primary_view(target), lambda = primary_view(source);
    for (const auto &[p, mpart] : mu) {
        auto it = lambda.find(p);
        const std::vector<unsigned> empty;
        const std::vector<unsigned> &lpart = it == lambda.end() ? empty : it->second;
        for (unsigned j = 1; j <= mpart[0]; ++j) {
            std::size_t cb = 0, ca = 0;
            for (unsigned e : mpart)
                if (e >= j)
                    ++cb;
            for (unsigned e : lpart)
                if (e >= j)
                    ++ca;
            if (cb > w + ca)
                return false;
        }
    }
    return true;
}

namespace detail {

// A finite abelian group materialized on element indices 0..n-1 with an
// addition table, for the brute-force oracle.  n <= 64 so element sets fit
// in one 64-bit mask.
struct ConcreteGroup {
    std::size_t n = 1;
    std::vector<std::uint8_t> add; // n*n
    std::vector<std::uint8_t> ord; // element orders
    std::size_t exponent = 1;

    std::uint8_t sum(std::uint8_t x, std::uint8_t y) const { return add[x * n + y]; }
};

inline ConcreteGroup materialize(const FgAbelianGroup &g, std::size_t bound) {
    std::size_t n = 1;
    std::vector<std::size_t> radix;
    for (const Int &d : g.invariant_factors) {
        std::size_t di = static_cast<std::size_t>(d);
        radix.push_back(di);
        n *= di;
        if (n > bound)
            throw OracleBound("group order exceeds the oracle bound");
    }
    ConcreteGroup c;
    c.n = n;
    c.add.resize(n * n);
    c.ord.assign(n, 1);
    auto digits = [&](std::size_t x) {
        std::vector<std::size_t> t(radix.size());
        for (std::size_t k = 0; k < radix.size(); ++k) {
            t[k] = x % radix[k];
            x /= radix[k];
        }
        return t;
    };
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            auto dx = digits(x), dy = digits(y);
            std::size_t z = 0, mul = 1;
            for (std::size_t k = 0; k < radix.size(); ++k) {
                z += ((dx[k] + dy[k]) % radix[k]) * mul;
                mul *= radix[k];
            }
            c.add[x * n + y] = static_cast<std::uint8_t>(z);
        }
    for (std::size_t x = 1; x < n; ++x) {
        std::uint8_t cur = static_cast<std::uint8_t>(x);
        std::size_t k = 1;
        while (cur != 0) {
            cur = c.sum(cur, static_cast<std::uint8_t>(x));
            ++k;
        }
        c.ord[x] = static_cast<std::uint8_t>(k);
        c.exponent = std::lcm(c.exponent, k);
    }
    return c;
}

inline std::uint64_t closure(const ConcreteGroup &g, std::uint64_t seed) {
    std::uint64_t s = seed | 1u; // identity is element 0
    for (;;) {
        std::uint64_t next = s;
        for (std::size_t x = 0; x < g.n; ++x) {
            if (!(s >> x & 1))
                continue;
            for (std::size_t y = x; y < g.n; ++y)
                if (s >> y & 1)
                    next |= std::uint64_t(1) << g.sum(static_cast<std::uint8_t>(x),
                                                      static_cast<std::uint8_t>(y));
        }
        if (next == s)
            return s;
        s = next;
    }
}

inline std::vector<std::uint64_t> all_subgroups(const ConcreteGroup &g) {
    std::vector<std::uint64_t> out{std::uint64_t(1)};
    std::unordered_set<std::uint64_t> seen{std::uint64_t(1)};
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t h = out[i];
        for (std::size_t x = 1; x < g.n; ++x) {
            if (h >> x & 1)
                continue;
            std::uint64_t e = closure(g, h | (std::uint64_t(1) << x));
            if (seen.insert(e).second)
                out.push_back(e);
        }
    }
    return out;
}

// Depth-first search over homomorphisms S -> B given by generator images.
// Extending a partial map f on H to the generator g with image b is valid
// exactly when f(m g) = m b for the least m >= 1 with m g in H; the extension
// then covers every h + k g with 0 <= k < m.
struct HomSearch {
    const ConcreteGroup &A, &B;
    std::uint64_t full_b;

    bool surjection_exists(std::uint64_t subgroup,
                           const std::vector<std::uint8_t> &gens) const {
        std::vector<std::uint8_t> val(A.n, 0);
        std::uint64_t dom = 1; // {0}
        return dfs(subgroup, gens, 0, dom, val, 1);
    }

    bool dfs(std::uint64_t subgroup, const std::vector<std::uint8_t> &gens,
             std::size_t i, std::uint64_t dom, std::vector<std::uint8_t> &val,
             std::uint64_t img) const {
        if (i == gens.size())
            return img == full_b;
        // image can at most multiply by exp(B) per remaining generator
        std::size_t have = static_cast<std::size_t>(std::popcount(img));
        std::size_t need = static_cast<std::size_t>(std::popcount(full_b));
        std::size_t room = have;
        for (std::size_t r = i; r < gens.size() && room < need; ++r)
            room *= B.exponent;
        if (room < need)
            return false;

        std::uint8_t g = gens[i];
        // least multiple of g landing in the current domain
        std::size_t m = 1;
        std::uint8_t mg = g;
        while (!(dom >> mg & 1)) {
            mg = A.sum(mg, g);
            ++m;
        }
        std::uint8_t anchor = val[mg];

        // try images outside the current image first; finds surjections fast
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t b = 0; b < B.n; ++b) {
                bool inside = img >> b & 1;
                if ((pass == 0) == inside)
                    continue;
                std::uint8_t mb = 0;
                for (std::size_t k = 0; k < m; ++k)
                    mb = B.sum(mb, static_cast<std::uint8_t>(b));
                if (mb != anchor)
                    continue;
                std::uint64_t dom2 = dom, img2 = img;
                std::uint8_t kg = 0, kb = 0;
                for (std::size_t k = 1; k < m; ++k) {
                    kg = A.sum(kg, g);
                    kb = B.sum(kb, static_cast<std::uint8_t>(b));
                    for (std::size_t h = 0; h < A.n; ++h) {
                        if (!(dom >> h & 1))
                            continue;
                        std::uint8_t x = A.sum(static_cast<std::uint8_t>(h), kg);
                        val[x] = B.sum(val[h], kb);
                        dom2 |= std::uint64_t(1) << x;
                        img2 |= std::uint64_t(1) << val[x];
                    }
                }
                if (dfs(subgroup, gens, i + 1, dom2, val, img2))
                    return true;
            }
        return false;
    }
};

} // namespace detail

// Brute-force ground truth for is_subquotient on finite groups: enumerate
// every subgroup of A, then every homomorphism from it into B, and look for
// a surjection.  Intentionally ignorant of the counting rule above.
inline bool oracle_is_subquotient_finite(const FgAbelianGroup &target,
                                         const FgAbelianGroup &source,
                                         std::size_t bound = 64) {
    if (target.free_rank != 0 || source.free_rank != 0)
        throw OracleBound("oracle handles finite groups only");
    detail::ConcreteGroup A = detail::materialize(source, bound);
    detail::ConcreteGroup B = detail::materialize(target, bound);
    if (B.n == 1)
        return true;
    std::uint64_t full_b = (B.n == 64) ? ~std::uint64_t(0) : ((std::uint64_t(1) << B.n) - 1);
    detail::HomSearch search{A, B, full_b};

    for (std::uint64_t sub : detail::all_subgroups(A)) {
        std::size_t size = static_cast<std::size_t>(std::popcount(sub));
        if (size < B.n || size % B.n != 0)
            continue;
        // exponent of any quotient of S divides exp(S)
        std::size_t exp_s = 1;
        for (std::size_t x = 0; x < A.n; ++x)
            if (sub >> x & 1)
                exp_s = std::lcm(exp_s, static_cast<std::size_t>(A.ord[x]));
        if (exp_s % B.exponent != 0)
            continue;

        std::vector<std::uint8_t> gens;
        std::uint64_t have = 1;
        for (std::size_t x = 0; x < A.n && have != sub; ++x)
            if ((sub >> x & 1) && !(have >> x & 1)) {
                gens.push_back(static_cast<std::uint8_t>(x));
                have = detail::closure(A, have | (std::uint64_t(1) << x));
            }
        if (search.surjection_exists(sub, gens))
            return true;
    }
    return false;
}

inline FgAbelianGroup direct_sum(const FgAbelianGroup &g1, const FgAbelianGroup &g2) {
    std::vector<Int> all = g1.invariant_factors;
    all.insert(all.end(), g2.invariant_factors.begin(), g2.invariant_factors.end());
    IntMatrix rel(all.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        rel.at(i, i) = all[i];
    FgAbelianGroup s = cokernel(rel);
    s.free_rank = g1.free_rank + g2.free_rank;
    return s;
}

inline bool is_trivial(const FgAbelianGroup &g) { return g.is_trivial(); }

} // namespace tp
