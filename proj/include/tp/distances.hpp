#pragma once

#include "tp/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace tp {

// Outcome of probing the shift predicate at one epsilon.  The witness names
// the first (lexicographically smallest) failing cell pair and the failing
// direction of the definition: direction 1 compares the second module's
// shifted group against the first module's group at (u, v), direction 2 the
// converse.
struct ShiftPredicateReport {
    Rat epsilon = 0;
    bool holds = true;
    struct Witness {
        int direction = 1;
        Grade u, v;
        GroupValue source, target;
    };
    std::optional<Witness> witness;
};

namespace detail {

inline void require_comparable(const PersistenceModule &mx, const PersistenceModule &my) {
    if (mx.n() != my.n())
        throw std::invalid_argument("modules have different filtration dimensions");
    if (mx.degree != my.degree)
        throw std::invalid_argument("modules have different degrees");
    if (mx.coeffs.kind != my.coeffs.kind || mx.coeffs.p != my.coeffs.p)
        throw std::invalid_argument("modules have different coefficient systems");
}

// Cell representatives of the epsilon-refined grid: both modules' critical
// values c together with c + eps, one sentinel below and one above.  Every
// probe grade u, v, u-eps, v+eps is constant on the cells of this grid; in
// the v direction constancy is not needed because enlarging v only shrinks
// the shifted group, so checking cell corners suffices.
inline std::vector<std::vector<Rat>> refined_axes(const PersistenceModule &mx,
                                                  const PersistenceModule &my,
                                                  const Rat &eps) {
    std::vector<std::vector<Rat>> axes(mx.n());
    for (int i = 0; i < mx.n(); ++i) {
        std::set<Rat> pts;
        for (const auto *m : {&mx, &my})
            for (const Rat &c : m->criticals[i]) {
                pts.insert(c);
                pts.insert(c + eps);
            }
        if (pts.empty()) {
            axes[i] = {0};
            continue;
        }
        axes[i].push_back(*pts.begin() - 1);
        axes[i].insert(axes[i].end(), pts.begin(), pts.end());
        axes[i].push_back(*pts.rbegin() + 1);
    }
    return axes;
}

inline std::vector<std::vector<std::size_t>> axis_cells(const std::vector<std::vector<Rat>> &axes) {
    std::vector<std::vector<std::size_t>> cells;
    std::vector<std::size_t> cur(axes.size(), 0);
    for (;;) {
        cells.push_back(cur);
        std::size_t i = 0;
        while (i < axes.size() && ++cur[i] == axes[i].size()) {
            cur[i] = 0;
            ++i;
        }
        if (i == axes.size())
            break;
    }
    std::sort(cells.begin(), cells.end());
    return cells;
}

} // namespace detail

// Definition check at one uniform diagonal shift: at every (u, v) in the
// positive cone, each module's group at (u - eps, v + eps) must be a
// subquotient of the other's group at (u, v), in both directions.
inline ShiftPredicateReport dt_predicate(const PersistenceModule &mx,
                                         const PersistenceModule &my, const Rat &eps) {
    if (eps < 0)
        throw std::invalid_argument("dt_predicate needs eps >= 0");
    detail::require_comparable(mx, my);
    const int n = mx.n();
    ShiftPredicateReport report;
    report.epsilon = eps;

    auto axes = detail::refined_axes(mx, my, eps);
    auto cells = detail::axis_cells(axes);
    for (const auto &I : cells)
        for (const auto &J : cells) {
            bool le = true;
            for (int i = 0; i < n && le; ++i)
                le = I[i] <= J[i];
            if (!le)
                continue;
            Grade u(n), v(n), um(n), vp(n);
            for (int i = 0; i < n; ++i) {
                u[i] = axes[i][I[i]];
                v[i] = axes[i][J[i]];
                um[i] = u[i] - eps;
                vp[i] = v[i] + eps;
            }
            GroupValue sx = mx.value_at(u, v), sy = my.value_at(u, v);
            GroupValue tx = mx.value_at(um, vp), ty = my.value_at(um, vp);
            if (!is_subquotient(ty, sx)) {
                report.holds = false;
                report.witness = ShiftPredicateReport::Witness{1, u, v, sx, ty};
                return report;
            }
            if (!is_subquotient(tx, sy)) {
                report.holds = false;
                report.witness = ShiftPredicateReport::Witness{2, u, v, sy, tx};
                return report;
            }
        }
    return report;
}

// Extended value with the inf/attained distinction and an optional failure
// witness (kept for infinite or unattained results).
struct DistanceResult {
    ExtendedRat value;
    bool attained = false;
    std::optional<ShiftPredicateReport::Witness> witness;
};

// Exact infimum of the shifts at which the predicate holds.  Every threshold
// is a difference or half-difference of critical values, so scanning that
// candidate set and probing one midpoint around the boundary pins down the
// infimum and whether it is attained.
inline DistanceResult d_T(const PersistenceModule &mx, const PersistenceModule &my) {
    detail::require_comparable(mx, my);
    std::vector<Rat> crit;
    for (const auto *m : {&mx, &my})
        for (const auto &axis : m->criticals)
            crit.insert(crit.end(), axis.begin(), axis.end());

    std::set<Rat> cand_set{0};
    for (std::size_t i = 0; i < crit.size(); ++i)
        for (std::size_t j = i + 1; j < crit.size(); ++j) {
            Rat d = abs(crit[i] - crit[j]);
            cand_set.insert(d);
            cand_set.insert(d / 2);
        }
    std::vector<Rat> cand(cand_set.begin(), cand_set.end());

    std::map<Rat, ShiftPredicateReport> memo;
    auto probe = [&](const Rat &e) -> const ShiftPredicateReport & {
        auto it = memo.find(e);
        if (it == memo.end())
            it = memo.emplace(e, dt_predicate(mx, my, e)).first;
        return it->second;
    };

    if (!probe(cand.back()).holds) {
        // beyond the largest candidate all probe groups sit in their
        // asymptotic regime, so one sample decides between a boundary
        // infimum and an empty E
        const ShiftPredicateReport &beyond = probe(cand.back() + 1);
        if (!beyond.holds)
            return {ExtendedRat::infinity(), false, beyond.witness};
        return {ExtendedRat::finite(cand.back()), false, probe(cand.back()).witness};
    }

    std::size_t lo = 0, hi = cand.size() - 1; // predicate holds at hi
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (probe(cand[mid]).holds)
            hi = mid;
        else
            lo = mid + 1;
    }
    if (lo == 0)
        return {ExtendedRat::finite(cand[0]), true, std::nullopt};
    Rat midpoint = (cand[lo - 1] + cand[lo]) / 2;
    if (probe(midpoint).holds)
        return {ExtendedRat::finite(cand[lo - 1]), false, probe(cand[lo - 1]).witness};
    return {ExtendedRat::finite(cand[lo]), true, std::nullopt};
}

namespace detail {

struct FinitePoint {
    Rat b, d;
    Rat diagonal_cost() const { return (d - b) / 2; }
};

inline Rat max_norm(const FinitePoint &p, const FinitePoint &q) {
    return std::max(Rat(abs(p.b - q.b)), Rat(abs(p.d - q.d)));
}

// Perfect matching test in the bipartite graph whose left side is P plus one
// diagonal slot per point of Q, right side Q plus one slot per point of P.
inline bool matching_feasible(const std::vector<FinitePoint> &P,
                              const std::vector<FinitePoint> &Q, const Rat &c) {
    const std::size_t nl = P.size() + Q.size(), nr = Q.size() + P.size();
    std::vector<std::vector<std::size_t>> adj(nl);
    for (std::size_t i = 0; i < P.size(); ++i) {
        for (std::size_t j = 0; j < Q.size(); ++j)
            if (max_norm(P[i], Q[j]) <= c)
                adj[i].push_back(j);
        if (P[i].diagonal_cost() <= c)
            adj[i].push_back(Q.size() + i); // its own diagonal slot
    }
    for (std::size_t j = 0; j < Q.size(); ++j) {
        std::size_t left = P.size() + j; // diagonal slot of Q[j]
        if (Q[j].diagonal_cost() <= c)
            adj[left].push_back(j);
        for (std::size_t i = 0; i < P.size(); ++i)
            adj[left].push_back(Q.size() + i); // diagonal-to-diagonal, free
    }
    std::vector<std::size_t> match_r(nr, SIZE_MAX);
    std::vector<bool> used;
    std::function<bool(std::size_t)> try_augment = [&](std::size_t l) {
        for (std::size_t r : adj[l]) {
            if (used[r])
                continue;
            used[r] = true;
            if (match_r[r] == SIZE_MAX || try_augment(match_r[r])) {
                match_r[r] = l;
                return true;
            }
        }
        return false;
    };
    std::size_t matched = 0;
    for (std::size_t l = 0; l < nl; ++l) {
        used.assign(nr, false);
        if (try_augment(l))
            ++matched;
    }
    return matched == nl;
}

} // namespace detail

// Exact bottleneck distance between two finite diagrams.  Essential points
// (infinite death) must match among themselves, optimally in sorted birth
// order; the finite parts are matched through a feasibility binary search
// over the candidate costs.
inline DistanceResult d_match(const PersistenceDiagram &d1, const PersistenceDiagram &d2) {
    std::vector<Rat> inf1, inf2;
    std::vector<detail::FinitePoint> P, Q;
    for (const auto &[pt, mult] : d1.points)
        for (std::size_t m = 0; m < mult; ++m) {
            if (pt.second.infinite)
                inf1.push_back(pt.first);
            else
                P.push_back({pt.first, pt.second.value});
        }
    for (const auto &[pt, mult] : d2.points)
        for (std::size_t m = 0; m < mult; ++m) {
            if (pt.second.infinite)
                inf2.push_back(pt.first);
            else
                Q.push_back({pt.first, pt.second.value});
        }
    if (inf1.size() != inf2.size())
        return {ExtendedRat::infinity(), false, std::nullopt};
    std::sort(inf1.begin(), inf1.end());
    std::sort(inf2.begin(), inf2.end());
    Rat essential = 0;
    for (std::size_t i = 0; i < inf1.size(); ++i)
        essential = std::max(essential, Rat(abs(inf1[i] - inf2[i])));

    std::set<Rat> cand_set{0};
    for (const auto &p : P)
        cand_set.insert(p.diagonal_cost());
    for (const auto &q : Q)
        cand_set.insert(q.diagonal_cost());
    for (const auto &p : P)
        for (const auto &q : Q)
            cand_set.insert(detail::max_norm(p, q));
    std::vector<Rat> cand(cand_set.begin(), cand_set.end());

    std::size_t lo = 0, hi = cand.size() - 1; // the largest candidate is always feasible
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (detail::matching_feasible(P, Q, cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return {ExtendedRat::finite(std::max(essential, cand[lo])), true, std::nullopt};
}

// Certified lower bound for the natural pseudo-distance: if the second
// module's group at (u', v') is not a subquotient of the first's at (u, v),
// then delta >= min_i min { u_i - u'_i, v'_i - v_i }.
inline std::optional<Rat> delta_lower_bound_witness(const PersistenceModule &mx,
                                                    const PersistenceModule &my,
                                                    const Grade &u, const Grade &v,
                                                    const Grade &u2, const Grade &v2) {
    detail::require_comparable(mx, my);
    if (static_cast<int>(u.size()) != mx.n() || static_cast<int>(v.size()) != mx.n() ||
        static_cast<int>(u2.size()) != mx.n() || static_cast<int>(v2.size()) != mx.n())
        throw std::invalid_argument("grade dimension mismatch");
    if (!grade_lt(u, v) || !grade_lt(u2, v2))
        throw std::invalid_argument("witness pairs must satisfy u < v strictly");
    if (is_subquotient(my.value_at(u2, v2), mx.value_at(u, v)))
        return std::nullopt;
    Rat bound = u[0] - u2[0];
    for (int i = 0; i < mx.n(); ++i) {
        bound = std::min(bound, Rat(u[i] - u2[i]));
        bound = std::min(bound, Rat(v2[i] - v[i]));
    }
    return bound;
}

struct StabilityReport {
    Rat eta = 0;
    DistanceResult dt;
    bool pass = false;
};

// Perturbs the vertex grades by at most eta, recomputes the module, and
// verifies the stability bound d_T <= eta.
inline StabilityReport stability_check(const FilteredComplex &K, int k, const Rat &eta,
                                       std::uint64_t seed) {
    FilteredComplex moved = perturb(K, eta, seed);
    PersistenceModule mx = module_on_grid(K, k, CoefficientSpec::integers());
    PersistenceModule my = module_on_grid(moved, k, CoefficientSpec::integers());
    StabilityReport r;
    r.eta = eta;
    r.dt = d_T(mx, my);
    r.pass = r.dt.value <= ExtendedRat::finite(eta);
    return r;
}

} // namespace tp
