#pragma once

#include "tp/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace tp {

// Filtration grade: one rational per filtration coordinate.
using Grade = std::vector<Rat>;

inline bool grade_leq(const Grade &a, const Grade &b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i])
            return false;
    return true;
}

inline bool grade_lt(const Grade &a, const Grade &b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] >= b[i])
            return false;
    return true;
}

inline std::string grade_str(const Grade &g) {
    std::string s = "(";
    for (std::size_t i = 0; i < g.size(); ++i)
        s += (i ? "," : "") + format_rat(g[i]);
    return s + ")";
}

struct Simplex {
    std::vector<int> vertices; // sorted, distinct
    Grade grade;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

struct FilteredComplex {
    int n = 1; // filtration dimension
    std::vector<Simplex> simplices;

    int top_dim() const {
        int d = -1;
        for (const Simplex &s : simplices)
            d = std::max(d, s.dim());
        return d;
    }
};

struct ValidationReport {
    bool ok = true;
    std::string message = "ok";
};

namespace detail {

inline std::vector<std::vector<int>> faces_of(const std::vector<int> &v) {
    std::vector<std::vector<int>> out;
    if (v.size() <= 1)
        return out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::vector<int> f;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (j != i)
                f.push_back(v[j]);
        out.push_back(std::move(f));
    }
    return out;
}

inline std::string vertices_str(const std::vector<int> &v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

} // namespace detail

// Checks all structural invariants and names the first offender.
inline ValidationReport validate(const FilteredComplex &K) {
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < K.simplices.size(); ++i) {
        const Simplex &s = K.simplices[i];
        if (s.vertices.empty())
            return {false, "simplex #" + std::to_string(i) + " has no vertices"};
        if (!std::is_sorted(s.vertices.begin(), s.vertices.end()) ||
            std::adjacent_find(s.vertices.begin(), s.vertices.end()) != s.vertices.end())
            return {false, "simplex " + detail::vertices_str(s.vertices) +
                               " has unsorted or repeated vertices"};
        if (static_cast<int>(s.grade.size()) != K.n)
            return {false, "simplex " + detail::vertices_str(s.vertices) +
                               " has a grade of length " + std::to_string(s.grade.size()) +
                               ", expected " + std::to_string(K.n)};
        if (!index.emplace(s.vertices, i).second)
            return {false, "duplicate simplex " + detail::vertices_str(s.vertices)};
    }
    for (const Simplex &s : K.simplices)
        for (const auto &f : detail::faces_of(s.vertices)) {
            auto it = index.find(f);
            if (it == index.end())
                return {false, "closure violation: face " + detail::vertices_str(f) +
                                   " of " + detail::vertices_str(s.vertices) + " is missing"};
            if (!grade_leq(K.simplices[it->second].grade, s.grade))
                return {false, "monotonicity violation: face " + detail::vertices_str(f) +
                                   " at " + grade_str(K.simplices[it->second].grade) +
                                   " exceeds " + detail::vertices_str(s.vertices) + " at " +
                                   grade_str(s.grade)};
        }
    return {};
}

// Grades every simplex by the coordinatewise max over its vertices, so that
// sublevel subcomplexes agree with sublevel sets of the vertex-extended
// function.  Faces missing from the input are filled in.
inline FilteredComplex lower_star(int n, const std::vector<std::vector<int>> &abstract,
                                  const std::map<int, Grade> &vertex_grades) {
    std::set<std::vector<int>> all;
    std::vector<std::vector<int>> stack;
    for (auto v : abstract) {
        std::sort(v.begin(), v.end());
        if (all.insert(v).second)
            stack.push_back(v);
    }
    while (!stack.empty()) {
        auto s = stack.back();
        stack.pop_back();
        for (auto &f : detail::faces_of(s))
            if (all.insert(f).second)
                stack.push_back(f);
    }
    FilteredComplex K;
    K.n = n;
    for (const auto &v : all) {
        Grade g(n, 0);
        bool first = true;
        for (int vid : v) {
            auto it = vertex_grades.find(vid);
            if (it == vertex_grades.end())
                throw std::invalid_argument("no grade for vertex " + std::to_string(vid));
            if (static_cast<int>(it->second.size()) != n)
                throw std::invalid_argument("grade of vertex " + std::to_string(vid) +
                                            " has wrong length");
            for (int i = 0; i < n; ++i)
                g[i] = first ? it->second[i] : std::max(g[i], it->second[i]);
            first = false;
        }
        K.simplices.push_back({v, std::move(g)});
    }
    return K;
}

// Indices of the simplices with grade coordinatewise <= u, in complex order.
inline std::vector<std::size_t> sublevel(const FilteredComplex &K, const Grade &u) {
    if (static_cast<int>(u.size()) != K.n)
        throw std::invalid_argument("sublevel grade has wrong dimension");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < K.simplices.size(); ++i)
        if (grade_leq(K.simplices[i].grade, u))
            out.push_back(i);
    return out;
}

// Per-coordinate sorted deduplicated grade values.
inline std::vector<std::vector<Rat>> critical_values(const FilteredComplex &K) {
    std::vector<std::set<Rat>> seen(K.n);
    for (const Simplex &s : K.simplices)
        for (int i = 0; i < K.n; ++i)
            seen[i].insert(s.grade[i]);
    std::vector<std::vector<Rat>> out(K.n);
    for (int i = 0; i < K.n; ++i)
        out[i].assign(seen[i].begin(), seen[i].end());
    return out;
}

// Minimal 6-vertex triangulation of the projective plane.  The full
// subcomplex on vertices 1..5 is a Moebius band (H_1 = Z); adding vertex 6
// closes it up to RP^2 (H_1 = Z/2).  Vertices 1..5 enter at a*scale, vertex
// 6 at b*scale.
inline FilteredComplex build_rp2(const Rat &a, const Rat &b, const Rat &scale = 1) {
    if (!(a < b))
        throw std::invalid_argument("build_rp2 requires a < b");
    static const std::vector<std::vector<int>> facets = {
        {1, 2, 3}, {1, 2, 4}, {1, 3, 5}, {1, 4, 6}, {1, 5, 6},
        {2, 3, 6}, {2, 4, 5}, {2, 5, 6}, {3, 4, 5}, {3, 4, 6}};
    std::map<int, Grade> grades;
    for (int v = 1; v <= 5; ++v)
        grades[v] = {a * scale};
    grades[6] = {b * scale};
    return lower_star(1, facets, grades);
}

// Octahedron sphere: equator cycle 1-2-3-4 at grade a, poles 5 and 6 at
// grade b.  The sublevel at a is a circle, the full complex is S^2.
inline FilteredComplex build_s2(const Rat &a, const Rat &b) {
    if (!(a < b))
        throw std::invalid_argument("build_s2 requires a < b");
    static const std::vector<std::vector<int>> facets = {
        {1, 2, 5}, {2, 3, 5}, {3, 4, 5}, {1, 4, 5},
        {1, 2, 6}, {2, 3, 6}, {3, 4, 6}, {1, 4, 6}};
    std::map<int, Grade> grades;
    for (int v = 1; v <= 4; ++v)
        grades[v] = {a};
    grades[5] = {b};
    grades[6] = {b};
    return lower_star(1, facets, grades);
}

struct DiagramPoint {
    Rat birth;
    std::optional<Rat> death; // nullopt encodes an essential class
};

// Realizes a prescribed degree-1 diagram: one hollow triangle per point,
// born at its birth grade and filled at its death grade (never filled when
// essential), wedged onto a base vertex through an edge at the birth grade.
inline FilteredComplex build_diagram_realization(const std::vector<DiagramPoint> &points) {
    if (points.empty())
        throw std::invalid_argument("diagram realization needs at least one point");
    Rat base = points[0].birth;
    for (const DiagramPoint &p : points) {
        if (p.death && !(p.birth < *p.death))
            throw std::invalid_argument("diagram point needs birth < death");
        base = std::min(base, p.birth);
    }
    FilteredComplex K;
    K.n = 1;
    K.simplices.push_back({{0}, {base}});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Rat &b = points[i].birth;
        int v1 = static_cast<int>(3 * i) + 1, v2 = v1 + 1, v3 = v1 + 2;
        K.simplices.push_back({{v1}, {b}});
        K.simplices.push_back({{v2}, {b}});
        K.simplices.push_back({{v3}, {b}});
        K.simplices.push_back({{v1, v2}, {b}});
        K.simplices.push_back({{v2, v3}, {b}});
        K.simplices.push_back({{v1, v3}, {b}});
        K.simplices.push_back({{0, v1}, {b}});
        if (points[i].death)
            K.simplices.push_back({{v1, v2, v3}, {*points[i].death}});
    }
    return K;
}

// Displaces every vertex grade by a deterministic pseudo-random offset
// k/16 * eta, k in [-16, 16], then lifts each higher simplex to the max of
// its own grade and its vertices' new grades.  Keeping the original grade as
// a floor makes eta = 0 the identity on every complex, not only lower-star
// ones, while each simplex still moves by at most eta per coordinate.
inline FilteredComplex perturb(const FilteredComplex &K, const Rat &eta,
                               std::uint64_t seed) {
    if (eta < 0)
        throw std::invalid_argument("perturb requires eta >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(-16, 16);
    std::map<int, Grade> moved;
    for (const Simplex &s : K.simplices)
        if (s.dim() == 0) {
            Grade g = s.grade;
            for (auto &x : g)
                x += Rat(pick(rng), 16) * eta;
            moved[s.vertices[0]] = std::move(g);
        }
    FilteredComplex out;
    out.n = K.n;
    for (const Simplex &s : K.simplices) {
        if (s.dim() == 0) {
            out.simplices.push_back({s.vertices, moved.at(s.vertices[0])});
            continue;
        }
        Grade g = s.grade;
        for (int v : s.vertices) {
            const Grade &m = moved.at(v);
            for (int i = 0; i < K.n; ++i)
                g[i] = std::max(g[i], m[i]);
        }
        out.simplices.push_back({s.vertices, std::move(g)});
    }
    return out;
}

} // namespace tp
