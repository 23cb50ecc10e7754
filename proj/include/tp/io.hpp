#pragma once

#include "tp/distances.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>
#include <string>

namespace tp {

using nlohmann::json;

namespace detail {

inline Rat parse_rat_field(const json &j, const std::string &where) {
    if (j.is_number_integer())
        return Rat(Int(j.get<long long>()));
    if (!j.is_string())
        throw std::invalid_argument(where + ": expected a rational string");
    try {
        return parse_rat(j.get<std::string>());
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(where + ": " + e.what());
    }
}

inline Grade parse_grade(const json &j, int n, const std::string &where) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument(where + ": expected an array of " + std::to_string(n) +
                                    " rationals");
    Grade g;
    for (std::size_t i = 0; i < j.size(); ++i)
        g.push_back(parse_rat_field(j[i], where + "[" + std::to_string(i) + "]"));
    return g;
}

} // namespace detail

// Reads either explicit simplices with grades or the vertex-grades variant,
// which triggers the lower-star extension.
inline FilteredComplex complex_from_json(const json &j) {
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
        throw std::invalid_argument("complex: missing integer field 'n'");
    int n = j["n"].get<int>();
    if (n < 1)
        throw std::invalid_argument("complex: 'n' must be at least 1");

    if (j.contains("vertex_grades")) {
        if (!j.contains("simplices_abstract") || !j["simplices_abstract"].is_array())
            throw std::invalid_argument("complex: vertex_grades needs 'simplices_abstract'");
        std::map<int, Grade> grades;
        for (const auto &[key, val] : j["vertex_grades"].items()) {
            int v;
            try {
                v = std::stoi(key);
            } catch (...) {
                throw std::invalid_argument("vertex_grades key '" + key +
                                            "' is not a vertex id");
            }
            grades[v] = detail::parse_grade(val, n, "vertex_grades[\"" + key + "\"]");
        }
        std::vector<std::vector<int>> abstract;
        const json &sa = j["simplices_abstract"];
        for (std::size_t i = 0; i < sa.size(); ++i) {
            const std::string where = "simplices_abstract[" + std::to_string(i) + "]";
            if (!sa[i].is_array() || sa[i].empty())
                throw std::invalid_argument(where + ": expected a nonempty vertex list");
            std::vector<int> verts;
            for (const auto &x : sa[i]) {
                if (!x.is_number_integer())
                    throw std::invalid_argument(where + ": vertex ids must be integers");
                verts.push_back(x.get<int>());
            }
            abstract.push_back(std::move(verts));
        }
        return lower_star(n, abstract, grades);
    }

    if (!j.contains("simplices") || !j["simplices"].is_array())
        throw std::invalid_argument("complex: missing array field 'simplices'");
    FilteredComplex K;
    K.n = n;
    const json &ss = j["simplices"];
    for (std::size_t i = 0; i < ss.size(); ++i) {
        const std::string where = "simplices[" + std::to_string(i) + "]";
        const json &s = ss[i];
        if (!s.is_object() || !s.contains("v") || !s.contains("g"))
            throw std::invalid_argument(where + ": expected an object with 'v' and 'g'");
        Simplex sx;
        if (!s["v"].is_array() || s["v"].empty())
            throw std::invalid_argument(where + ".v: expected a nonempty vertex list");
        for (const auto &x : s["v"]) {
            if (!x.is_number_integer())
                throw std::invalid_argument(where + ".v: vertex ids must be integers");
            sx.vertices.push_back(x.get<int>());
        }
        std::sort(sx.vertices.begin(), sx.vertices.end());
        sx.grade = detail::parse_grade(s["g"], n, where + ".g");
        K.simplices.push_back(std::move(sx));
    }
    return K;
}

inline FilteredComplex read_complex_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open input file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
    }
    return complex_from_json(j);
}

inline json complex_to_json(const FilteredComplex &K) {
    json ss = json::array();
    for (const Simplex &s : K.simplices) {
        json g = json::array();
        for (const Rat &x : s.grade)
            g.push_back(format_rat(x));
        ss.push_back(json{{"v", s.vertices}, {"g", g}});
    }
    return json{{"n", K.n}, {"simplices", ss}};
}

inline json group_to_json(const FgAbelianGroup &g) {
    json torsion = json::array();
    for (const Int &d : g.invariant_factors) {
        if (d > Int(std::numeric_limits<std::uint64_t>::max()))
            throw std::domain_error("invariant factor too large to serialize");
        torsion.push_back(d.convert_to<std::uint64_t>());
    }
    return json{{"rank", g.free_rank}, {"torsion", torsion}};
}

inline json grade_to_json(const Grade &g) {
    json a = json::array();
    for (const Rat &x : g)
        a.push_back(format_rat(x));
    return a;
}

inline json diagram_to_json(const PersistenceDiagram &d) {
    json a = json::array();
    for (const auto &[pt, mult] : d.points)
        a.push_back(json{{"b", format_rat(pt.first)},
                         {"d", pt.second.infinite ? "inf" : format_rat(pt.second.value)},
                         {"mult", mult}});
    return a;
}

inline json module_to_json(const PersistenceModule &m) {
    json grid = json::array();
    for (const auto &axis : m.criticals) {
        json a = json::array();
        for (const Rat &c : axis)
            a.push_back(format_rat(c));
        grid.push_back(a);
    }
    json cells = json::array();
    for (const auto &[key, g] : m.cells())
        cells.push_back(json{{"i", key.first}, {"j", key.second}, {"group", group_to_json(g)}});
    return json{{"grid", grid}, {"cells", cells}};
}

inline json witness_to_json(const std::optional<ShiftPredicateReport::Witness> &w) {
    if (!w)
        return nullptr;
    return json{{"direction", w->direction},
                {"u", grade_to_json(w->u)},
                {"v", grade_to_json(w->v)},
                {"source", group_to_json(w->source)},
                {"target", group_to_json(w->target)}};
}

inline json distance_to_json(const DistanceResult &r) {
    return json{{"value", r.value.str()},
                {"attained", r.attained},
                {"witness", witness_to_json(r.witness)}};
}

inline json predicate_report_to_json(const ShiftPredicateReport &r) {
    return json{{"epsilon", format_rat(r.epsilon)},
                {"holds", r.holds},
                {"witness", witness_to_json(r.witness)}};
}

} // namespace tp
