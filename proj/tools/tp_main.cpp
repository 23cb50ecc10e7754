#include "tp/io.hpp"

#include <CLI11.hpp>

#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using tp::json;

// --- text rendering ------------------------------------------------------

void print_kv(const std::vector<std::pair<std::string, std::string>> &rows) {
    std::size_t w = 0;
    for (const auto &[k, v] : rows)
        w = std::max(w, k.size());
    for (const auto &[k, v] : rows)
        std::cout << k << std::string(w - k.size() + 2, ' ') << v << "\n";
}

std::string witness_str(const std::optional<tp::ShiftPredicateReport::Witness> &w) {
    if (!w)
        return "none";
    return "direction " + std::to_string(w->direction) + " at u=" + tp::grade_str(w->u) +
           " v=" + tp::grade_str(w->v) + ": source " + w->source.str() + ", target " +
           w->target.str();
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

void print_distance_text(const tp::DistanceResult &r) {
    print_kv({{"value", r.value.str()},
              {"attained", yesno(r.attained)},
              {"witness", witness_str(r.witness)}});
}

void print_module_text(const tp::PersistenceModule &m) {
    for (int i = 0; i < m.n(); ++i) {
        std::cout << "criticals[" << i << "]:";
        for (const tp::Rat &c : m.criticals[i])
            std::cout << " " << tp::format_rat(c);
        std::cout << "\n";
    }
    auto idx_str = [](const std::vector<std::size_t> &v) {
        std::string s = "(";
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + std::to_string(v[i]);
        return s + ")";
    };
    std::size_t w = 0;
    for (const auto &[key, g] : m.cells())
        w = std::max(w, idx_str(key.first).size() + idx_str(key.second).size() + 6);
    for (const auto &[key, g] : m.cells()) {
        std::string lhs = "i=" + idx_str(key.first) + " j=" + idx_str(key.second);
        std::cout << lhs << std::string(w - lhs.size() + 2, ' ') << g.str() << "\n";
    }
}

void print_diagram_text(const tp::PersistenceDiagram &d) {
    std::vector<std::array<std::string, 3>> rows = {{"b", "d", "mult"}};
    for (const auto &[pt, mult] : d.points)
        rows.push_back({tp::format_rat(pt.first), pt.second.str(), std::to_string(mult)});
    std::array<std::size_t, 3> w = {0, 0, 0};
    for (const auto &r : rows)
        for (int c = 0; c < 3; ++c)
            w[c] = std::max(w[c], r[c].size());
    for (const auto &r : rows) {
        for (int c = 0; c < 3; ++c)
            std::cout << r[c] << std::string(c < 2 ? w[c] - r[c].size() + 2 : 0, ' ');
        std::cout << "\n";
    }
}

// --- shared flag state ----------------------------------------------------

struct Args {
    std::vector<std::string> inputs;
    int degree = 0;
    std::string coeffs = "z";
    std::string epsilon;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::string eta;
    std::string example_name;
    std::string output;
};

const CLI::Validator coeffs_ok(
    [](std::string &s) -> std::string {
        try {
            tp::CoefficientSpec::parse(s);
            return {};
        } catch (const std::exception &e) {
            return std::string(e.what());
        }
    },
    "COEFFS");

const CLI::Validator rat_ok(
    [](std::string &s) -> std::string {
        try {
            tp::parse_rat(s);
            return {};
        } catch (const std::exception &e) {
            return std::string(e.what());
        }
    },
    "RATIONAL");

void emit(const json &j, const Args &a, const std::function<void()> &text) {
    if (a.format == "json")
        std::cout << j.dump(2) << "\n";
    else
        text();
}

// --- delta lower bound scan ------------------------------------------------

struct BoundWitness {
    tp::Rat value;
    tp::Grade u, v, u2, v2;
    int direction = 1;
};

std::vector<std::array<tp::Rat, 4>> axis_quadruples(const std::vector<tp::Rat> &points) {
    std::vector<std::array<tp::Rat, 4>> out;
    const std::size_t s = points.size();
    for (std::size_t a = 0; a + 3 < s; ++a)
        for (std::size_t b = a + 1; b + 2 < s; ++b)
            for (std::size_t c = b + 1; c + 1 < s; ++c)
                for (std::size_t d = c + 1; d < s; ++d)
                    out.push_back({points[a], points[b], points[c], points[d]});
    return out;
}

// Scans probe quadruples u2 < u < v < v2 per coordinate, built from both
// modules' cell representatives plus midpoints, and keeps the largest
// certified margin over both role assignments.
std::optional<BoundWitness> best_margin_witness(const tp::PersistenceModule &mx,
                                                const tp::PersistenceModule &my) {
    const int n = mx.n();
    std::vector<std::vector<std::array<tp::Rat, 4>>> quads(n);
    for (bool midpoints : {true, false}) {
        double combos = 1;
        for (int i = 0; i < n; ++i) {
            std::vector<tp::Rat> s = mx.axis[i];
            s.insert(s.end(), my.axis[i].begin(), my.axis[i].end());
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            if (midpoints) {
                std::vector<tp::Rat> dense;
                for (std::size_t j = 0; j < s.size(); ++j) {
                    dense.push_back(s[j]);
                    if (j + 1 < s.size())
                        dense.push_back((s[j] + s[j + 1]) / 2);
                }
                s = std::move(dense);
            }
            quads[i] = axis_quadruples(s);
            if (quads[i].empty())
                return std::nullopt;
            combos *= static_cast<double>(quads[i].size());
        }
        if (combos <= 200000)
            break;
        if (!midpoints)
            return std::nullopt;
    }
    std::optional<BoundWitness> best;
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
        tp::Grade u2(n), u(n), v(n), v2(n);
        for (int i = 0; i < n; ++i) {
            const auto &q = quads[i][idx[i]];
            u2[i] = q[0];
            u[i] = q[1];
            v[i] = q[2];
            v2[i] = q[3];
        }
        auto m1 = tp::delta_lower_bound_witness(mx, my, u, v, u2, v2);
        if (m1 && (!best || *m1 > best->value))
            best = BoundWitness{*m1, u, v, u2, v2, 1};
        auto m2 = tp::delta_lower_bound_witness(my, mx, u, v, u2, v2);
        if (m2 && (!best || *m2 > best->value))
            best = BoundWitness{*m2, u, v, u2, v2, 2};
        int i = 0;
        while (i < n && ++idx[i] == quads[i].size())
            idx[i++] = 0;
        if (i == n)
            break;
    }
    return best;
}

tp::FilteredComplex built_in(const std::string &name) {
    if (name == "rp2")
        return tp::build_rp2(0, 1);
    if (name == "rp2x2")
        return tp::build_rp2(0, 1, 2);
    if (name == "s2")
        return tp::build_s2(0, 1);
    std::vector<tp::DiagramPoint> pts;
    pts.push_back({tp::Rat(0), std::nullopt});
    int top = name == "fig2-left" ? 4 : 3;
    for (int i = 0; i <= top; ++i)
        pts.push_back({tp::Rat(i), tp::Rat(4 + i)});
    return tp::build_diagram_realization(pts);
}

} // namespace

int main(int argc, char **argv) {
    Args a;
    int rc = 0;
    std::string op = "tp";

    CLI::App app{"exact persistence groups over the integers, with torsion-aware distances",
                 "tp"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App *cmd, int n_inputs) {
        if (n_inputs > 0)
            cmd->add_option("--input", a.inputs, "input complex file")
                ->required()
                ->expected(n_inputs);
        cmd->add_option("--format", a.format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        return cmd;
    };

    auto *c_validate = add_common(app.add_subcommand("validate", "check a complex file"), 1);
    c_validate->callback([&] {
        op = "validate";
        tp::FilteredComplex K = tp::read_complex_file(a.inputs[0]);
        tp::ValidationReport r = tp::validate(K);
        emit(json{{"ok", r.ok}, {"message", r.message}}, a,
             [&] { std::cout << r.message << "\n"; });
        if (!r.ok)
            rc = 1;
    });

    auto *c_groups = add_common(app.add_subcommand("groups", "group table on the critical grid"), 1);
    c_groups->add_option("--degree", a.degree, "homology degree");
    c_groups->add_option("--coeffs", a.coeffs, "coefficients: z, q, or zp:P")->check(coeffs_ok);
    c_groups->callback([&] {
        op = "groups";
        tp::FilteredComplex K = tp::read_complex_file(a.inputs[0]);
        tp::PersistenceModule m =
            tp::module_on_grid(K, a.degree, tp::CoefficientSpec::parse(a.coeffs));
        emit(tp::module_to_json(m), a, [&] { print_module_text(m); });
    });

    auto *c_diagram = add_common(app.add_subcommand("diagram", "persistence diagram"), 1);
    c_diagram->add_option("--degree", a.degree, "homology degree");
    c_diagram->add_option("--coeffs", a.coeffs, "field coefficients: q or zp:P")->check(coeffs_ok);
    c_diagram->callback([&] {
        op = "diagram";
        tp::FilteredComplex K = tp::read_complex_file(a.inputs[0]);
        tp::PersistenceDiagram d =
            tp::diagram(K, a.degree, tp::CoefficientSpec::parse(a.coeffs));
        emit(tp::diagram_to_json(d), a, [&] { print_diagram_text(d); });
    });

    auto *c_dt = add_common(app.add_subcommand("dt", "shift distance between two complexes"), 2);
    c_dt->add_option("--degree", a.degree, "homology degree");
    c_dt->add_option("--coeffs", a.coeffs, "coefficients: z, q, or zp:P")->check(coeffs_ok);
    c_dt->add_option("--epsilon", a.epsilon, "probe the shift predicate at one epsilon")
        ->check(rat_ok);
    c_dt->callback([&] {
        op = "dt";
        tp::CoefficientSpec cs = tp::CoefficientSpec::parse(a.coeffs);
        tp::PersistenceModule mx =
            tp::module_on_grid(tp::read_complex_file(a.inputs[0]), a.degree, cs);
        tp::PersistenceModule my =
            tp::module_on_grid(tp::read_complex_file(a.inputs[1]), a.degree, cs);
        if (!a.epsilon.empty()) {
            tp::ShiftPredicateReport r = tp::dt_predicate(mx, my, tp::parse_rat(a.epsilon));
            emit(tp::predicate_report_to_json(r), a, [&] {
                print_kv({{"epsilon", tp::format_rat(r.epsilon)},
                          {"holds", yesno(r.holds)},
                          {"witness", witness_str(r.witness)}});
            });
        } else {
            tp::DistanceResult r = tp::d_T(mx, my);
            emit(tp::distance_to_json(r), a, [&] { print_distance_text(r); });
        }
    });

    auto *c_match = add_common(app.add_subcommand("match", "matching distance between diagrams"), 2);
    c_match->add_option("--degree", a.degree, "homology degree");
    c_match->add_option("--coeffs", a.coeffs, "field coefficients: q or zp:P")->check(coeffs_ok);
    c_match->callback([&] {
        op = "match";
        tp::CoefficientSpec cs = tp::CoefficientSpec::parse(a.coeffs);
        tp::PersistenceDiagram d1 = tp::diagram(tp::read_complex_file(a.inputs[0]), a.degree, cs);
        tp::PersistenceDiagram d2 = tp::diagram(tp::read_complex_file(a.inputs[1]), a.degree, cs);
        tp::DistanceResult r = tp::d_match(d1, d2);
        emit(tp::distance_to_json(r), a, [&] { print_distance_text(r); });
    });

    auto *c_bound = add_common(
        app.add_subcommand("bound", "lower bounds for the natural pseudo-distance"), 2);
    c_bound->add_option("--degree", a.degree, "homology degree");
    c_bound->add_option("--coeffs", a.coeffs, "coefficients: z, q, or zp:P")->check(coeffs_ok);
    c_bound->callback([&] {
        op = "bound";
        tp::CoefficientSpec cs = tp::CoefficientSpec::parse(a.coeffs);
        tp::PersistenceModule mx =
            tp::module_on_grid(tp::read_complex_file(a.inputs[0]), a.degree, cs);
        tp::PersistenceModule my =
            tp::module_on_grid(tp::read_complex_file(a.inputs[1]), a.degree, cs);
        tp::DistanceResult dt = tp::d_T(mx, my);
        std::optional<BoundWitness> w = best_margin_witness(mx, my);
        tp::ExtendedRat overall = dt.value;
        if (w && overall < tp::ExtendedRat::finite(w->value))
            overall = tp::ExtendedRat::finite(w->value);
        json jw;
        if (w)
            jw = json{{"value", tp::format_rat(w->value)},
                      {"direction", w->direction},
                      {"u", tp::grade_to_json(w->u)},
                      {"v", tp::grade_to_json(w->v)},
                      {"u2", tp::grade_to_json(w->u2)},
                      {"v2", tp::grade_to_json(w->v2)}};
        emit(json{{"delta_lower_bound", overall.str()},
                  {"dt", tp::distance_to_json(dt)},
                  {"witness_bound", jw}},
             a, [&] {
                 std::string ws = "none";
                 if (w)
                     ws = tp::format_rat(w->value) + " at u=" + tp::grade_str(w->u) +
                          " v=" + tp::grade_str(w->v) + " u2=" + tp::grade_str(w->u2) +
                          " v2=" + tp::grade_str(w->v2);
                 print_kv({{"delta_lower_bound", overall.str()},
                           {"dt", dt.value.str()},
                           {"dt_attained", yesno(dt.attained)},
                           {"witness_bound", ws}});
             });
    });

    auto *c_stability = add_common(app.add_subcommand("stability", "perturbation check"), 1);
    c_stability->add_option("--degree", a.degree, "homology degree");
    c_stability->add_option("--eta", a.eta, "perturbation magnitude")->required()->check(rat_ok);
    c_stability->add_option("--seed", a.seed, "perturbation seed");
    c_stability->callback([&] {
        op = "stability";
        tp::FilteredComplex K = tp::read_complex_file(a.inputs[0]);
        tp::StabilityReport r = tp::stability_check(K, a.degree, tp::parse_rat(a.eta), a.seed);
        emit(json{{"eta", tp::format_rat(r.eta)},
                  {"seed", a.seed},
                  {"dt", tp::distance_to_json(r.dt)},
                  {"pass", r.pass}},
             a, [&] {
                 print_kv({{"eta", tp::format_rat(r.eta)},
                           {"dt", r.dt.value.str()},
                           {"pass", yesno(r.pass)}});
             });
        if (!r.pass)
            rc = 1;
    });

    auto *c_examples = add_common(app.add_subcommand("examples", "write a built-in complex"), 0);
    c_examples->add_option("name", a.example_name, "one of the built-in complexes")
        ->required()
        ->check(CLI::IsMember({"rp2", "rp2x2", "s2", "fig2-left", "fig2-right"}));
    c_examples->add_option("--output", a.output, "destination file (default NAME.json)");
    c_examples->callback([&] {
        op = "examples";
        std::string path = a.output.empty() ? a.example_name + ".json" : a.output;
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write " + path);
        out << tp::complex_to_json(built_in(a.example_name)).dump(2) << "\n";
        emit(json{{"written", path}}, a, [&] { std::cout << "written " << path << "\n"; });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception &e) {
        std::cerr << "tp " << op << ": " << e.what() << "\n";
        return 1;
    }
    return rc;
}
