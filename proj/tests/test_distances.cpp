#include "tp/distances.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace tp;

namespace {

const CoefficientSpec Z = CoefficientSpec::integers();
const CoefficientSpec Q = CoefficientSpec::rationals();

FilteredComplex empty_complex() {
    FilteredComplex K;
    K.n = 1;
    return K;
}

PersistenceDiagram one_point(const Rat &b, const Rat &d) {
    PersistenceDiagram out;
    out.add(b, ExtendedRat::finite(d));
    return out;
}

} // namespace

TEST_CASE("dt_predicate") {
    PersistenceModule rp2 = module_on_grid(build_rp2(0, 1), 1, Z);
    PersistenceModule s2 = module_on_grid(build_s2(0, 1), 1, Z);

    SECTION("identity at epsilon zero") {
        for (const PersistenceModule *m : {&rp2, &s2}) {
            ShiftPredicateReport r = dt_predicate(*m, *m, 0);
            CHECK(r.holds);
            CHECK_FALSE(r.witness.has_value());
        }
    }
    SECTION("rp2 against s2 fails at every epsilon, with a torsion witness") {
        for (const Rat &e : {Rat(0), Rat(1), Rat(10)}) {
            ShiftPredicateReport r = dt_predicate(rp2, s2, e);
            CHECK_FALSE(r.holds);
            REQUIRE(r.witness.has_value());
            CHECK(r.witness->target == FgAbelianGroup::cyclic(2));
            CHECK(r.witness->source.is_trivial());
        }
    }
    SECTION("circle filled at 2 against nothing: threshold at 1") {
        PersistenceModule mx =
            module_on_grid(build_diagram_realization({{Rat(0), Rat(2)}}), 1, Z);
        PersistenceModule my = module_on_grid(empty_complex(), 1, Z);
        CHECK(dt_predicate(mx, my, 1).holds);
        ShiftPredicateReport r = dt_predicate(mx, my, Rat(9, 10));
        CHECK_FALSE(r.holds);
        REQUIRE(r.witness.has_value());
        CHECK(r.witness->direction == 2);
    }
    SECTION("monotone in epsilon") {
        PersistenceModule rp2x2 = module_on_grid(build_rp2(0, 1, 2), 1, Z);
        bool held = false;
        for (int i = 0; i <= 32; ++i) {
            bool h = dt_predicate(rp2, rp2x2, Rat(i, 8)).holds;
            if (held)
                CHECK(h);
            held = held || h;
        }
        CHECK(held);
    }
    SECTION("negative epsilon and mismatched modules are rejected") {
        CHECK_THROWS(dt_predicate(rp2, rp2, Rat(-1)));
        PersistenceModule q = module_on_grid(build_rp2(0, 1), 1, Q);
        CHECK_THROWS(dt_predicate(rp2, q, 0));
        PersistenceModule deg2 = module_on_grid(build_rp2(0, 1), 2, Z);
        CHECK_THROWS(dt_predicate(rp2, deg2, 0));
    }
}

TEST_CASE("d_T on the built-in pairs") {
    PersistenceModule rp2 = module_on_grid(build_rp2(0, 1), 1, Z);
    PersistenceModule rp2x2 = module_on_grid(build_rp2(0, 1, 2), 1, Z);
    PersistenceModule s2 = module_on_grid(build_s2(0, 1), 1, Z);

    SECTION("reflexivity") {
        for (const PersistenceModule *m : {&rp2, &rp2x2, &s2}) {
            DistanceResult r = d_T(*m, *m);
            CHECK(r.value == ExtendedRat::finite(0));
            CHECK(r.attained);
        }
    }
    SECTION("scaling the levels costs exactly 1") {
        DistanceResult r = d_T(rp2, rp2x2);
        CHECK(r.value == ExtendedRat::finite(1));
        CHECK(r.attained);
    }
    SECTION("torsion against the sphere is infinite, both ways") {
        for (const PersistenceModule *m : {&rp2, &rp2x2}) {
            DistanceResult r = d_T(*m, s2);
            CHECK(r.value == ExtendedRat::infinity());
            REQUIRE(r.witness.has_value());
        }
    }
    SECTION("symmetry") {
        CHECK(d_T(rp2, s2).value == d_T(s2, rp2).value);
        CHECK(d_T(rp2, rp2x2).value == d_T(rp2x2, rp2).value);
    }
}

TEST_CASE("d_match") {
    SECTION("one point against the diagonal") {
        DistanceResult r = d_match(one_point(0, 2), PersistenceDiagram{});
        CHECK(r.value == ExtendedRat::finite(1));
    }
    SECTION("self distance is zero") {
        PersistenceDiagram d = one_point(0, 2);
        d.add(Rat(1), ExtendedRat::infinity());
        CHECK(d_match(d, d).value == ExtendedRat::finite(0));
    }
    SECTION("translation of a single point") {
        CHECK(d_match(one_point(0, 2), one_point(0, 3)).value == ExtendedRat::finite(1));
        CHECK(d_match(one_point(0, 2), one_point(5, 6)).value == ExtendedRat::finite(1));
        CHECK(d_match(one_point(0, 2), one_point(5, 100)).value ==
              ExtendedRat::finite(Rat(95, 2)));
    }
    SECTION("essential points pair by birth and mismatch costs infinity") {
        PersistenceDiagram a, b;
        a.add(Rat(0), ExtendedRat::infinity());
        b.add(Rat(3), ExtendedRat::infinity());
        CHECK(d_match(a, b).value == ExtendedRat::finite(3));
        b.add(Rat(5), ExtendedRat::infinity());
        CHECK(d_match(a, b).value == ExtendedRat::infinity());
        CHECK(d_match(a, PersistenceDiagram{}).value == ExtendedRat::infinity());
    }
    SECTION("multiplicities count") {
        PersistenceDiagram a, b;
        a.add(Rat(0), ExtendedRat::finite(Rat(2)), 2);
        b.add(Rat(0), ExtendedRat::finite(Rat(2)), 1);
        CHECK(d_match(a, b).value == ExtendedRat::finite(1));
    }
    SECTION("staircase diagrams, m = 4") {
        std::vector<DiagramPoint> left = {{Rat(0), std::nullopt}}, right = left;
        for (int i = 0; i <= 4; ++i)
            left.push_back({Rat(i), Rat(4 + i)});
        for (int i = 0; i <= 3; ++i)
            right.push_back({Rat(i), Rat(4 + i)});
        PersistenceDiagram dl = diagram(build_diagram_realization(left), 1, Q);
        PersistenceDiagram dr = diagram(build_diagram_realization(right), 1, Q);
        CHECK(d_match(dl, dr).value == ExtendedRat::finite(2));
    }
}

TEST_CASE("delta lower bound witness") {
    PersistenceModule s2 = module_on_grid(build_s2(0, 1), 1, Z);
    PersistenceModule rp2 = module_on_grid(build_rp2(0, 1), 1, Z);

    SECTION("worked value 1/2") {
        auto b = delta_lower_bound_witness(s2, rp2, {Rat(3, 2)}, {Rat(2)}, {Rat(1)}, {Rat(3)});
        REQUIRE(b.has_value());
        CHECK(*b == Rat(1, 2));
    }
    SECTION("subquotient pairs yield no bound") {
        auto b = delta_lower_bound_witness(s2, rp2, {Rat(1, 2)}, {Rat(3, 4)}, {Rat(0)}, {Rat(1)});
        CHECK_FALSE(b.has_value());
    }
    SECTION("non-strict pairs are rejected") {
        CHECK_THROWS(delta_lower_bound_witness(s2, rp2, {Rat(1)}, {Rat(1)}, {Rat(0)}, {Rat(2)}));
    }
}

TEST_CASE("stability check") {
    SECTION("eta zero gives distance zero") {
        StabilityReport r = stability_check(build_rp2(0, 1), 1, 0, 12345);
        CHECK(r.pass);
        CHECK(r.dt.value == ExtendedRat::finite(0));
    }
    SECTION("perturbations stay within eta") {
        for (std::uint64_t seed : {1, 2, 3}) {
            StabilityReport r = stability_check(build_rp2(0, 1), 1, Rat(1, 4), seed);
            CHECK(r.pass);
            StabilityReport s = stability_check(build_s2(0, 1), 1, Rat(1, 10), seed);
            CHECK(s.pass);
        }
    }
}

TEST_CASE("torsion separates modules that diagrams cannot tell apart") {
    FilteredComplex rp2 = build_rp2(0, 1);
    FilteredComplex disk = build_diagram_realization({{Rat(0), Rat(1)}});
    CHECK(d_match(diagram(rp2, 1, Q), diagram(disk, 1, Q)).value == ExtendedRat::finite(0));
    DistanceResult r =
        d_T(module_on_grid(rp2, 1, Z), module_on_grid(disk, 1, Z));
    CHECK(r.value == ExtendedRat::infinity());
}

TEST_CASE("d_T is bounded by d_match on random realizations") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> npts(1, 4), num(0, 8), den(1, 4), gap(1, 6);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<DiagramPoint> a, b;
        for (int i = 0, k = npts(rng); i < k; ++i) {
            Rat bi(num(rng), den(rng));
            a.push_back({bi, bi + Rat(gap(rng), den(rng))});
        }
        for (int i = 0, k = npts(rng); i < k; ++i) {
            Rat bi(num(rng), den(rng));
            b.push_back({bi, bi + Rat(gap(rng), den(rng))});
        }
        FilteredComplex ka = build_diagram_realization(a);
        FilteredComplex kb = build_diagram_realization(b);
        ExtendedRat dt = d_T(module_on_grid(ka, 1, Q), module_on_grid(kb, 1, Q)).value;
        ExtendedRat dm = d_match(diagram(ka, 1, Q), diagram(kb, 1, Q)).value;
        CHECK(dt <= dm);
    }
}
