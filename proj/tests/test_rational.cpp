#include "tp/rational.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace tp;

TEST_CASE("rational formatting") {
    CHECK(format_rat(Rat(0)) == "0");
    CHECK(format_rat(Rat(7)) == "7");
    CHECK(format_rat(Rat(-3)) == "-3");
    CHECK(format_rat(Rat(1, 2)) == "1/2");
    CHECK(format_rat(Rat(-9, 6)) == "-3/2");
    CHECK(format_int(Int(-12)) == "-12");
}

TEST_CASE("rational parsing") {
    CHECK(parse_rat("0") == Rat(0));
    CHECK(parse_rat("7") == Rat(7));
    CHECK(parse_rat("-3/2") == Rat(-3, 2));
    CHECK(parse_rat("2/4") == Rat(1, 2));
    CHECK(parse_rat("-0") == Rat(0));
    CHECK_THROWS(parse_rat(""));
    CHECK_THROWS(parse_rat("1/0"));
    CHECK_THROWS(parse_rat("a/b"));
    CHECK_THROWS(parse_rat("1.5"));
    CHECK_THROWS(parse_rat("1/ 2"));
}

TEST_CASE("parse round-trips through format") {
    for (const char *s : {"0", "1", "-1", "5/3", "-22/7", "100000000000000000000/3"}) {
        CHECK(format_rat(parse_rat(s)) == s);
    }
}

TEST_CASE("extended rationals order with infinity maximal") {
    ExtendedRat inf = ExtendedRat::infinity();
    ExtendedRat one = ExtendedRat::finite(1);
    ExtendedRat two = ExtendedRat::finite(2);
    CHECK(one < two);
    CHECK(one < inf);
    CHECK_FALSE(inf < inf);
    CHECK(inf <= inf);
    CHECK(one <= one);
    CHECK_FALSE(inf < one);
    CHECK(inf == inf);
    CHECK_FALSE(one == two);
    CHECK((one + two) == ExtendedRat::finite(3));
    CHECK((one + inf) == inf);
    CHECK((inf + inf) == inf);
    CHECK(inf.str() == "inf");
    CHECK(ExtendedRat::finite(Rat(1, 2)).str() == "1/2");
}
