#include "tp/int_matrix.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

using namespace tp;

namespace {

IntMatrix random_matrix(std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> dim(0, 8), entry(-10, 10);
    IntMatrix m(dim(rng), dim(rng));
    for (std::size_t i = 0; i < m.rows * m.cols; ++i)
        m.a[i] = entry(rng);
    return m;
}

bool unimodular(const IntMatrix &m) {
    Int d = bareiss_determinant(m);
    return d == 1 || d == -1;
}

// gcd of all k x k minors, 0 if every minor vanishes
Int minor_gcd(const IntMatrix &m, std::size_t k) {
    std::vector<std::size_t> ri(k), ci(k);
    Int g = 0;
    std::function<void(std::size_t, std::size_t)> pick_cols = [&](std::size_t pos,
                                                                  std::size_t from) {
        if (pos == k) {
            IntMatrix sub(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j)
                    sub.at(i, j) = m.at(ri[i], ci[j]);
            g = boost::multiprecision::gcd(g, bareiss_determinant(sub));
            return;
        }
        for (std::size_t c = from; c < m.cols; ++c) {
            ci[pos] = c;
            pick_cols(pos + 1, c + 1);
        }
    };
    std::function<void(std::size_t, std::size_t)> pick_rows = [&](std::size_t pos,
                                                                  std::size_t from) {
        if (pos == k) {
            pick_cols(0, 0);
            return;
        }
        for (std::size_t r = from; r < m.rows; ++r) {
            ri[pos] = r;
            pick_rows(pos + 1, r + 1);
        }
    };
    pick_rows(0, 0);
    return g < 0 ? Int(-g) : g;
}

} // namespace

TEST_CASE("smith normal form on fixed cases") {
    SECTION("identity") {
        auto s = smith_normal_form(IntMatrix::identity(2));
        CHECK(s.D == IntMatrix::identity(2));
    }
    SECTION("zero matrix keeps its shape") {
        IntMatrix z(2, 3);
        auto s = smith_normal_form(z);
        CHECK(s.D == z);
    }
    SECTION("[[2,4],[6,8]] has diagonal 2, 4") {
        IntMatrix m(2, 2);
        m.at(0, 0) = 2;
        m.at(0, 1) = 4;
        m.at(1, 0) = 6;
        m.at(1, 1) = 8;
        auto s = smith_normal_form(m);
        CHECK(s.D.at(0, 0) == 2);
        CHECK(s.D.at(1, 1) == 4);
        CHECK(mul(mul(s.U, m), s.V) == s.D);
    }
}

TEST_CASE("smith normal form properties on random matrices") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        IntMatrix m = random_matrix(rng);
        auto s = smith_normal_form(m);
        INFO("trial " << trial << ", " << m.rows << "x" << m.cols);
        REQUIRE(mul(mul(s.U, m), s.V) == s.D);
        REQUIRE(unimodular(s.U));
        REQUIRE(unimodular(s.V));
        std::size_t d = std::min(m.rows, m.cols);
        for (std::size_t i = 0; i < d; ++i) {
            REQUIRE(s.D.at(i, i) >= 0);
            if (i + 1 < d && s.D.at(i + 1, i + 1) != 0)
                REQUIRE(s.D.at(i + 1, i + 1) % (s.D.at(i, i) == 0 ? 1 : s.D.at(i, i)) == 0);
        }
        for (std::size_t i = 0; i < m.rows; ++i)
            for (std::size_t j = 0; j < m.cols; ++j)
                if (i != j)
                    REQUIRE(s.D.at(i, j) == 0);
        if (m.rows == m.cols && m.rows > 0) {
            Int det = bareiss_determinant(m);
            Int prod = 1;
            for (std::size_t i = 0; i < d; ++i)
                prod *= s.D.at(i, i);
            REQUIRE((det < 0 ? Int(-det) : det) == (prod < 0 ? Int(-prod) : prod));
        }
    }
}

TEST_CASE("diagonal entries match the minor-gcd characterization") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(1, 4), entry(-6, 6);
    for (int trial = 0; trial < 60; ++trial) {
        IntMatrix m(dim(rng), dim(rng));
        for (std::size_t i = 0; i < m.rows * m.cols; ++i)
            m.a[i] = entry(rng);
        auto s = smith_normal_form(m);
        for (std::size_t k = 1; k <= std::min(m.rows, m.cols); ++k) {
            Int g = minor_gcd(m, k);
            Int prod = 1;
            for (std::size_t i = 0; i < k; ++i)
                prod *= s.D.at(i, i);
            REQUIRE(prod == g);
        }
    }
}

TEST_CASE("kernel lattice") {
    SECTION("kernel columns are genuine kernel vectors of full count") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 200; ++trial) {
            IntMatrix m = random_matrix(rng);
            IntMatrix k = kernel_lattice(m);
            REQUIRE(k.rows == m.cols);
            REQUIRE(k.cols == m.cols - rank(m));
            if (k.cols > 0) {
                IntMatrix prod = mul(m, k);
                for (const Int &x : prod.a)
                    REQUIRE(x == 0);
                REQUIRE(rank(k) == k.cols);
            }
        }
    }
    SECTION("kernel of injective map is empty") {
        IntMatrix m(2, 1);
        m.at(0, 0) = 3;
        CHECK(kernel_lattice(m).cols == 0);
    }
    SECTION("kernel of zero map is everything") {
        IntMatrix z(2, 3);
        CHECK(kernel_lattice(z).cols == 3);
    }
}
