#pragma once

#include "tp/rational.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace tp {

// Dense matrix of arbitrary-precision integers, row-major.  Empty shapes
// (0 rows and/or 0 columns) are legal everywhere.
struct IntMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> a;

    IntMatrix() = default;
    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

    Int &at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Int &at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m.at(i, i) = 1;
        return m;
    }

    bool operator==(const IntMatrix &o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
};

inline IntMatrix mul(const IntMatrix &x, const IntMatrix &y) {
    IntMatrix z(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const Int &xik = x.at(i, k);
            if (xik == 0)
                continue;
            for (std::size_t j = 0; j < y.cols; ++j)
                z.at(i, j) += xik * y.at(k, j);
        }
    return z;
}

struct SmithDecomposition {
    IntMatrix U, D, V; // U*M*V = D
};

// Smith normal form with unimodular transforms.  Pivot choice: nonzero entry
// of minimal absolute value in the remaining submatrix, which keeps
// intermediate growth small at this scale.
inline SmithDecomposition smith_normal_form(const IntMatrix &M) {
    SmithDecomposition s{IntMatrix::identity(M.rows), M, IntMatrix::identity(M.cols)};
    IntMatrix &D = s.D;
    IntMatrix &U = s.U;
    IntMatrix &V = s.V;

    auto row_swap = [&](std::size_t i, std::size_t j) {
        for (std::size_t c = 0; c < D.cols; ++c)
            std::swap(D.at(i, c), D.at(j, c));
        for (std::size_t c = 0; c < U.cols; ++c)
            std::swap(U.at(i, c), U.at(j, c));
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < D.rows; ++r)
            std::swap(D.at(r, i), D.at(r, j));
        for (std::size_t r = 0; r < V.rows; ++r)
            std::swap(V.at(r, i), V.at(r, j));
    };
    auto row_addmul = [&](std::size_t dst, std::size_t src, const Int &q) {
        for (std::size_t c = 0; c < D.cols; ++c)
            D.at(dst, c) += q * D.at(src, c);
        for (std::size_t c = 0; c < U.cols; ++c)
            U.at(dst, c) += q * U.at(src, c);
    };
    auto col_addmul = [&](std::size_t dst, std::size_t src, const Int &q) {
        for (std::size_t r = 0; r < D.rows; ++r)
            D.at(r, dst) += q * D.at(r, src);
        for (std::size_t r = 0; r < V.rows; ++r)
            V.at(r, dst) += q * V.at(r, src);
    };
    auto row_negate = [&](std::size_t i) {
        for (std::size_t c = 0; c < D.cols; ++c)
            D.at(i, c) = -D.at(i, c);
        for (std::size_t c = 0; c < U.cols; ++c)
            U.at(i, c) = -U.at(i, c);
    };

    const std::size_t steps = std::min(M.rows, M.cols);
    for (std::size_t t = 0; t < steps; ++t) {
        for (;;) {
            // locate the minimal-magnitude nonzero entry of D[t.., t..]
            bool found = false;
            std::size_t pi = t, pj = t;
            Int best = 0;
            for (std::size_t i = t; i < D.rows; ++i)
                for (std::size_t j = t; j < D.cols; ++j) {
                    const Int &x = D.at(i, j);
                    if (x == 0)
                        continue;
                    Int ax = abs(x);
                    if (!found || ax < best) {
                        found = true;
                        best = ax;
                        pi = i;
                        pj = j;
                    }
                }
            if (!found) {
                t = steps; // remaining block is zero
                break;
            }
            if (pi != t)
                row_swap(pi, t);
            if (pj != t)
                col_swap(pj, t);

            const Int &p = D.at(t, t);
            bool dirty = false;
            for (std::size_t i = t + 1; i < D.rows; ++i) {
                if (D.at(i, t) == 0)
                    continue;
                Int q = D.at(i, t) / p; // truncated: remainder smaller than p
                if (q != 0)
                    row_addmul(i, t, -q);
                if (D.at(i, t) != 0)
                    dirty = true;
            }
            for (std::size_t j = t + 1; j < D.cols; ++j) {
                if (D.at(t, j) == 0)
                    continue;
                Int q = D.at(t, j) / p;
                if (q != 0)
                    col_addmul(j, t, -q);
                if (D.at(t, j) != 0)
                    dirty = true;
            }
            if (dirty)
                continue; // a smaller entry appeared, repick the pivot

            // pivot must divide everything that follows
            bool fixed = true;
            for (std::size_t i = t + 1; i < D.rows && fixed; ++i)
                for (std::size_t j = t + 1; j < D.cols && fixed; ++j)
                    if (D.at(i, j) % p != 0) {
                        row_addmul(t, i, 1);
                        fixed = false;
                    }
            if (!fixed)
                continue;

            if (D.at(t, t) < 0)
                row_negate(t);
            break;
        }
        if (t == steps)
            break;
    }
    return s;
}

inline std::size_t snf_rank(const IntMatrix &D) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < std::min(D.rows, D.cols); ++i)
        if (D.at(i, i) != 0)
            ++r;
    return r;
}

inline std::size_t rank(const IntMatrix &M) { return snf_rank(smith_normal_form(M).D); }

// Columns form a basis of the full integer kernel lattice {x : M x = 0}.
// From U M V = D the kernel is spanned by the columns of V past rank(D).
inline IntMatrix kernel_lattice(const IntMatrix &M) {
    if (M.cols == 0)
        return IntMatrix(0, 0);
    SmithDecomposition s = smith_normal_form(M);
    std::size_t r = snf_rank(s.D);
    IntMatrix K(M.cols, M.cols - r);
    for (std::size_t i = 0; i < M.cols; ++i)
        for (std::size_t j = r; j < M.cols; ++j)
            K.at(i, j - r) = s.V.at(i, j);
    return K;
}

// Fraction-free Bareiss elimination; exact determinant, independent of SNF.
inline Int bareiss_determinant(IntMatrix m) {
    if (m.rows != m.cols)
        throw std::invalid_argument("determinant of non-square matrix");
    const std::size_t n = m.rows;
    if (n == 0)
        return 1;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            std::size_t piv = k + 1;
            while (piv < n && m.at(piv, k) == 0)
                ++piv;
            if (piv == n)
                return 0;
            for (std::size_t j = 0; j < n; ++j)
                std::swap(m.at(k, j), m.at(piv, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

} // namespace tp
