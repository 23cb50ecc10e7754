#pragma once

#include "tp/abelian.hpp"
#include "tp/complex.hpp"
#include "tp/parallel.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace tp {

struct MultiDimUnsupported : std::runtime_error {
    explicit MultiDimUnsupported(const std::string &m) : std::runtime_error(m) {}
};

struct CoefficientSpec {
    enum class Kind { integers, rationals, prime_field };
    Kind kind = Kind::integers;
    long long p = 0;

    bool is_field() const { return kind != Kind::integers; }

    static CoefficientSpec integers() { return {Kind::integers, 0}; }
    static CoefficientSpec rationals() { return {Kind::rationals, 0}; }
    static CoefficientSpec prime_field(long long p) {
        if (p < 2)
            throw std::invalid_argument("prime field needs p >= 2");
        for (long long d = 2; d * d <= p; ++d)
            if (p % d == 0)
                throw std::invalid_argument(std::to_string(p) + " is not prime");
        return {Kind::prime_field, p};
    }

    // "z", "q", or "zp:P"
    static CoefficientSpec parse(const std::string &s) {
        if (s == "z")
            return integers();
        if (s == "q")
            return rationals();
        if (s.rfind("zp:", 0) == 0) {
            try {
                return prime_field(std::stoll(s.substr(3)));
            } catch (const std::invalid_argument &) {
                throw std::invalid_argument("bad coefficient spec '" + s + "'");
            } catch (const std::out_of_range &) {
                throw std::invalid_argument("bad coefficient spec '" + s + "'");
            }
        }
        throw std::invalid_argument("bad coefficient spec '" + s + "' (want z, q or zp:P)");
    }

    std::string str() const {
        switch (kind) {
        case Kind::integers:
            return "z";
        case Kind::rationals:
            return "q";
        default:
            return "zp:" + std::to_string(p);
        }
    }
};

// Over the integers the full group; over a field the free rank carries the
// dimension and the factor list stays empty.
using GroupValue = FgAbelianGroup;

namespace detail {

inline std::map<std::vector<int>, std::size_t> simplex_index(const FilteredComplex &K) {
    std::map<std::vector<int>, std::size_t> m;
    for (std::size_t i = 0; i < K.simplices.size(); ++i)
        m.emplace(K.simplices[i].vertices, i);
    return m;
}

// Boundary matrix of degree d restricted to one sublevel: rows are the
// (d-1)-simplices of the sublevel, columns the d-simplices, entries the
// usual alternating signs.
inline IntMatrix restricted_boundary(const FilteredComplex &K,
                                     const std::map<std::vector<int>, std::size_t> &index,
                                     const std::vector<std::size_t> &sub, int d,
                                     std::vector<std::size_t> *col_simplices = nullptr,
                                     std::vector<std::size_t> *row_simplices = nullptr) {
    std::vector<std::size_t> rows_ids, cols_ids;
    std::map<std::size_t, std::size_t> row_pos;
    for (std::size_t id : sub) {
        int dim = K.simplices[id].dim();
        if (dim == d - 1) {
            row_pos[id] = rows_ids.size();
            rows_ids.push_back(id);
        } else if (dim == d) {
            cols_ids.push_back(id);
        }
    }
    IntMatrix M(rows_ids.size(), cols_ids.size());
    for (std::size_t j = 0; j < cols_ids.size(); ++j) {
        const std::vector<int> &v = K.simplices[cols_ids[j]].vertices;
        if (v.size() < 2)
            continue;
        int sign = 1;
        for (std::size_t drop = 0; drop < v.size(); ++drop) {
            std::vector<int> f;
            for (std::size_t t = 0; t < v.size(); ++t)
                if (t != drop)
                    f.push_back(v[t]);
            M.at(row_pos.at(index.at(f)), j) = sign;
            sign = -sign;
        }
    }
    if (col_simplices)
        *col_simplices = std::move(cols_ids);
    if (row_simplices)
        *row_simplices = std::move(rows_ids);
    return M;
}

// --- dense linear algebra over Z_p -------------------------------------

inline long long mod_pow(long long b, long long e, long long p) {
    long long r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1)
            r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

struct ModMatrix {
    std::size_t rows = 0, cols = 0;
    long long p = 2;
    std::vector<long long> a;

    ModMatrix(std::size_t r, std::size_t c, long long prime)
        : rows(r), cols(c), p(prime), a(r * c, 0) {}
    long long &at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    long long at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static ModMatrix reduce(const IntMatrix &m, long long p) {
        ModMatrix out(m.rows, m.cols, p);
        for (std::size_t i = 0; i < m.rows * m.cols; ++i) {
            Int r = m.a[i] % p;
            if (r < 0)
                r += p;
            out.a[i] = static_cast<long long>(r);
        }
        return out;
    }
};

// Row reduction; returns rank, optionally the kernel basis as columns.
inline std::size_t mod_eliminate(ModMatrix m, std::vector<std::vector<long long>> *kernel) {
    const long long p = m.p;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t piv = r;
        while (piv < m.rows && m.at(piv, c) == 0)
            ++piv;
        if (piv == m.rows)
            continue;
        for (std::size_t j = 0; j < m.cols; ++j)
            std::swap(m.at(r, j), m.at(piv, j));
        long long inv = mod_pow(m.at(r, c), p - 2, p);
        for (std::size_t j = 0; j < m.cols; ++j)
            m.at(r, j) = m.at(r, j) * inv % p;
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == r || m.at(i, c) == 0)
                continue;
            long long f = m.at(i, c);
            for (std::size_t j = 0; j < m.cols; ++j)
                m.at(i, j) = ((m.at(i, j) - f * m.at(r, j)) % p + p) % p;
        }
        pivot_col.push_back(c);
        ++r;
    }
    if (kernel) {
        kernel->clear();
        std::vector<bool> is_pivot(m.cols, false);
        for (std::size_t c : pivot_col)
            is_pivot[c] = true;
        for (std::size_t fc = 0; fc < m.cols; ++fc) {
            if (is_pivot[fc])
                continue;
            std::vector<long long> v(m.cols, 0);
            v[fc] = 1;
            for (std::size_t ri = 0; ri < pivot_col.size(); ++ri)
                v[pivot_col[ri]] = (p - m.at(ri, fc)) % p;
            kernel->push_back(std::move(v));
        }
    }
    return r;
}

inline std::size_t mod_rank(const IntMatrix &m, long long p) {
    return mod_eliminate(ModMatrix::reduce(m, p), nullptr);
}

} // namespace detail

// The persistent homology group H_k(u, v): image of the map induced on k-th
// homology by the inclusion of the sublevel at u into the sublevel at v.
// Over the integers: with Z a lattice basis of the u-cycles embedded in the
// v-chain coordinates and Bd the (k+1)-boundary columns of the v-sublevel,
// the relation lattice is R = {x : Z x lies in the column lattice of Bd},
// read off the first block of the kernel of [Z | Bd]; the group returned is
// the cokernel of R.  Over a field the analogous rank difference.
inline GroupValue persistent_group(const FilteredComplex &K, int k, const Grade &u,
                                   const Grade &v, const CoefficientSpec &coeffs) {
    if (static_cast<int>(u.size()) != K.n || static_cast<int>(v.size()) != K.n)
        throw std::invalid_argument("grade dimension mismatch");
    if (!grade_leq(u, v))
        throw std::invalid_argument("persistent_group needs u <= v coordinatewise");
    if (k < 0 || k > K.top_dim())
        return FgAbelianGroup::trivial();

    auto index = detail::simplex_index(K);
    std::vector<std::size_t> sub_u = sublevel(K, u), sub_v = sublevel(K, v);

    std::vector<std::size_t> cycles_cols; // k-simplices of the u-sublevel
    IntMatrix bd_k_u = detail::restricted_boundary(K, index, sub_u, k, &cycles_cols);
    if (cycles_cols.empty())
        return FgAbelianGroup::trivial();

    std::vector<std::size_t> v_k_rows;
    IntMatrix bd_k1_v = detail::restricted_boundary(K, index, sub_v, k + 1, nullptr, &v_k_rows);
    std::map<std::size_t, std::size_t> v_pos;
    for (std::size_t j = 0; j < v_k_rows.size(); ++j)
        v_pos[v_k_rows[j]] = j;

    if (coeffs.kind == CoefficientSpec::Kind::prime_field) {
        const long long p = coeffs.p;
        std::vector<std::vector<long long>> ker;
        detail::mod_eliminate(detail::ModMatrix::reduce(bd_k_u, p), &ker);
        IntMatrix block(v_k_rows.size(), ker.size() + bd_k1_v.cols);
        for (std::size_t j = 0; j < ker.size(); ++j)
            for (std::size_t i = 0; i < cycles_cols.size(); ++i)
                block.at(v_pos.at(cycles_cols[i]), j) = ker[j][i];
        for (std::size_t j = 0; j < bd_k1_v.cols; ++j)
            for (std::size_t i = 0; i < bd_k1_v.rows; ++i)
                block.at(i, ker.size() + j) = bd_k1_v.at(i, j);
        std::size_t dim = detail::mod_rank(block, p) - detail::mod_rank(bd_k1_v, p);
        return FgAbelianGroup::free(dim);
    }

    IntMatrix Z = kernel_lattice(bd_k_u); // cycles_cols.size() x z
    const std::size_t z = Z.cols;
    if (z == 0)
        return FgAbelianGroup::trivial();
    IntMatrix block(v_k_rows.size(), z + bd_k1_v.cols);
    for (std::size_t i = 0; i < cycles_cols.size(); ++i) {
        std::size_t row = v_pos.at(cycles_cols[i]);
        for (std::size_t j = 0; j < z; ++j)
            block.at(row, j) = Z.at(i, j);
    }
    for (std::size_t j = 0; j < bd_k1_v.cols; ++j)
        for (std::size_t i = 0; i < bd_k1_v.rows; ++i)
            block.at(i, z + j) = bd_k1_v.at(i, j);

    if (coeffs.kind == CoefficientSpec::Kind::rationals)
        return FgAbelianGroup::free(rank(block) - rank(bd_k1_v));

    IntMatrix ker = kernel_lattice(block);
    IntMatrix R(z, ker.cols);
    for (std::size_t i = 0; i < z; ++i)
        for (std::size_t j = 0; j < ker.cols; ++j)
            R.at(i, j) = ker.at(i, j);
    return cokernel(R);
}

inline std::size_t persistent_betti(const FilteredComplex &K, int k, const Grade &u,
                                    const Grade &v, const CoefficientSpec &field) {
    if (!field.is_field())
        throw std::invalid_argument("persistent_betti needs field coefficients");
    return persistent_group(K, k, u, v, field).free_rank;
}

// All groups of one degree over the critical grid.  Cells are addressed by
// per-coordinate indices into `axis`, whose entries are cell representative
// grades: one sentinel below the minimum, every critical value, and one
// sentinel above the maximum.
class PersistenceModule {
  public:
    FilteredComplex complex;
    int degree = 0;
    CoefficientSpec coeffs;
    std::vector<std::vector<Rat>> criticals; // per coordinate, sorted
    std::vector<std::vector<Rat>> axis;      // cell representatives

    PersistenceModule(FilteredComplex K, int k, CoefficientSpec c)
        : complex(std::move(K)), degree(k), coeffs(c),
          criticals(critical_values(complex)), mutex_(std::make_unique<std::mutex>()) {
        axis.resize(complex.n);
        for (int i = 0; i < complex.n; ++i) {
            const auto &cv = criticals[i];
            if (cv.empty()) {
                axis[i] = {0};
                continue;
            }
            axis[i].push_back(cv.front() - 1);
            for (const Rat &c : cv)
                axis[i].push_back(c);
            axis[i].push_back(cv.back() + 1);
        }
    }

    int n() const { return complex.n; }

    // Index of the grid cell containing x on coordinate i.
    std::size_t cell_of(int i, const Rat &x) const {
        const auto &cv = criticals[i];
        std::size_t cnt = std::upper_bound(cv.begin(), cv.end(), x) - cv.begin();
        return cnt; // 0 = below-min sentinel, else the cell of the cnt-th critical
    }

    Grade representative(const std::vector<std::size_t> &cell) const {
        Grade g(complex.n);
        for (int i = 0; i < complex.n; ++i)
            g[i] = axis[i][cell[i]];
        return g;
    }

    GroupValue value(const std::vector<std::size_t> &I, const std::vector<std::size_t> &J) const {
        {
            std::lock_guard<std::mutex> lock(*mutex_);
            auto it = cache_.find({I, J});
            if (it != cache_.end())
                return it->second;
        }
        GroupValue g = persistent_group(complex, degree, representative(I), representative(J), coeffs);
        std::lock_guard<std::mutex> lock(*mutex_);
        return cache_.emplace(std::make_pair(I, J), std::move(g)).first->second;
    }

    // Group at arbitrary real (u, v); constant on grid cells.
    GroupValue value_at(const Grade &u, const Grade &v) const {
        std::vector<std::size_t> I(complex.n), J(complex.n);
        for (int i = 0; i < complex.n; ++i) {
            I[i] = cell_of(i, u[i]);
            J[i] = cell_of(i, v[i]);
        }
        return value(I, J);
    }

    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> all_cell_pairs() const {
        std::vector<std::vector<std::size_t>> cells;
        std::vector<std::size_t> cur(complex.n, 0);
        for (;;) {
            cells.push_back(cur);
            int i = 0;
            while (i < complex.n && ++cur[i] == axis[i].size()) {
                cur[i] = 0;
                ++i;
            }
            if (i == complex.n)
                break;
        }
        std::sort(cells.begin(), cells.end());
        std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> pairs;
        for (const auto &I : cells)
            for (const auto &J : cells) {
                bool le = true;
                for (int i = 0; i < complex.n && le; ++i)
                    le = I[i] <= J[i];
                if (le)
                    pairs.emplace_back(I, J);
            }
        return pairs;
    }

    // Evaluated cache contents in deterministic order.
    const std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, GroupValue> &
    cells() const {
        return cache_;
    }

    void insert(const std::vector<std::size_t> &I, const std::vector<std::size_t> &J,
                GroupValue g) {
        std::lock_guard<std::mutex> lock(*mutex_);
        cache_.emplace(std::make_pair(I, J), std::move(g));
    }

  private:
    mutable std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, GroupValue>
        cache_;
    mutable std::unique_ptr<std::mutex> mutex_;
};

// Fills the whole grid.  Cell pairs are evaluated independently (possibly in
// parallel) and merged into the module cache afterwards.
inline PersistenceModule module_on_grid(const FilteredComplex &K, int k,
                                        const CoefficientSpec &coeffs) {
    PersistenceModule m(K, k, coeffs);
    auto pairs = m.all_cell_pairs();
    std::vector<GroupValue> results(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        results[i] = persistent_group(m.complex, k, m.representative(pairs[i].first),
                                      m.representative(pairs[i].second), coeffs);
    });
    for (std::size_t i = 0; i < pairs.size(); ++i)
        m.insert(pairs[i].first, pairs[i].second, results[i]);
    return m;
}

// Finite multiset of (birth, death) pairs; the diagonal is implicit with
// infinite multiplicity.
struct PersistenceDiagram {
    std::map<std::pair<Rat, ExtendedRat>, std::size_t> points;

    void add(const Rat &b, const ExtendedRat &d, std::size_t mult = 1) {
        points[{b, d}] += mult;
    }
    std::size_t total() const {
        std::size_t t = 0;
        for (const auto &[p, m] : points)
            t += m;
        return t;
    }
    bool operator==(const PersistenceDiagram &o) const { return points == o.points; }
};

namespace detail {

struct QField {
    using Elem = Rat;
    Elem from_sign(int s) const { return s; }
    bool is_zero(const Elem &e) const { return e == 0; }
    Elem ratio(const Elem &a, const Elem &b) const { return a / b; }
    Elem mul_sub(const Elem &x, const Elem &f, const Elem &y) const { return x - f * y; }
};

struct ZpField {
    long long p;
    using Elem = long long;
    Elem from_sign(int s) const { return ((s % p) + p) % p; }
    bool is_zero(const Elem &e) const { return e == 0; }
    Elem ratio(const Elem &a, const Elem &b) const { return a * mod_pow(b, p - 2, p) % p; }
    Elem mul_sub(const Elem &x, const Elem &f, const Elem &y) const {
        return ((x - f * y % p) % p + p) % p;
    }
};

// Standard persistence pairing by column reduction, simplices ordered by
// (grade, dimension, id).
template <class F>
PersistenceDiagram diagram_impl(const FilteredComplex &K, int k, const F &field) {
    using Column = std::map<std::size_t, typename F::Elem>; // row -> coefficient
    const std::size_t N = K.simplices.size();
    std::vector<std::size_t> order(N);
    for (std::size_t i = 0; i < N; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Simplex &sa = K.simplices[a], &sb = K.simplices[b];
        if (sa.grade[0] != sb.grade[0])
            return sa.grade[0] < sb.grade[0];
        if (sa.dim() != sb.dim())
            return sa.dim() < sb.dim();
        return a < b;
    });
    std::vector<std::size_t> pos(N);
    for (std::size_t j = 0; j < N; ++j)
        pos[order[j]] = j;
    auto index = simplex_index(K);

    std::vector<Column> reduced(N);
    std::map<std::size_t, std::size_t> pivot; // low row -> column position
    std::vector<bool> positive(N, false);
    std::map<std::size_t, std::size_t> killer; // positive position -> killing position

    for (std::size_t j = 0; j < N; ++j) {
        const Simplex &s = K.simplices[order[j]];
        Column col;
        int sign = 1;
        const std::vector<int> &v = s.vertices;
        if (v.size() >= 2)
            for (std::size_t drop = 0; drop < v.size(); ++drop) {
                std::vector<int> f;
                for (std::size_t t = 0; t < v.size(); ++t)
                    if (t != drop)
                        f.push_back(v[t]);
                col[pos[index.at(f)]] = field.from_sign(sign);
                sign = -sign;
            }
        while (!col.empty()) {
            std::size_t low = col.rbegin()->first;
            auto it = pivot.find(low);
            if (it == pivot.end())
                break;
            const Column &other = reduced[it->second];
            typename F::Elem f = field.ratio(col.rbegin()->second, other.rbegin()->second);
            for (const auto &[row, coeff] : other) {
                auto jt = col.find(row);
                typename F::Elem next =
                    field.mul_sub(jt == col.end() ? field.from_sign(0) : jt->second, f, coeff);
                if (field.is_zero(next))
                    col.erase(row);
                else
                    col[row] = next;
            }
        }
        if (col.empty()) {
            positive[j] = true;
        } else {
            std::size_t low = col.rbegin()->first;
            pivot[low] = j;
            killer[low] = j;
            reduced[j] = std::move(col);
        }
    }

    PersistenceDiagram out;
    for (std::size_t j = 0; j < N; ++j) {
        if (!positive[j] || K.simplices[order[j]].dim() != k)
            continue;
        const Rat &birth = K.simplices[order[j]].grade[0];
        auto it = killer.find(j);
        if (it == killer.end()) {
            out.add(birth, ExtendedRat::infinity());
        } else {
            const Rat &death = K.simplices[order[it->second]].grade[0];
            if (birth < death)
                out.add(birth, ExtendedRat::finite(death));
        }
    }
    return out;
}

} // namespace detail

// Persistence diagram of a 1-parameter filtration with field coefficients.
inline PersistenceDiagram diagram(const FilteredComplex &K, int k,
                                  const CoefficientSpec &field) {
    if (K.n != 1)
        throw MultiDimUnsupported("persistence diagrams require a 1-dimensional filtration");
    if (!field.is_field())
        throw std::invalid_argument("diagram needs field coefficients (q or zp:P)");
    if (k < 0)
        return {};
    if (field.kind == CoefficientSpec::Kind::rationals)
        return detail::diagram_impl(K, k, detail::QField{});
    return detail::diagram_impl(K, k, detail::ZpField{field.p});
}

} // namespace tp
