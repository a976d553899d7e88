#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "piwb/rational.hpp"

namespace piwb {

/**
 * Fraction-free (Bareiss) forward elimination on an n x (n+1) augmented
 * integer matrix, followed by rational back substitution. Pivots are chosen
 * by nonzero structure: the first remaining row with a nonzero entry in the
 * pivot column. The matrix is consumed in place.
 *
 * Throws std::runtime_error when the coefficient matrix is singular.
 */
inline std::vector<Rational> solve_bareiss_augmented(std::vector<std::vector<BigInt>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return {};
    BigInt prev(1), t1, t2;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r) {
            if (sgn(m[r][col]) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) throw std::runtime_error("singular linear system");
        if (pivot != col) std::swap(m[pivot], m[col]);
        for (int i = col + 1; i < n; ++i) {
            for (int j = col + 1; j <= n; ++j) {
                t1 = m[i][j] * m[col][col];
                t2 = m[i][col] * m[col][j];
                t1 -= t2;
                mpz_divexact(m[i][j].get_mpz_t(), t1.get_mpz_t(), prev.get_mpz_t());
            }
            m[i][col] = 0;
        }
        prev = m[col][col];
    }
    std::vector<Rational> x(n);
    for (int i = n - 1; i >= 0; --i) {
        Rational acc(m[i][n]);
        for (int j = i + 1; j < n; ++j) acc -= x[j] * Rational(m[i][j]);
        x[i] = acc / Rational(m[i][i]);
    }
    return x;
}

/// Exact solve of a square rational system A x = b. Denominators are cleared
/// row by row, then the integer system goes through solve_bareiss_augmented.
inline std::vector<Rational> solve_linear_system(const std::vector<std::vector<Rational>>& a,
                                                 const std::vector<Rational>& b) {
    const int n = static_cast<int>(a.size());
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("rhs length mismatch");
    std::vector<std::vector<BigInt>> m(n);
    BigInt scale;
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(a[i].size()) != n) throw std::invalid_argument("matrix not square");
        BigInt lcm = b[i].get_den();
        for (int j = 0; j < n; ++j) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a[i][j].get_den().get_mpz_t());
        m[i].resize(n + 1);
        for (int j = 0; j < n; ++j) {
            mpz_divexact(scale.get_mpz_t(), lcm.get_mpz_t(), a[i][j].get_den().get_mpz_t());
            m[i][j] = a[i][j].get_num() * scale;
        }
        mpz_divexact(scale.get_mpz_t(), lcm.get_mpz_t(), b[i].get_den().get_mpz_t());
        m[i][n] = b[i].get_num() * scale;
    }
    return solve_bareiss_augmented(m);
}

/**
 * Rank over the rationals of an integer matrix, by fraction-free row echelon
 * reduction. Columns without a pivot are skipped; the divisor is always the
 * pivot of the previous successful elimination step, which keeps every
 * division exact (Sylvester identity). The matrix is consumed.
 */
inline int integer_matrix_rank(std::vector<std::vector<BigInt>> m) {
    const int rows = static_cast<int>(m.size());
    if (rows == 0) return 0;
    const int cols = static_cast<int>(m[0].size());
    BigInt prev(1), t1, t2;
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r) {
            if (sgn(m[r][col]) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != rank) std::swap(m[pivot], m[rank]);
        for (int i = rank + 1; i < rows; ++i) {
            for (int j = col + 1; j < cols; ++j) {
                t1 = m[i][j] * m[rank][col];
                t2 = m[i][col] * m[rank][j];
                t1 -= t2;
                mpz_divexact(m[i][j].get_mpz_t(), t1.get_mpz_t(), prev.get_mpz_t());
            }
            m[i][col] = 0;
        }
        prev = m[rank][col];
        ++rank;
    }
    return rank;
}

}  // namespace piwb
