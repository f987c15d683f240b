#pragma once

// Exact integer matrix utilities: Smith normal form with unimodular
// transforms, column-style Hermite normal form, and the small solvers the
// group layer needs. Everything is dense and meant for desk-scale ranks.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace alharm {

using i64 = long long;
using i128 = __int128_t;

using Mat = std::vector<std::vector<i64>>;

inline Mat mat_zero(int rows, int cols) {
  return Mat(rows, std::vector<i64>(cols, 0));
}

inline Mat mat_identity(int n) {
  Mat m = mat_zero(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline int mat_rows(const Mat& m) { return static_cast<int>(m.size()); }
inline int mat_cols(const Mat& m) {
  return m.empty() ? 0 : static_cast<int>(m[0].size());
}

inline i64 checked_i64(i128 v) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
    throw std::overflow_error("integer matrix entry overflow");
  return static_cast<i64>(v);
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
  if (mat_rows(a) == 0) return {};  // 0 x n factor, column count unrepresentable
  int n = mat_rows(a), k = mat_cols(a), m = mat_cols(b);
  if (k != mat_rows(b)) throw std::invalid_argument("mat_mul shape mismatch");
  Mat c = mat_zero(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      i128 acc = 0;
      for (int t = 0; t < k; ++t) acc += i128(a[i][t]) * b[t][j];
      c[i][j] = checked_i64(acc);
    }
  return c;
}

inline std::vector<i64> mat_vec(const Mat& a, const std::vector<i64>& x) {
  int n = mat_rows(a), k = mat_cols(a);
  if (n == 0) return {};  // 0 x n matrix, column count unrepresentable
  if (k != static_cast<int>(x.size()))
    throw std::invalid_argument("mat_vec shape mismatch");
  std::vector<i64> y(n, 0);
  for (int i = 0; i < n; ++i) {
    i128 acc = 0;
    for (int t = 0; t < k; ++t) acc += i128(a[i][t]) * x[t];
    y[i] = checked_i64(acc);
  }
  return y;
}

inline i64 gcd_i64(i64 a, i64 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Floor division and the matching remainder, used by the normal form
// reductions so pivots stay canonical for negative entries as well.
inline i64 fdiv(i64 a, i64 b) {
  i64 q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

struct SNFResult {
  Mat u;  // rows transform, unimodular
  Mat s;  // diagonal, d1 | d2 | ...
  Mat v;  // cols transform, unimodular
};

// Smith normal form: returns U, S, V with U*M*V = S, S diagonal with
// nonnegative entries satisfying the divisibility chain.
inline SNFResult smith_normal_form(const Mat& m0) {
  int n = mat_rows(m0), c = mat_cols(m0);
  Mat s = m0;
  Mat u = mat_identity(n);
  Mat v = mat_identity(c);

  auto row_addmul = [&](Mat& a, int dst, int src, i64 k) {
    for (int j = 0; j < mat_cols(a); ++j)
      a[dst][j] = checked_i64(i128(a[dst][j]) + i128(k) * a[src][j]);
  };
  auto col_addmul = [&](Mat& a, int dst, int src, i64 k) {
    for (int i = 0; i < mat_rows(a); ++i)
      a[i][dst] = checked_i64(i128(a[i][dst]) + i128(k) * a[i][src]);
  };
  auto row_swap = [&](Mat& a, int i, int j) { std::swap(a[i], a[j]); };
  auto col_swap = [&](Mat& a, int i, int j) {
    for (int r = 0; r < mat_rows(a); ++r) std::swap(a[r][i], a[r][j]);
  };
  auto row_neg = [&](Mat& a, int i) {
    for (int j = 0; j < mat_cols(a); ++j) a[i][j] = -a[i][j];
  };

  int t = 0;
  int rank_bound = std::min(n, c);
  while (t < rank_bound) {
    // Find the entry of least nonzero magnitude in the trailing block.
    int pi = -1, pj = -1;
    i64 best = 0;
    for (int i = t; i < n; ++i)
      for (int j = t; j < c; ++j) {
        i64 a = s[i][j] < 0 ? -s[i][j] : s[i][j];
        if (a != 0 && (pi < 0 || a < best)) {
          best = a;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // trailing block already zero
    if (pi != t) {
      row_swap(s, t, pi);
      row_swap(u, t, pi);
    }
    if (pj != t) {
      col_swap(s, t, pj);
      col_swap(v, t, pj);
    }
    if (s[t][t] < 0) {
      row_neg(s, t);
      row_neg(u, t);
    }

    bool clean = true;
    for (int i = t + 1; i < n; ++i) {
      if (s[i][t] == 0) continue;
      i64 q = fdiv(s[i][t], s[t][t]);
      row_addmul(s, i, t, -q);
      row_addmul(u, i, t, -q);
      if (s[i][t] != 0) clean = false;
    }
    for (int j = t + 1; j < c; ++j) {
      if (s[t][j] == 0) continue;
      i64 q = fdiv(s[t][j], s[t][t]);
      col_addmul(s, j, t, -q);
      col_addmul(v, j, t, -q);
      if (s[t][j] != 0) clean = false;
    }
    if (!clean) continue;  // remainders left, rerun with a smaller pivot

    // Enforce divisibility: pivot must divide the rest of the block.
    bool divides = true;
    for (int i = t + 1; i < n && divides; ++i)
      for (int j = t + 1; j < c && divides; ++j)
        if (s[i][j] % s[t][t] != 0) {
          row_addmul(s, t, i, 1);
          row_addmul(u, t, i, 1);
          divides = false;
        }
    if (!divides) continue;
    ++t;
  }
  return {u, s, v};
}

// Column-style Hermite normal form restricted to the full-rank square case:
// returns lower triangular H with positive diagonal and off-diagonal entries
// in row i reduced into [0, H[i][i]). The column span over Z is preserved.
// Throws if the columns do not span a finite-index sublattice of Z^n.
inline Mat hermite_col_fullrank(const Mat& m0) {
  int n = mat_rows(m0), c = mat_cols(m0);
  Mat a = m0;
  auto col_addmul = [&](int dst, int src, i64 k) {
    for (int i = 0; i < n; ++i)
      a[i][dst] = checked_i64(i128(a[i][dst]) + i128(k) * a[i][src]);
  };
  auto col_swap = [&](int i, int j) {
    for (int r = 0; r < n; ++r) std::swap(a[r][i], a[r][j]);
  };

  int piv = 0;
  for (int row = 0; row < n; ++row) {
    // Euclid across columns piv..c-1 on this row.
    while (true) {
      int best = -1;
      i64 bv = 0;
      for (int j = piv; j < c; ++j) {
        i64 v = a[row][j] < 0 ? -a[row][j] : a[row][j];
        if (v != 0 && (best < 0 || v < bv)) {
          best = j;
          bv = v;
        }
      }
      if (best < 0) throw std::invalid_argument("hermite: rank deficient");
      if (best != piv) col_swap(best, piv);
      if (a[row][piv] < 0)
        for (int r = 0; r < n; ++r) a[r][piv] = -a[r][piv];
      bool done = true;
      for (int j = piv + 1; j < c; ++j) {
        if (a[row][j] == 0) continue;
        i64 q = fdiv(a[row][j], a[row][piv]);
        col_addmul(j, piv, -q);
        if (a[row][j] != 0) done = false;
      }
      if (done) break;
    }
    // Reduce earlier columns of this row into [0, pivot).
    for (int j = 0; j < piv; ++j) {
      i64 q = fdiv(a[row][j], a[row][piv]);
      if (q != 0) col_addmul(j, piv, -q);
    }
    ++piv;
  }
  Mat h = mat_zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h[i][j] = a[i][j];
  return h;
}

// Inverse of a unimodular integer matrix via Gauss-Jordan on an augmented
// system kept exact with 128-bit intermediates. det must be +-1.
inline Mat unimodular_inverse(const Mat& m) {
  int n = mat_rows(m);
  if (n != mat_cols(m)) throw std::invalid_argument("inverse: not square");
  std::vector<std::vector<i128>> a(n, std::vector<i128>(2 * n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  // Integer-preserving elimination: use the Euclid trick on each column so
  // pivots end at +-1 for unimodular input.
  for (int col = 0; col < n; ++col) {
    while (true) {
      int best = -1;
      i128 bv = 0;
      for (int i = col; i < n; ++i) {
        i128 v = a[i][col] < 0 ? -a[i][col] : a[i][col];
        if (v != 0 && (best < 0 || v < bv)) {
          best = i;
          bv = v;
        }
      }
      if (best < 0) throw std::invalid_argument("inverse: singular");
      if (best != col) std::swap(a[best], a[col]);
      bool done = true;
      for (int i = col + 1; i < n; ++i) {
        if (a[i][col] == 0) continue;
        i128 q = a[i][col] / a[col][col];
        i128 r = a[i][col] % a[col][col];
        if (r != 0 && ((r < 0) != (a[col][col] < 0))) --q;
        for (int j = 0; j < 2 * n; ++j) a[i][j] -= q * a[col][j];
        if (a[i][col] != 0) done = false;
      }
      if (done) break;
    }
  }
  // Back substitution; diagonal entries are +-1 iff input was unimodular.
  for (int col = n - 1; col >= 0; --col) {
    i128 d = a[col][col];
    if (d != 1 && d != -1)
      throw std::invalid_argument("inverse: matrix is not unimodular");
    if (d == -1)
      for (int j = 0; j < 2 * n; ++j) a[col][j] = -a[col][j];
    for (int i = 0; i < col; ++i) {
      i128 f = a[i][col];
      if (f == 0) continue;
      for (int j = 0; j < 2 * n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  Mat inv = mat_zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i][j] = checked_i64(a[i][n + j]);
  return inv;
}

// Solves Lx = b exactly for lower triangular L with nonzero diagonal.
// Returns false if any step fails to divide (b outside the lattice L*Z^n).
inline bool solve_lower_triangular(const Mat& l, const std::vector<i64>& b,
                                   std::vector<i64>& x) {
  int n = mat_rows(l);
  x.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    i128 acc = b[i];
    for (int j = 0; j < i; ++j) acc -= i128(l[i][j]) * x[j];
    if (l[i][i] == 0) return acc == 0;
    if (acc % l[i][i] != 0) return false;
    x[i] = checked_i64(acc / l[i][i]);
  }
  return true;
}

inline i64 diag_product(const Mat& m) {
  i128 p = 1;
  int n = std::min(mat_rows(m), mat_cols(m));
  for (int i = 0; i < n; ++i) p *= m[i][i];
  return checked_i64(p);
}

}  // namespace alharm
