#pragma once

// Finite abelian groups with their function, distribution, and measure
// spaces, plus the eight image maps and the Fourier transform along a short
// exact sequence 0 -> G1 -> G2 -> G3 -> 0. This is the ground layer: the
// filtered theories reduce every computation to windows handled here.
//
// Conventions, fixed once and used everywhere:
//   element        coords x = (x1..xn), xi in Z/di, flat index mixed radix
//                  x1 + d1*(x2 + d2*(...))
//   character      chi acts by exp(+2*pi*i * sum chi_i x_i / d_i)
//   Fourier        (F_mu f)(chi) = mu.scale * sum_x f(x) * conj(chi(x)),
//                  same kernel at function and distribution level
//   measure        MeasureC0 is scale * counting measure; the inverse
//                  measure on the dual has scale 1/(scale * |G|)

#include <complex>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "alharm/dft.hpp"
#include "alharm/intmat.hpp"

namespace alharm {

struct FinAbGroup {
  std::vector<i64> moduli;

  int rank() const { return static_cast<int>(moduli.size()); }

  i64 order() const {
    i128 p = 1;
    for (i64 d : moduli) p *= d;
    return checked_i64(p);
  }

  std::vector<i64> zero() const { return std::vector<i64>(rank(), 0); }

  std::vector<i64> reduce(std::vector<i64> x) const {
    for (int i = 0; i < rank(); ++i) {
      x[i] %= moduli[i];
      if (x[i] < 0) x[i] += moduli[i];
    }
    return x;
  }

  i64 index_of(const std::vector<i64>& x0) const {
    std::vector<i64> x = reduce(x0);
    i64 idx = 0, stride = 1;
    for (int i = 0; i < rank(); ++i) {
      idx += x[i] * stride;
      stride *= moduli[i];
    }
    return idx;
  }

  std::vector<i64> coords_of(i64 idx) const {
    std::vector<i64> x(rank());
    for (int i = 0; i < rank(); ++i) {
      x[i] = idx % moduli[i];
      idx /= moduli[i];
    }
    return x;
  }

  std::vector<i64> add(const std::vector<i64>& a, const std::vector<i64>& b) const {
    std::vector<i64> c(rank());
    for (int i = 0; i < rank(); ++i) c[i] = (a[i] + b[i]) % moduli[i];
    return reduce(c);
  }

  std::vector<i64> neg(const std::vector<i64>& a) const {
    std::vector<i64> c(rank());
    for (int i = 0; i < rank(); ++i) c[i] = (moduli[i] - a[i]) % moduli[i];
    return c;
  }

  bool operator==(const FinAbGroup& o) const { return moduli == o.moduli; }
};

// Invariant-factor form of a list of cyclic orders, via the Smith form of
// the diagonal relation matrix. (2,3) becomes (6), (2,4) stays (2,4).
inline std::vector<i64> invariant_factors(const std::vector<i64>& moduli) {
  if (moduli.empty()) return {};
  int n = static_cast<int>(moduli.size());
  Mat d = mat_zero(n, n);
  for (int i = 0; i < n; ++i) d[i][i] = moduli[i];
  SNFResult r = smith_normal_form(d);
  std::vector<i64> out;
  for (int i = 0; i < n; ++i)
    if (r.s[i][i] > 1) out.push_back(r.s[i][i]);
  return out;
}

inline FinAbGroup canonical_group(const std::vector<i64>& moduli) {
  return FinAbGroup{invariant_factors(moduli)};
}

// The dual group is abstractly isomorphic with the same invariant factors;
// we represent characters in the same coordinate system.
inline FinAbGroup dual_group(const FinAbGroup& g) { return g; }

inline cx eval_char(const FinAbGroup& g, const std::vector<i64>& chi,
                    const std::vector<i64>& x) {
  double ang = 0.0;
  for (int i = 0; i < g.rank(); ++i) {
    i64 m = (i128(chi[i]) * x[i]) % g.moduli[i];
    ang += 2.0 * std::numbers::pi * double(m) / double(g.moduli[i]);
  }
  return cx(std::cos(ang), std::sin(ang));
}

struct FunctionC0 {
  FinAbGroup g;
  std::vector<cx> table;  // indexed by FinAbGroup flat index
};

struct DistributionC0 {
  FinAbGroup g;
  std::vector<cx> table;  // kernel values, paired by plain summation
};

struct MeasureC0 {
  cx scale;  // multiple of the counting measure
};

inline FunctionC0 constant_function(const FinAbGroup& g, cx v) {
  return {g, std::vector<cx>(g.order(), v)};
}

inline FunctionC0 dirac_function(const FinAbGroup& g, const std::vector<i64>& at) {
  FunctionC0 f{g, std::vector<cx>(g.order(), cx(0, 0))};
  f.table[g.index_of(at)] = cx(1, 0);
  return f;
}

inline cx pair_c0(const FunctionC0& f, const DistributionC0& h) {
  if (!(f.g == h.g)) throw std::invalid_argument("pair_c0: group mismatch");
  cx acc(0, 0);
  for (size_t i = 0; i < f.table.size(); ++i) acc += f.table[i] * h.table[i];
  return acc;
}

inline std::vector<cx> reflected_table(const FinAbGroup& g,
                                       const std::vector<cx>& t) {
  std::vector<cx> out(t.size());
  for (i64 idx = 0; idx < static_cast<i64>(t.size()); ++idx)
    out[g.index_of(g.neg(g.coords_of(idx)))] = t[idx];
  return out;
}

// (F_mu f)(chi) = mu.scale * sum_x f(x) conj(chi(x)). The result lives on
// the dual group, same coordinates.
inline FunctionC0 fourier_c0(const FunctionC0& f, const MeasureC0& mu) {
  FunctionC0 out{dual_group(f.g), f.table};
  dft_mixed(out.table, f.g.moduli, -1);
  for (cx& v : out.table) v *= mu.scale;
  return out;
}

inline DistributionC0 fourier_c0_dist(const DistributionC0& h,
                                      const MeasureC0& nu) {
  DistributionC0 out{dual_group(h.g), h.table};
  dft_mixed(out.table, h.g.moduli, -1);
  for (cx& v : out.table) v *= nu.scale;
  return out;
}

// -------------------------------------------------------------------------
// Homomorphisms. A hom G -> H is an integer matrix A (H.rank x G.rank) with
// A[k][i] * G.moduli[i] = 0 mod H.moduli[k], acting by x -> Ax mod H.moduli.

inline bool is_valid_hom(const FinAbGroup& src, const Mat& a,
                         const FinAbGroup& dst) {
  if (mat_rows(a) != dst.rank()) return false;
  // A 0 x n matrix carries no column count; skip the width check then.
  if (dst.rank() > 0 && mat_cols(a) != src.rank()) return false;
  for (int k = 0; k < dst.rank(); ++k)
    for (int i = 0; i < src.rank(); ++i)
      if ((i128(a[k][i]) * src.moduli[i]) % dst.moduli[k] != 0) return false;
  return true;
}

inline std::vector<i64> apply_hom(const Mat& a, const FinAbGroup& dst,
                                  const std::vector<i64>& x) {
  return dst.reduce(mat_vec(a, x));
}

// Dual hom: (dual of A): dual(H) -> dual(G), chi -> chi o A. Entry (i,k) is
// A[k][i] * G.moduli[i] / H.moduli[k], an integer by hom validity.
inline Mat dual_hom(const FinAbGroup& src, const Mat& a, const FinAbGroup& dst) {
  Mat out = mat_zero(src.rank(), dst.rank());
  for (int i = 0; i < src.rank(); ++i)
    for (int k = 0; k < dst.rank(); ++k) {
      i128 num = i128(a[k][i]) * src.moduli[i];
      out[i][k] = checked_i64(num / dst.moduli[k]);
    }
  return out;
}

// -------------------------------------------------------------------------
// Subgroups, canonically presented by the Hermite basis of the preimage
// lattice in Z^n (generators together with the modular relations).

struct Subgroup {
  FinAbGroup parent;
  Mat basis;  // n x n lower triangular canonical HNF

  static Subgroup from_generators(const FinAbGroup& g,
                                  const std::vector<std::vector<i64>>& gens) {
    int n = g.rank();
    int k = static_cast<int>(gens.size());
    Mat m = mat_zero(n, k + n);
    for (int j = 0; j < k; ++j) {
      if (static_cast<int>(gens[j].size()) != n)
        throw std::invalid_argument("subgroup generator has wrong rank");
      for (int i = 0; i < n; ++i) m[i][j] = gens[j][i];
    }
    for (int i = 0; i < n; ++i) m[i][k + i] = g.moduli[i];
    return Subgroup{g, hermite_col_fullrank(m)};
  }

  i64 order() const {
    i128 sub = diag_product(basis);
    return checked_i64(i128(parent.order()) / sub);
  }

  bool contains(const std::vector<i64>& x) const {
    std::vector<i64> t;
    std::vector<i64> xi(x.begin(), x.end());
    return solve_lower_triangular(basis, xi, t);
  }

  bool operator==(const Subgroup& o) const {
    return parent == o.parent && basis == o.basis;
  }
};

struct QuotientC0 {
  FinAbGroup q;
  Mat projection;  // q.rank x parent.rank, a surjective hom
  Mat lift;        // parent.rank x q.rank, projection * lift = id on q
};

// G/H with a canonical projection, from the Smith form of the subgroup
// lattice basis. The lift picks one representative per class and is a
// genuine section: projection composed with lift is the identity.
inline QuotientC0 quotient(const FinAbGroup& g, const Subgroup& h) {
  if (!(h.parent == g))
    throw std::invalid_argument("quotient: subgroup of a different group");
  int n = g.rank();
  SNFResult r = smith_normal_form(h.basis);
  Mat uinv = unimodular_inverse(r.u);
  std::vector<i64> qmod;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (r.s[i][i] > 1) {
      qmod.push_back(r.s[i][i]);
      keep.push_back(i);
    }
  FinAbGroup q{qmod};
  Mat p = mat_zero(q.rank(), n);
  Mat l = mat_zero(n, q.rank());
  for (int t = 0; t < q.rank(); ++t)
    for (int j = 0; j < n; ++j) {
      i64 v = r.u[keep[t]][j] % qmod[t];
      if (v < 0) v += qmod[t];
      p[t][j] = v;
      l[j][t] = uinv[j][keep[t]];
    }
  return {q, p, l};
}

struct Presentation {
  FinAbGroup h;   // abstract subgroup, invariant factors
  Mat inclusion;  // parent.rank x h.rank, an injective hom into the parent
};

// Abstract form of a subgroup: moduli of H and the inclusion matrix.
inline Presentation abstract_presentation(const Subgroup& s) {
  const FinAbGroup& g = s.parent;
  int n = g.rank();
  // Solve B * X = diag(moduli); X is integral because diag lies in the
  // lattice spanned by B.
  Mat x = mat_zero(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<i64> rhs(n, 0);
    rhs[j] = g.moduli[j];
    std::vector<i64> col;
    if (!solve_lower_triangular(s.basis, rhs, col))
      throw std::logic_error("abstract_presentation: relation solve failed");
    for (int i = 0; i < n; ++i) x[i][j] = col[i];
  }
  SNFResult r = smith_normal_form(x);
  Mat uinv = unimodular_inverse(r.u);
  Mat w = mat_mul(s.basis, uinv);
  std::vector<i64> hmod;
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (r.s[i][i] > 1) {
      hmod.push_back(r.s[i][i]);
      keep.push_back(i);
    }
  FinAbGroup h{hmod};
  Mat inc = mat_zero(n, h.rank());
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < h.rank(); ++t) {
      i64 v = w[i][keep[t]] % g.moduli[i];
      if (v < 0) v += g.moduli[i];
      inc[i][t] = v;
    }
  return {h, inc};
}

// Lookup from parent elements to subobject coordinates along a mono.
// Enumerates the subobject, so desk sizes only.
class MonoIndex {
 public:
  MonoIndex(const FinAbGroup& sub, const Mat& inc, const FinAbGroup& parent)
      : sub_(sub), parent_(parent), inc_(inc) {
    for (i64 a = 0; a < sub.order(); ++a) {
      i64 p = parent.index_of(apply_hom(inc, parent, sub.coords_of(a)));
      table_[p] = a;
    }
  }

  std::vector<i64> coords_in_sub(const std::vector<i64>& parent_elt) const {
    auto it = table_.find(parent_.index_of(parent_elt));
    if (it == table_.end())
      throw std::invalid_argument("MonoIndex: element is outside the subobject");
    return sub_.coords_of(it->second);
  }

  // Express a hom into the parent whose image lies in the subobject as a
  // hom into the subobject.
  Mat factor_hom(const Mat& into_parent) const {
    int cols = mat_cols(into_parent);
    Mat out = mat_zero(sub_.rank(), cols);
    for (int j = 0; j < cols; ++j) {
      std::vector<i64> col(parent_.rank());
      for (int i = 0; i < parent_.rank(); ++i) col[i] = into_parent[i][j];
      std::vector<i64> a = coords_in_sub(parent_.reduce(col));
      for (int i = 0; i < sub_.rank(); ++i) out[i][j] = a[i];
    }
    return out;
  }

 private:
  FinAbGroup sub_, parent_;
  Mat inc_;
  std::map<i64, i64> table_;
};

// Solves a(y) = x for arbitrary homs, one Smith form shared across many
// right-hand sides. solve returns false when x is outside the image.
struct HomSolver {
  int n = 0, m = 0;
  FinAbGroup src, dst;
  SNFResult r;

  HomSolver(const FinAbGroup& s, const Mat& a, const FinAbGroup& d)
      : n(s.rank()), m(d.rank()), src(s), dst(d) {
    if (m == 0) return;
    Mat c = mat_zero(m, n + m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) c[i][j] = a[i][j];
      c[i][n + i] = d.moduli[i];
    }
    r = smith_normal_form(c);
  }

  bool solve(const std::vector<i64>& x, std::vector<i64>& out) const {
    if (m == 0) {
      out = src.zero();
      return true;
    }
    std::vector<i64> b = mat_vec(r.u, x);
    std::vector<i64> y(n + m, 0);
    for (int i = 0; i < m; ++i) {
      if (r.s[i][i] == 0) {
        if (b[i] != 0) return false;
        continue;
      }
      if (b[i] % r.s[i][i] != 0) return false;
      y[i] = b[i] / r.s[i][i];
    }
    std::vector<i64> w = mat_vec(r.v, y);
    out = src.reduce(std::vector<i64>(w.begin(), w.begin() + n));
    return true;
  }
};

// Characters of G vanishing on S, as a subgroup of the dual group.
inline Subgroup annihilator(const FinAbGroup& g, const Subgroup& s);

// -------------------------------------------------------------------------
// Admissible triples 0 -> G1 -> G2 -> G3 -> 0.

struct TripleC0 {
  FinAbGroup g1, g2, g3;
  Mat alpha;  // g2.rank x g1.rank, injective
  Mat beta;   // g3.rank x g2.rank, surjective, ker beta = im alpha
};

inline Subgroup hom_image(const FinAbGroup& dst, const Mat& a,
                          const FinAbGroup& src) {
  std::vector<std::vector<i64>> gens;
  for (int j = 0; j < src.rank(); ++j) {
    std::vector<i64> col(dst.rank());
    for (int i = 0; i < dst.rank(); ++i) col[i] = a[i][j];
    gens.push_back(dst.reduce(col));
  }
  return Subgroup::from_generators(dst, gens);
}

// Kernel of a hom as a subgroup of the source, computed from the integer
// kernel of [A | diag(dst.moduli)].
inline Subgroup hom_kernel(const FinAbGroup& src, const Mat& a,
                           const FinAbGroup& dst) {
  int n = src.rank(), m = dst.rank();
  if (m == 0) {
    // Everything maps to the trivial group; the kernel is all of src.
    std::vector<std::vector<i64>> gens;
    for (int i = 0; i < n; ++i) {
      std::vector<i64> e(n, 0);
      e[i] = 1;
      gens.push_back(e);
    }
    return Subgroup::from_generators(src, gens);
  }
  Mat c = mat_zero(m, n + m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) c[i][j] = a[i][j];
    c[i][n + i] = dst.moduli[i];
  }
  SNFResult r = smith_normal_form(c);
  int rank = 0;
  for (int i = 0; i < std::min(m, n + m); ++i)
    if (r.s[i][i] != 0) ++rank;
  std::vector<std::vector<i64>> gens;
  for (int j = rank; j < n + m; ++j) {
    std::vector<i64> col(n);
    for (int i = 0; i < n; ++i) col[i] = r.v[i][j];
    gens.push_back(src.reduce(col));
  }
  return Subgroup::from_generators(src, gens);
}

inline Subgroup annihilator(const FinAbGroup& g, const Subgroup& s) {
  Presentation p = abstract_presentation(s);
  // Restriction to S, dualized; its kernel is exactly the annihilator.
  Mat res = dual_hom(p.h, p.inclusion, g);
  return hom_kernel(dual_group(g), res, dual_group(p.h));
}

inline bool is_admissible_triple(const TripleC0& t) {
  if (!is_valid_hom(t.g1, t.alpha, t.g2)) return false;
  if (!is_valid_hom(t.g2, t.beta, t.g3)) return false;
  if (hom_image(t.g2, t.alpha, t.g1).order() != t.g1.order()) return false;
  if (hom_image(t.g3, t.beta, t.g2).order() != t.g3.order()) return false;
  if (!(hom_image(t.g2, t.alpha, t.g1) == hom_kernel(t.g2, t.beta, t.g3)))
    return false;
  return i128(t.g2.order()) == i128(t.g1.order()) * t.g3.order();
}

// Triple induced by a subgroup: abstract H -> G -> G/H.
inline TripleC0 triple_from_subgroup(const FinAbGroup& g, const Subgroup& h) {
  Presentation p = abstract_presentation(h);
  QuotientC0 q = quotient(g, h);
  return {p.h, g, q.q, p.inclusion, q.projection};
}

// Dual triple 0 -> dual(G3) -> dual(G2) -> dual(G1) -> 0.
inline TripleC0 dual_triple(const TripleC0& t) {
  return {dual_group(t.g3), dual_group(t.g2), dual_group(t.g1),
          dual_hom(t.g2, t.beta, t.g3), dual_hom(t.g1, t.alpha, t.g2)};
}

// Particular solution of beta(x) = z, via the Smith form of the augmented
// relation matrix. Requires beta surjective.
inline std::vector<i64> epi_preimage(const TripleC0& t, const std::vector<i64>& z) {
  int n = t.g2.rank(), m = t.g3.rank();
  if (m == 0) return t.g2.zero();  // unique target element, any preimage works
  Mat c = mat_zero(m, n + m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) c[i][j] = t.beta[i][j];
    c[i][n + i] = t.g3.moduli[i];
  }
  SNFResult r = smith_normal_form(c);
  std::vector<i64> b = mat_vec(r.u, z);
  std::vector<i64> y(n + m, 0);
  for (int i = 0; i < m; ++i) {
    if (r.s[i][i] == 0) {
      if (b[i] != 0)
        throw std::invalid_argument("epi_preimage: map is not surjective");
      continue;
    }
    if (b[i] % r.s[i][i] != 0)
      throw std::invalid_argument("epi_preimage: map is not surjective");
    y[i] = b[i] / r.s[i][i];
  }
  std::vector<i64> w = mat_vec(r.v, y);
  std::vector<i64> x(w.begin(), w.begin() + n);
  return t.g2.reduce(x);
}

// -------------------------------------------------------------------------
// The eight image maps. Reading E1 = G1, E2 = G2, E3 = G3:
//   functions:      beta_* (needs mu on G1), alpha^*, beta^*, alpha_*
//   distributions:  beta^* (needs mu on G1), alpha_*, alpha^*, beta_*
// The measureless directions are the ones that survive compactness and
// discreteness hypotheses in the filtered theories; here everything is
// finite so all eight are total.

inline void require_admissible(const TripleC0& t, const char* who) {
  if (!is_admissible_triple(t))
    throw std::invalid_argument(std::string(who) + ": triple is not admissible");
}

// beta_*(f x mu1)(z) = mu1.scale * sum_{a in G1} f(x0 + alpha(a)).
inline FunctionC0 epi_pushforward(const TripleC0& t, const FunctionC0& f,
                                  const MeasureC0& mu1) {
  require_admissible(t, "epi_pushforward");
  if (!(f.g == t.g2))
    throw std::invalid_argument("epi_pushforward: function not on G2");
  FunctionC0 out{t.g3, std::vector<cx>(t.g3.order(), cx(0, 0))};
  i64 n1 = t.g1.order();
  std::vector<std::vector<i64>> alpha_img(n1);
  for (i64 a = 0; a < n1; ++a)
    alpha_img[a] = apply_hom(t.alpha, t.g2, t.g1.coords_of(a));
  for (i64 z = 0; z < t.g3.order(); ++z) {
    std::vector<i64> x0 = epi_preimage(t, t.g3.coords_of(z));
    cx acc(0, 0);
    for (i64 a = 0; a < n1; ++a)
      acc += f.table[t.g2.index_of(t.g2.add(x0, alpha_img[a]))];
    out.table[z] = mu1.scale * acc;
  }
  return out;
}

// beta^*(f)(y) = f(beta(y)).
inline FunctionC0 epi_pullback(const TripleC0& t, const FunctionC0& f3) {
  require_admissible(t, "epi_pullback");
  if (!(f3.g == t.g3))
    throw std::invalid_argument("epi_pullback: function not on G3");
  FunctionC0 out{t.g2, std::vector<cx>(t.g2.order())};
  for (i64 y = 0; y < t.g2.order(); ++y)
    out.table[y] =
        f3.table[t.g3.index_of(apply_hom(t.beta, t.g3, t.g2.coords_of(y)))];
  return out;
}

// alpha^*(f)(a) = f(alpha(a)).
inline FunctionC0 mono_pullback(const TripleC0& t, const FunctionC0& f2) {
  require_admissible(t, "mono_pullback");
  if (!(f2.g == t.g2))
    throw std::invalid_argument("mono_pullback: function not on G2");
  FunctionC0 out{t.g1, std::vector<cx>(t.g1.order())};
  for (i64 a = 0; a < t.g1.order(); ++a)
    out.table[a] =
        f2.table[t.g2.index_of(apply_hom(t.alpha, t.g2, t.g1.coords_of(a)))];
  return out;
}

// alpha_*(f)(y) = f(alpha^{-1} y) on the image, zero elsewhere.
inline FunctionC0 mono_pushforward(const TripleC0& t, const FunctionC0& f1) {
  require_admissible(t, "mono_pushforward");
  if (!(f1.g == t.g1))
    throw std::invalid_argument("mono_pushforward: function not on G1");
  FunctionC0 out{t.g2, std::vector<cx>(t.g2.order(), cx(0, 0))};
  for (i64 a = 0; a < t.g1.order(); ++a) {
    i64 y = t.g2.index_of(apply_hom(t.alpha, t.g2, t.g1.coords_of(a)));
    out.table[y] += f1.table[a];
  }
  return out;
}

// Distribution-level conjugates.

inline DistributionC0 epi_pullback_dist(const TripleC0& t,
                                        const DistributionC0& h3,
                                        const MeasureC0& mu1) {
  require_admissible(t, "epi_pullback_dist");
  if (!(h3.g == t.g3))
    throw std::invalid_argument("epi_pullback_dist: distribution not on G3");
  DistributionC0 out{t.g2, std::vector<cx>(t.g2.order())};
  for (i64 y = 0; y < t.g2.order(); ++y)
    out.table[y] =
        mu1.scale *
        h3.table[t.g3.index_of(apply_hom(t.beta, t.g3, t.g2.coords_of(y)))];
  return out;
}

inline DistributionC0 epi_pushforward_dist(const TripleC0& t,
                                           const DistributionC0& h2) {
  require_admissible(t, "epi_pushforward_dist");
  if (!(h2.g == t.g2))
    throw std::invalid_argument("epi_pushforward_dist: distribution not on G2");
  DistributionC0 out{t.g3, std::vector<cx>(t.g3.order(), cx(0, 0))};
  for (i64 y = 0; y < t.g2.order(); ++y)
    out.table[t.g3.index_of(apply_hom(t.beta, t.g3, t.g2.coords_of(y)))] +=
        h2.table[y];
  return out;
}

inline DistributionC0 mono_pullback_dist(const TripleC0& t,
                                         const DistributionC0& h2) {
  require_admissible(t, "mono_pullback_dist");
  if (!(h2.g == t.g2))
    throw std::invalid_argument("mono_pullback_dist: distribution not on G2");
  DistributionC0 out{t.g1, std::vector<cx>(t.g1.order())};
  for (i64 a = 0; a < t.g1.order(); ++a)
    out.table[a] =
        h2.table[t.g2.index_of(apply_hom(t.alpha, t.g2, t.g1.coords_of(a)))];
  return out;
}

inline DistributionC0 mono_pushforward_dist(const TripleC0& t,
                                            const DistributionC0& h1) {
  require_admissible(t, "mono_pushforward_dist");
  if (!(h1.g == t.g1))
    throw std::invalid_argument("mono_pushforward_dist: distribution not on G1");
  DistributionC0 out{t.g2, std::vector<cx>(t.g2.order(), cx(0, 0))};
  for (i64 a = 0; a < t.g1.order(); ++a) {
    i64 y = t.g2.index_of(apply_hom(t.alpha, t.g2, t.g1.coords_of(a)));
    out.table[y] += h1.table[a];
  }
  return out;
}

// -------------------------------------------------------------------------
// Poisson summation at ground level. alpha_*(mu1) is the mu1-weighted
// indicator of im(alpha); its transform against mu3/(mu1*|G1|) equals the
// pushforward of mu3 along the dual inclusion of dual(G3).

inline double poisson_c0_check(const TripleC0& t, const MeasureC0& mu1,
                               const MeasureC0& mu3) {
  require_admissible(t, "poisson_c0_check");
  if (std::abs(mu1.scale) == 0.0)
    throw std::invalid_argument("poisson_c0_check: mu1 must be nonzero");
  if (std::abs(mu3.scale) == 0.0)
    throw std::invalid_argument("poisson_c0_check: mu3 must be nonzero");
  DistributionC0 mu1_dist{t.g1, std::vector<cx>(t.g1.order(), mu1.scale)};
  DistributionC0 lhs_in = mono_pushforward_dist(t, mu1_dist);
  MeasureC0 nu{mu3.scale / (mu1.scale * double(t.g1.order()))};
  DistributionC0 lhs = fourier_c0_dist(lhs_in, nu);
  TripleC0 dt = dual_triple(t);
  DistributionC0 mu3_dist{dt.g1, std::vector<cx>(dt.g1.order(), mu3.scale)};
  DistributionC0 rhs = mono_pushforward_dist(dt, mu3_dist);
  double dev = 0.0;
  for (i64 i = 0; i < t.g2.order(); ++i)
    dev = std::max(dev, std::abs(lhs.table[i] - rhs.table[i]));
  return dev;
}

// -------------------------------------------------------------------------
// Random instances for the property suites.

inline FinAbGroup random_group(std::mt19937_64& rng, i64 max_order,
                               int max_rank = 3) {
  std::uniform_int_distribution<int> rk(1, max_rank);
  int r = rk(rng);
  std::vector<i64> mods;
  i64 budget = max_order;
  for (int i = 0; i < r && budget >= 2; ++i) {
    double lo = std::log(2.0), hi = std::log(double(budget) + 0.5);
    std::uniform_real_distribution<double> u(lo, hi);
    i64 d = std::max<i64>(2, i64(std::exp(u(rng))));
    d = std::min(d, budget);
    mods.push_back(d);
    budget /= d;
  }
  return canonical_group(mods);
}

inline Subgroup random_subgroup(const FinAbGroup& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nk(0, g.rank() + 1);
  int k = nk(rng);
  std::vector<std::vector<i64>> gens;
  for (int j = 0; j < k; ++j) {
    std::vector<i64> x(g.rank());
    for (int i = 0; i < g.rank(); ++i)
      x[i] = std::uniform_int_distribution<i64>(0, g.moduli[i] - 1)(rng);
    gens.push_back(x);
  }
  return Subgroup::from_generators(g, gens);
}

inline TripleC0 random_triple(std::mt19937_64& rng, i64 max_order) {
  FinAbGroup g = random_group(rng, max_order);
  Subgroup h = random_subgroup(g, rng);
  return triple_from_subgroup(g, h);
}

inline FunctionC0 random_function(const FinAbGroup& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  FunctionC0 f{g, std::vector<cx>(g.order())};
  for (cx& v : f.table) v = cx(n(rng), n(rng));
  return f;
}

inline DistributionC0 random_distribution(const FinAbGroup& g,
                                          std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  DistributionC0 h{g, std::vector<cx>(g.order())};
  for (cx& v : h.table) v = cx(n(rng), n(rng));
  return h;
}

inline MeasureC0 random_measure(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(-1.5, 1.5);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  double m = std::exp(mag(rng));
  double a = ph(rng);
  return {cx(m * std::cos(a), m * std::sin(a))};
}

}  // namespace alharm
