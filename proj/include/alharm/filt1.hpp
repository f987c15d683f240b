#pragma once

// Filtered abelian group objects truncated to an integer index window.
// A chain of canonical subgroups realizes the filtration steps inside an
// ambient chart; behavior outside the window is carried by tail tags.
// Duality, compactness predicates, fibered products, amalgams, domination
// and equivalence all operate on this presentation.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alharm/archimed.hpp"
#include "alharm/finabel.hpp"

namespace alharm {

enum class Flavor1 { fin, ar };
enum class TailTag { trivial, finite_stable };

// Presentation of a filtered object on the window [lo, hi].
//
// Finite flavor: w is a chart of F(hi)/F(lo) and levels[k] realizes
// F(lo+k)/F(lo), so levels begins trivial and ends full.
//
// Archimedean flavor: the ambient is a product A x Z^r x T^p x R^q. The
// finite part carries its own nested chain alevels over aw.a, and each
// continuous axis joins the filtration wholesale at its entry index
// (coordinate-aligned steps are the only ones the function layer can
// express). Entries lie in (lo, hi] so the bottom level stays trivial.
//
// A tag of trivial means the filtration is constant past that end of the
// window; finite_stable means it keeps moving by finite steps forever.
struct FilteredObject1 {
  Flavor1 flavor = Flavor1::fin;
  i64 lo = 0, hi = 0;

  FinAbGroup w;
  std::vector<Subgroup> levels;

  C0arObject aw;
  std::vector<Subgroup> alevels;
  std::vector<i64> zentry, tentry, rentry;

  TailTag below = TailTag::finite_stable;
  TailTag above = TailTag::finite_stable;
  i64 o_ref = 0;

  i64 window_size() const { return hi - lo + 1; }

  const Subgroup& level(i64 i) const {
    const auto& ls = flavor == Flavor1::fin ? levels : alevels;
    return ls.at(size_t(i - lo));
  }

  bool operator==(const FilteredObject1& o) const {
    if (flavor != o.flavor || lo != o.lo || hi != o.hi || below != o.below ||
        above != o.above || o_ref != o.o_ref)
      return false;
    if (flavor == Flavor1::fin) return w == o.w && levels == o.levels;
    return aw == o.aw && alevels == o.alevels && zentry == o.zentry &&
           tentry == o.tentry && rentry == o.rentry;
  }
};

inline bool subgroup_contained(const Subgroup& s, const Subgroup& t) {
  if (!(s.parent == t.parent)) return false;
  for (int j = 0; j < s.parent.rank(); ++j) {
    std::vector<i64> col(s.parent.rank());
    for (int i = 0; i < s.parent.rank(); ++i) col[i] = s.basis[i][j];
    if (!t.contains(s.parent.reduce(col))) return false;
  }
  return true;
}

inline Subgroup trivial_subgroup(const FinAbGroup& g) {
  return Subgroup::from_generators(g, {});
}

inline Subgroup full_subgroup(const FinAbGroup& g) {
  std::vector<std::vector<i64>> gens;
  for (int i = 0; i < g.rank(); ++i) {
    std::vector<i64> e(g.rank(), 0);
    e[i] = 1;
    gens.push_back(e);
  }
  return Subgroup::from_generators(g, gens);
}

inline void validate_filtered1(const FilteredObject1& e) {
  if (e.lo > e.hi) throw std::invalid_argument("filtered1: empty window");
  if (e.o_ref < e.lo || e.o_ref > e.hi)
    throw std::invalid_argument("filtered1: o_ref outside the window");
  const FinAbGroup& amb = e.flavor == Flavor1::fin ? e.w : e.aw.a;
  const auto& ls = e.flavor == Flavor1::fin ? e.levels : e.alevels;
  if (i64(ls.size()) != e.window_size())
    throw std::invalid_argument("filtered1: level count does not match window");
  for (const Subgroup& s : ls)
    if (!(s.parent == amb))
      throw std::invalid_argument("filtered1: level over a different ambient");
  if (ls.front().order() != 1)
    throw std::invalid_argument("filtered1: bottom level must be trivial");
  if (ls.back().order() != amb.order())
    throw std::invalid_argument("filtered1: top level must be full");
  for (size_t k = 0; k + 1 < ls.size(); ++k)
    if (!subgroup_contained(ls[k], ls[k + 1]))
      throw std::invalid_argument("filtered1: levels are not nested");
  if (e.flavor == Flavor1::ar) {
    if (int(e.zentry.size()) != e.aw.r || int(e.tentry.size()) != e.aw.p ||
        int(e.rentry.size()) != e.aw.q)
      throw std::invalid_argument("filtered1: axis entry count mismatch");
    for (i64 v : e.zentry)
      if (v <= e.lo || v > e.hi)
        throw std::invalid_argument("filtered1: Z entry outside (lo, hi]");
    for (i64 v : e.tentry)
      if (v <= e.lo || v > e.hi)
        throw std::invalid_argument("filtered1: T entry outside (lo, hi]");
    for (i64 v : e.rentry)
      if (v <= e.lo || v > e.hi)
        throw std::invalid_argument("filtered1: R entry outside (lo, hi]");
  }
}

inline FilteredObject1 filtered1_fin(const FinAbGroup& w,
                                     std::vector<Subgroup> levels, i64 lo,
                                     TailTag below, TailTag above, i64 o_ref) {
  FilteredObject1 e;
  e.flavor = Flavor1::fin;
  e.w = w;
  e.lo = lo;
  e.hi = lo + i64(levels.size()) - 1;
  e.levels = std::move(levels);
  e.below = below;
  e.above = above;
  e.o_ref = o_ref;
  validate_filtered1(e);
  return e;
}

inline FilteredObject1 filtered1_ar(const C0arObject& aw,
                                    std::vector<Subgroup> alevels,
                                    std::vector<i64> zentry,
                                    std::vector<i64> tentry,
                                    std::vector<i64> rentry, i64 lo,
                                    TailTag below, TailTag above, i64 o_ref) {
  FilteredObject1 e;
  e.flavor = Flavor1::ar;
  e.aw = aw;
  e.lo = lo;
  e.hi = lo + i64(alevels.size()) - 1;
  e.alevels = std::move(alevels);
  e.zentry = std::move(zentry);
  e.tentry = std::move(tentry);
  e.rentry = std::move(rentry);
  e.below = below;
  e.above = above;
  e.o_ref = o_ref;
  validate_filtered1(e);
  return e;
}

// -------------------------------------------------------------------------
// Stock windows of the local field F_q((t)) and its two halves. Chart
// coordinates are t-adic digits, lowest exponent first, and level i holds
// the classes of t^{-i} F_q[[t]].

inline FilteredObject1 local_field_window(i64 q, i64 k, i64 o_ref = 0) {
  FinAbGroup w{std::vector<i64>(size_t(2 * k), q)};
  std::vector<Subgroup> levels;
  for (i64 i = -k; i <= k; ++i) {
    std::vector<std::vector<i64>> gens;
    for (i64 j = 0; j < k + i; ++j) {
      std::vector<i64> e(size_t(2 * k), 0);
      e[size_t(j)] = 1;
      gens.push_back(e);
    }
    levels.push_back(Subgroup::from_generators(w, gens));
  }
  return filtered1_fin(w, levels, -k, TailTag::finite_stable,
                       TailTag::finite_stable, o_ref);
}

inline FilteredObject1 integers_window(i64 q, i64 k) {
  FinAbGroup w{std::vector<i64>(size_t(k), q)};
  std::vector<Subgroup> levels;
  for (i64 i = -k; i <= 0; ++i) {
    std::vector<std::vector<i64>> gens;
    for (i64 j = 0; j < k + i; ++j) {
      std::vector<i64> e(size_t(k), 0);
      e[size_t(j)] = 1;
      gens.push_back(e);
    }
    levels.push_back(Subgroup::from_generators(w, gens));
  }
  return filtered1_fin(w, levels, -k, TailTag::finite_stable, TailTag::trivial,
                       0);
}

inline FilteredObject1 quotient_window(i64 q, i64 k) {
  FinAbGroup w{std::vector<i64>(size_t(k), q)};
  std::vector<Subgroup> levels;
  for (i64 i = 0; i <= k; ++i) {
    std::vector<std::vector<i64>> gens;
    for (i64 j = k - i; j < k; ++j) {
      std::vector<i64> e(size_t(k), 0);
      e[size_t(j)] = 1;
      gens.push_back(e);
    }
    levels.push_back(Subgroup::from_generators(w, gens));
  }
  return filtered1_fin(w, levels, 0, TailTag::trivial, TailTag::finite_stable,
                       0);
}

// -------------------------------------------------------------------------
// Duality. The window reverses, level -j becomes the annihilator of level
// j, tags swap ends, and on the archimedean ambient Z and T axes trade
// places. The reference index negates, which keeps the normalized measure
// and its dual measure paired.

inline FilteredObject1 dual1(const FilteredObject1& e) {
  FilteredObject1 d;
  d.flavor = e.flavor;
  d.lo = -e.hi;
  d.hi = -e.lo;
  d.below = e.above;
  d.above = e.below;
  d.o_ref = -e.o_ref;
  const FinAbGroup& amb = e.flavor == Flavor1::fin ? e.w : e.aw.a;
  FinAbGroup dual_amb = dual_group(amb);
  std::vector<Subgroup> dl;
  for (i64 j = d.lo; j <= d.hi; ++j)
    dl.push_back(annihilator(amb, e.level(-j)));
  if (e.flavor == Flavor1::fin) {
    d.w = dual_amb;
    d.levels = std::move(dl);
  } else {
    d.aw = dual_object(e.aw);
    d.alevels = std::move(dl);
    // Axis j sits inside level i exactly when the dual axis is missing
    // from the dual level, so entries reflect through 1 - i. Z and T
    // swap because dual_object swaps them.
    auto flip = [](const std::vector<i64>& v) {
      std::vector<i64> out;
      for (i64 x : v) out.push_back(1 - x);
      return out;
    };
    d.zentry = flip(e.tentry);
    d.tentry = flip(e.zentry);
    d.rentry = flip(e.rentry);
  }
  validate_filtered1(d);
  return d;
}

// Window presentations are complete already, so completion only replays
// canonicalization. It must agree with double duality, which the tests
// check.
inline FilteredObject1 completion_psi(const FilteredObject1& e) {
  FilteredObject1 out = e;
  validate_filtered1(out);
  return out;
}

inline bool is_compact1(const FilteredObject1& e) {
  if (e.above != TailTag::trivial) return false;
  if (e.flavor == Flavor1::ar && (e.aw.r > 0 || e.aw.q > 0)) return false;
  return true;
}

inline bool is_discrete1(const FilteredObject1& e) {
  if (e.below != TailTag::trivial) return false;
  if (e.flavor == Flavor1::ar && (e.aw.p > 0 || e.aw.q > 0)) return false;
  return true;
}

// -------------------------------------------------------------------------
// Domination and equivalence. A domination embeds a coarse chain into a
// fine one index by index with equal subgroups. Equivalence is the
// zig-zag closure; over one ambient it amounts to asking whether the
// union of the two chains is again a chain, so a common refinement
// exists. Reference indices are normalization data and do not enter.

struct DominationMap {
  std::vector<i64> phi;  // coarse window offset -> fine window offset
};

namespace f1detail {

struct LevelKey {
  Subgroup s;
  std::vector<i64> zmask, tmask, rmask;  // 0/1 per axis

  bool operator==(const LevelKey& o) const {
    return s == o.s && zmask == o.zmask && tmask == o.tmask &&
           rmask == o.rmask;
  }
};

inline bool key_contained(const LevelKey& a, const LevelKey& b) {
  if (!subgroup_contained(a.s, b.s)) return false;
  for (size_t i = 0; i < a.zmask.size(); ++i)
    if (a.zmask[i] > b.zmask[i]) return false;
  for (size_t i = 0; i < a.tmask.size(); ++i)
    if (a.tmask[i] > b.tmask[i]) return false;
  for (size_t i = 0; i < a.rmask.size(); ++i)
    if (a.rmask[i] > b.rmask[i]) return false;
  return true;
}

inline LevelKey level_key(const FilteredObject1& e, i64 i) {
  LevelKey k;
  k.s = e.level(i);
  if (e.flavor == Flavor1::ar) {
    for (i64 v : e.zentry) k.zmask.push_back(i >= v ? 1 : 0);
    for (i64 v : e.tentry) k.tmask.push_back(i >= v ? 1 : 0);
    for (i64 v : e.rentry) k.rmask.push_back(i >= v ? 1 : 0);
  }
  return k;
}

inline bool same_ambient(const FilteredObject1& a, const FilteredObject1& b) {
  if (a.flavor != b.flavor) return false;
  if (a.flavor == Flavor1::fin) return a.w == b.w;
  return a.aw == b.aw;
}

}  // namespace f1detail

inline bool is_valid_domination(const FilteredObject1& fine,
                                const FilteredObject1& coarse,
                                const DominationMap& d) {
  using namespace f1detail;
  if (!same_ambient(fine, coarse)) return false;
  if (fine.below != coarse.below || fine.above != coarse.above) return false;
  if (i64(d.phi.size()) != coarse.window_size()) return false;
  for (size_t k = 0; k + 1 < d.phi.size(); ++k)
    if (d.phi[k] > d.phi[k + 1]) return false;
  for (size_t k = 0; k < d.phi.size(); ++k) {
    i64 fi = fine.lo + d.phi[k];
    if (fi < fine.lo || fi > fine.hi) return false;
    if (!(level_key(fine, fi) == level_key(coarse, coarse.lo + i64(k))))
      return false;
  }
  // Window ends must be matched so the embedding is cofinal.
  return d.phi.front() == 0 && d.phi.back() == fine.window_size() - 1;
}

inline std::optional<DominationMap> find_domination(
    const FilteredObject1& fine, const FilteredObject1& coarse) {
  using namespace f1detail;
  if (!same_ambient(fine, coarse)) return std::nullopt;
  if (fine.below != coarse.below || fine.above != coarse.above)
    return std::nullopt;
  DominationMap d;
  i64 cursor = 0;
  for (i64 i = coarse.lo; i <= coarse.hi; ++i) {
    LevelKey want = level_key(coarse, i);
    bool found = false;
    for (i64 j = cursor; j < fine.window_size(); ++j)
      if (level_key(fine, fine.lo + j) == want) {
        d.phi.push_back(j);
        cursor = j;
        found = true;
        break;
      }
    if (!found) return std::nullopt;
  }
  if (!is_valid_domination(fine, coarse, d)) return std::nullopt;
  return d;
}

inline bool check_equivalence(const FilteredObject1& e,
                              const FilteredObject1& ep) {
  using namespace f1detail;
  if (!same_ambient(e, ep)) return false;
  if (e.below != ep.below || e.above != ep.above) return false;
  std::vector<LevelKey> pool;
  for (i64 i = e.lo; i <= e.hi; ++i) pool.push_back(level_key(e, i));
  for (i64 i = ep.lo; i <= ep.hi; ++i) pool.push_back(level_key(ep, i));
  // A common refinement exists iff every pair of levels is comparable.
  for (size_t a = 0; a < pool.size(); ++a)
    for (size_t b = a + 1; b < pool.size(); ++b)
      if (!key_contained(pool[a], pool[b]) && !key_contained(pool[b], pool[a]))
        return false;
  return true;
}

// -------------------------------------------------------------------------
// Morphisms and admissible triples (finite flavor). A morphism is an
// ambient hom respecting every level; a triple is admissible when it is
// ambient-admissible, strict levelwise, and order-exact at each index.

struct Morphism1 {
  FilteredObject1 src, dst;
  Mat map;
};

inline bool is_morphism1(const Morphism1& m) {
  if (m.src.flavor != Flavor1::fin || m.dst.flavor != Flavor1::fin)
    return false;
  if (m.src.lo != m.dst.lo || m.src.hi != m.dst.hi) return false;
  if (!is_valid_hom(m.src.w, m.map, m.dst.w)) return false;
  for (i64 i = m.src.lo; i <= m.src.hi; ++i) {
    const Subgroup& s = m.src.level(i);
    const Subgroup& t = m.dst.level(i);
    for (int j = 0; j < m.src.w.rank(); ++j) {
      std::vector<i64> col(m.src.w.rank());
      for (int r = 0; r < m.src.w.rank(); ++r) col[r] = s.basis[r][j];
      if (!t.contains(apply_hom(m.map, m.dst.w, col))) return false;
    }
  }
  return true;
}

struct AdmissibleTriple1 {
  FilteredObject1 e1, e2, e3;
  Mat alpha;  // e2.w.rank x e1.w.rank
  Mat beta;   // e3.w.rank x e2.w.rank
};

inline bool is_admissible_triple1(const AdmissibleTriple1& t) {
  if (t.e1.flavor != Flavor1::fin || t.e2.flavor != Flavor1::fin ||
      t.e3.flavor != Flavor1::fin)
    return false;
  if (t.e1.lo != t.e2.lo || t.e2.lo != t.e3.lo || t.e1.hi != t.e2.hi ||
      t.e2.hi != t.e3.hi)
    return false;
  if (!is_admissible_triple({t.e1.w, t.e2.w, t.e3.w, t.alpha, t.beta}))
    return false;
  for (i64 i = t.e1.lo; i <= t.e1.hi; ++i) {
    const Subgroup& s1 = t.e1.level(i);
    const Subgroup& s2 = t.e2.level(i);
    const Subgroup& s3 = t.e3.level(i);
    if (i128(s2.order()) != i128(s1.order()) * s3.order()) return false;
    for (int j = 0; j < t.e1.w.rank(); ++j) {
      std::vector<i64> col(t.e1.w.rank());
      for (int r = 0; r < t.e1.w.rank(); ++r) col[r] = s1.basis[r][j];
      if (!s2.contains(apply_hom(t.alpha, t.e2.w, col))) return false;
    }
    for (int j = 0; j < t.e2.w.rank(); ++j) {
      std::vector<i64> col(t.e2.w.rank());
      for (int r = 0; r < t.e2.w.rank(); ++r) col[r] = s2.basis[r][j];
      if (!s3.contains(apply_hom(t.beta, t.e3.w, col))) return false;
    }
  }
  return true;
}

inline AdmissibleTriple1 dual_triple1(const AdmissibleTriple1& t) {
  return {dual1(t.e3), dual1(t.e2), dual1(t.e1),
          dual_hom(t.e2.w, t.beta, t.e3.w), dual_hom(t.e1.w, t.alpha, t.e2.w)};
}

// -------------------------------------------------------------------------
// Fibered product E2 x_{E3} D along a morphism gamma: D -> E3, filtered by
// G(i) = (F2(i) x H(i)) intersected with the product, together with the
// admissible triple it closes and the two square maps. The amalgam is the
// pushout counterpart along delta: E1 -> D.

struct FiberedProduct1 {
  AdmissibleTriple1 triple;  // e1 -> product -> D
  Mat to_e2, to_d;           // square maps out of the product ambient
};

namespace f1detail {

inline Subgroup product_subgroup(const FinAbGroup& prod, const Subgroup& a,
                                 int na, const Subgroup& b, int nb) {
  std::vector<std::vector<i64>> gens;
  for (int j = 0; j < na; ++j) {
    std::vector<i64> e(size_t(na + nb), 0);
    for (int i = 0; i < na; ++i) e[size_t(i)] = a.basis[i][j];
    gens.push_back(e);
  }
  for (int j = 0; j < nb; ++j) {
    std::vector<i64> e(size_t(na + nb), 0);
    for (int i = 0; i < nb; ++i) e[size_t(na + i)] = b.basis[i][j];
    gens.push_back(e);
  }
  return Subgroup::from_generators(prod, gens);
}

}  // namespace f1detail

inline FiberedProduct1 fibered_product1(const AdmissibleTriple1& t,
                                        const Morphism1& gamma) {
  if (!is_admissible_triple1(t))
    throw std::invalid_argument("fibered_product1: triple is not admissible");
  if (!(gamma.dst == t.e3) || !is_morphism1(gamma))
    throw std::invalid_argument("fibered_product1: gamma is not a morphism into E3");
  const FilteredObject1& d = gamma.src;
  int n2 = t.e2.w.rank(), nd = d.w.rank(), n3 = t.e3.w.rank();
  std::vector<i64> pm(t.e2.w.moduli);
  pm.insert(pm.end(), d.w.moduli.begin(), d.w.moduli.end());
  FinAbGroup prod{pm};

  // Kernel of (x, y) -> beta(x) - gamma(y) is the pullback.
  Mat h = mat_zero(n3, n2 + nd);
  for (int i = 0; i < n3; ++i) {
    for (int j = 0; j < n2; ++j) h[i][j] = t.beta[i][j];
    for (int j = 0; j < nd; ++j) {
      i64 v = (-gamma.map[i][j]) % t.e3.w.moduli[i];
      if (v < 0) v += t.e3.w.moduli[i];
      h[i][n2 + j] = v;
    }
  }
  Subgroup pull = hom_kernel(prod, h, t.e3.w);
  Presentation pres = abstract_presentation(pull);
  const FinAbGroup& wp = pres.h;

  Mat to_e2 = mat_zero(n2, wp.rank());
  Mat to_d = mat_zero(nd, wp.rank());
  for (int j = 0; j < wp.rank(); ++j) {
    for (int i = 0; i < n2; ++i) to_e2[i][j] = pres.inclusion[i][j];
    for (int i = 0; i < nd; ++i) to_d[i][j] = pres.inclusion[n2 + i][j];
  }

  // Levels pull back from the product of the level pairs.
  std::vector<Subgroup> plevels;
  for (i64 i = t.e2.lo; i <= t.e2.hi; ++i) {
    Subgroup si = f1detail::product_subgroup(prod, t.e2.level(i), n2,
                                             d.level(i), nd);
    QuotientC0 q = quotient(prod, si);
    Mat into_q = mat_mul(q.projection, pres.inclusion);
    plevels.push_back(hom_kernel(wp, into_q, q.q));
  }
  FilteredObject1 p = filtered1_fin(wp, plevels, t.e2.lo, t.e2.below,
                                    t.e2.above, t.e2.o_ref);

  // E1 embeds as (alpha(x), 0); express it through the pullback chart.
  Mat embed = mat_zero(n2 + nd, t.e1.w.rank());
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < t.e1.w.rank(); ++j) embed[i][j] = t.alpha[i][j];
  MonoIndex mi(wp, pres.inclusion, prod);
  Mat alpha_p = mi.factor_hom(embed);

  AdmissibleTriple1 out{t.e1, p, d, alpha_p, to_d};
  if (!is_admissible_triple1(out))
    throw std::logic_error("fibered_product1: constructed triple failed");
  // The square commutes: beta on the first factor, gamma on the second.
  // A trivial D leaves gamma with no columns, so spell out the zero map.
  Mat lhs = mat_mul(t.beta, to_e2);
  Mat rhs = nd == 0 ? mat_zero(n3, wp.rank()) : mat_mul(gamma.map, to_d);
  for (int i = 0; i < n3; ++i)
    for (int j = 0; j < wp.rank(); ++j)
      if ((lhs[i][j] - rhs[i][j]) % t.e3.w.moduli[i] != 0)
        throw std::logic_error("fibered_product1: square does not commute");
  return {out, to_e2, to_d};
}

struct Amalgam1 {
  AdmissibleTriple1 triple;  // D -> amalgam -> E3
  Mat from_e2, from_d;       // square maps into the amalgam ambient
};

inline Amalgam1 amalgam1(const AdmissibleTriple1& t, const Morphism1& delta) {
  if (!is_admissible_triple1(t))
    throw std::invalid_argument("amalgam1: triple is not admissible");
  if (!(delta.src == t.e1) || !is_morphism1(delta))
    throw std::invalid_argument("amalgam1: delta is not a morphism out of E1");
  const FilteredObject1& d = delta.dst;
  int n2 = t.e2.w.rank(), nd = d.w.rank(), n1 = t.e1.w.rank();
  std::vector<i64> pm(t.e2.w.moduli);
  pm.insert(pm.end(), d.w.moduli.begin(), d.w.moduli.end());
  FinAbGroup prod{pm};

  // Quotient by the antidiagonal image of E1.
  std::vector<std::vector<i64>> gens;
  for (int j = 0; j < n1; ++j) {
    std::vector<i64> col(size_t(n2 + nd), 0);
    for (int i = 0; i < n2; ++i) col[size_t(i)] = t.alpha[i][j];
    for (int i = 0; i < nd; ++i) {
      i64 v = (-delta.map[i][j]) % d.w.moduli[i];
      if (v < 0) v += d.w.moduli[i];
      col[size_t(n2 + i)] = v;
    }
    gens.push_back(prod.reduce(col));
  }
  Subgroup anti = Subgroup::from_generators(prod, gens);
  QuotientC0 q = quotient(prod, anti);

  Mat from_e2 = mat_zero(q.q.rank(), n2);
  Mat from_d = mat_zero(q.q.rank(), nd);
  for (int i = 0; i < q.q.rank(); ++i) {
    for (int j = 0; j < n2; ++j) from_e2[i][j] = q.projection[i][j];
    for (int j = 0; j < nd; ++j) from_d[i][j] = q.projection[i][n2 + j];
  }

  // Levels push forward from the product of the level pairs.
  std::vector<Subgroup> alevels;
  for (i64 i = t.e2.lo; i <= t.e2.hi; ++i) {
    Subgroup si = f1detail::product_subgroup(prod, t.e2.level(i), n2,
                                             d.level(i), nd);
    std::vector<std::vector<i64>> im;
    for (int j = 0; j < n2 + nd; ++j) {
      std::vector<i64> col(size_t(n2 + nd));
      for (int i2 = 0; i2 < n2 + nd; ++i2) col[size_t(i2)] = si.basis[i2][j];
      im.push_back(apply_hom(q.projection, q.q, col));
    }
    alevels.push_back(Subgroup::from_generators(q.q, im));
  }
  FilteredObject1 p = filtered1_fin(q.q, alevels, t.e2.lo, t.e2.below,
                                    t.e2.above, t.e2.o_ref);

  // beta factors through the amalgam since beta(alpha(x)) = 0. The lift
  // can produce any representative, so reduce entries into range.
  Mat beta_ext = mat_zero(t.e3.w.rank(), n2 + nd);
  for (int i = 0; i < t.e3.w.rank(); ++i)
    for (int j = 0; j < n2; ++j) beta_ext[i][j] = t.beta[i][j];
  Mat beta_a = mat_mul(beta_ext, q.lift);
  for (int i = 0; i < t.e3.w.rank(); ++i)
    for (int j = 0; j < q.q.rank(); ++j) {
      i64 v = beta_a[i][j] % t.e3.w.moduli[i];
      if (v < 0) v += t.e3.w.moduli[i];
      beta_a[i][j] = v;
    }

  AdmissibleTriple1 out{d, p, t.e3, from_d, beta_a};
  if (!is_admissible_triple1(out))
    throw std::logic_error("amalgam1: constructed triple failed");
  return {out, from_e2, from_d};
}

// Canonical short exact sequence through the level at the pivot index:
// the level as a subobject (its own filtration caps there, so it is
// compact) and the quotient by it (whose filtration vanishes at and below
// the pivot, so it is discrete).
inline AdmissibleTriple1 sub_quotient_triple1(const FilteredObject1& e2,
                                              i64 k) {
  if (e2.flavor != Flavor1::fin)
    throw std::invalid_argument("sub_quotient_triple1: finite flavor required");
  if (k < e2.lo || k > e2.hi)
    throw std::invalid_argument("sub_quotient_triple1: pivot outside window");
  TripleC0 amb = triple_from_subgroup(e2.w, e2.level(k));
  MonoIndex mi(amb.g1, amb.alpha, e2.w);
  std::vector<Subgroup> l1, l3;
  for (i64 i = e2.lo; i <= e2.hi; ++i) {
    Presentation p = abstract_presentation(e2.level(std::min(i, k)));
    l1.push_back(hom_image(amb.g1, mi.factor_hom(p.inclusion), p.h));
    Presentation pi = abstract_presentation(e2.level(i));
    l3.push_back(hom_image(amb.g3, mat_mul(amb.beta, pi.inclusion), pi.h));
  }
  FilteredObject1 e1 = filtered1_fin(amb.g1, l1, e2.lo, e2.below,
                                     TailTag::trivial, e2.o_ref);
  FilteredObject1 e3 = filtered1_fin(amb.g3, l3, e2.lo, TailTag::trivial,
                                     e2.above, e2.o_ref);
  AdmissibleTriple1 out{e1, e2, e3, amb.alpha, amb.beta};
  if (!is_admissible_triple1(out))
    throw std::logic_error("sub_quotient_triple1: constructed triple failed");
  return out;
}

}  // namespace alharm
