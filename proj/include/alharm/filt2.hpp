#pragma once

// Doubly filtered group objects at desk truncation. An object keeps one
// ambient chart for its maximal subquotient: `box` filters that ambient by
// the inner chain and `outerf` filters it by the outer chain. Every other
// subquotient, together with its induced inner structure, is derived on
// demand, so the stored chart plus tail tags determines the whole family.

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alharm/filt1.hpp"

namespace alharm {

// Intersection of two subgroups of one ambient, via the kernel of the
// composite map a -> g -> g/b.
inline Subgroup subgroup_intersection(const FinAbGroup& g, const Subgroup& a,
                                      const Subgroup& b) {
  Presentation pa = abstract_presentation(a);
  QuotientC0 qb = quotient(g, b);
  Mat comp = mat_mul(qb.projection, pa.inclusion);
  Subgroup k = hom_kernel(pa.h, comp, qb.q);
  std::vector<std::vector<i64>> gens;
  for (int j = 0; j < pa.h.rank(); ++j) {
    std::vector<i64> col(size_t(pa.h.rank()));
    for (int i = 0; i < pa.h.rank(); ++i) col[size_t(i)] = k.basis[i][j];
    gens.push_back(g.reduce(mat_vec(pa.inclusion, col)));
  }
  return Subgroup::from_generators(g, gens);
}

struct FilteredObject2 {
  FilteredObject1 box;     // inner chain on the maximal box
  FilteredObject1 outerf;  // outer chain over the same ambient

  i64 ilo() const { return outerf.lo; }
  i64 ihi() const { return outerf.hi; }
  i64 o() const { return outerf.o_ref; }
  const Subgroup& outer_level(i64 i) const { return outerf.level(i); }

  bool operator==(const FilteredObject2& e) const {
    return box == e.box && outerf == e.outerf;
  }
};

inline void validate_filtered2(const FilteredObject2& e) {
  validate_filtered1(e.box);
  validate_filtered1(e.outerf);
  if (e.box.flavor != e.outerf.flavor)
    throw std::invalid_argument("filtered2: flavor mismatch between chains");
  if (e.box.flavor == Flavor1::fin) {
    if (!(e.box.w == e.outerf.w))
      throw std::invalid_argument("filtered2: chains over different ambients");
  } else {
    if (!(e.box.aw == e.outerf.aw))
      throw std::invalid_argument("filtered2: chains over different ambients");
  }
}

inline FilteredObject2 filtered2(FilteredObject1 box, FilteredObject1 outerf) {
  FilteredObject2 e{std::move(box), std::move(outerf)};
  validate_filtered2(e);
  return e;
}

// -------------------------------------------------------------------------
// Slices. The subquotient F(i)/F(j) is presented through the abstract
// group of the outer level at i modulo the image of the level at j; its
// inner chain is induced by intersecting the box levels with the top.

struct OuterChart {
  FilteredObject1 obj;  // the slice as a filtered object in its own right
  Presentation pi;      // outer level at the top index inside the ambient
  QuotientC0 q;         // pi.h -> obj.w, with section
};

inline OuterChart outer_chart(const FilteredObject2& e, i64 j, i64 i) {
  if (e.box.flavor != Flavor1::fin)
    throw std::invalid_argument("outer_chart: finite flavor required");
  if (j < e.ilo() || i > e.ihi() || j > i)
    throw std::invalid_argument("outer_chart: pair outside the outer window");
  Presentation pi = abstract_presentation(e.outer_level(i));
  MonoIndex mi(pi.h, pi.inclusion, e.box.w);
  Presentation pj = abstract_presentation(e.outer_level(j));
  Subgroup sj = hom_image(pi.h, mi.factor_hom(pj.inclusion), pj.h);
  QuotientC0 q = quotient(pi.h, sj);
  std::vector<Subgroup> levels;
  for (i64 k = e.box.lo; k <= e.box.hi; ++k) {
    Subgroup inter =
        subgroup_intersection(e.box.w, e.box.level(k), e.outer_level(i));
    std::vector<std::vector<i64>> gens;
    for (int c = 0; c < e.box.w.rank(); ++c) {
      std::vector<i64> col(size_t(e.box.w.rank()));
      for (int r = 0; r < e.box.w.rank(); ++r) col[size_t(r)] = inter.basis[r][c];
      gens.push_back(apply_hom(q.projection, q.q, mi.coords_in_sub(col)));
    }
    levels.push_back(Subgroup::from_generators(q.q, gens));
  }
  FilteredObject1 obj = filtered1_fin(q.q, levels, e.box.lo, e.box.below,
                                      e.box.above, e.box.o_ref);
  return {obj, pi, q};
}

// Ambient coordinates of a slice chart element, one representative per
// class.
inline std::vector<i64> slice_ambient2(const FilteredObject2& e,
                                       const OuterChart& c,
                                       const std::vector<i64>& x) {
  std::vector<i64> h = mat_vec(c.q.lift, x);
  return e.box.w.reduce(mat_vec(c.pi.inclusion, h));
}

inline FilteredObject1 slice2(const FilteredObject2& e, i64 j, i64 i) {
  if (e.box.flavor == Flavor1::fin) return outer_chart(e, j, i).obj;
  // Archimedean slices are supported for pure real boxes, where the outer
  // chain is carried entirely by axis entries.
  if (e.box.aw.a.rank() != 0 || e.box.aw.r != 0 || e.box.aw.p != 0)
    throw std::invalid_argument("slice2: archimedean slice needs a pure R box");
  if (j < e.ilo() || i > e.ihi() || j > i)
    throw std::invalid_argument("slice2: pair outside the outer window");
  std::vector<i64> rentry;
  for (size_t a = 0; a < e.outerf.rentry.size(); ++a)
    if (e.outerf.rentry[a] > j && e.outerf.rentry[a] <= i)
      rentry.push_back(e.box.rentry[a]);
  C0arObject aw{FinAbGroup{std::vector<i64>{}}, 0, 0, int(rentry.size())};
  std::vector<Subgroup> alevels(size_t(e.box.window_size()),
                                trivial_subgroup(aw.a));
  return filtered1_ar(aw, alevels, {}, {}, rentry, e.box.lo, e.box.below,
                      e.box.above, e.box.o_ref);
}

// Canonical short exact sequence of slices around a middle index,
// F(i)/F(j) -> F(k)/F(j) -> F(k)/F(i) for j <= i <= k.
inline AdmissibleTriple1 slice_triple2(const FilteredObject2& e, i64 j, i64 i,
                                       i64 k) {
  if (j > i || i > k)
    throw std::invalid_argument("slice_triple2: indices out of order");
  OuterChart cji = outer_chart(e, j, i);
  OuterChart cjk = outer_chart(e, j, k);
  OuterChart cik = outer_chart(e, i, k);
  MonoIndex mk(cjk.pi.h, cjk.pi.inclusion, e.box.w);
  Mat inc = mk.factor_hom(cji.pi.inclusion);
  Mat alpha = mat_mul(cjk.q.projection, mat_mul(inc, cji.q.lift));
  Mat beta = mat_mul(cik.q.projection, cjk.q.lift);
  for (int r = 0; r < cjk.obj.w.rank(); ++r)
    for (int c = 0; c < cji.obj.w.rank(); ++c) {
      alpha[r][c] %= cjk.obj.w.moduli[r];
      if (alpha[r][c] < 0) alpha[r][c] += cjk.obj.w.moduli[r];
    }
  for (int r = 0; r < cik.obj.w.rank(); ++r)
    for (int c = 0; c < cjk.obj.w.rank(); ++c) {
      beta[r][c] %= cik.obj.w.moduli[r];
      if (beta[r][c] < 0) beta[r][c] += cik.obj.w.moduli[r];
    }
  AdmissibleTriple1 out{cji.obj, cjk.obj, cik.obj, alpha, beta};
  if (!is_admissible_triple1(out))
    throw std::logic_error("slice_triple2: induced triple is not admissible");
  return out;
}

// Full transversality check: every nested slice triple must close up.
inline bool filtered2_consistent(const FilteredObject2& e) {
  if (e.box.flavor != Flavor1::fin) return true;
  try {
    validate_filtered2(e);
    for (i64 j = e.ilo(); j <= e.ihi(); ++j)
      for (i64 i = j; i <= e.ihi(); ++i)
        for (i64 k = i; k <= e.ihi(); ++k) slice_triple2(e, j, i, k);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

// -------------------------------------------------------------------------
// Predicates and duality. The outer tags decide whether the filtration
// reaches the whole object or the zero object; the slice predicates
// delegate to the inner chain, whose tags all slices share.

struct Predicates2 {
  bool c = false, d = false, cf = false, df = false;
};

inline Predicates2 predicates2(const FilteredObject2& e) {
  Predicates2 p;
  p.c = e.outerf.above == TailTag::trivial;
  p.d = e.outerf.below == TailTag::trivial;
  p.cf = is_compact1(e.box);
  p.df = is_discrete1(e.box);
  return p;
}

inline FilteredObject2 dual2(const FilteredObject2& e) {
  return filtered2(dual1(e.box), dual1(e.outerf));
}

// Desk presentations are complete; completion replays canonicalization
// and must be idempotent.
inline FilteredObject2 omega2(const FilteredObject2& e) {
  FilteredObject2 out = e;
  validate_filtered2(out);
  return out;
}

// -------------------------------------------------------------------------
// Monomial boxes. One ambient coordinate per monomial u^j t^i; the outer
// level at index i spans the monomials with t-exponent below i and the
// inner level at k those with u-exponent below k, so multiplication by t
// or u moves the respective index up by one. A flipped box addresses the
// same coordinates through the reflected labels that duality induces,
// which lets one descriptor act on an object and on its dual.

struct MonomialBox {
  i64 q = 2;
  i64 ta = 0, tb = 0, ua = 0, ub = 0;
  bool flip = false;

  i64 nt() const { return tb - ta + 1; }
  i64 nu() const { return ub - ua + 1; }
  i64 count() const { return nt() * nu(); }
  bool in_box(i64 i, i64 j) const {
    return i >= ta && i <= tb && j >= ua && j <= ub;
  }
  i64 coord(i64 i, i64 j) const {
    return flip ? (tb - i) * nu() + (ub - j) : (i - ta) * nu() + (j - ua);
  }
  std::pair<i64, i64> label_of(i64 c) const {
    i64 a = c / nu(), b = c % nu();
    if (flip) return {tb - a, ub - b};
    return {ta + a, ua + b};
  }
};

inline MonomialBox dual_box(const MonomialBox& m) {
  return {m.q, -1 - m.tb, -1 - m.ta, -1 - m.ub, -1 - m.ua, !m.flip};
}

namespace f2detail {

inline i64 clamp_index(i64 v, i64 lo, i64 hi) {
  return std::max(lo, std::min(hi, v));
}

}  // namespace f2detail

inline FilteredObject2 make_local_field2(
    const MonomialBox& mb, TailTag outer_below = TailTag::finite_stable,
    TailTag outer_above = TailTag::finite_stable,
    TailTag inner_below = TailTag::finite_stable,
    TailTag inner_above = TailTag::finite_stable) {
  if (mb.q < 2) throw std::invalid_argument("make_local_field2: q must be >= 2");
  if (mb.ta > mb.tb || mb.ua > mb.ub)
    throw std::invalid_argument("make_local_field2: zero-size window");
  FinAbGroup w{std::vector<i64>(size_t(mb.count()), mb.q)};
  auto strip = [&](bool inner_axis, i64 cut) {
    std::vector<std::vector<i64>> gens;
    for (i64 c = 0; c < mb.count(); ++c) {
      auto [i, j] = mb.label_of(c);
      if ((inner_axis ? j : i) < cut) {
        std::vector<i64> e(size_t(mb.count()), 0);
        e[size_t(c)] = 1;
        gens.push_back(e);
      }
    }
    return Subgroup::from_generators(w, gens);
  };
  std::vector<Subgroup> inner, outer;
  for (i64 k = mb.ua; k <= mb.ub + 1; ++k) inner.push_back(strip(true, k));
  for (i64 i = mb.ta; i <= mb.tb + 1; ++i) outer.push_back(strip(false, i));
  FilteredObject1 box =
      filtered1_fin(w, inner, mb.ua, inner_below, inner_above,
                    f2detail::clamp_index(0, mb.ua, mb.ub + 1));
  FilteredObject1 outerf =
      filtered1_fin(w, outer, mb.ta, outer_below, outer_above,
                    f2detail::clamp_index(0, mb.ta, mb.tb + 1));
  return filtered2(std::move(box), std::move(outerf));
}

// R((t)) flavor: a pure real box, one axis per t-exponent. Both chains are
// carried by axis entries; the inner structure of a slice is the induced
// outer chain, the only one available.
inline FilteredObject2 make_local_field2_r(i64 ta, i64 tb) {
  if (ta > tb) throw std::invalid_argument("make_local_field2_r: zero-size window");
  C0arObject aw{FinAbGroup{std::vector<i64>{}}, 0, 0, int(tb - ta + 1)};
  std::vector<Subgroup> lv(size_t(tb - ta + 2), trivial_subgroup(aw.a));
  std::vector<i64> entry;
  for (i64 e = ta; e <= tb; ++e) entry.push_back(e + 1);
  FilteredObject1 box =
      filtered1_ar(aw, lv, {}, {}, entry, ta, TailTag::finite_stable,
                   TailTag::finite_stable, f2detail::clamp_index(0, ta, tb + 1));
  FilteredObject1 outerf =
      filtered1_ar(aw, lv, {}, {}, entry, ta, TailTag::finite_stable,
                   TailTag::finite_stable, f2detail::clamp_index(0, ta, tb + 1));
  return filtered2(std::move(box), std::move(outerf));
}

inline FilteredObject2 zero_object2(i64 ilo, i64 ihi, i64 blo, i64 bhi) {
  FinAbGroup w{std::vector<i64>{}};
  std::vector<Subgroup> inner(size_t(bhi - blo + 1), trivial_subgroup(w));
  std::vector<Subgroup> outer(size_t(ihi - ilo + 1), trivial_subgroup(w));
  FilteredObject1 box = filtered1_fin(w, inner, blo, TailTag::trivial,
                                      TailTag::trivial, blo);
  FilteredObject1 outerf = filtered1_fin(w, outer, ilo, TailTag::trivial,
                                         TailTag::trivial, ilo);
  return filtered2(std::move(box), std::move(outerf));
}

// -------------------------------------------------------------------------
// Morphisms and admissible triples. A morphism is one ambient hom that is
// filtered for both chains at once. Desk triples use equal outer windows
// with identity index maps; the index map fields stay explicit so reports
// can name them.

struct Morphism2 {
  FilteredObject2 src, dst;
  Mat map;
};

inline bool is_morphism2(const Morphism2& m) {
  return is_morphism1({m.src.box, m.dst.box, m.map}) &&
         is_morphism1({m.src.outerf, m.dst.outerf, m.map});
}

struct AdmissibleTriple2 {
  FilteredObject2 e1, e2, e3;
  Mat alpha;  // e2 ambient rank x e1 ambient rank
  Mat beta;   // e3 ambient rank x e2 ambient rank
  std::vector<i64> gamma, eps;  // outer index maps, I2 -> I3 and I2 -> I1
};

inline AdmissibleTriple2 triple2(FilteredObject2 e1, FilteredObject2 e2,
                                 FilteredObject2 e3, Mat alpha, Mat beta) {
  AdmissibleTriple2 t{std::move(e1), std::move(e2), std::move(e3),
                      std::move(alpha), std::move(beta), {}, {}};
  for (i64 i = t.e2.ilo(); i <= t.e2.ihi(); ++i) {
    t.gamma.push_back(i);
    t.eps.push_back(i);
  }
  return t;
}

inline i64 gamma_of(const AdmissibleTriple2& t, i64 i) {
  return t.gamma.at(size_t(i - t.e2.ilo()));
}

inline i64 eps_of(const AdmissibleTriple2& t, i64 i) {
  return t.eps.at(size_t(i - t.e2.ilo()));
}

// The slice triple of an admissible triple over one outer pair: the three
// subquotients with the induced maps between their charts.
inline AdmissibleTriple1 outer_window_triple2(const AdmissibleTriple2& t,
                                              i64 j, i64 i) {
  OuterChart c1 = outer_chart(t.e1, j, i);
  OuterChart c2 = outer_chart(t.e2, j, i);
  OuterChart c3 = outer_chart(t.e3, j, i);
  MonoIndex m2(c2.pi.h, c2.pi.inclusion, t.e2.box.w);
  Mat a12 = m2.factor_hom(mat_mul(t.alpha, c1.pi.inclusion));
  Mat alpha_c = mat_mul(mat_mul(c2.q.projection, a12), c1.q.lift);
  MonoIndex m3(c3.pi.h, c3.pi.inclusion, t.e3.box.w);
  Mat b23 = m3.factor_hom(mat_mul(t.beta, c2.pi.inclusion));
  Mat beta_c = mat_mul(mat_mul(c3.q.projection, b23), c2.q.lift);
  for (int r = 0; r < c2.obj.w.rank(); ++r)
    for (int c = 0; c < c1.obj.w.rank(); ++c) {
      alpha_c[r][c] %= c2.obj.w.moduli[r];
      if (alpha_c[r][c] < 0) alpha_c[r][c] += c2.obj.w.moduli[r];
    }
  for (int r = 0; r < c3.obj.w.rank(); ++r)
    for (int c = 0; c < c2.obj.w.rank(); ++c) {
      beta_c[r][c] %= c3.obj.w.moduli[r];
      if (beta_c[r][c] < 0) beta_c[r][c] += c3.obj.w.moduli[r];
    }
  AdmissibleTriple1 out{c1.obj, c2.obj, c3.obj, alpha_c, beta_c};
  if (!is_admissible_triple1(out))
    throw std::logic_error("outer_window_triple2: induced triple failed");
  return out;
}

inline bool is_admissible_triple2(const AdmissibleTriple2& t) {
  if (t.e1.ilo() != t.e2.ilo() || t.e2.ilo() != t.e3.ilo() ||
      t.e1.ihi() != t.e2.ihi() || t.e2.ihi() != t.e3.ihi())
    return false;
  if (i64(t.gamma.size()) != t.e2.outerf.window_size() ||
      i64(t.eps.size()) != t.e2.outerf.window_size())
    return false;
  for (i64 i = t.e2.ilo(); i <= t.e2.ihi(); ++i)
    if (gamma_of(t, i) != i || eps_of(t, i) != i) return false;
  if (!is_admissible_triple1({t.e1.box, t.e2.box, t.e3.box, t.alpha, t.beta}))
    return false;
  if (!is_admissible_triple1(
          {t.e1.outerf, t.e2.outerf, t.e3.outerf, t.alpha, t.beta}))
    return false;
  try {
    for (i64 j = t.e2.ilo(); j <= t.e2.ihi(); ++j)
      for (i64 i = j; i <= t.e2.ihi(); ++i) outer_window_triple2(t, j, i);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

inline AdmissibleTriple2 dual_triple2(const AdmissibleTriple2& t) {
  return triple2(dual2(t.e3), dual2(t.e2), dual2(t.e1),
                 dual_hom(t.e2.box.w, t.beta, t.e3.box.w),
                 dual_hom(t.e1.box.w, t.alpha, t.e2.box.w));
}

// -------------------------------------------------------------------------
// The canonical decomposition at an outer pivot: the level as a compact
// piece and the quotient past it as a discrete piece. The pieces keep the
// full outer window by going constant beyond the pivot.

inline AdmissibleTriple2 sub_quotient_triple2(const FilteredObject2& e, i64 k) {
  if (e.box.flavor != Flavor1::fin)
    throw std::invalid_argument("sub_quotient_triple2: finite flavor required");
  if (k < e.ilo() || k > e.ihi())
    throw std::invalid_argument("sub_quotient_triple2: pivot outside window");
  OuterChart ck = outer_chart(e, e.ilo(), k);
  MonoIndex mk(ck.pi.h, ck.pi.inclusion, e.box.w);
  std::vector<Subgroup> o1;
  for (i64 i = e.ilo(); i <= e.ihi(); ++i) {
    Presentation pm = abstract_presentation(e.outer_level(std::min(i, k)));
    Mat in_k = mk.factor_hom(pm.inclusion);
    o1.push_back(hom_image(ck.obj.w, mat_mul(ck.q.projection, in_k), pm.h));
  }
  FilteredObject2 e1 = filtered2(
      ck.obj, filtered1_fin(ck.obj.w, o1, e.ilo(), e.outerf.below,
                            TailTag::trivial, std::min(e.o(), k)));
  Mat alpha = mat_mul(ck.pi.inclusion, ck.q.lift);
  for (int r = 0; r < e.box.w.rank(); ++r)
    for (int c = 0; c < ck.obj.w.rank(); ++c) {
      alpha[r][c] %= e.box.w.moduli[r];
      if (alpha[r][c] < 0) alpha[r][c] += e.box.w.moduli[r];
    }

  QuotientC0 q3 = quotient(e.box.w, e.outer_level(k));
  auto push = [&](const Subgroup& s) {
    std::vector<std::vector<i64>> gens;
    for (int c = 0; c < e.box.w.rank(); ++c) {
      std::vector<i64> col(size_t(e.box.w.rank()));
      for (int r = 0; r < e.box.w.rank(); ++r) col[size_t(r)] = s.basis[r][c];
      gens.push_back(apply_hom(q3.projection, q3.q, col));
    }
    return Subgroup::from_generators(q3.q, gens);
  };
  std::vector<Subgroup> b3, o3;
  for (i64 m = e.box.lo; m <= e.box.hi; ++m) b3.push_back(push(e.box.level(m)));
  for (i64 i = e.ilo(); i <= e.ihi(); ++i)
    o3.push_back(push(e.outer_level(std::max(i, k))));
  FilteredObject2 e3 = filtered2(
      filtered1_fin(q3.q, b3, e.box.lo, e.box.below, e.box.above, e.box.o_ref),
      filtered1_fin(q3.q, o3, e.ilo(), TailTag::trivial, e.outerf.above,
                    std::max(e.o(), k)));

  AdmissibleTriple2 out = triple2(e1, e, e3, alpha, q3.projection);
  if (!is_admissible_triple2(out))
    throw std::logic_error("sub_quotient_triple2: constructed triple failed");
  return out;
}

// -------------------------------------------------------------------------
// Base change. The ambient pullback or pushout is built once on the box
// level, then the outer chain is transported across the same square.

struct FiberedProduct2 {
  AdmissibleTriple2 triple;  // e1 -> product -> D
  Mat to_e2, to_d;
};

inline FiberedProduct2 fibered_product2(const AdmissibleTriple2& t,
                                        const Morphism2& gamma) {
  if (!is_admissible_triple2(t))
    throw std::invalid_argument("fibered_product2: triple is not admissible");
  if (!(gamma.dst == t.e3) || !is_morphism2(gamma))
    throw std::invalid_argument(
        "fibered_product2: gamma is not a morphism into E3");
  FiberedProduct1 fp =
      fibered_product1({t.e1.box, t.e2.box, t.e3.box, t.alpha, t.beta},
                       {gamma.src.box, t.e3.box, gamma.map});
  const FinAbGroup& wp = fp.triple.e2.w;
  std::vector<Subgroup> onew;
  for (i64 i = t.e2.ilo(); i <= t.e2.ihi(); ++i) {
    QuotientC0 q2 = quotient(t.e2.box.w, t.e2.outer_level(i));
    QuotientC0 qd = quotient(gamma.src.box.w, gamma.src.outer_level(i));
    std::vector<i64> tm(q2.q.moduli);
    tm.insert(tm.end(), qd.q.moduli.begin(), qd.q.moduli.end());
    FinAbGroup tq{tm};
    Mat a2 = mat_mul(q2.projection, fp.to_e2);
    Mat ad = mat_mul(qd.projection, fp.to_d);
    Mat m = mat_zero(tq.rank(), wp.rank());
    for (int r = 0; r < q2.q.rank(); ++r)
      for (int c = 0; c < wp.rank(); ++c) m[r][c] = a2[r][c];
    for (int r = 0; r < qd.q.rank(); ++r)
      for (int c = 0; c < wp.rank(); ++c) m[q2.q.rank() + r][c] = ad[r][c];
    for (int r = 0; r < tq.rank(); ++r)
      for (int c = 0; c < wp.rank(); ++c) {
        m[r][c] %= tq.moduli[r];
        if (m[r][c] < 0) m[r][c] += tq.moduli[r];
      }
    onew.push_back(hom_kernel(wp, m, tq));
  }
  FilteredObject2 p = filtered2(
      fp.triple.e2,
      filtered1_fin(wp, onew, t.e2.ilo(), t.e2.outerf.below,
                    t.e2.outerf.above, t.e2.o()));
  AdmissibleTriple2 out =
      triple2(t.e1, p, gamma.src, fp.triple.alpha, fp.triple.beta);
  if (!is_admissible_triple2(out))
    throw std::logic_error("fibered_product2: constructed triple failed");
  return {out, fp.to_e2, fp.to_d};
}

struct Amalgam2 {
  AdmissibleTriple2 triple;  // D -> amalgam -> e3
  Mat from_e2, from_d;
};

inline Amalgam2 amalgam2(const AdmissibleTriple2& t, const Morphism2& delta) {
  if (!is_admissible_triple2(t))
    throw std::invalid_argument("amalgam2: triple is not admissible");
  if (!(delta.src == t.e1) || !is_morphism2(delta))
    throw std::invalid_argument("amalgam2: delta is not a morphism out of E1");
  Amalgam1 am = amalgam1({t.e1.box, t.e2.box, t.e3.box, t.alpha, t.beta},
                         {t.e1.box, delta.dst.box, delta.map});
  const FinAbGroup& wa = am.triple.e2.w;
  std::vector<Subgroup> onew;
  for (i64 i = t.e2.ilo(); i <= t.e2.ihi(); ++i) {
    const Subgroup& s2 = t.e2.outer_level(i);
    const Subgroup& sd = delta.dst.outer_level(i);
    std::vector<std::vector<i64>> gens;
    for (int c = 0; c < t.e2.box.w.rank(); ++c) {
      std::vector<i64> col(size_t(t.e2.box.w.rank()));
      for (int r = 0; r < t.e2.box.w.rank(); ++r) col[size_t(r)] = s2.basis[r][c];
      gens.push_back(apply_hom(am.from_e2, wa, col));
    }
    for (int c = 0; c < delta.dst.box.w.rank(); ++c) {
      std::vector<i64> col(size_t(delta.dst.box.w.rank()));
      for (int r = 0; r < delta.dst.box.w.rank(); ++r)
        col[size_t(r)] = sd.basis[r][c];
      gens.push_back(apply_hom(am.from_d, wa, col));
    }
    onew.push_back(Subgroup::from_generators(wa, gens));
  }
  FilteredObject2 p = filtered2(
      am.triple.e2,
      filtered1_fin(wa, onew, t.e2.ilo(), t.e2.outerf.below,
                    t.e2.outerf.above, t.e2.o()));
  AdmissibleTriple2 out =
      triple2(delta.dst, p, t.e3, am.triple.alpha, am.triple.beta);
  if (!is_admissible_triple2(out))
    throw std::logic_error("amalgam2: constructed triple failed");
  return {out, am.from_e2, am.from_d};
}

// -------------------------------------------------------------------------
// Automorphisms of monomial boxes. The descriptor multiplies by
// unit * t^tshift * u^ushift * (1 + sum useries[k] u^-(k+1)) and may add a
// shear that twists the u-exponent by shear * t-exponent. Series terms
// falling outside the box act as zero there, which is recorded by the
// truncation being the box itself; everything the checks can see is exact.

struct Automorphism2 {
  FilteredObject2 parent;
  MonomialBox mb;
  i64 tshift = 0;
  i64 ushift = 0;
  i64 shear = 0;
  i64 unit = 1;
  std::vector<i64> useries;
};

namespace f2detail {

inline i64 mod_inverse(i64 a, i64 q) {
  i64 t = 0, nt = 1, r = q, nr = ((a % q) + q) % q;
  while (nr != 0) {
    i64 qq = r / nr;
    std::swap(t -= qq * nt, nt);
    std::swap(r -= qq * nr, nr);
  }
  if (r != 1) throw std::invalid_argument("mod_inverse: not a unit");
  return ((t % q) + q) % q;
}

inline std::vector<i64> series_mul(const std::vector<i64>& a,
                                   const std::vector<i64>& b, i64 q,
                                   size_t cap) {
  std::vector<i64> c(cap, 0);
  for (size_t k = 1; k <= cap; ++k) {
    i64 v = 0;
    if (k <= a.size()) v += a[k - 1];
    if (k <= b.size()) v += b[k - 1];
    for (size_t x = 1; x < k; ++x)
      if (x <= a.size() && k - x <= b.size()) v += a[x - 1] * b[k - x - 1];
    c[k - 1] = ((v % q) + q) % q;
  }
  while (!c.empty() && c.back() == 0) c.pop_back();
  return c;
}

inline std::vector<i64> series_inv(const std::vector<i64>& a, i64 q,
                                   size_t cap) {
  std::vector<i64> t(cap, 0);
  for (size_t k = 1; k <= cap; ++k) {
    i64 v = k <= a.size() ? a[k - 1] : 0;
    for (size_t x = 1; x < k; ++x)
      if (x <= a.size()) v += a[x - 1] * t[k - x - 1];
    t[k - 1] = (((-v) % q) + q) % q;
  }
  while (!t.empty() && t.back() == 0) t.pop_back();
  return t;
}

}  // namespace f2detail

inline Automorphism2 identity_aut(const FilteredObject2& parent,
                                  const MonomialBox& mb) {
  return {parent, mb, 0, 0, 0, 1, {}};
}

inline Automorphism2 compose_aut(const Automorphism2& g1,
                                 const Automorphism2& g2) {
  if (!(g1.parent == g2.parent))
    throw std::invalid_argument("compose_aut: parent mismatch");
  size_t cap = size_t(g1.mb.nu());
  Automorphism2 g = g1;
  g.tshift = g1.tshift + g2.tshift;
  g.ushift = g1.ushift + g2.ushift + g1.shear * g2.tshift;
  g.shear = g1.shear + g2.shear;
  g.unit = ((g1.unit * g2.unit) % g1.mb.q + g1.mb.q) % g1.mb.q;
  g.useries = f2detail::series_mul(g1.useries, g2.useries, g1.mb.q, cap);
  return g;
}

inline Automorphism2 inverse_aut(const Automorphism2& g) {
  size_t cap = size_t(g.mb.nu());
  Automorphism2 h = g;
  h.tshift = -g.tshift;
  h.ushift = -g.ushift + g.shear * g.tshift;
  h.shear = -g.shear;
  h.unit = f2detail::mod_inverse(g.unit, g.mb.q);
  h.useries = f2detail::series_inv(g.useries, g.mb.q, cap);
  return h;
}

// Truncated matrix of the action on the ambient chart. Terms leaving the
// box are dropped; callers must reason within the margin they need.
inline Mat act_matrix(const Automorphism2& g) {
  i64 n = g.mb.count();
  Mat m = mat_zero(int(n), int(n));
  for (i64 c = 0; c < n; ++c) {
    auto [i, j] = g.mb.label_of(c);
    for (size_t k = 0; k <= g.useries.size(); ++k) {
      i64 coeff = k == 0 ? 1 : g.useries[k - 1];
      coeff = ((coeff * g.unit) % g.mb.q + g.mb.q) % g.mb.q;
      i64 ti = i + g.tshift;
      i64 uj = j + g.ushift + g.shear * i - i64(k);
      if (g.mb.in_box(ti, uj))
        m[size_t(g.mb.coord(ti, uj))][size_t(c)] =
            (m[size_t(g.mb.coord(ti, uj))][size_t(c)] + coeff) % g.mb.q;
    }
  }
  return m;
}

struct AutReport {
  bool aut_prime = false;
  bool star = false;
  std::vector<i64> level_map;  // image of each outer index under the action
  i64 inner_shift = 0;
  i64 witness = 0;  // first failing level index when a flag is false
};

// Diagnostic check of Aut' membership and of the inner condition: levels
// of each chain must map onto levels, verified through the truncated
// action and its inverse on every pair that stays inside the window.
inline AutReport check_aut(const Automorphism2& g) {
  if (g.parent.box.flavor != Flavor1::fin)
    throw std::invalid_argument("check_aut: finite flavor required");
  const FinAbGroup& w = g.parent.box.w;
  if (g.mb.count() != w.rank())
    throw std::invalid_argument("check_aut: box does not match descriptor");
  for (i64 md : w.moduli)
    if (md != g.mb.q)
      throw std::invalid_argument("check_aut: box does not match descriptor");
  AutReport rep;
  rep.inner_shift = g.ushift;
  for (i64 i = g.parent.ilo(); i <= g.parent.ihi(); ++i)
    rep.level_map.push_back(i + g.tshift);
  if (std::gcd(((g.unit % g.mb.q) + g.mb.q) % g.mb.q, g.mb.q) != 1) {
    rep.witness = -1;
    return rep;
  }
  Mat act = act_matrix(g);
  Mat inv = act_matrix(inverse_aut(g));
  auto pass = [&](const FilteredObject1& chain, i64 shift, i64& witness) {
    for (i64 i = chain.lo; i <= chain.hi; ++i) {
      if (i + shift < chain.lo || i + shift > chain.hi) continue;
      const Subgroup& src = chain.level(i);
      const Subgroup& dst = chain.level(i + shift);
      for (int c = 0; c < w.rank(); ++c) {
        std::vector<i64> col(size_t(w.rank()));
        for (int r = 0; r < w.rank(); ++r) col[size_t(r)] = src.basis[r][c];
        if (!dst.contains(apply_hom(act, w, col))) {
          witness = i;
          return false;
        }
      }
      for (int c = 0; c < w.rank(); ++c) {
        std::vector<i64> col(size_t(w.rank()));
        for (int r = 0; r < w.rank(); ++r) col[size_t(r)] = dst.basis[r][c];
        if (!src.contains(apply_hom(inv, w, col))) {
          witness = i;
          return false;
        }
      }
    }
    return true;
  };
  rep.aut_prime = pass(g.parent.outerf, g.tshift, rep.witness);
  if (rep.aut_prime) rep.star = pass(g.parent.box, g.ushift, rep.witness);
  return rep;
}

}  // namespace alharm
