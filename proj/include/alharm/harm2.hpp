#pragma once

// Schwartz functions and distributions on doubly filtered objects. An
// element is stored once, on the full box chain, together with a virtual
// measure component anchored at the bottom of the outer window: functions
// carry vm(bottom, o), kernels carry vm(o, bottom). Every representative
// under a smaller outer window is derived from the stored one, so equality
// of elements never depends on which window a computation happened to use.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "alharm/filt2.hpp"
#include "alharm/harm1.hpp"
#include "alharm/vmeas.hpp"

namespace alharm {

struct SchwartzC2 {
  FilteredObject2 parent;
  i64 o = 0;       // outer index the component is anchored to
  SchwartzC1 f;    // table on the box chain of the parent
  cx s{1.0, 0.0};  // coordinate of the component against the b basis
};

struct DistC2 {
  FilteredObject2 parent;
  i64 o = 0;
  DistC1 f;
  cx s{1.0, 0.0};
};

namespace h2detail {

inline void require_element2(const FilteredObject2& e, i64 o,
                             const FilteredObject1& table_parent, cx s,
                             const char* who) {
  if (e.box.flavor != Flavor1::fin)
    throw std::invalid_argument(std::string(who) + ": finite flavor required");
  if (o < e.ilo() || o > e.ihi())
    throw std::invalid_argument(std::string(who) +
                                ": anchor index outside the outer window");
  if (!(table_parent == e.box))
    throw std::invalid_argument(std::string(who) +
                                ": table must live on the box chain");
  if (s == cx{0.0, 0.0})
    throw std::invalid_argument(std::string(who) + ": zero component");
}

inline i64 ref_in_level(const FilteredObject2& e, i64 j) {
  Subgroup inter = subgroup_intersection(e.box.w, e.box.level(e.box.o_ref),
                                         e.outer_level(j));
  return inter.order();
}

}  // namespace h2detail

inline SchwartzC2 schwartz2(const FilteredObject2& e, i64 o, SchwartzC1 f,
                            cx s) {
  h2detail::require_element2(e, o, f.parent, s, "schwartz2");
  return {e, o, std::move(f), s};
}

inline DistC2 dist2(const FilteredObject2& e, i64 o, DistC1 f, cx s) {
  h2detail::require_element2(e, o, f.parent, s, "dist2");
  return {e, o, std::move(f), s};
}

// -------------------------------------------------------------------------
// Pairing, anchor changes, deviations. The pairing multiplies the two
// component coordinates, which compose to a plain scalar because the
// anchors agree.

inline cx pairing2(const SchwartzC2& x, const DistC2& h) {
  if (!(x.parent == h.parent))
    throw std::invalid_argument("pairing2: parent mismatch");
  if (x.o != h.o)
    throw std::invalid_argument("pairing2: anchor indices differ");
  return x.s * h.s * pairing1(x.f, h.f);
}

inline SchwartzC2 rebase2(const SchwartzC2& x, const VirtualMeasure& m) {
  if (!(m.parent == x.parent))
    throw std::invalid_argument("rebase2: parent mismatch");
  if (m.i != x.o)
    throw std::invalid_argument("rebase2: measure must start at the anchor");
  return {x.parent, m.j, x.f, x.s * m.s};
}

inline DistC2 rebase2_dist(const DistC2& h, const VirtualMeasure& m) {
  if (!(m.parent == h.parent))
    throw std::invalid_argument("rebase2_dist: parent mismatch");
  if (m.j != h.o)
    throw std::invalid_argument("rebase2_dist: measure must end at the anchor");
  return {h.parent, m.i, h.f, h.s * m.s};
}

inline double deviation2(const SchwartzC2& x, const SchwartzC2& y) {
  if (!(x.parent == y.parent) || x.o != y.o)
    return std::numeric_limits<double>::infinity();
  SchwartzC1 a = x.f;
  for (auto& v : a.table) v *= x.s;
  SchwartzC1 b = y.f;
  for (auto& v : b.table) v *= y.s;
  return deviation1(a, b);
}

inline double deviation2_dist(const DistC2& x, const DistC2& y) {
  if (!(x.parent == y.parent) || x.o != y.o)
    return std::numeric_limits<double>::infinity();
  DistC1 a = x.f;
  for (auto& v : a.table) v *= x.s;
  DistC1 b = y.f;
  for (auto& v : b.table) v *= y.s;
  return deviation1_dist(a, b);
}

// Probe deviations: worst pairing difference against one Dirac and one
// unit Haar kernel per box window, or the mirror family for kernels.
// Reports quote these so that a disagreement always has a witness.

inline double probe_deviation2(const SchwartzC2& x, const SchwartzC2& y) {
  if (!(x.parent == y.parent) || x.o != y.o)
    return std::numeric_limits<double>::infinity();
  const FilteredObject1& b = x.parent.box;
  double worst = 0.0;
  for (i64 a = b.lo; a <= b.hi; ++a)
    for (i64 c = a; c <= b.hi; ++c) {
      DistC1 probes[2] = {dirac_kernel1(b, a, c),
                          haar_kernel1({b, cx{1.0, 0.0}}, a, c)};
      for (const DistC1& k : probes) {
        cx d = x.s * pairing1(x.f, k) - y.s * pairing1(y.f, k);
        worst = std::max(worst, std::abs(d));
      }
    }
  return worst;
}

inline double probe_deviation2_dist(const DistC2& x, const DistC2& y) {
  if (!(x.parent == y.parent) || x.o != y.o)
    return std::numeric_limits<double>::infinity();
  const FilteredObject1& b = x.parent.box;
  double worst = 0.0;
  for (i64 a = b.lo; a <= b.hi; ++a)
    for (i64 c = a; c <= b.hi; ++c) {
      WindowChart ch = window_chart(b, a, c);
      SchwartzC1 point{b, a, c,
                       std::vector<cx>(size_t(ch.g.order()), cx{0.0, 0.0})};
      point.table[size_t(ch.g.index_of(ch.g.zero()))] = cx{1.0, 0.0};
      SchwartzC1 flat{b, a, c,
                      std::vector<cx>(size_t(ch.g.order()), cx{1.0, 0.0})};
      for (const SchwartzC1* p : {&point, &flat}) {
        cx d = x.s * pairing1(*p, x.f) - y.s * pairing1(*p, y.f);
        worst = std::max(worst, std::abs(d));
      }
    }
  return worst;
}

// -------------------------------------------------------------------------
// The projective family. A member holds the induced table on one outer
// slice; the component keeps its coordinate while its anchor pair moves.
// Functions descend from the stored table by restriction upward and by
// b-weighted fiber sums downward. Kernels go the other way, extending by
// zero upward and spreading along b downward, so that member pairings all
// reproduce the stored pairing on the nose.

struct Member2 {
  FilteredObject1 sl;  // the slice between j and i as its own object
  i64 j = 0, i = 0;
  std::vector<cx> table;
  cx s{1.0, 0.0};
};

namespace h2detail {

inline i64 box_chart_index(const FilteredObject1& box, const WindowChart& cb,
                           const MonoIndex& mi, const std::vector<i64>& w) {
  std::vector<i64> h = mi.coords_in_sub(w);
  return cb.g.index_of(apply_hom(cb.q.projection, cb.g, h));
}

}  // namespace h2detail

inline Member2 coarsen2(const SchwartzC2& x, i64 j, i64 i) {
  const FilteredObject2& e = x.parent;
  if (j < e.ilo() || i > e.ihi() || j > i)
    throw std::invalid_argument("coarsen2: window out of range");
  SchwartzC1 big = enlarge1(x.f, e.box.lo, e.box.hi);
  WindowChart cb = window_chart(e.box, e.box.lo, e.box.hi);
  MonoIndex mi(cb.pb.h, cb.pb.inclusion, e.box.w);
  OuterChart oc = outer_chart(e, j, i);
  Presentation pj = abstract_presentation(e.outer_level(j));
  double mass = double(h2detail::ref_in_level(e, j));
  std::vector<cx> out(size_t(oc.obj.w.order()), cx{0.0, 0.0});
  for (i64 y = 0; y < oc.obj.w.order(); ++y) {
    std::vector<i64> w = slice_ambient2(e, oc, oc.obj.w.coords_of(y));
    cx acc{0.0, 0.0};
    for (i64 z = 0; z < pj.h.order(); ++z) {
      std::vector<i64> v = apply_hom(pj.inclusion, e.box.w, pj.h.coords_of(z));
      std::vector<i64> u = e.box.w.add(w, v);
      acc += big.table[size_t(h2detail::box_chart_index(e.box, cb, mi, u))];
    }
    out[size_t(y)] = acc / mass;
  }
  return {oc.obj, j, i, std::move(out), x.s};
}

inline Member2 coarsen_member2(const FilteredObject2& e, const Member2& m,
                               i64 j, i64 i) {
  if (j < m.j || i > m.i || j > i)
    throw std::invalid_argument("coarsen_member2: window not inside member");
  OuterChart from = outer_chart(e, m.j, m.i);
  OuterChart to = outer_chart(e, j, i);
  MonoIndex mf(from.pi.h, from.pi.inclusion, e.box.w);
  Presentation pj = abstract_presentation(e.outer_level(j));
  // The fiber sum revisits each source class once per point of the member's
  // own bottom level, and the b masses of the two bottoms trade places.
  double scale = double(h2detail::ref_in_level(e, m.j)) /
                 (double(h2detail::ref_in_level(e, j)) *
                  double(e.outer_level(m.j).order()));
  std::vector<cx> out(size_t(to.obj.w.order()), cx{0.0, 0.0});
  for (i64 y = 0; y < to.obj.w.order(); ++y) {
    std::vector<i64> w = slice_ambient2(e, to, to.obj.w.coords_of(y));
    cx acc{0.0, 0.0};
    for (i64 z = 0; z < pj.h.order(); ++z) {
      std::vector<i64> v = apply_hom(pj.inclusion, e.box.w, pj.h.coords_of(z));
      std::vector<i64> u = e.box.w.add(w, v);
      i64 src = from.obj.w.index_of(
          apply_hom(from.q.projection, from.obj.w, mf.coords_in_sub(u)));
      acc += m.table[size_t(src)];
    }
    out[size_t(y)] = acc * scale;
  }
  return {to.obj, j, i, std::move(out), m.s};
}

inline Member2 expand_member2_dist(const FilteredObject2& e, const Member2& m,
                                   i64 j, i64 i) {
  if (j > m.j || i < m.i)
    throw std::invalid_argument("expand_member2_dist: window must contain member");
  OuterChart from = outer_chart(e, m.j, m.i);
  OuterChart to = outer_chart(e, j, i);
  MonoIndex mf(from.pi.h, from.pi.inclusion, e.box.w);
  double weight = double(h2detail::ref_in_level(e, j)) /
                  double(h2detail::ref_in_level(e, m.j));
  std::vector<cx> out(size_t(to.obj.w.order()), cx{0.0, 0.0});
  for (i64 y = 0; y < to.obj.w.order(); ++y) {
    std::vector<i64> w = slice_ambient2(e, to, to.obj.w.coords_of(y));
    if (!e.outer_level(m.i).contains(w)) continue;
    i64 src = from.obj.w.index_of(
        apply_hom(from.q.projection, from.obj.w, mf.coords_in_sub(w)));
    out[size_t(y)] = m.table[size_t(src)] * weight;
  }
  return {to.obj, j, i, std::move(out), m.s};
}

inline DistC2 expand2_dist(const FilteredObject2& e, const Member2& m, i64 o) {
  Member2 full = expand_member2_dist(e, m, e.ilo(), e.ihi());
  WindowChart cb = window_chart(e.box, e.box.lo, e.box.hi);
  MonoIndex mi(cb.pb.h, cb.pb.inclusion, e.box.w);
  OuterChart oc = outer_chart(e, e.ilo(), e.ihi());
  // Transfer the full slice table onto the box chart, which presents the
  // same quotient through its own normal form.
  std::vector<cx> tbl(size_t(cb.g.order()), cx{0.0, 0.0});
  for (i64 y = 0; y < oc.obj.w.order(); ++y) {
    std::vector<i64> w = slice_ambient2(e, oc, oc.obj.w.coords_of(y));
    tbl[size_t(h2detail::box_chart_index(e.box, cb, mi, w))] =
        full.table[size_t(y)];
  }
  return dist2(e, o, DistC1{e.box, e.box.lo, e.box.hi, std::move(tbl)}, m.s);
}

inline cx member_pairing2(const Member2& f, const Member2& k) {
  if (f.j != k.j || f.i != k.i || f.table.size() != k.table.size())
    throw std::invalid_argument("member_pairing2: members on different slices");
  cx acc{0.0, 0.0};
  for (size_t n = 0; n < f.table.size(); ++n) acc += f.table[n] * k.table[n];
  return acc * f.s * k.s;
}

struct FamilyReport {
  double worst = 0.0;
};

// Pair one function against one kernel member through every pair of
// representatives that dominates the kernel's stage.
inline FamilyReport family_check2(const SchwartzC2& x, const Member2& k0) {
  const FilteredObject2& e = x.parent;
  DistC2 full = expand2_dist(e, k0, x.o);
  cx direct = pairing2(x, full);
  double worst = 0.0;
  for (i64 j = e.ilo(); j <= k0.j; ++j)
    for (i64 i = k0.i; i <= e.ihi(); ++i) {
      Member2 mf = coarsen2(x, j, i);
      Member2 mk = expand_member2_dist(e, k0, j, i);
      worst = std::max(worst, std::abs(member_pairing2(mf, mk) - direct));
    }
  return {worst};
}

// -------------------------------------------------------------------------
// Fourier transform. The box table transforms with the unit measure line;
// the component rides across the duality with its indices negated in
// place, which is exactly what dual_transport does to the anchor. Two
// passes compose to reflection because the unit line is its own dual.

inline bool is_complete2(const FilteredObject2& e) {
  return dual2(dual2(e)) == e;
}

namespace h2detail {

inline void require_fourier2(const FilteredObject2& e, const char* who) {
  if (e.box.flavor != Flavor1::fin)
    throw std::invalid_argument(std::string(who) + ": finite flavor required");
  if (!is_complete2(e))
    throw std::invalid_argument(std::string(who) + ": object is not complete");
}

}  // namespace h2detail

inline SchwartzC2 fourier2(const SchwartzC2& x) {
  h2detail::require_fourier2(x.parent, "fourier2");
  SchwartzC1 big = enlarge1(x.f, x.parent.box.lo, x.parent.box.hi);
  SchwartzC1 out = fourier1(big, MeasureLine1{x.parent.box, cx{1.0, 0.0}});
  return {dual2(x.parent), -x.o, std::move(out), x.s};
}

inline DistC2 fourier2_dist(const DistC2& h) {
  h2detail::require_fourier2(h.parent, "fourier2_dist");
  DistC1 big = enlarge1_dist(h.f, h.parent.box.lo, h.parent.box.hi);
  DistC1 out =
      fourier1_dist(big, MeasureLine1{dual1(h.parent.box), cx{1.0, 0.0}});
  return {dual2(h.parent), -h.o, std::move(out), h.s};
}

inline SchwartzC2 reflect2(const SchwartzC2& x) {
  SchwartzC1 big = enlarge1(x.f, x.parent.box.lo, x.parent.box.hi);
  return {x.parent, x.o, reflect1(big), x.s};
}

inline DistC2 reflect2_dist(const DistC2& h) {
  DistC1 big = enlarge1_dist(h.f, h.parent.box.lo, h.parent.box.hi);
  SchwartzC1 view{big.parent, big.wa, big.wb, big.table};
  SchwartzC1 r = reflect1(view);
  return {h.parent, h.o, DistC1{big.parent, r.wa, r.wb, r.table}, h.s};
}

// -------------------------------------------------------------------------
// The eight image maps along an admissible triple. The box tables move by
// the corresponding one dimensional maps; the components recombine using
// the factorization of the middle b basis through the outer two, which
// needs the three box chains to share their reference index. The two
// integration maps consume a virtual measure, the two canonical maps mint
// their coefficient from the mass one or counting element.

namespace h2detail {

inline void require_triple_refs(const AdmissibleTriple2& t, const char* who) {
  if (t.e1.box.o_ref != t.e2.box.o_ref || t.e2.box.o_ref != t.e3.box.o_ref)
    throw std::invalid_argument(std::string(who) +
                                ": box reference indices differ across the triple");
}

inline void require_home(const FilteredObject2& e, const FilteredObject2& want,
                         const char* who, const char* slot) {
  if (!(e == want))
    throw std::invalid_argument(std::string(who) + ": element must live on " +
                                slot);
}

}  // namespace h2detail

inline AdmissibleTriple1 box_triple(const AdmissibleTriple2& t) {
  return {t.e1.box, t.e2.box, t.e3.box, t.alpha, t.beta};
}

// Integration along the quotient map against a measure on the sub, which
// must run from the element's anchor up to the top of the window.
inline SchwartzC2 beta_push2(const AdmissibleTriple2& t, const SchwartzC2& x,
                             const VirtualMeasure& mu) {
  h2detail::require_triple_refs(t, "beta_push2");
  h2detail::require_home(x.parent, t.e2, "beta_push2", "E2");
  if (!predicates2(t.e1).c)
    throw std::invalid_argument("beta_push2: predicate c fails on E1");
  if (!(mu.parent == t.e1))
    throw std::invalid_argument("beta_push2: measure parent must be E1");
  if (mu.i != eps_of(t, x.o) || mu.j != t.e1.ihi())
    throw std::invalid_argument(
        "beta_push2: measure must run from the anchor to the top");
  MeasureLine1 m1{t.e1.box, mu.s};
  SchwartzC1 out = image1_function(box_triple(t), ImageMode1::I1, x.f, &m1);
  return {t.e3, gamma_of(t, x.o), std::move(out), x.s};
}

inline DistC2 beta_pull2_dist(const AdmissibleTriple2& t, const DistC2& h,
                              const VirtualMeasure& mu) {
  h2detail::require_triple_refs(t, "beta_pull2_dist");
  h2detail::require_home(h.parent, t.e3, "beta_pull2_dist", "E3");
  if (!predicates2(t.e1).c)
    throw std::invalid_argument("beta_pull2_dist: predicate c fails on E1");
  if (!(mu.parent == t.e1))
    throw std::invalid_argument("beta_pull2_dist: measure parent must be E1");
  if (mu.i != eps_of(t, h.o) || mu.j != t.e1.ihi())
    throw std::invalid_argument(
        "beta_pull2_dist: measure must run from the anchor to the top");
  MeasureLine1 m1{t.e1.box, mu.s};
  DistC1 out = image1_dist(box_triple(t), ImageMode1::I2, h.f, &m1);
  return {t.e2, h.o, std::move(out), h.s};
}

// Restriction to the sub against a counting direction measure on the
// quotient, anchored at the element and reaching the bottom.
inline SchwartzC2 alpha_pull2(const AdmissibleTriple2& t, const SchwartzC2& x,
                              const VirtualMeasure& nu) {
  h2detail::require_triple_refs(t, "alpha_pull2");
  h2detail::require_home(x.parent, t.e2, "alpha_pull2", "E2");
  if (!predicates2(t.e3).d)
    throw std::invalid_argument("alpha_pull2: predicate d fails on E3");
  if (!(nu.parent == t.e3))
    throw std::invalid_argument("alpha_pull2: measure parent must be E3");
  if (nu.i != gamma_of(t, x.o) || nu.j != t.e3.ilo())
    throw std::invalid_argument(
        "alpha_pull2: measure must run from the anchor to the bottom");
  SchwartzC1 out = image1_function(box_triple(t), ImageMode1::I3, x.f);
  return {t.e1, eps_of(t, x.o), std::move(out), x.s * nu.s};
}

inline DistC2 alpha_push2_dist(const AdmissibleTriple2& t, const DistC2& h,
                               const VirtualMeasure& nu) {
  h2detail::require_triple_refs(t, "alpha_push2_dist");
  h2detail::require_home(h.parent, t.e1, "alpha_push2_dist", "E1");
  if (!predicates2(t.e3).d)
    throw std::invalid_argument("alpha_push2_dist: predicate d fails on E3");
  if (!(nu.parent == t.e3))
    throw std::invalid_argument("alpha_push2_dist: measure parent must be E3");
  if (nu.i != gamma_of(t, h.o) || nu.j != t.e3.ilo())
    throw std::invalid_argument(
        "alpha_push2_dist: measure must run from the anchor to the bottom");
  DistC1 out = image1_dist(box_triple(t), ImageMode1::I4, h.f);
  return {t.e2, h.o, std::move(out), h.s * nu.s};
}

// Pullback along the quotient map. The missing sub component is the mass
// one element, so the coordinate picks up its coefficient.
inline SchwartzC2 beta_pull2(const AdmissibleTriple2& t, const SchwartzC2& x) {
  h2detail::require_triple_refs(t, "beta_pull2");
  h2detail::require_home(x.parent, t.e3, "beta_pull2", "E3");
  if (!predicates2(t.e1).cf)
    throw std::invalid_argument("beta_pull2: predicate cf fails on E1");
  cx w1 = canonical_one(t.e1, t.e1.ilo(), eps_of(t, x.o)).s;
  SchwartzC1 out = image1_function(box_triple(t), ImageMode1::I5, x.f);
  return {t.e2, x.o, std::move(out), x.s * w1};
}

inline DistC2 beta_push2_dist(const AdmissibleTriple2& t, const DistC2& h) {
  h2detail::require_triple_refs(t, "beta_push2_dist");
  h2detail::require_home(h.parent, t.e2, "beta_push2_dist", "E2");
  if (!predicates2(t.e1).cf)
    throw std::invalid_argument("beta_push2_dist: predicate cf fails on E1");
  cx w1 = canonical_one(t.e1, t.e1.ilo(), eps_of(t, h.o)).s;
  DistC1 out = image1_dist(box_triple(t), ImageMode1::I6, h.f);
  return {t.e3, gamma_of(t, h.o), std::move(out), h.s * w1};
}

// Extension by zero along the sub. The missing quotient component is the
// counting element.
inline SchwartzC2 alpha_push2(const AdmissibleTriple2& t, const SchwartzC2& x) {
  h2detail::require_triple_refs(t, "alpha_push2");
  h2detail::require_home(x.parent, t.e1, "alpha_push2", "E1");
  if (!predicates2(t.e3).df)
    throw std::invalid_argument("alpha_push2: predicate df fails on E3");
  cx wd = canonical_delta(t.e3, t.e3.ilo(), gamma_of(t, x.o)).s;
  SchwartzC1 out = image1_function(box_triple(t), ImageMode1::I7, x.f);
  return {t.e2, x.o, std::move(out), x.s * wd};
}

inline DistC2 alpha_pull2_dist(const AdmissibleTriple2& t, const DistC2& h) {
  h2detail::require_triple_refs(t, "alpha_pull2_dist");
  h2detail::require_home(h.parent, t.e2, "alpha_pull2_dist", "E2");
  if (!predicates2(t.e3).df)
    throw std::invalid_argument("alpha_pull2_dist: predicate df fails on E3");
  cx wd = canonical_delta(t.e3, t.e3.ilo(), gamma_of(t, h.o)).s;
  DistC1 out = image1_dist(box_triple(t), ImageMode1::I8, h.f);
  return {t.e1, eps_of(t, h.o), std::move(out), h.s * wd};
}

// -------------------------------------------------------------------------
// The eight transform squares: each image map composed with the transform
// matches the dual triple's partner map, with measures moved by
// dual_transport. Squares that integrate need the end object compact or
// discrete in the outer sense; the canonical squares need it in the box
// sense. Deviations are probe based.

namespace h2detail {

inline std::vector<cx> random_table(size_t n, std::mt19937_64& rng) {
  std::vector<cx> t(n);
  for (auto& v : t) {
    double re = double(rng() >> 11) * 0x1p-53 * 2.0 - 1.0;
    double im = double(rng() >> 11) * 0x1p-53 * 2.0 - 1.0;
    v = cx{re, im};
  }
  return t;
}

inline SchwartzC1 random_schwartz1(const FilteredObject1& b,
                                   std::mt19937_64& rng) {
  WindowChart c = window_chart(b, b.lo, b.hi);
  return {b, b.lo, b.hi, random_table(size_t(c.g.order()), rng)};
}

inline DistC1 random_dist1(const FilteredObject1& b, std::mt19937_64& rng) {
  WindowChart c = window_chart(b, b.lo, b.hi);
  return {b, b.lo, b.hi, random_table(size_t(c.g.order()), rng)};
}

}  // namespace h2detail

struct SquareReport {
  std::string name;
  bool ran = false;
  double deviation = 0.0;
};

struct FourierSquaresReport {
  std::vector<SquareReport> squares;
  double worst = 0.0;
};

inline FourierSquaresReport fourier_squares_check(const AdmissibleTriple2& t,
                                                  i64 o, cx smu, cx snu,
                                                  unsigned long long seed) {
  h2detail::require_triple_refs(t, "fourier_squares_check");
  std::mt19937_64 rng(seed);
  AdmissibleTriple2 td = dual_triple2(t);
  Predicates2 p1 = predicates2(t.e1);
  Predicates2 p3 = predicates2(t.e3);
  VirtualMeasure mu =
      virtual_measure(t.e1, eps_of(t, o), t.e1.ihi(), smu);
  VirtualMeasure nu =
      virtual_measure(t.e3, gamma_of(t, o), t.e3.ilo(), snu);
  FourierSquaresReport rep;
  auto add = [&](const char* name, bool ran, double dev) {
    rep.squares.push_back({name, ran, dev});
    if (ran) rep.worst = std::max(rep.worst, dev);
  };

  SchwartzC2 f2 = schwartz2(t.e2, o, h2detail::random_schwartz1(t.e2.box, rng),
                            cx{1.25, -0.5});
  SchwartzC2 f3 = schwartz2(t.e3, o, h2detail::random_schwartz1(t.e3.box, rng),
                            cx{0.75, 0.25});
  SchwartzC2 f1 = schwartz2(t.e1, o, h2detail::random_schwartz1(t.e1.box, rng),
                            cx{-1.0, 0.5});
  DistC2 h3 = dist2(t.e3, o, h2detail::random_dist1(t.e3.box, rng),
                    cx{0.5, 0.5});
  DistC2 h1 = dist2(t.e1, o, h2detail::random_dist1(t.e1.box, rng),
                    cx{1.0, -0.25});
  DistC2 h2a = dist2(t.e2, o, h2detail::random_dist1(t.e2.box, rng),
                     cx{-0.5, 1.0});
  DistC2 h2b = dist2(t.e2, o, h2detail::random_dist1(t.e2.box, rng),
                     cx{0.25, -0.75});

  if (p1.c) {
    add("quotient integration of functions", true,
        probe_deviation2(fourier2(beta_push2(t, f2, mu)),
                         alpha_pull2(td, fourier2(f2), dual_transport(mu))));
    add("quotient integration of kernels", true,
        probe_deviation2_dist(
            fourier2_dist(beta_pull2_dist(t, h3, mu)),
            alpha_push2_dist(td, fourier2_dist(h3), dual_transport(mu))));
  } else {
    add("quotient integration of functions", false, 0.0);
    add("quotient integration of kernels", false, 0.0);
  }
  if (p3.d) {
    add("sub restriction of functions", true,
        probe_deviation2(fourier2(alpha_pull2(t, f2, nu)),
                         beta_push2(td, fourier2(f2), dual_transport(nu))));
    add("sub restriction of kernels", true,
        probe_deviation2_dist(
            fourier2_dist(alpha_push2_dist(t, h1, nu)),
            beta_pull2_dist(td, fourier2_dist(h1), dual_transport(nu))));
  } else {
    add("sub restriction of functions", false, 0.0);
    add("sub restriction of kernels", false, 0.0);
  }
  if (p1.cf) {
    add("quotient pullback of functions", true,
        probe_deviation2(fourier2(beta_pull2(t, f3)),
                         alpha_push2(td, fourier2(f3))));
    add("quotient pullback of kernels", true,
        probe_deviation2_dist(fourier2_dist(beta_push2_dist(t, h2a)),
                              alpha_pull2_dist(td, fourier2_dist(h2a))));
  } else {
    add("quotient pullback of functions", false, 0.0);
    add("quotient pullback of kernels", false, 0.0);
  }
  if (p3.df) {
    add("sub extension of functions", true,
        probe_deviation2(fourier2(alpha_push2(t, f1)),
                         beta_pull2(td, fourier2(f1))));
    add("sub extension of kernels", true,
        probe_deviation2_dist(fourier2_dist(alpha_pull2_dist(t, h2b)),
                              beta_push2_dist(td, fourier2_dist(h2b))));
  } else {
    add("sub extension of functions", false, 0.0);
    add("sub extension of kernels", false, 0.0);
  }
  return rep;
}

// -------------------------------------------------------------------------
// Base change diagrams. A five object diagram glues a row triple to a
// column triple through the row quotient; the pullback corner completes
// the top triple and the corner-to-middle composite forms the mid triple.
// The amalgam variant glues through the row middle instead.

struct PullbackCross {
  AdmissibleTriple2 row;  // E1 -> E2 -> E3
  AdmissibleTriple2 col;  // D -> E3 -> B
  AdmissibleTriple2 top;  // E1 -> X -> D, the pullback corner
  AdmissibleTriple2 mid;  // X -> E2 -> B, the composite quotient
};

inline PullbackCross pullback_cross(const AdmissibleTriple2& row,
                                    const AdmissibleTriple2& col) {
  if (!(col.e2 == row.e3))
    throw std::invalid_argument(
        "pullback_cross: column middle must be the row quotient");
  FiberedProduct2 fp =
      fibered_product2(row, Morphism2{col.e1, row.e3, col.alpha});
  Mat comp = mat_mul(col.beta, row.beta);
  for (int r = 0; r < col.e3.box.w.rank(); ++r)
    for (int c = 0; c < row.e2.box.w.rank(); ++c) {
      comp[r][c] %= col.e3.box.w.moduli[r];
      if (comp[r][c] < 0) comp[r][c] += col.e3.box.w.moduli[r];
    }
  AdmissibleTriple2 mid =
      triple2(fp.triple.e2, row.e2, col.e3, fp.to_e2, comp);
  if (!is_admissible_triple2(mid))
    throw std::logic_error("pullback_cross: composite triple failed");
  return {row, col, fp.triple, std::move(mid)};
}

struct PushoutCross {
  AdmissibleTriple2 row;     // E1 -> E2 -> E3
  AdmissibleTriple2 colmid;  // E2 -> H -> L
  AdmissibleTriple2 right;   // E3 -> amalgam -> L
  AdmissibleTriple2 midrow;  // E1 -> H -> amalgam
};

inline PushoutCross pushout_cross(const AdmissibleTriple2& row,
                                const AdmissibleTriple2& colmid) {
  if (!(colmid.e1 == row.e2))
    throw std::invalid_argument(
        "pushout_cross: column sub must be the row middle");
  Amalgam2 am = amalgam2(colmid, Morphism2{row.e2, row.e3, row.beta});
  Mat comp = mat_mul(colmid.alpha, row.alpha);
  for (int r = 0; r < colmid.e2.box.w.rank(); ++r)
    for (int c = 0; c < row.e1.box.w.rank(); ++c) {
      comp[r][c] %= colmid.e2.box.w.moduli[r];
      if (comp[r][c] < 0) comp[r][c] += colmid.e2.box.w.moduli[r];
    }
  AdmissibleTriple2 midrow =
      triple2(row.e1, colmid.e2, am.triple.e2, comp, am.from_e2);
  if (!is_admissible_triple2(midrow))
    throw std::logic_error("pushout_cross: composite triple failed");
  return {row, colmid, am.triple, std::move(midrow)};
}

struct BaseChangeReport {
  std::string identity;
  double deviation = 0.0;
};

namespace h2detail {

inline VirtualMeasure up(const FilteredObject2& e, i64 o, cx s) {
  return virtual_measure(e, o, e.ihi(), s);
}

inline VirtualMeasure down(const FilteredObject2& e, i64 o, cx s) {
  return virtual_measure(e, o, e.ilo(), s);
}

}  // namespace h2detail

// The sixteen interchange identities. Odd numbers take functions, even
// numbers take kernels; 1 to 12 run on the pullback diagram, 13 to 16 on
// the amalgam diagram. The input element's home depends on the identity.
inline BaseChangeReport base_change2_check(const PullbackCross& z, int k,
                                           const SchwartzC2& x, cx smu,
                                           cx snu) {
  using h2detail::down;
  using h2detail::up;
  i64 o = x.o;
  switch (k) {
    case 1: {
      h2detail::require_home(x.parent, z.row.e2, "base_change2_check#1", "E2");
      SchwartzC2 lhs = alpha_pull2(z.col, beta_push2(z.row, x, up(z.row.e1, o, smu)),
                                   down(z.col.e3, o, snu));
      SchwartzC2 rhs = beta_push2(z.top, alpha_pull2(z.mid, x, down(z.mid.e3, o, snu)),
                                  up(z.top.e1, o, smu));
      return {"bc01 integrate then restrict", probe_deviation2(lhs, rhs)};
    }
    case 3: {
      h2detail::require_home(x.parent, z.col.e1, "base_change2_check#3", "D");
      SchwartzC2 lhs = beta_pull2(z.row, alpha_push2(z.col, x));
      SchwartzC2 rhs = alpha_push2(z.mid, beta_pull2(z.top, x));
      return {"bc03 extend then pull back", probe_deviation2(lhs, rhs)};
    }
    case 5: {
      h2detail::require_home(x.parent, z.top.e2, "base_change2_check#5", "X");
      SchwartzC2 lhs =
          beta_push2(z.row, alpha_push2(z.mid, x), up(z.row.e1, o, smu));
      SchwartzC2 rhs =
          alpha_push2(z.col, beta_push2(z.top, x, up(z.top.e1, o, smu)));
      return {"bc05 extend then integrate", probe_deviation2(lhs, rhs)};
    }
    case 7: {
      h2detail::require_home(x.parent, z.row.e3, "base_change2_check#7", "E3");
      SchwartzC2 lhs =
          beta_pull2(z.top, alpha_pull2(z.col, x, down(z.col.e3, o, snu)));
      SchwartzC2 rhs =
          alpha_pull2(z.mid, beta_pull2(z.row, x), down(z.mid.e3, o, snu));
      return {"bc07 restrict then pull back", probe_deviation2(lhs, rhs)};
    }
    case 9: {
      h2detail::require_home(x.parent, z.row.e2, "base_change2_check#9", "E2");
      SchwartzC2 lhs = beta_push2(z.mid, x, up(z.mid.e1, o, smu * snu));
      SchwartzC2 rhs = beta_push2(
          z.col, beta_push2(z.row, x, up(z.row.e1, o, smu)),
          up(z.col.e1, o, snu));
      return {"bc09 integrate in stages", probe_deviation2(lhs, rhs)};
    }
    case 11: {
      h2detail::require_home(x.parent, z.col.e3, "base_change2_check#11", "B");
      SchwartzC2 lhs = beta_pull2(z.row, beta_pull2(z.col, x));
      SchwartzC2 rhs = beta_pull2(z.mid, x);
      return {"bc11 pull back in stages", probe_deviation2(lhs, rhs)};
    }
    default:
      throw std::invalid_argument(
          "base_change2_check: function identities are 1,3,5,7,9,11");
  }
}

inline BaseChangeReport base_change2_check(const PullbackCross& z, int k,
                                           const DistC2& h, cx smu, cx snu) {
  using h2detail::down;
  using h2detail::up;
  i64 o = h.o;
  switch (k) {
    case 2: {
      h2detail::require_home(h.parent, z.col.e1, "base_change2_check#2", "D");
      DistC2 lhs = beta_pull2_dist(
          z.row, alpha_push2_dist(z.col, h, down(z.col.e3, o, snu)),
          up(z.row.e1, o, smu));
      DistC2 rhs = alpha_push2_dist(
          z.mid, beta_pull2_dist(z.top, h, up(z.top.e1, o, smu)),
          down(z.mid.e3, o, snu));
      return {"bc02 extend then pull, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    case 4: {
      h2detail::require_home(h.parent, z.row.e2, "base_change2_check#4", "E2");
      DistC2 lhs = alpha_pull2_dist(z.col, beta_push2_dist(z.row, h));
      DistC2 rhs = beta_push2_dist(z.top, alpha_pull2_dist(z.mid, h));
      return {"bc04 push then restrict, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    case 6: {
      h2detail::require_home(h.parent, z.row.e3, "base_change2_check#6", "E3");
      DistC2 lhs = beta_pull2_dist(z.top, alpha_pull2_dist(z.col, h),
                                   up(z.top.e1, o, smu));
      DistC2 rhs = alpha_pull2_dist(
          z.mid, beta_pull2_dist(z.row, h, up(z.row.e1, o, smu)));
      return {"bc06 restrict then pull, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    case 8: {
      h2detail::require_home(h.parent, z.top.e2, "base_change2_check#8", "X");
      DistC2 lhs = beta_push2_dist(
          z.row, alpha_push2_dist(z.mid, h, down(z.mid.e3, o, snu)));
      DistC2 rhs = alpha_push2_dist(
          z.col, beta_push2_dist(z.top, h), down(z.col.e3, o, snu));
      return {"bc08 extend then push, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    case 10: {
      h2detail::require_home(h.parent, z.col.e3, "base_change2_check#10", "B");
      DistC2 lhs = beta_pull2_dist(z.mid, h, up(z.mid.e1, o, smu * snu));
      DistC2 rhs = beta_pull2_dist(
          z.row, beta_pull2_dist(z.col, h, up(z.col.e1, o, snu)),
          up(z.row.e1, o, smu));
      return {"bc10 pull in stages, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    case 12: {
      h2detail::require_home(h.parent, z.row.e2, "base_change2_check#12", "E2");
      DistC2 lhs = beta_push2_dist(z.col, beta_push2_dist(z.row, h));
      DistC2 rhs = beta_push2_dist(z.mid, h);
      return {"bc12 push in stages, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    default:
      throw std::invalid_argument(
          "base_change2_check: kernel identities are 2,4,6,8,10,12");
  }
}

inline BaseChangeReport base_change2_check(const PushoutCross& z, int k,
                                           const SchwartzC2& x, cx smu,
                                           cx snu) {
  using h2detail::down;
  i64 o = x.o;
  switch (k) {
    case 13: {
      h2detail::require_home(x.parent, z.colmid.e2, "base_change2_check#13",
                             "H");
      SchwartzC2 lhs = alpha_pull2(z.midrow, x, down(z.midrow.e3, o, smu * snu));
      SchwartzC2 rhs =
          alpha_pull2(z.row, alpha_pull2(z.colmid, x, down(z.colmid.e3, o, snu)),
                      down(z.row.e3, o, smu));
      return {"bc13 restrict in stages", probe_deviation2(lhs, rhs)};
    }
    case 15: {
      h2detail::require_home(x.parent, z.row.e1, "base_change2_check#15", "E1");
      SchwartzC2 lhs = alpha_push2(z.midrow, x);
      SchwartzC2 rhs = alpha_push2(z.colmid, alpha_push2(z.row, x));
      return {"bc15 extend in stages", probe_deviation2(lhs, rhs)};
    }
    default:
      throw std::invalid_argument(
          "base_change2_check: function identities are 13,15");
  }
}

inline BaseChangeReport base_change2_check(const PushoutCross& z, int k,
                                           const DistC2& h, cx smu, cx snu) {
  using h2detail::down;
  i64 o = h.o;
  switch (k) {
    case 14: {
      h2detail::require_home(h.parent, z.row.e1, "base_change2_check#14", "E1");
      DistC2 lhs = alpha_push2_dist(z.midrow, h, down(z.midrow.e3, o, smu * snu));
      DistC2 rhs = alpha_push2_dist(
          z.colmid, alpha_push2_dist(z.row, h, down(z.row.e3, o, smu)),
          down(z.colmid.e3, o, snu));
      return {"bc14 push in stages, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    case 16: {
      h2detail::require_home(h.parent, z.colmid.e2, "base_change2_check#16",
                             "H");
      DistC2 lhs = alpha_pull2_dist(z.midrow, h);
      DistC2 rhs = alpha_pull2_dist(z.row, alpha_pull2_dist(z.colmid, h));
      return {"bc16 restrict in stages, kernels", probe_deviation2_dist(lhs, rhs)};
    }
    default:
      throw std::invalid_argument(
          "base_change2_check: kernel identities are 14,16");
  }
}

// -------------------------------------------------------------------------
// Characteristic elements. The invariant kernel spreads a to-the-top
// measure over the box with density one over the reference level order;
// the point kernel carries a to-the-bottom measure. Their transforms swap
// roles across the duality, and a sub's characteristic element can be
// assembled from either side of its triple.

inline DistC2 haar_element2(const FilteredObject2& e, const VirtualMeasure& mu) {
  if (!predicates2(e).c)
    throw std::invalid_argument("haar_element2: predicate c fails");
  if (!(mu.parent == e))
    throw std::invalid_argument("haar_element2: measure parent mismatch");
  if (mu.j != e.ihi())
    throw std::invalid_argument("haar_element2: measure must reach the top");
  WindowChart c = window_chart(e.box, e.box.lo, e.box.hi);
  double r = double(e.box.level(e.box.o_ref).order());
  DistC1 k{e.box, e.box.lo, e.box.hi,
           std::vector<cx>(size_t(c.g.order()), cx{1.0 / r, 0.0})};
  return dist2(e, mu.i, std::move(k), mu.s);
}

inline DistC2 dirac_element2(const FilteredObject2& e, const VirtualMeasure& nu) {
  if (!predicates2(e).d)
    throw std::invalid_argument("dirac_element2: predicate d fails");
  if (!(nu.parent == e))
    throw std::invalid_argument("dirac_element2: measure parent mismatch");
  if (nu.j != e.ilo())
    throw std::invalid_argument("dirac_element2: measure must reach the bottom");
  return dist2(e, nu.i, dirac_kernel1(e.box, e.box.lo, e.box.hi), nu.s);
}

// Constant one with the mass one component, and the point function with
// the counting component. Both exist only on fully compact respectively
// fully discrete objects.
inline SchwartzC2 one2(const FilteredObject2& e, i64 o) {
  if (!predicates2(e).c)
    throw std::invalid_argument("one2: predicate c fails");
  cx w1 = canonical_one(e, e.ilo(), o).s;
  WindowChart c = window_chart(e.box, e.box.lo, e.box.hi);
  SchwartzC1 f{e.box, e.box.lo, e.box.hi,
               std::vector<cx>(size_t(c.g.order()), cx{1.0, 0.0})};
  return schwartz2(e, o, std::move(f), w1);
}

inline SchwartzC2 dirac_function2(const FilteredObject2& e, i64 o) {
  if (!predicates2(e).d)
    throw std::invalid_argument("dirac_function2: predicate d fails");
  cx wd = canonical_delta(e, e.ilo(), o).s;
  WindowChart c = window_chart(e.box, e.box.lo, e.box.hi);
  std::vector<cx> t(size_t(c.g.order()), cx{0.0, 0.0});
  t[size_t(c.g.index_of(c.g.zero()))] = cx{1.0, 0.0};
  return schwartz2(e, o, SchwartzC1{e.box, e.box.lo, e.box.hi, std::move(t)},
                   wd);
}

inline DistC2 characteristic_kernel2(const AdmissibleTriple2& t,
                                   const VirtualMeasure& mu,
                                   const VirtualMeasure& nu) {
  return alpha_push2_dist(t, haar_element2(t.e1, mu), nu);
}

inline SchwartzC2 characteristic_function2(const AdmissibleTriple2& t, i64 o) {
  return alpha_push2(t, one2(t.e1, eps_of(t, o)));
}

struct LemmaReport {
  double deviation = 0.0;
};

// The characteristic kernel assembled through the sub agrees with the one
// assembled through the quotient.
inline LemmaReport characteristic_agree_check(const AdmissibleTriple2& t,
                                       const VirtualMeasure& mu,
                                       const VirtualMeasure& nu) {
  DistC2 lhs = characteristic_kernel2(t, mu, nu);
  DistC2 rhs = beta_pull2_dist(t, dirac_element2(t.e3, nu), mu);
  return {std::max(probe_deviation2_dist(lhs, rhs), deviation2_dist(lhs, rhs))};
}

inline LemmaReport characteristic_agree_cf_check(const AdmissibleTriple2& t, i64 o) {
  SchwartzC2 lhs = characteristic_function2(t, o);
  SchwartzC2 rhs = beta_pull2(t, dirac_function2(t.e3, gamma_of(t, o)));
  return {std::max(probe_deviation2(lhs, rhs), deviation2(lhs, rhs))};
}

// Transform exchanges of the two generators, stated on one object and its
// dual.
inline double haar_fourier_check(const FilteredObject2& e,
                                  const VirtualMeasure& mu) {
  DistC2 lhs = fourier2_dist(haar_element2(e, mu));
  DistC2 rhs = dirac_element2(dual2(e), dual_transport(mu));
  return std::max(probe_deviation2_dist(lhs, rhs), deviation2_dist(lhs, rhs));
}

inline double dirac_fourier_check(const FilteredObject2& e,
                                  const VirtualMeasure& nu) {
  DistC2 lhs = fourier2_dist(dirac_element2(e, nu));
  DistC2 rhs = haar_element2(dual2(e), dual_transport(nu));
  return std::max(probe_deviation2_dist(lhs, rhs), deviation2_dist(lhs, rhs));
}

// -------------------------------------------------------------------------
// Summation formulas. The transform of a sub's characteristic kernel is
// the dual sub's characteristic kernel with the two measures traded; the
// canonical version needs no measures at all. The twisted variants run
// the same statement on a translated pivot, with a connecting coefficient
// rebasing both sides.

struct Poisson2Report {
  double deviation = 0.0;
};

inline Poisson2Report poisson2_I_check(const AdmissibleTriple2& t,
                                       const VirtualMeasure& mu,
                                       const VirtualMeasure& nu) {
  DistC2 lhs = fourier2_dist(characteristic_kernel2(t, mu, nu));
  AdmissibleTriple2 td = dual_triple2(t);
  DistC2 rhs =
      characteristic_kernel2(td, dual_transport(nu), dual_transport(mu));
  return {std::max(probe_deviation2_dist(lhs, rhs), deviation2_dist(lhs, rhs))};
}

inline Poisson2Report poisson2_II_check(const AdmissibleTriple2& t, i64 o) {
  SchwartzC2 lhs = fourier2(characteristic_function2(t, o));
  SchwartzC2 rhs = characteristic_function2(dual_triple2(t), -o);
  return {std::max(probe_deviation2(lhs, rhs), deviation2(lhs, rhs))};
}

inline Poisson2Report poisson2_I_twisted_check(const FilteredObject2& e, i64 k,
                                               i64 b, i64 o, cx smu, cx snu,
                                               cx sa) {
  AdmissibleTriple2 tb = sub_quotient_triple2(e, k + b);
  VirtualMeasure mu = virtual_measure(tb.e1, o + b, tb.e1.ihi(), smu);
  VirtualMeasure nu = virtual_measure(tb.e3, o + b, tb.e3.ilo(), snu);
  VirtualMeasure a = virtual_measure(e, o, o + b, sa);
  DistC2 lhs =
      fourier2_dist(rebase2_dist(characteristic_kernel2(tb, mu, nu), a));
  AdmissibleTriple2 td = dual_triple2(tb);
  DistC2 rhs = rebase2_dist(
      characteristic_kernel2(td, dual_transport(nu), dual_transport(mu)),
      dual_transport(a));
  return {std::max(probe_deviation2_dist(lhs, rhs), deviation2_dist(lhs, rhs))};
}

inline Poisson2Report poisson2_II_twisted_check(const FilteredObject2& e,
                                                i64 k, i64 b, i64 o) {
  AdmissibleTriple2 tb = sub_quotient_triple2(e, k + b);
  return poisson2_II_check(tb, o + b);
}

}  // namespace alharm
