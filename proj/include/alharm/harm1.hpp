#pragma once

// Harmonic analysis on filtered objects: function and distribution
// representatives on windows, the one-dimensional measure line, pairing,
// Fourier transform against the dual object, the eight image maps along
// an admissible triple, and the summation identity they imply.
//
// A function is stored as a table on the chart of F(b)/F(a) for its
// window [a, b]. Enlarging the window pulls back along the connecting
// epimorphism (classes merge downward) and extends by zero along the
// connecting monomorphism (room appears upward). Distribution kernels
// move the same way except the pullback divides by the fiber size, which
// is exactly what keeps the plain bilinear pairing window-independent.

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "alharm/filt1.hpp"

namespace alharm {

// Chart of F(b)/F(a): the level S_b presented abstractly, then divided by
// the image of S_a. The quotient's lift lets homs be written on chart
// coordinates directly.
struct WindowChart {
  FinAbGroup g;
  Presentation pb;  // S_b as an abstract group with inclusion into ambient
  QuotientC0 q;     // pb.h -> g, with section
};

inline WindowChart window_chart(const FilteredObject1& e, i64 a, i64 b) {
  if (e.flavor != Flavor1::fin)
    throw std::invalid_argument("window_chart: finite flavor required");
  if (a < e.lo || b > e.hi || a > b)
    throw std::invalid_argument("window_chart: window outside the object");
  Presentation pb = abstract_presentation(e.level(b));
  MonoIndex mi(pb.h, pb.inclusion, e.w);
  Presentation pa = abstract_presentation(e.level(a));
  Mat a_in_b = mi.factor_hom(pa.inclusion);
  Subgroup sa = hom_image(pb.h, a_in_b, pa.h);
  QuotientC0 q = quotient(pb.h, sa);
  return {q.q, pb, q};
}

// Ambient coordinates of a chart element, one representative per class.
inline std::vector<i64> chart_ambient(const FilteredObject1& e,
                                      const WindowChart& c,
                                      const std::vector<i64>& x) {
  std::vector<i64> h = mat_vec(c.q.lift, x);
  return e.w.reduce(mat_vec(c.pb.inclusion, h));
}

struct SchwartzC1 {
  FilteredObject1 parent;
  i64 wa = 0, wb = 0;
  std::vector<cx> table;
};

struct DistC1 {
  FilteredObject1 parent;
  i64 wa = 0, wb = 0;
  std::vector<cx> table;
};

struct MeasureLine1 {
  FilteredObject1 parent;
  cx c;  // volume of the level at parent.o_ref
};

// Haar scale on the chart at window [a, b]: the level at o_ref gets
// volume c, and volumes only depend on the scalar, not the window.
inline MeasureC0 measure_on_window(const MeasureLine1& mu, i64 a) {
  double na = double(mu.parent.level(a).order());
  double no = double(mu.parent.level(mu.parent.o_ref).order());
  return MeasureC0{mu.c * (na / no)};
}

namespace h1detail {

// Moves a table from window [a, b] to the containing window [na, nb].
// Functions pull back along the connecting epi and extend by zero along
// the mono; kernels additionally divide by the merged fiber size so that
// pairings are preserved.
inline std::vector<cx> move_up(const FilteredObject1& e, i64 a, i64 b,
                               const std::vector<cx>& table, i64 na, i64 nb,
                               bool dist) {
  if (na > a || nb < b)
    throw std::invalid_argument("move_up: target window does not contain source");
  if (na == a && nb == b) return table;
  WindowChart c1 = window_chart(e, a, b);
  WindowChart c2 = window_chart(e, na, nb);
  MonoIndex mi(c2.pb.h, c2.pb.inclusion, e.w);
  Mat m = mi.factor_hom(c1.pb.inclusion);
  Mat comp = mat_mul(c2.q.projection, m);
  HomSolver solver(c1.pb.h, comp, c2.g);
  cx weight{1.0, 0.0};
  if (dist) {
    double fiber = double(e.level(a).order()) / double(e.level(na).order());
    weight = cx{1.0 / fiber, 0.0};
  }
  std::vector<cx> out(size_t(c2.g.order()), cx{0.0, 0.0});
  std::vector<i64> h;
  for (i64 x = 0; x < c2.g.order(); ++x) {
    if (!solver.solve(c2.g.coords_of(x), h)) continue;
    i64 src = c1.g.index_of(apply_hom(c1.q.projection, c1.g, h));
    out[size_t(x)] = weight * table[size_t(src)];
  }
  return out;
}

inline void require_same_parent(const FilteredObject1& a,
                                const FilteredObject1& b, const char* who) {
  if (!(a == b))
    throw std::invalid_argument(std::string(who) + ": parent mismatch");
}

}  // namespace h1detail

inline SchwartzC1 enlarge1(const SchwartzC1& f, i64 na, i64 nb) {
  return {f.parent, na, nb,
          h1detail::move_up(f.parent, f.wa, f.wb, f.table, na, nb, false)};
}

inline DistC1 enlarge1_dist(const DistC1& d, i64 na, i64 nb) {
  return {d.parent, na, nb,
          h1detail::move_up(d.parent, d.wa, d.wb, d.table, na, nb, true)};
}

// -------------------------------------------------------------------------
// Canonical minimal windows. The top end strips while the support lies in
// the span of the smaller level; the bottom end strips while the table is
// constant on the merged cosets. Kernels carry the fiber weight back out.

namespace h1detail {

inline bool near(cx a, cx b) { return std::abs(a - b) <= 1e-12; }

template <typename Rep>
Rep canonicalize_rep(const Rep& in, bool dist) {
  Rep f = in;
  bool moved = true;
  while (moved) {
    moved = false;
    if (f.wb > f.wa) {
      // Try the top strip: values must be reachable from the lower level.
      WindowChart big = window_chart(f.parent, f.wa, f.wb);
      WindowChart small = window_chart(f.parent, f.wa, f.wb - 1);
      MonoIndex mi(big.pb.h, big.pb.inclusion, f.parent.w);
      Mat m = mi.factor_hom(small.pb.inclusion);
      Mat comp = mat_mul(big.q.projection, m);
      HomSolver solver(small.pb.h, comp, big.g);
      bool ok = true;
      std::vector<i64> h;
      for (i64 x = 0; x < big.g.order() && ok; ++x)
        if (!solver.solve(big.g.coords_of(x), h) &&
            !near(f.table[size_t(x)], cx{0.0, 0.0}))
          ok = false;
      if (ok) {
        std::vector<cx> nt(size_t(small.g.order()));
        for (i64 x = 0; x < small.g.order(); ++x) {
          std::vector<i64> hh = mat_vec(small.q.lift, small.g.coords_of(x));
          i64 idx = big.g.index_of(apply_hom(comp, big.g, hh));
          nt[size_t(x)] = f.table[size_t(idx)];
        }
        f.table = std::move(nt);
        --f.wb;
        moved = true;
        continue;
      }
    }
    if (f.wb > f.wa) {
      // Try the bottom strip: the table must not separate the cosets of
      // the next level up from the bottom.
      WindowChart big = window_chart(f.parent, f.wa, f.wb);
      WindowChart small = window_chart(f.parent, f.wa + 1, f.wb);
      MonoIndex mi(big.pb.h, big.pb.inclusion, f.parent.w);
      Presentation pnext = abstract_presentation(f.parent.level(f.wa + 1));
      Mat next_in_b = mi.factor_hom(pnext.inclusion);
      Subgroup merged = hom_image(
          big.g, mat_mul(big.q.projection, next_in_b), pnext.h);
      Presentation pm = abstract_presentation(merged);
      bool ok = true;
      for (i64 x = 0; x < big.g.order() && ok; ++x)
        for (i64 k = 0; k < pm.h.order() && ok; ++k) {
          std::vector<i64> kk = apply_hom(pm.inclusion, big.g, pm.h.coords_of(k));
          i64 shifted = big.g.index_of(big.g.add(big.g.coords_of(x), kk));
          if (!near(f.table[size_t(x)], f.table[size_t(shifted)])) ok = false;
        }
      if (ok) {
        double fiber = double(f.parent.level(f.wa + 1).order()) /
                       double(f.parent.level(f.wa).order());
        cx w = dist ? cx{fiber, 0.0} : cx{1.0, 0.0};
        // Chart the smaller window through the bigger one.
        Mat msb = mi.factor_hom(small.pb.inclusion);
        std::vector<cx> nt(size_t(small.g.order()));
        for (i64 x = 0; x < small.g.order(); ++x) {
          std::vector<i64> hh = mat_vec(small.q.lift, small.g.coords_of(x));
          std::vector<i64> inbig = apply_hom(mat_mul(big.q.projection, msb),
                                             big.g, hh);
          nt[size_t(x)] = w * f.table[size_t(big.g.index_of(inbig))];
        }
        f.table = std::move(nt);
        ++f.wa;
        moved = true;
      }
    }
  }
  return f;
}

}  // namespace h1detail

inline SchwartzC1 canonicalize1(const SchwartzC1& f) {
  return h1detail::canonicalize_rep(f, false);
}

inline DistC1 canonicalize1_dist(const DistC1& d) {
  return h1detail::canonicalize_rep(d, true);
}

// -------------------------------------------------------------------------
// Pairing, deviation, translation, reflection.

inline cx pairing1(const SchwartzC1& f, const DistC1& h) {
  h1detail::require_same_parent(f.parent, h.parent, "pairing1");
  i64 a = std::min(f.wa, h.wa), b = std::max(f.wb, h.wb);
  std::vector<cx> tf = h1detail::move_up(f.parent, f.wa, f.wb, f.table, a, b,
                                         false);
  std::vector<cx> th = h1detail::move_up(h.parent, h.wa, h.wb, h.table, a, b,
                                         true);
  cx acc{0.0, 0.0};
  for (size_t i = 0; i < tf.size(); ++i) acc += tf[i] * th[i];
  return acc;
}

inline double deviation1(const SchwartzC1& f, const SchwartzC1& g) {
  if (!(f.parent == g.parent)) return std::numeric_limits<double>::infinity();
  i64 a = std::min(f.wa, g.wa), b = std::max(f.wb, g.wb);
  std::vector<cx> tf = h1detail::move_up(f.parent, f.wa, f.wb, f.table, a, b,
                                         false);
  std::vector<cx> tg = h1detail::move_up(g.parent, g.wa, g.wb, g.table, a, b,
                                         false);
  double d = 0.0;
  for (size_t i = 0; i < tf.size(); ++i) d = std::max(d, std::abs(tf[i] - tg[i]));
  return d;
}

inline double deviation1_dist(const DistC1& f, const DistC1& g) {
  if (!(f.parent == g.parent)) return std::numeric_limits<double>::infinity();
  i64 a = std::min(f.wa, g.wa), b = std::max(f.wb, g.wb);
  std::vector<cx> tf = h1detail::move_up(f.parent, f.wa, f.wb, f.table, a, b,
                                         true);
  std::vector<cx> tg = h1detail::move_up(g.parent, g.wa, g.wb, g.table, a, b,
                                         true);
  double d = 0.0;
  for (size_t i = 0; i < tf.size(); ++i) d = std::max(d, std::abs(tf[i] - tg[i]));
  return d;
}

// (T_a f)(x) = f(x + a) for a chart element a of f's current window.
inline SchwartzC1 translate1(const SchwartzC1& f, const std::vector<i64>& a) {
  WindowChart c = window_chart(f.parent, f.wa, f.wb);
  SchwartzC1 out = f;
  for (i64 x = 0; x < c.g.order(); ++x) {
    i64 src = c.g.index_of(c.g.add(c.g.coords_of(x), a));
    out.table[size_t(x)] = f.table[size_t(src)];
  }
  return out;
}

inline SchwartzC1 reflect1(const SchwartzC1& f) {
  WindowChart c = window_chart(f.parent, f.wa, f.wb);
  SchwartzC1 out = f;
  for (i64 x = 0; x < c.g.order(); ++x) {
    std::vector<i64> nx = c.g.coords_of(x);
    for (size_t i = 0; i < nx.size(); ++i)
      nx[i] = nx[i] == 0 ? 0 : c.g.moduli[i] - nx[i];
    out.table[size_t(c.g.index_of(nx))] = f.table[size_t(x)];
  }
  return out;
}

// Haar kernel of a measure on a chosen window; pairing against it
// integrates.
inline DistC1 haar_kernel1(const MeasureLine1& mu, i64 a, i64 b) {
  WindowChart c = window_chart(mu.parent, a, b);
  MeasureC0 s = measure_on_window(mu, a);
  return {mu.parent, a, b, std::vector<cx>(size_t(c.g.order()), s.scale)};
}

// Dirac kernel at zero.
inline DistC1 dirac_kernel1(const FilteredObject1& e, i64 a, i64 b) {
  WindowChart c = window_chart(e, a, b);
  std::vector<cx> t(size_t(c.g.order()), cx{0.0, 0.0});
  t[size_t(c.g.index_of(c.g.zero()))] = cx{1.0, 0.0};
  return {e, a, b, t};
}

// Indicator of the image of level i inside the chart of [a, b].
inline SchwartzC1 level_indicator1(const FilteredObject1& e, i64 i, i64 a,
                                   i64 b) {
  WindowChart c = window_chart(e, a, b);
  MonoIndex mi(c.pb.h, c.pb.inclusion, e.w);
  Presentation pi = abstract_presentation(e.level(i));
  Mat in_b = mi.factor_hom(pi.inclusion);
  Subgroup k = hom_image(c.g, mat_mul(c.q.projection, in_b), pi.h);
  std::vector<cx> t(size_t(c.g.order()), cx{0.0, 0.0});
  for (i64 x = 0; x < c.g.order(); ++x)
    if (k.contains(c.g.coords_of(x))) t[size_t(x)] = cx{1.0, 0.0};
  return {e, a, b, t};
}

// -------------------------------------------------------------------------
// Fourier transform. The chart of the dual object at [-b, -a] is exactly
// the character group of the chart at [a, b]; the pairing runs through
// ambient representatives. With the measure normalized at o_ref the dual
// scalar 1/c normalizes at -o_ref, and inversion composes to reflection
// on every window.

namespace h1detail {

inline cx chart_char(const FilteredObject1& e, const WindowChart& c,
                     const FilteredObject1& ed, const WindowChart& cd,
                     const std::vector<i64>& x, const std::vector<i64>& zeta) {
  std::vector<i64> wx = chart_ambient(e, c, x);
  std::vector<i64> wz = chart_ambient(ed, cd, zeta);
  double ang = 0.0;
  for (size_t k = 0; k < wx.size(); ++k)
    ang += double(wz[k]) * double(wx[k]) / double(e.w.moduli[k]);
  return std::polar(1.0, 2.0 * M_PI * ang);
}

}  // namespace h1detail

inline SchwartzC1 fourier1(const SchwartzC1& f, const MeasureLine1& mu) {
  h1detail::require_same_parent(f.parent, mu.parent, "fourier1");
  if (mu.c == cx{0.0, 0.0})
    throw std::invalid_argument("fourier1: zero measure");
  FilteredObject1 d = dual1(f.parent);
  WindowChart c = window_chart(f.parent, f.wa, f.wb);
  WindowChart cd = window_chart(d, -f.wb, -f.wa);
  cx s = measure_on_window(mu, f.wa).scale;
  std::vector<cx> out(size_t(cd.g.order()), cx{0.0, 0.0});
  for (i64 z = 0; z < cd.g.order(); ++z) {
    cx acc{0.0, 0.0};
    for (i64 x = 0; x < c.g.order(); ++x)
      acc += f.table[size_t(x)] *
             std::conj(h1detail::chart_char(f.parent, c, d, cd,
                                            c.g.coords_of(x),
                                            cd.g.coords_of(z)));
    out[size_t(z)] = s * acc;
  }
  return {d, -f.wb, -f.wa, out};
}

// Kernels transform in the adjoint direction: the measure lives on the
// target object, where the paired functions do, and its scale is read at
// the target window. This is the only normalization under which the
// result does not depend on the chosen window, and it makes the transform
// move across the pairing with the same measure line on both sides.
inline DistC1 fourier1_dist(const DistC1& h, const MeasureLine1& mu) {
  FilteredObject1 d = dual1(h.parent);
  h1detail::require_same_parent(d, mu.parent, "fourier1_dist(target)");
  if (mu.c == cx{0.0, 0.0})
    throw std::invalid_argument("fourier1_dist: zero measure");
  WindowChart c = window_chart(h.parent, h.wa, h.wb);
  WindowChart cd = window_chart(d, -h.wb, -h.wa);
  cx s = measure_on_window(mu, -h.wb).scale;
  std::vector<cx> out(size_t(cd.g.order()), cx{0.0, 0.0});
  for (i64 z = 0; z < cd.g.order(); ++z) {
    cx acc{0.0, 0.0};
    for (i64 x = 0; x < c.g.order(); ++x)
      acc += h.table[size_t(x)] *
             std::conj(h1detail::chart_char(h.parent, c, d, cd,
                                            c.g.coords_of(x),
                                            cd.g.coords_of(z)));
    out[size_t(z)] = s * acc;
  }
  return {d, -h.wb, -h.wa, out};
}

inline MeasureLine1 dual_measure1(const MeasureLine1& mu) {
  if (mu.c == cx{0.0, 0.0})
    throw std::invalid_argument("dual_measure1: zero measure");
  return {dual1(mu.parent), cx{1.0, 0.0} / mu.c};
}

// -------------------------------------------------------------------------
// The eight image maps along an admissible triple. Function inputs take
// the odd modes, kernels the even ones. The two co-routes need the end
// objects to be compact and discrete respectively; everything else is
// total on windows.

enum class ImageMode1 { I1, I2, I3, I4, I5, I6, I7, I8 };

// Chart-level triple at a common window.
inline TripleC0 window_triple(const AdmissibleTriple1& t, i64 a, i64 b) {
  WindowChart c1 = window_chart(t.e1, a, b);
  WindowChart c2 = window_chart(t.e2, a, b);
  WindowChart c3 = window_chart(t.e3, a, b);
  MonoIndex m2(c2.pb.h, c2.pb.inclusion, t.e2.w);
  Mat a12 = m2.factor_hom(mat_mul(t.alpha, c1.pb.inclusion));
  Mat alpha_c = mat_mul(mat_mul(c2.q.projection, a12), c1.q.lift);
  MonoIndex m3(c3.pb.h, c3.pb.inclusion, t.e3.w);
  Mat b23 = m3.factor_hom(mat_mul(t.beta, c2.pb.inclusion));
  Mat beta_c = mat_mul(mat_mul(c3.q.projection, b23), c2.q.lift);
  for (int i = 0; i < c2.g.rank(); ++i)
    for (int j = 0; j < c1.g.rank(); ++j) {
      alpha_c[i][j] %= c2.g.moduli[i];
      if (alpha_c[i][j] < 0) alpha_c[i][j] += c2.g.moduli[i];
    }
  for (int i = 0; i < c3.g.rank(); ++i)
    for (int j = 0; j < c2.g.rank(); ++j) {
      beta_c[i][j] %= c3.g.moduli[i];
      if (beta_c[i][j] < 0) beta_c[i][j] += c3.g.moduli[i];
    }
  TripleC0 out{c1.g, c2.g, c3.g, alpha_c, beta_c};
  if (!is_admissible_triple(out))
    throw std::logic_error("window_triple: chart triple is not admissible");
  return out;
}

namespace h1detail {

inline void require_mode(const AdmissibleTriple1& t, ImageMode1 m) {
  if ((m == ImageMode1::I5 || m == ImageMode1::I6) && !is_compact1(t.e1))
    throw std::invalid_argument(
        std::string("images1: ") +
        (m == ImageMode1::I5 ? "I5" : "I6") + " requires is_compact1(E1)");
  if ((m == ImageMode1::I7 || m == ImageMode1::I8) && !is_discrete1(t.e3))
    throw std::invalid_argument(
        std::string("images1: ") +
        (m == ImageMode1::I7 ? "I7" : "I8") + " requires is_discrete1(E3)");
}

}  // namespace h1detail

inline SchwartzC1 image1_function(const AdmissibleTriple1& t, ImageMode1 mode,
                                  const SchwartzC1& f,
                                  const MeasureLine1* mu1 = nullptr) {
  h1detail::require_mode(t, mode);
  TripleC0 tc = window_triple(t, f.wa, f.wb);
  FunctionC0 in;
  switch (mode) {
    case ImageMode1::I1: {
      if (mu1 == nullptr || !(mu1->parent == t.e1))
        throw std::invalid_argument("images1: I1 needs a measure on E1");
      h1detail::require_same_parent(f.parent, t.e2, "images1/I1");
      in = {tc.g2, f.table};
      FunctionC0 out = epi_pushforward(tc, in, measure_on_window(*mu1, f.wa));
      return {t.e3, f.wa, f.wb, out.table};
    }
    case ImageMode1::I3: {
      h1detail::require_same_parent(f.parent, t.e2, "images1/I3");
      in = {tc.g2, f.table};
      FunctionC0 out = mono_pullback(tc, in);
      return {t.e1, f.wa, f.wb, out.table};
    }
    case ImageMode1::I5: {
      h1detail::require_same_parent(f.parent, t.e3, "images1/I5");
      in = {tc.g3, f.table};
      FunctionC0 out = epi_pullback(tc, in);
      return {t.e2, f.wa, f.wb, out.table};
    }
    case ImageMode1::I7: {
      h1detail::require_same_parent(f.parent, t.e1, "images1/I7");
      in = {tc.g1, f.table};
      FunctionC0 out = mono_pushforward(tc, in);
      return {t.e2, f.wa, f.wb, out.table};
    }
    default:
      throw std::invalid_argument("images1: function input needs an odd mode");
  }
}

inline DistC1 image1_dist(const AdmissibleTriple1& t, ImageMode1 mode,
                          const DistC1& d,
                          const MeasureLine1* mu1 = nullptr) {
  h1detail::require_mode(t, mode);
  TripleC0 tc = window_triple(t, d.wa, d.wb);
  switch (mode) {
    case ImageMode1::I2: {
      if (mu1 == nullptr || !(mu1->parent == t.e1))
        throw std::invalid_argument("images1: I2 needs a measure on E1");
      h1detail::require_same_parent(d.parent, t.e3, "images1/I2");
      DistributionC0 out = epi_pullback_dist(tc, {tc.g3, d.table},
                                             measure_on_window(*mu1, d.wa));
      return {t.e2, d.wa, d.wb, out.table};
    }
    case ImageMode1::I4: {
      h1detail::require_same_parent(d.parent, t.e1, "images1/I4");
      DistributionC0 out = mono_pushforward_dist(tc, {tc.g1, d.table});
      return {t.e2, d.wa, d.wb, out.table};
    }
    case ImageMode1::I6: {
      h1detail::require_same_parent(d.parent, t.e2, "images1/I6");
      DistributionC0 out = epi_pushforward_dist(tc, {tc.g2, d.table});
      return {t.e3, d.wa, d.wb, out.table};
    }
    case ImageMode1::I8: {
      h1detail::require_same_parent(d.parent, t.e2, "images1/I8");
      DistributionC0 out = mono_pullback_dist(tc, {tc.g2, d.table});
      return {t.e1, d.wa, d.wb, out.table};
    }
    default:
      throw std::invalid_argument("images1: kernel input needs an even mode");
  }
}

// -------------------------------------------------------------------------
// Summation identity on a window triple: transforming the pushforward of
// the E1 measure matches the dual-side pushforward of the E3 measure.
// Returns the worst deviation over the given window and one enlargement,
// so a representative-dependence bug cannot hide.

struct Poisson1Report {
  double deviation = 0.0;
};

inline Poisson1Report poisson1_check(const AdmissibleTriple1& t,
                                     const MeasureLine1& mu1,
                                     const MeasureLine1& mu3) {
  h1detail::require_same_parent(mu1.parent, t.e1, "poisson1_check");
  h1detail::require_same_parent(mu3.parent, t.e3, "poisson1_check");
  double worst = 0.0;
  std::vector<std::pair<i64, i64>> windows = {{t.e1.lo, t.e1.hi}};
  if (t.e1.hi > t.e1.lo + 1)
    windows.push_back({t.e1.lo + 1, t.e1.hi});
  for (auto [a, b] : windows) {
    TripleC0 tc = window_triple(t, a, b);
    double dev = poisson_c0_check(tc, measure_on_window(mu1, a),
                                  measure_on_window(mu3, a));
    worst = std::max(worst, dev);
  }
  return {worst};
}

// The archimedean lattice instance of the same statement: the triple of a
// lattice inside a line is not coordinate-aligned, so the consequence is
// checked by the dedicated theta-style routine on the line itself.
inline PoissonLatticeReport poisson1_lattice(const SchwartzC0ar& f) {
  return poisson_lattice_check(f);
}

}  // namespace alharm
