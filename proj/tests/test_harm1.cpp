// Function and kernel representatives on windows: canonical forms, the
// bilinear pairing, Fourier inversion against the dual object, the eight
// image maps, and the summation identity.

#include <gtest/gtest.h>

#include <random>

#include "alharm/harm1.hpp"

using namespace alharm;

namespace {

SchwartzC1 random_schwartz1(const FilteredObject1& e, i64 a, i64 b,
                            std::mt19937_64& rng) {
  WindowChart c = window_chart(e, a, b);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<cx> t(size_t(c.g.order()));
  for (cx& v : t) v = cx{n(rng), n(rng)};
  return {e, a, b, t};
}

DistC1 random_dist1(const FilteredObject1& e, i64 a, i64 b,
                    std::mt19937_64& rng) {
  SchwartzC1 f = random_schwartz1(e, a, b, rng);
  return {e, a, b, f.table};
}

SchwartzC0ar gaussian_line(int cut) {
  AxisBoxes b;
  b.hcut = {cut};
  SchwartzC0ar f = make_schwartz({canonical_group({1}), 0, 0, 1}, b);
  f.coeff[0] = cx{1.0, 0.0};
  return f;
}

}  // namespace

TEST(WindowChartT, LocalFieldSlices) {
  FilteredObject1 e = local_field_window(2, 2);
  EXPECT_EQ(window_chart(e, -2, 2).g.order(), 16);
  EXPECT_EQ(window_chart(e, -1, 1).g.order(), 4);
  EXPECT_EQ(window_chart(e, 0, 0).g.order(), 1);
  EXPECT_EQ(window_chart(e, -2, 0).g.order(), 4);
  EXPECT_THROW(window_chart(e, -3, 0), std::invalid_argument);
}

TEST(Canonicalize, MinimalStaysPaddingAndInflationStrip) {
  FilteredObject1 e = local_field_window(2, 2);
  // A generic table on the middle window cannot shrink.
  std::mt19937_64 rng(11);
  SchwartzC1 f = random_schwartz1(e, -1, 1, rng);
  SchwartzC1 cf = canonicalize1(f);
  EXPECT_EQ(cf.wa, f.wa);
  EXPECT_EQ(cf.wb, f.wb);
  for (size_t i = 0; i < f.table.size(); ++i)
    EXPECT_EQ(cf.table[i], f.table[i]);

  // Enlarging pads with zeros above and inflates along cosets below;
  // canonicalization undoes both exactly.
  SchwartzC1 big = enlarge1(f, -2, 2);
  SchwartzC1 back = canonicalize1(big);
  EXPECT_EQ(back.wa, f.wa);
  EXPECT_EQ(back.wb, f.wb);
  EXPECT_LE(deviation1(back, f), 0.0);

  // Kernel representatives carry the fiber weight back out.
  DistC1 d = random_dist1(e, -1, 0, rng);
  DistC1 dback = canonicalize1_dist(enlarge1_dist(d, -2, 1));
  EXPECT_EQ(dback.wa, d.wa);
  EXPECT_EQ(dback.wb, d.wb);
  EXPECT_LE(deviation1_dist(dback, d), 1e-15);

  // The zero table collapses to a point window.
  SchwartzC1 z{e, -2, 2, std::vector<cx>(16, cx{0.0, 0.0})};
  SchwartzC1 cz = canonicalize1(z);
  EXPECT_EQ(cz.wa, cz.wb);
  EXPECT_EQ(cz.table.size(), 1u);
}

TEST(Pairing, DiracHaarVolumesAndBilinearity) {
  FilteredObject1 e = local_field_window(2, 2);
  MeasureLine1 mu{e, cx{1.0, 0.0}};
  std::mt19937_64 rng(12);
  SchwartzC1 f = random_schwartz1(e, -2, 2, rng);

  // The point kernel at the full window evaluates at zero.
  WindowChart c = window_chart(e, -2, 2);
  cx at0 = f.table[size_t(c.g.index_of(c.g.zero()))];
  cx got = pairing1(f, dirac_kernel1(e, -2, 2));
  EXPECT_LE(std::abs(got - at0), 1e-12);

  // Integrating level indicators gives their volumes: the reference
  // level has volume one, the next level up twice that.
  DistC1 hk = haar_kernel1(mu, -2, 2);
  EXPECT_LE(std::abs(pairing1(level_indicator1(e, 0, -2, 2), hk) -
                     cx{1.0, 0.0}),
            1e-12);
  EXPECT_LE(std::abs(pairing1(level_indicator1(e, 1, -2, 2), hk) -
                     cx{2.0, 0.0}),
            1e-12);
  EXPECT_LE(std::abs(pairing1(level_indicator1(e, -1, -2, 2), hk) -
                     cx{0.5, 0.0}),
            1e-12);

  // Bilinearity and window independence of the value.
  SchwartzC1 g = random_schwartz1(e, -2, 2, rng);
  DistC1 d = random_dist1(e, -2, 2, rng);
  SchwartzC1 comb = f;
  for (size_t i = 0; i < comb.table.size(); ++i)
    comb.table[i] = cx{2.0, 0.0} * f.table[i] + g.table[i];
  cx lhs = pairing1(comb, d);
  cx rhs = cx{2.0, 0.0} * pairing1(f, d) + pairing1(g, d);
  EXPECT_LE(std::abs(lhs - rhs), 1e-12);

  SchwartzC1 fs = random_schwartz1(e, -1, 1, rng);
  DistC1 ds = random_dist1(e, -1, 0, rng);
  cx small = pairing1(fs, ds);
  cx large = pairing1(enlarge1(fs, -2, 2), enlarge1_dist(ds, -2, 1));
  EXPECT_LE(std::abs(small - large), 1e-12);
}

TEST(Fourier, UnitBallSelfDualAndDiracToMeasure) {
  for (i64 q : {2, 3}) {
    FilteredObject1 e = local_field_window(q, 2);
    MeasureLine1 mu{e, cx{1.0, 0.0}};
    FilteredObject1 d = dual1(e);

    // The indicator of the reference level transforms to the indicator
    // of the dual reference level, with no scale factor.
    SchwartzC1 ball = level_indicator1(e, 0, -1, 1);
    SchwartzC1 hat = fourier1(ball, mu);
    EXPECT_TRUE(hat.parent == d);
    SchwartzC1 want = level_indicator1(d, 0, -1, 1);
    EXPECT_LE(deviation1(hat, want), 1e-12);

    // The point kernel transforms to the kernel of the measure it is
    // transformed against, here the dual line.
    DistC1 delta = dirac_kernel1(e, -1, 1);
    DistC1 dhat = fourier1_dist(delta, dual_measure1(mu));
    DistC1 dwant = haar_kernel1(dual_measure1(mu), -1, 1);
    EXPECT_LE(deviation1_dist(dhat, dwant), 1e-12);
  }

  // On the trivial object the transform is multiplication by the scalar.
  FinAbGroup w0{std::vector<i64>{}};
  FilteredObject1 t0 = filtered1_fin(w0, {Subgroup::from_generators(w0, {})},
                                     0, TailTag::trivial, TailTag::trivial, 0);
  MeasureLine1 mu0{t0, cx{0.7, -0.2}};
  SchwartzC1 one{t0, 0, 0, {cx{1.5, 0.5}}};
  SchwartzC1 ohat = fourier1(one, mu0);
  EXPECT_LE(std::abs(ohat.table[0] - cx{0.7, -0.2} * cx{1.5, 0.5}), 1e-15);
}

TEST(Fourier, InversionAdjointAndScaling) {
  std::mt19937_64 rng(21);
  struct Case {
    i64 q, k, a, b;
  };
  for (Case c : {Case{2, 2, -1, 1}, Case{2, 2, -2, 2}, Case{2, 2, 0, 1},
                 Case{3, 1, -1, 1}, Case{3, 1, -1, 0}}) {
    FilteredObject1 e = local_field_window(c.q, c.k);
    MeasureLine1 mu{e, cx{0.8, 0.3}};
    SchwartzC1 f = random_schwartz1(e, c.a, c.b, rng);

    // Transforming twice, the second time with the dual scalar, reflects.
    SchwartzC1 ff = fourier1(fourier1(f, mu), dual_measure1(mu));
    EXPECT_TRUE(ff.parent == e);
    EXPECT_EQ(ff.wa, f.wa);
    EXPECT_EQ(ff.wb, f.wb);
    EXPECT_LE(deviation1(ff, reflect1(f)), 1e-9);

    // Moving the transform across the pairing uses one and the same
    // measure line on both calls.
    FilteredObject1 d = dual1(e);
    DistC1 g = random_dist1(d, -c.b, -c.a, rng);
    cx lhs = pairing1(fourier1(f, mu), g);
    DistC1 gg = fourier1_dist(g, mu);
    EXPECT_TRUE(gg.parent == e);
    cx rhs = pairing1(f, gg);
    EXPECT_LE(std::abs(lhs - rhs) / (1.0 + std::abs(lhs)), 1e-9);

    // The transform is linear in the measure scalar.
    MeasureLine1 mu2{e, cx{2.0, 0.0} * mu.c};
    SchwartzC1 f2 = fourier1(f, mu2);
    SchwartzC1 f1 = fourier1(f, mu);
    for (auto& v : f1.table) v *= cx{2.0, 0.0};
    EXPECT_LE(deviation1(f2, f1), 1e-12);
  }
}

TEST(Fourier, WindowIndependence) {
  std::mt19937_64 rng(22);
  FilteredObject1 e = local_field_window(2, 2);
  MeasureLine1 mu{e, cx{1.0, 0.0}};
  SchwartzC1 f = random_schwartz1(e, -1, 0, rng);
  SchwartzC1 small = fourier1(f, mu);
  SchwartzC1 large = fourier1(enlarge1(f, -2, 2), mu);
  EXPECT_LE(deviation1(small, large), 1e-9);

  DistC1 h = random_dist1(e, 0, 1, rng);
  MeasureLine1 nu = dual_measure1(mu);
  DistC1 hs = fourier1_dist(h, nu);
  DistC1 hl = fourier1_dist(enlarge1_dist(h, -2, 2), nu);
  EXPECT_LE(deviation1_dist(hs, hl), 1e-9);
}

TEST(Images, ConstantsPinnedIndicatorsAndScalars) {
  FilteredObject1 e2 = local_field_window(2, 2);
  AdmissibleTriple1 t = sub_quotient_triple1(e2, 0);
  EXPECT_TRUE(is_compact1(t.e1));
  EXPECT_TRUE(is_discrete1(t.e3));
  MeasureLine1 mu1{t.e1, cx{1.0, 0.0}};

  // Restriction of a constant is a constant.
  WindowChart c2 = window_chart(e2, -2, 2);
  SchwartzC1 one{e2, -2, 2,
                 std::vector<cx>(size_t(c2.g.order()), cx{1.0, 0.0})};
  SchwartzC1 r = image1_function(t, ImageMode1::I3, one);
  EXPECT_TRUE(r.parent == t.e1);
  for (cx v : r.table) EXPECT_LE(std::abs(v - cx{1.0, 0.0}), 1e-15);

  // Fiber integration of the reference level indicator against the
  // normalized measure gives the quotient's reference indicator with
  // scalar exactly one: unit volumes compose across the sequence.
  SchwartzC1 ind = level_indicator1(e2, 0, -2, 2);
  SchwartzC1 push = image1_function(t, ImageMode1::I1, ind, &mu1);
  EXPECT_TRUE(push.parent == t.e3);
  SchwartzC1 want = level_indicator1(t.e3, 0, -2, 2);
  EXPECT_LE(deviation1(push, want), 1e-12);
}

TEST(Images, HypothesisErrorsNameThePredicate) {
  FilteredObject1 e2 = local_field_window(2, 2);
  std::mt19937_64 rng(31);

  // Identity onto itself with trivial quotient: E1 is the whole field,
  // not compact, so the co-routes through it must refuse.
  AdmissibleTriple1 tq = sub_quotient_triple1(e2, 2);
  // The honest subobject triple caps its filtration, so rebuild E1 as
  // the field itself to get a non-compact end.
  AdmissibleTriple1 bad{e2, e2, tq.e3, Mat(), tq.beta};
  {
    Mat id = mat_zero(e2.w.rank(), e2.w.rank());
    for (int i = 0; i < e2.w.rank(); ++i) id[i][i] = 1;
    bad.alpha = id;
  }
  EXPECT_FALSE(is_compact1(bad.e1));
  SchwartzC1 f3 = random_schwartz1(bad.e3, -2, 2, rng);
  try {
    image1_function(bad, ImageMode1::I5, f3);
    FAIL() << "I5 accepted a non-compact E1";
  } catch (const std::invalid_argument& ex) {
    EXPECT_NE(std::string(ex.what()).find("is_compact1(E1)"),
              std::string::npos);
  }

  // Mirror case: E3 the whole field, not discrete, refuses I7.
  AdmissibleTriple1 tz = sub_quotient_triple1(e2, -2);
  AdmissibleTriple1 bad2{tz.e1, e2, e2, tz.alpha, Mat()};
  {
    Mat id = mat_zero(e2.w.rank(), e2.w.rank());
    for (int i = 0; i < e2.w.rank(); ++i) id[i][i] = 1;
    bad2.beta = id;
  }
  EXPECT_FALSE(is_discrete1(bad2.e3));
  SchwartzC1 f1 = random_schwartz1(bad2.e1, -2, 2, rng);
  EXPECT_THROW(image1_function(bad2, ImageMode1::I7, f1),
               std::invalid_argument);
  try {
    image1_function(bad2, ImageMode1::I7, f1);
  } catch (const std::invalid_argument& ex) {
    EXPECT_NE(std::string(ex.what()).find("is_discrete1(E3)"),
              std::string::npos);
  }
}

TEST(Images, AdjointPairsAndWindowIndependence) {
  std::mt19937_64 rng(32);
  for (i64 q : {2, 3}) {
    FilteredObject1 e2 = local_field_window(q, q == 2 ? 2 : 1);
    AdmissibleTriple1 t = sub_quotient_triple1(e2, 0);
    MeasureLine1 mu1{t.e1, cx{0.6, 0.2}};
    i64 a = e2.lo, b = e2.hi;

    SchwartzC1 f2 = random_schwartz1(t.e2, a, b, rng);
    SchwartzC1 f3 = random_schwartz1(t.e3, a, b, rng);
    SchwartzC1 f1 = random_schwartz1(t.e1, a, b, rng);
    DistC1 d1 = random_dist1(t.e1, a, b, rng);
    DistC1 d2 = random_dist1(t.e2, a, b, rng);
    DistC1 d3 = random_dist1(t.e3, a, b, rng);

    cx l1 = pairing1(image1_function(t, ImageMode1::I1, f2, &mu1), d3);
    cx r1 = pairing1(f2, image1_dist(t, ImageMode1::I2, d3, &mu1));
    EXPECT_LE(std::abs(l1 - r1) / (1.0 + std::abs(l1)), 1e-9);

    cx l2 = pairing1(image1_function(t, ImageMode1::I3, f2), d1);
    cx r2 = pairing1(f2, image1_dist(t, ImageMode1::I4, d1));
    EXPECT_LE(std::abs(l2 - r2) / (1.0 + std::abs(l2)), 1e-9);

    cx l3 = pairing1(image1_function(t, ImageMode1::I5, f3), d2);
    cx r3 = pairing1(f3, image1_dist(t, ImageMode1::I6, d2));
    EXPECT_LE(std::abs(l3 - r3) / (1.0 + std::abs(l3)), 1e-9);

    cx l4 = pairing1(image1_function(t, ImageMode1::I7, f1), d2);
    cx r4 = pairing1(f1, image1_dist(t, ImageMode1::I8, d2));
    EXPECT_LE(std::abs(l4 - r4) / (1.0 + std::abs(l4)), 1e-9);

    // Compute on the small window, then enlarge, and the other way.
    if (b > a + 1) {
      SchwartzC1 fs = random_schwartz1(t.e2, a + 1, b, rng);
      SchwartzC1 small = enlarge1(image1_function(t, ImageMode1::I3, fs), a, b);
      SchwartzC1 large = image1_function(t, ImageMode1::I3, enlarge1(fs, a, b));
      EXPECT_LE(deviation1(small, large), 1e-9);

      SchwartzC1 ps = enlarge1(image1_function(t, ImageMode1::I1, fs, &mu1),
                               a, b);
      SchwartzC1 pl = image1_function(t, ImageMode1::I1, enlarge1(fs, a, b),
                                      &mu1);
      EXPECT_LE(deviation1(ps, pl), 1e-9);
    }
  }
}

TEST(Poisson1, ExactOnTriplesAndDegenerate) {
  for (i64 q : {2, 3}) {
    FilteredObject1 e2 = local_field_window(q, q == 2 ? 2 : 1);
    for (i64 k = e2.lo; k <= e2.hi; ++k) {
      AdmissibleTriple1 t = sub_quotient_triple1(e2, k);
      MeasureLine1 mu1{t.e1, cx{1.0, 0.0}};
      MeasureLine1 mu3{t.e3, cx{1.0, 0.0}};
      EXPECT_LE(poisson1_check(t, mu1, mu3).deviation, 1e-9)
          << "q=" << q << " pivot=" << k;
    }
  }

  // Scaled measures still satisfy the identity when the scalars are dual.
  FilteredObject1 e2 = local_field_window(2, 2);
  AdmissibleTriple1 t = sub_quotient_triple1(e2, 1);
  MeasureLine1 mu1{t.e1, cx{2.5, 0.0}};
  MeasureLine1 mu3{t.e3, cx{0.4, 0.0}};
  EXPECT_LE(poisson1_check(t, mu1, mu3).deviation, 1e-9);
}

TEST(Poisson1, ArchimedeanLatticeDelegation) {
  SchwartzC0ar f = gaussian_line(4);
  PoissonLatticeReport rep = poisson1_lattice(f);
  EXPECT_LE(rep.deviation, 1e-10);
  EXPECT_NEAR(rep.lhs.real(), 1.08643481121330801, 1e-12);
}

TEST(MeasureKernel, TranslationInvariance) {
  std::mt19937_64 rng(41);
  FilteredObject1 e = local_field_window(2, 2);
  MeasureLine1 mu{e, cx{1.3, -0.4}};
  SchwartzC1 f = random_schwartz1(e, -2, 2, rng);
  DistC1 hk = haar_kernel1(mu, -2, 2);
  cx base = pairing1(f, hk);
  WindowChart c = window_chart(e, -2, 2);
  for (i64 s : {1, 5, 11}) {
    cx shifted = pairing1(translate1(f, c.g.coords_of(s)), hk);
    EXPECT_LE(std::abs(shifted - base), 1e-12);
  }
}
