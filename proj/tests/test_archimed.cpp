#include "alharm/archimed.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "alharm/quadrature.hpp"

using namespace alharm;

namespace {

constexpr double kTol = 1e-9;
constexpr double kTight = 1e-12;

AxisBoxes pure_r_boxes(int cut) {
  AxisBoxes b;
  b.hcut = {cut};
  return b;
}

C0arObject pure_r() { return {canonical_group({1}), 0, 0, 1}; }

SchwartzC0ar hermite_basis_fun(int m, int cut) {
  SchwartzC0ar f = make_schwartz(pure_r(), pure_r_boxes(cut));
  f.coeff[m] = cx{1.0, 0.0};
  return f;
}

TEST(Quadrature, HermiteAndLegendreRulesReproduceMoments) {
  std::vector<double> x, w;
  gauss_hermite(24, x, w);
  double s0 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s2 += w[i] * x[i] * x[i];
  }
  EXPECT_NEAR(s0, std::sqrt(M_PI), 1e-12);
  EXPECT_NEAR(s2, std::sqrt(M_PI) / 2.0, 1e-12);

  gauss_legendre(12, 0.0, 1.0, x, w);
  double s3 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s3 += w[i] * x[i] * x[i] * x[i];
  EXPECT_NEAR(s3, 0.25, 1e-13);
}

TEST(Hermite, NormsMatchQuadrature) {
  // Independent check of the closed form 2^m m!/sqrt(2) by integrating
  // h_m^2 with the exp(-u^2) rule after substitution u = sqrt(2 pi) x.
  std::vector<double> gx, gw;
  gauss_hermite(40, gx, gw);
  for (int m = 0; m <= 8; ++m) {
    double acc = 0.0;
    for (size_t i = 0; i < gx.size(); ++i) {
      double x = gx[i] / std::sqrt(2.0 * M_PI);
      double hv = hermite_values(m + 1, x)[m];
      // Divide the Gaussian weight back out of one factor.
      double poly = hv * std::exp(M_PI * x * x);
      acc += gw[i] * poly * poly;
    }
    acc /= std::sqrt(2.0 * M_PI);
    EXPECT_NEAR(acc, hermite_norm_sq(m), 1e-9 * hermite_norm_sq(m)) << m;
  }
  EXPECT_NEAR(hermite_norm_sq(3), 33.94112549695428117, 1e-9);
}

TEST(Hermite, TransformEigenrelationAgainstQuadrature) {
  // Numeric transforms of the unit basis by panel Gauss-Legendre: the
  // transform of h_m/|h_m| at y must equal (-i)^m h_m(y)/|h_m| to 1e-10.
  std::vector<double> px, pw;
  for (int m = 0; m <= 12; ++m) {
    double nrm = std::sqrt(hermite_norm_sq(m));
    for (double y : {0.0, 0.3, -0.7, 1.1}) {
      cx acc{0.0, 0.0};
      for (int panel = -9; panel < 9; ++panel) {
        gauss_legendre(16, double(panel), double(panel + 1), px, pw);
        for (size_t i = 0; i < px.size(); ++i) {
          double hv = hermite_values(m + 1, px[i])[m];
          acc += pw[i] * hv * std::polar(1.0, -2.0 * M_PI * px[i] * y);
        }
      }
      cx expect = minus_i_power(m) * hermite_values(m + 1, y)[m];
      EXPECT_LE(std::abs(acc - expect) / nrm, 1e-10) << "m=" << m << " y=" << y;
    }
  }
}

TEST(Fourier, PinnedFactorExamples) {
  // Circle mode k maps to the delta sequence at k.
  C0arObject torus{canonical_group({1}), 0, 1, 0};
  AxisBoxes tb;
  tb.tbox = {{-3, 3}};
  SchwartzC0ar mode = make_schwartz(torus, tb);
  mode.coeff[2 - (-3)] = cx{1.0, 0.0};
  SchwartzC0ar hat = fourier_c0ar(mode, MeasureC0ar{});
  EXPECT_EQ(hat.obj.r, 1);
  EXPECT_EQ(hat.obj.p, 0);
  ASSERT_EQ(hat.boxes.zbox[0], (std::pair<i64, i64>{-3, 3}));
  for (i64 n = -3; n <= 3; ++n)
    EXPECT_NEAR(std::abs(hat.coeff[n + 3] - (n == 2 ? cx{1.0, 0.0} : cx{0.0, 0.0})),
                0.0, kTight);

  // Delta at zero on Z maps to the constant function on T.
  C0arObject zline{canonical_group({1}), 1, 0, 0};
  AxisBoxes zb;
  zb.zbox = {{-3, 3}};
  SchwartzC0ar delta = make_schwartz(zline, zb);
  delta.coeff[0 - (-3)] = cx{1.0, 0.0};
  SchwartzC0ar dhat = fourier_c0ar(delta, MeasureC0ar{});
  EXPECT_EQ(dhat.obj.p, 1);
  cx at_any = eval_c0ar(dhat, {{}, {}, {0.37}, {}});
  EXPECT_NEAR(std::abs(at_any - cx{1.0, 0.0}), 0.0, kTight);

  // The Gaussian is a fixed point.
  SchwartzC0ar g0 = hermite_basis_fun(0, 4);
  SchwartzC0ar g0hat = fourier_c0ar(g0, MeasureC0ar{});
  EXPECT_LE(deviation_c0ar(g0, g0hat), kTight);
}

TEST(Fourier, InvolutionIsReflectionOnMixedObjects) {
  std::mt19937_64 rng(314);
  C0arObject o{canonical_group({2, 4}), 1, 1, 1};
  AxisBoxes b;
  b.zbox = {{-3, 3}};
  b.tbox = {{-3, 3}};
  b.hcut = {5};
  for (int trial = 0; trial < 10; ++trial) {
    SchwartzC0ar f = random_schwartz_c0ar(o, b, rng);
    MeasureC0ar mu{random_measure(rng).scale};
    SchwartzC0ar back =
        fourier_c0ar(fourier_c0ar(f, mu), inverse_measure(mu, o));
    EXPECT_LE(deviation_c0ar(back, reflect_c0ar(f)), kTol);
  }
}

// Zero out real-axis degrees at and above `keep`. The real axis is the
// slowest index for a rank-one object, so degrees are contiguous blocks.
void truncate_r_degrees(SchwartzC0ar& f, int keep) {
  i64 block = i64(f.coeff.size()) / f.boxes.hcut[0];
  for (i64 m = keep; m < f.boxes.hcut[0]; ++m)
    for (i64 i = 0; i < block; ++i) f.coeff[m * block + i] = cx{0.0, 0.0};
}

TEST(Translate, ExactCoordinatesAndReExpansion) {
  C0arObject o{canonical_group({4}), 1, 1, 1};
  AxisBoxes b;
  b.zbox = {{-3, 3}};
  b.tbox = {{-2, 2}};
  b.hcut = {28};
  std::mt19937_64 rng(99);
  SchwartzC0ar f = random_schwartz_c0ar(o, b, rng);
  // Keep the real content in low degrees so a modest shift re-expands
  // inside the cutoff with negligible loss.
  truncate_r_degrees(f, 6);

  // Zero shift is the identity.
  TranslateReport id = translate_with_report(f, {{0}, {0}, {0.0}, {0.0}});
  EXPECT_LE(deviation_c0ar(f, id.fun), kTight);
  EXPECT_EQ(id.residual, 0.0);

  // Half turn flips the sign of mode 1 on the circle factor.
  C0arObject torus{canonical_group({1}), 0, 1, 0};
  AxisBoxes tb;
  tb.tbox = {{-2, 2}};
  SchwartzC0ar mode = make_schwartz(torus, tb);
  mode.coeff[1 + 2] = cx{1.0, 0.0};
  SchwartzC0ar half = translate(mode, {{}, {}, {0.5}, {}});
  EXPECT_NEAR(std::abs(half.coeff[1 + 2] + cx{1.0, 0.0}), 0.0, kTight);

  // A unit shift moves a delta sequence to the adjacent site: with the
  // convention (T_a f)(b) = f(b+a) the mass at 0 moves to -a.
  C0arObject zline{canonical_group({1}), 1, 0, 0};
  AxisBoxes zb;
  zb.zbox = {{0, 0}};
  SchwartzC0ar dz = make_schwartz(zline, zb);
  dz.coeff[0] = cx{1.0, 0.0};
  TranslateReport moved = translate_with_report(dz, {{}, {-1}, {}, {}});
  EXPECT_EQ(moved.fun.boxes.zbox[0], (std::pair<i64, i64>{1, 1}));
  TranslateReport movedfwd = translate_with_report(dz, {{}, {1}, {}, {}});
  EXPECT_EQ(movedfwd.fun.boxes.zbox[0], (std::pair<i64, i64>{-1, -1}));

  // Real-axis translation agrees with direct evaluation.
  SchwartzC0ar pr = hermite_basis_fun(2, 24);
  pr.coeff[0] = cx{0.4, -0.2};
  pr.coeff[5] = cx{-0.3, 0.1};
  double a = 0.25;
  TranslateReport tr = translate_with_report(pr, {{}, {}, {}, {a}});
  EXPECT_LE(tr.residual, 1e-9);
  for (double x : {-1.2, 0.0, 0.8}) {
    cx lhs = eval_c0ar(tr.fun, {{}, {}, {}, {x}});
    cx rhs = eval_c0ar(pr, {{}, {}, {}, {x + a}});
    EXPECT_LE(std::abs(lhs - rhs), 1e-9) << x;
  }

  // Haar invariance of the canonical integral.
  MeasureC0ar mu{cx{1.3, 0.2}};
  cx before = integral_c0ar(f, mu);
  TranslateReport shifted =
      translate_with_report(f, {{3}, {2}, {0.31}, {0.25}});
  cx after = integral_c0ar(shifted.fun, mu);
  EXPECT_LE(std::abs(before - after), 1e-8);

  // A violent shift at a tiny cutoff must be reported, not absorbed.
  SchwartzC0ar tiny = hermite_basis_fun(1, 2);
  EXPECT_THROW(translate(tiny, {{}, {}, {}, {3.0}}), std::runtime_error);
}

TEST(PoissonLattice, PinnedAndRandomHermiteData) {
  // Gaussian: both sides are the theta sum; value frozen from a 40-digit
  // evaluation of sum exp(-pi n^2).
  SchwartzC0ar g0 = hermite_basis_fun(0, 4);
  PoissonLatticeReport rep = poisson_lattice_check(g0);
  EXPECT_NEAR(rep.lhs.real(), 1.08643481121330801, 1e-12);
  EXPECT_LE(rep.deviation, 1e-10);

  // Odd function: both sides vanish.
  PoissonLatticeReport rep1 = poisson_lattice_check(hermite_basis_fun(1, 4));
  EXPECT_LE(std::abs(rep1.lhs), 1e-12);
  EXPECT_LE(rep1.deviation, 1e-10);

  // Degree 2 picks up eigenvalue -1, which forces both sides to zero.
  PoissonLatticeReport rep2 = poisson_lattice_check(hermite_basis_fun(2, 4));
  EXPECT_LE(std::abs(rep2.lhs), 1e-10);
  EXPECT_LE(rep2.deviation, 1e-10);

  // Degree 4 is again a fixed point; the lattice sum is pinned.
  PoissonLatticeReport rep4 = poisson_lattice_check(hermite_basis_fun(4, 6));
  EXPECT_NEAR(rep4.lhs.real(), 41.6258193644555966, 1e-9);
  EXPECT_LE(rep4.deviation, 1e-10);

  PoissonLatticeReport rep0 = poisson_lattice_check(make_schwartz(
      pure_r(), pure_r_boxes(3)));
  EXPECT_EQ(rep0.deviation, 0.0);

  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    SchwartzC0ar f = random_schwartz_c0ar(pure_r(), pure_r_boxes(11), rng);
    EXPECT_LE(poisson_lattice_check(f).deviation, kTol);
  }

  SchwartzC0ar bad = hermite_basis_fun(0, 3);
  bad.coeff[1] = cx{std::nan(""), 0.0};
  EXPECT_THROW(poisson_lattice_check(bad), std::invalid_argument);
}

TripleC0 small_fin_triple() {
  FinAbGroup z4{{4}};
  return triple_from_subgroup(z4, Subgroup::from_generators(z4, {{2}}));
}

TEST(Images, IntegralOverRealKernelMatchesQuadrature) {
  // Projection of a pure real line to the point: pushforward is the
  // Lebesgue integral, checked against panel quadrature.
  FinAbGroup one = canonical_group({1});
  TripleC0 fin = triple_from_subgroup(one, Subgroup::from_generators(one, {}));
  TripleC0ar t = make_triple_c0ar(fin, {}, {}, {BlockSide::kernel});
  SchwartzC0ar f = make_schwartz(t.g2, pure_r_boxes(8));
  f.coeff[0] = cx{1.0, 0.0};
  f.coeff[4] = cx{0.5, 0.25};
  SchwartzC0ar out = epi_pushforward(t, f, MeasureC0ar{});
  ASSERT_EQ(out.coeff.size(), 1u);

  std::vector<double> px, pw;
  cx quad{0.0, 0.0};
  for (int panel = -9; panel < 9; ++panel) {
    gauss_legendre(16, double(panel), double(panel + 1), px, pw);
    for (size_t i = 0; i < px.size(); ++i)
      quad += pw[i] * eval_c0ar(f, {{}, {}, {}, {px[i]}});
  }
  EXPECT_LE(std::abs(out.coeff[0] - quad), 1e-10);

  // And the Gaussian integrates to exactly one.
  SchwartzC0ar g0 = hermite_basis_fun(0, 4);
  TripleC0ar tg = make_triple_c0ar(fin, {}, {}, {BlockSide::kernel});
  EXPECT_NEAR(std::abs(epi_pushforward(tg, g0, MeasureC0ar{}).coeff[0] -
                       cx{1.0, 0.0}),
              0.0, kTight);
}

TEST(Images, ConstantPullsBackToConstant) {
  TripleC0ar t =
      make_triple_c0ar(small_fin_triple(), {}, {BlockSide::quotient}, {});
  AxisBoxes b3;
  b3.tbox = {{-2, 2}};
  SchwartzC0ar c = make_schwartz(t.g3, b3);
  for (i64 a = 0; a < t.g3.a.order(); ++a)
    c.coeff[a + (0 + 2) * t.g3.a.order()] = cx{1.0, 0.0};
  SchwartzC0ar up = epi_pullback(t, c);
  cx v = eval_c0ar(up, {{1}, {}, {0.77}, {}});
  EXPECT_NEAR(std::abs(v - cx{1.0, 0.0}), 0.0, kTight);

  SchwartzC0ar down = mono_pullback(t, up);
  cx w = eval_c0ar(down, {{0}, {}, {}, {}});
  EXPECT_NEAR(std::abs(w - cx{1.0, 0.0}), 0.0, kTight);
}

TEST(Images, ModeHypothesesAreEnforced) {
  TripleC0 fin = small_fin_triple();
  // Quotient torus coordinate: not discrete, extension by zero refused.
  TripleC0ar tq = make_triple_c0ar(fin, {}, {BlockSide::quotient}, {});
  AxisBoxes b1;
  SchwartzC0ar f1 = make_schwartz(tq.g1, b1);
  f1.coeff[0] = cx{1.0, 0.0};
  EXPECT_THROW(mono_pushforward(tq, f1), std::invalid_argument);

  // Kernel real coordinate: not compact, constant extension refused.
  TripleC0ar tk = make_triple_c0ar(fin, {}, {}, {BlockSide::kernel});
  AxisBoxes b3;
  SchwartzC0ar f3 = make_schwartz(tk.g3, b3);
  f3.coeff[0] = cx{1.0, 0.0};
  EXPECT_THROW(epi_pullback(tk, f3), std::invalid_argument);

  // Real kernel coordinates cannot ride a distribution pushforward.
  AxisBoxes b2;
  b2.hcut = {4};
  DistC0ar d2 = make_dist(tk.g2, b2);
  EXPECT_THROW(epi_pushforward_dist(tk, d2), std::invalid_argument);

  // Tampered objects are rejected before any work happens.
  TripleC0ar broken = tq;
  broken.g1.r = 5;
  SchwartzC0ar f2 = make_schwartz(tq.g2, AxisBoxes{{}, {{-1, 1}}, {}});
  EXPECT_THROW(epi_pushforward(broken, f2, MeasureC0ar{}),
               std::invalid_argument);
}

TEST(Images, FunctionDistributionAdjointness) {
  std::mt19937_64 rng(777);
  TripleC0 fin = small_fin_triple();
  TripleC0ar t = make_triple_c0ar(
      fin, {BlockSide::kernel}, {BlockSide::quotient}, {BlockSide::kernel});
  AxisBoxes b2;
  b2.zbox = {{-4, 4}};
  b2.tbox = {{-4, 4}};
  b2.hcut = {6};
  BoxDefaults bd{4, 4, 6};
  AxisBoxes b1 = ardetail::split_boxes(t, b2).kernel;
  AxisBoxes b3 = ardetail::split_boxes(t, b2).quotient;

  for (int trial = 0; trial < 5; ++trial) {
    SchwartzC0ar f2 = random_schwartz_c0ar(t.g2, b2, rng);
    DistC0ar d3 = random_dist_c0ar(t.g3, b3, rng);
    MeasureC0ar mu{random_measure(rng).scale};
    cx lhs = pair_c0ar(epi_pushforward(t, f2, mu), d3);
    cx rhs = pair_c0ar(f2, epi_pullback_dist(t, d3, mu, bd));
    EXPECT_LE(std::abs(lhs - rhs), 1e-8);

    DistC0ar d1 = random_dist_c0ar(t.g1, b1, rng);
    cx lhs2 = pair_c0ar(mono_pullback(t, f2), d1);
    cx rhs2 = pair_c0ar(f2, mono_pushforward_dist(t, d1, bd));
    EXPECT_LE(std::abs(lhs2 - rhs2), 1e-8);
  }
}

TEST(TransformSquares, ArchimedeanBatchesCommute) {
  std::mt19937_64 rng(2468);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<NamedDeviationAr> devs = run_c0ar_square_batch(rng);
    ASSERT_EQ(devs.size(), 8u);
    for (const NamedDeviationAr& d : devs)
      EXPECT_LE(d.deviation, 1e-8) << d.name << " trial " << trial;
  }
}

TEST(DualObject, RanksSwapAsExpected) {
  C0arObject o{canonical_group({6}), 2, 1, 3};
  C0arObject d = dual_object(o);
  EXPECT_EQ(d.r, 1);
  EXPECT_EQ(d.p, 2);
  EXPECT_EQ(d.q, 3);
  EXPECT_EQ(d.a.order(), 6);
  EXPECT_EQ(o.dim(), 4);
  EXPECT_EQ(o.pi0_rank(), 2);
}

}  // namespace
