#pragma once

// Composite-triple identities at ground level: the sixteen compatibility
// formulas for stacked image maps (two epis, two monos, and the mixed
// square) and the eight commuting squares tying image maps to the Fourier
// transform along a triple and its dual. Each check returns the sup norm of
// the difference of both sides, so suites can report deviations directly.

#include <functional>
#include <map>
#include <string>
#include <utility>

#include "alharm/finabel.hpp"

namespace alharm {

inline double dist_dev(const std::vector<cx>& a, const std::vector<cx>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  if (a.size() != b.size()) return 1.0 / 0.0;
  return d;
}

// -------------------------------------------------------------------------
// Stacked epimorphisms: T is 0 -> E1 -> E2 -> E3 -> 0 and TP is
// 0 -> L -> H -> E2 -> 0; TC is the composite 0 -> E -> H -> E3 -> 0 with
// E the fibered product of H and E1 over E2.

struct StackedEpis {
  TripleC0 t;   // E1 -> E2 -> E3
  TripleC0 tp;  // L -> H -> E2
  TripleC0 tc;  // E -> H -> E3
};

inline StackedEpis make_stacked_epis(const TripleC0& t, std::mt19937_64& rng,
                                     i64 budget = 4096) {
  const FinAbGroup& g2 = t.g2;
  std::vector<i64> hmod;
  std::uniform_int_distribution<int> ext(1, 3);
  i64 used = g2.order();
  for (i64 d : g2.moduli) {
    i64 e = ext(rng);
    while (e > 1 && used * e > budget) --e;
    hmod.push_back(d * e);
    used *= e;
  }
  std::uniform_int_distribution<int> extra_count(0, 1);
  int extras = extra_count(rng);
  for (int i = 0; i < extras; ++i) {
    i64 k = std::uniform_int_distribution<i64>(2, 4)(rng);
    if (used * k > budget) break;
    hmod.push_back(k);
    used *= k;
  }
  FinAbGroup h{hmod};
  Mat betap = mat_zero(g2.rank(), h.rank());
  for (int i = 0; i < g2.rank(); ++i) betap[i][i] = 1;
  Presentation lp = abstract_presentation(hom_kernel(h, betap, g2));
  TripleC0 tp{lp.h, h, g2, lp.inclusion, betap};
  if (!is_admissible_triple(tp))
    throw std::logic_error("make_stacked_epis: middle triple not admissible");
  Mat bb = mat_mul(t.beta, betap);
  Presentation ep = abstract_presentation(hom_kernel(h, bb, t.g3));
  TripleC0 tc{ep.h, h, t.g3, ep.inclusion, bb};
  if (!is_admissible_triple(tc))
    throw std::logic_error("make_stacked_epis: composite triple not admissible");
  return {t, tp, tc};
}

// (e1): (beta beta')_*(f x (nu x mu)) = beta_*(beta'_*(f x nu) x mu)
inline double check_e1(const StackedEpis& s, const FunctionC0& f,
                       const MeasureC0& nu, const MeasureC0& mu) {
  FunctionC0 lhs = epi_pushforward(s.tc, f, MeasureC0{nu.scale * mu.scale});
  FunctionC0 rhs = epi_pushforward(s.t, epi_pushforward(s.tp, f, nu), mu);
  return dist_dev(lhs.table, rhs.table);
}

// (e2): (beta beta')^*(G x (nu x mu)) = beta'^*(beta^*(G x mu) x nu)
inline double check_e2(const StackedEpis& s, const DistributionC0& g,
                       const MeasureC0& nu, const MeasureC0& mu) {
  DistributionC0 lhs =
      epi_pullback_dist(s.tc, g, MeasureC0{nu.scale * mu.scale});
  DistributionC0 rhs =
      epi_pullback_dist(s.tp, epi_pullback_dist(s.t, g, mu), nu);
  return dist_dev(lhs.table, rhs.table);
}

// (f5): (beta beta')^*(f) = beta'^* beta^*(f), compact-kernel direction
inline double check_pr16f5(const StackedEpis& s, const FunctionC0& f3) {
  FunctionC0 lhs = epi_pullback(s.tc, f3);
  FunctionC0 rhs = epi_pullback(s.tp, epi_pullback(s.t, f3));
  return dist_dev(lhs.table, rhs.table);
}

// (f6): (beta beta')_*(G) = beta_* beta'_*(G) at distribution level
inline double check_pr16f6(const StackedEpis& s, const DistributionC0& g) {
  DistributionC0 lhs = epi_pushforward_dist(s.tc, g);
  DistributionC0 rhs = epi_pushforward_dist(s.t, epi_pushforward_dist(s.tp, g));
  return dist_dev(lhs.table, rhs.table);
}

// -------------------------------------------------------------------------
// Stacked monomorphisms: T as before, TPP is 0 -> E2 -> H' -> L' -> 0, and
// TC' is 0 -> E1 -> H' -> coker -> 0.

struct StackedMonos {
  TripleC0 t;    // E1 -> E2 -> E3
  TripleC0 tpp;  // E2 -> H' -> L'
  TripleC0 tc;   // E1 -> H' -> N
};

inline StackedMonos make_stacked_monos(const TripleC0& t, std::mt19937_64& rng,
                                       i64 budget = 4096) {
  const FinAbGroup& g2 = t.g2;
  std::vector<i64> hmod;
  std::vector<i64> stretch;
  std::uniform_int_distribution<int> ext(1, 3);
  i64 used = g2.order();
  for (i64 d : g2.moduli) {
    i64 e = ext(rng);
    while (e > 1 && used * e > budget) --e;
    hmod.push_back(d * e);
    stretch.push_back(e);
    used *= e;
  }
  if (std::uniform_int_distribution<int>(0, 1)(rng)) {
    i64 k = std::uniform_int_distribution<i64>(2, 4)(rng);
    if (used * k <= budget) hmod.push_back(k);
  }
  FinAbGroup hp{hmod};
  Mat alphap = mat_zero(hp.rank(), g2.rank());
  for (int i = 0; i < g2.rank(); ++i) alphap[i][i] = stretch[i];
  QuotientC0 lq = quotient(hp, hom_image(hp, alphap, g2));
  TripleC0 tpp{g2, hp, lq.q, alphap, lq.projection};
  if (!is_admissible_triple(tpp))
    throw std::logic_error("make_stacked_monos: middle triple not admissible");
  Mat aa = mat_mul(alphap, t.alpha);
  QuotientC0 nq = quotient(hp, hom_image(hp, aa, t.g1));
  TripleC0 tc{t.g1, hp, nq.q, aa, nq.projection};
  if (!is_admissible_triple(tc))
    throw std::logic_error("make_stacked_monos: composite triple not admissible");
  return {t, tpp, tc};
}

// (e'1): (alpha' alpha)^*(f) = alpha^* alpha'^*(f)
inline double check_ep1(const StackedMonos& s, const FunctionC0& f) {
  FunctionC0 lhs = mono_pullback(s.tc, f);
  FunctionC0 rhs = mono_pullback(s.t, mono_pullback(s.tpp, f));
  return dist_dev(lhs.table, rhs.table);
}

// (e'2): (alpha' alpha)_*(G) = alpha'_* alpha_*(G)
inline double check_ep2(const StackedMonos& s, const DistributionC0& g) {
  DistributionC0 lhs = mono_pushforward_dist(s.tc, g);
  DistributionC0 rhs =
      mono_pushforward_dist(s.tpp, mono_pushforward_dist(s.t, g));
  return dist_dev(lhs.table, rhs.table);
}

// (f5): (alpha' alpha)_*(f) = alpha'_* alpha_*(f), discrete direction
inline double check_pr17f5(const StackedMonos& s, const FunctionC0& f1) {
  FunctionC0 lhs = mono_pushforward(s.tc, f1);
  FunctionC0 rhs = mono_pushforward(s.tpp, mono_pushforward(s.t, f1));
  return dist_dev(lhs.table, rhs.table);
}

// (f6): (alpha' alpha)^*(G) = alpha^* alpha'^*(G)
inline double check_pr17f6(const StackedMonos& s, const DistributionC0& g) {
  DistributionC0 lhs = mono_pullback_dist(s.tc, g);
  DistributionC0 rhs = mono_pullback_dist(s.t, mono_pullback_dist(s.tpp, g));
  return dist_dev(lhs.table, rhs.table);
}

// -------------------------------------------------------------------------
// Mixed square: a subobject D of E3 pulled back through beta. G sits in two
// triples, 0 -> E1 -> G -> D -> 0 and 0 -> G -> E2 -> B -> 0, and the square
// beta o (incl G) = (incl D) o (G -> D) commutes.

struct MixedSquare {
  TripleC0 t;   // E1 -> E2 -> E3
  TripleC0 td;  // D -> E3 -> B, mono is gamma
  TripleC0 tg;  // E1 -> G -> D, epi is gamma_beta
  TripleC0 ti;  // G -> E2 -> B, mono is beta_gamma
};

inline MixedSquare make_mixed_square(const TripleC0& t, const Subgroup& sd) {
  TripleC0 td = triple_from_subgroup(t.g3, sd);
  // Preimage subgroup of E2: lifts of D generators plus the kernel of beta.
  std::vector<std::vector<i64>> gens;
  for (int j = 0; j < td.g1.rank(); ++j) {
    std::vector<i64> col(t.g3.rank());
    for (int i = 0; i < t.g3.rank(); ++i) col[i] = td.alpha[i][j];
    gens.push_back(epi_preimage(t, t.g3.reduce(col)));
  }
  for (int j = 0; j < t.g1.rank(); ++j) {
    std::vector<i64> col(t.g2.rank());
    for (int i = 0; i < t.g2.rank(); ++i) col[i] = t.alpha[i][j];
    gens.push_back(t.g2.reduce(col));
  }
  Subgroup xprime = Subgroup::from_generators(t.g2, gens);
  Presentation gp = abstract_presentation(xprime);
  MonoIndex gidx(gp.h, gp.inclusion, t.g2);
  MonoIndex didx(td.g1, td.alpha, t.g3);

  Mat alpha_g = gidx.factor_hom(t.alpha);
  Mat beta_incl = mat_mul(t.beta, gp.inclusion);
  Mat gamma_beta = didx.factor_hom(beta_incl);

  TripleC0 tg{t.g1, gp.h, td.g1, alpha_g, gamma_beta};
  if (!is_admissible_triple(tg))
    throw std::logic_error("make_mixed_square: kernel-side triple not admissible");
  TripleC0 ti{gp.h, t.g2, td.g3, gp.inclusion, mat_mul(td.beta, t.beta)};
  if (!is_admissible_triple(ti))
    throw std::logic_error("make_mixed_square: inclusion-side triple not admissible");
  return {t, td, tg, ti};
}

// (e''1): gamma^* beta_*(f x mu) = (gamma_beta)_*(beta_gamma^*(f) x mu)
inline double check_epp1(const MixedSquare& s, const FunctionC0& f2,
                         const MeasureC0& mu) {
  FunctionC0 lhs = mono_pullback(s.td, epi_pushforward(s.t, f2, mu));
  FunctionC0 rhs = epi_pushforward(s.tg, mono_pullback(s.ti, f2), mu);
  return dist_dev(lhs.table, rhs.table);
}

// (e''2): beta^*(gamma_*(H) x mu) = (beta_gamma)_* gamma_beta^*(H x mu)
inline double check_epp2(const MixedSquare& s, const DistributionC0& h,
                         const MeasureC0& mu) {
  DistributionC0 lhs =
      epi_pullback_dist(s.t, mono_pushforward_dist(s.td, h), mu);
  DistributionC0 rhs =
      mono_pushforward_dist(s.ti, epi_pullback_dist(s.tg, h, mu));
  return dist_dev(lhs.table, rhs.table);
}

// (e''3): gamma_beta^* gamma^*(f) = beta_gamma^* beta^*(f)
inline double check_epp3(const MixedSquare& s, const FunctionC0& f3) {
  FunctionC0 lhs = epi_pullback(s.tg, mono_pullback(s.td, f3));
  FunctionC0 rhs = mono_pullback(s.ti, epi_pullback(s.t, f3));
  return dist_dev(lhs.table, rhs.table);
}

// (e''4): beta_*(beta_gamma)_*(H) = gamma_*(gamma_beta)_*(H)
inline double check_epp4(const MixedSquare& s, const DistributionC0& h) {
  DistributionC0 lhs = epi_pushforward_dist(s.t, mono_pushforward_dist(s.ti, h));
  DistributionC0 rhs = mono_pushforward_dist(s.td, epi_pushforward_dist(s.tg, h));
  return dist_dev(lhs.table, rhs.table);
}

// (f4c): beta_*((beta_gamma)_*(f) x mu) = gamma_*((gamma_beta)_*(f x mu))
inline double check_pr18f4c(const MixedSquare& s, const FunctionC0& fg,
                            const MeasureC0& mu) {
  FunctionC0 lhs = epi_pushforward(s.t, mono_pushforward(s.ti, fg), mu);
  FunctionC0 rhs = mono_pushforward(s.td, epi_pushforward(s.tg, fg, mu));
  return dist_dev(lhs.table, rhs.table);
}

// (f4d): gamma_beta^*(gamma^*(H) x mu) = beta_gamma^* beta^*(H x mu)
inline double check_pr18f4d(const MixedSquare& s, const DistributionC0& h3,
                            const MeasureC0& mu) {
  DistributionC0 lhs =
      epi_pullback_dist(s.tg, mono_pullback_dist(s.td, h3), mu);
  DistributionC0 rhs =
      mono_pullback_dist(s.ti, epi_pullback_dist(s.t, h3, mu));
  return dist_dev(lhs.table, rhs.table);
}

// (f5): beta^* gamma_*(f) = (beta_gamma)_* gamma_beta^*(f)
inline double check_pr18f5(const MixedSquare& s, const FunctionC0& fd) {
  FunctionC0 lhs = epi_pullback(s.t, mono_pushforward(s.td, fd));
  FunctionC0 rhs = mono_pushforward(s.ti, epi_pullback(s.tg, fd));
  return dist_dev(lhs.table, rhs.table);
}

// (f6): gamma^* beta_*(H) = (gamma_beta)_* beta_gamma^*(H)
inline double check_pr18f6(const MixedSquare& s, const DistributionC0& h2) {
  DistributionC0 lhs = mono_pullback_dist(s.td, epi_pushforward_dist(s.t, h2));
  DistributionC0 rhs = epi_pushforward_dist(s.tg, mono_pullback_dist(s.ti, h2));
  return dist_dev(lhs.table, rhs.table);
}

// -------------------------------------------------------------------------
// Fourier transform against image maps. Four squares for the measure-needing
// maps and four for the predicate-needing maps, with explicit scale
// bookkeeping; each returns the sup deviation.

// F_{mu3}(beta_*(f x mu1)) = beta-hat^*(F_{mu1 x mu3}(f))
inline double square_push_function(const TripleC0& t, const FunctionC0& f2,
                                   const MeasureC0& mu1, const MeasureC0& mu3) {
  TripleC0 dt = dual_triple(t);
  FunctionC0 lhs = fourier_c0(epi_pushforward(t, f2, mu1), mu3);
  FunctionC0 rhs =
      mono_pullback(dt, fourier_c0(f2, MeasureC0{mu1.scale * mu3.scale}));
  return dist_dev(lhs.table, rhs.table);
}

// F_{s * nu3 * |G3|}(alpha^*(f)) = alpha-hat_*(F_s(f) x nu3)
inline double square_pull_function(const TripleC0& t, const FunctionC0& f2,
                                   const MeasureC0& s, const MeasureC0& nu3) {
  TripleC0 dt = dual_triple(t);
  MeasureC0 nu1{s.scale * nu3.scale * double(t.g3.order())};
  FunctionC0 lhs = fourier_c0(mono_pullback(t, f2), nu1);
  FunctionC0 rhs = epi_pushforward(dt, fourier_c0(f2, s), nu3);
  return dist_dev(lhs.table, rhs.table);
}

// F_{nu2}(beta^*(D3 x mu1)) = beta-hat_*(F_{nu2 * mu1 * |G1|}(D3)), dists
inline double square_pull_dist(const TripleC0& t, const DistributionC0& d3,
                               const MeasureC0& nu2, const MeasureC0& mu1) {
  TripleC0 dt = dual_triple(t);
  DistributionC0 lhs = fourier_c0_dist(epi_pullback_dist(t, d3, mu1), nu2);
  MeasureC0 inner{nu2.scale * mu1.scale * double(t.g1.order())};
  DistributionC0 rhs = mono_pushforward_dist(dt, fourier_c0_dist(d3, inner));
  return dist_dev(lhs.table, rhs.table);
}

// F_{nu1 * nu3}(alpha_*(D1)) = alpha-hat^*(F_{nu1}(D1) x nu3), dists
inline double square_push_dist(const TripleC0& t, const DistributionC0& d1,
                               const MeasureC0& nu1, const MeasureC0& nu3) {
  TripleC0 dt = dual_triple(t);
  DistributionC0 lhs = fourier_c0_dist(mono_pushforward_dist(t, d1),
                                       MeasureC0{nu1.scale * nu3.scale});
  DistributionC0 rhs =
      epi_pullback_dist(dt, fourier_c0_dist(d1, nu1), nu3);
  return dist_dev(lhs.table, rhs.table);
}

// F_{1_{E1} x mu3}(beta^*(f3)) = beta-hat_*(F_{mu3}(f3)); the kernel factor
// carries the normalized measure of the compact side.
inline double square_copull_function(const TripleC0& t, const FunctionC0& f3,
                                     const MeasureC0& mu3) {
  TripleC0 dt = dual_triple(t);
  MeasureC0 m2{mu3.scale / double(t.g1.order())};
  FunctionC0 lhs = fourier_c0(epi_pullback(t, f3), m2);
  FunctionC0 rhs = mono_pushforward(dt, fourier_c0(f3, mu3));
  return dist_dev(lhs.table, rhs.table);
}

// F_{mu1 x Sigma_{E3}}(alpha_*(f1)) = alpha-hat^*(F_{mu1}(f1))
inline double square_copush_function(const TripleC0& t, const FunctionC0& f1,
                                     const MeasureC0& mu1) {
  TripleC0 dt = dual_triple(t);
  FunctionC0 lhs = fourier_c0(mono_pushforward(t, f1), mu1);
  FunctionC0 rhs = epi_pullback(dt, fourier_c0(f1, mu1));
  return dist_dev(lhs.table, rhs.table);
}

// F_{nu}(beta_*(D2)) = beta-hat^*(F_{nu}(D2)) at distribution level
inline double square_copush_dist(const TripleC0& t, const DistributionC0& d2,
                                 const MeasureC0& nu) {
  TripleC0 dt = dual_triple(t);
  DistributionC0 lhs = fourier_c0_dist(epi_pushforward_dist(t, d2), nu);
  DistributionC0 rhs = mono_pullback_dist(dt, fourier_c0_dist(d2, nu));
  return dist_dev(lhs.table, rhs.table);
}

// F_{s * |G3|}(alpha^*(D2)) = alpha-hat-push(F_s(D2)) at distribution level
inline double square_copull_dist(const TripleC0& t, const DistributionC0& d2,
                                 const MeasureC0& s) {
  TripleC0 dt = dual_triple(t);
  MeasureC0 nu1{s.scale * double(t.g3.order())};
  DistributionC0 lhs = fourier_c0_dist(mono_pullback_dist(t, d2), nu1);
  DistributionC0 rhs = epi_pushforward_dist(dt, fourier_c0_dist(d2, s));
  return dist_dev(lhs.table, rhs.table);
}

// -------------------------------------------------------------------------
// Batch driver used by the test suite, the CLI, and acceptance: runs every
// identity once on a fresh random configuration and reports deviations.

struct NamedDeviation {
  std::string name;
  double deviation;
};

inline std::vector<NamedDeviation> run_identity_batch(std::mt19937_64& rng,
                                                      i64 max_order = 1024) {
  std::vector<NamedDeviation> out;
  TripleC0 t = random_triple(rng, max_order);

  StackedEpis se = make_stacked_epis(t, rng, 4 * max_order);
  FunctionC0 fh = random_function(se.tp.g2, rng);
  DistributionC0 g3 = random_distribution(t.g3, rng);
  MeasureC0 nu = random_measure(rng), mu = random_measure(rng);
  out.push_back({"e1", check_e1(se, fh, nu, mu)});
  out.push_back({"e2", check_e2(se, g3, nu, mu)});
  out.push_back({"pr16f5", check_pr16f5(se, random_function(t.g3, rng))});
  out.push_back({"pr16f6", check_pr16f6(se, random_distribution(se.tp.g2, rng))});

  StackedMonos sm = make_stacked_monos(t, rng, 4 * max_order);
  out.push_back({"ep1", check_ep1(sm, random_function(sm.tpp.g2, rng))});
  out.push_back({"ep2", check_ep2(sm, random_distribution(t.g1, rng))});
  out.push_back({"pr17f5", check_pr17f5(sm, random_function(t.g1, rng))});
  out.push_back({"pr17f6", check_pr17f6(sm, random_distribution(sm.tpp.g2, rng))});

  MixedSquare ms = make_mixed_square(t, random_subgroup(t.g3, rng));
  MeasureC0 mu18 = random_measure(rng);
  out.push_back({"epp1", check_epp1(ms, random_function(t.g2, rng), mu18)});
  out.push_back({"epp2", check_epp2(ms, random_distribution(ms.td.g1, rng), mu18)});
  out.push_back({"epp3", check_epp3(ms, random_function(t.g3, rng))});
  out.push_back({"epp4", check_epp4(ms, random_distribution(ms.tg.g2, rng))});
  out.push_back(
      {"pr18f4c", check_pr18f4c(ms, random_function(ms.tg.g2, rng), mu18)});
  out.push_back(
      {"pr18f4d", check_pr18f4d(ms, random_distribution(t.g3, rng), mu18)});
  out.push_back({"pr18f5", check_pr18f5(ms, random_function(ms.td.g1, rng))});
  out.push_back({"pr18f6", check_pr18f6(ms, random_distribution(t.g2, rng))});

  return out;
}

inline std::vector<NamedDeviation> run_transform_square_batch(
    std::mt19937_64& rng, i64 max_order = 1024) {
  std::vector<NamedDeviation> out;
  TripleC0 t = random_triple(rng, max_order);
  FunctionC0 f2 = random_function(t.g2, rng);
  MeasureC0 m1 = random_measure(rng), m2 = random_measure(rng);
  out.push_back({"push_function", square_push_function(t, f2, m1, m2)});
  out.push_back({"pull_function", square_pull_function(t, f2, m1, m2)});
  out.push_back({"pull_dist",
                 square_pull_dist(t, random_distribution(t.g3, rng), m1, m2)});
  out.push_back({"push_dist",
                 square_push_dist(t, random_distribution(t.g1, rng), m1, m2)});
  out.push_back({"copull_function",
                 square_copull_function(t, random_function(t.g3, rng), m1)});
  out.push_back({"copush_function",
                 square_copush_function(t, random_function(t.g1, rng), m1)});
  out.push_back({"copush_dist",
                 square_copush_dist(t, random_distribution(t.g2, rng), m1)});
  out.push_back({"copull_dist",
                 square_copull_dist(t, random_distribution(t.g2, rng), m1)});
  return out;
}

}  // namespace alharm
