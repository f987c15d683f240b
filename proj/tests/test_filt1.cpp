#include "alharm/filt1.hpp"

#include <gtest/gtest.h>

using namespace alharm;

namespace {

Subgroup span_of(const FinAbGroup& g, std::vector<std::vector<i64>> gens) {
  return Subgroup::from_generators(g, gens);
}

// Chain 0 < diag < full over (Z/q)^2 with a discrete line and a compact
// quotient, the desk shadow of a number field inside its adele space.
struct DeskAdeleTriple {
  AdmissibleTriple1 t;
};

DeskAdeleTriple desk_adele_triple(i64 q) {
  FinAbGroup w2{{q, q}};
  FinAbGroup line{{q}};
  std::vector<Subgroup> l2 = {span_of(w2, {}),
                              span_of(w2, {{1, 1}}),
                              span_of(w2, {{1, 0}, {0, 1}})};
  std::vector<Subgroup> l1 = {span_of(line, {}), span_of(line, {{1}}),
                              span_of(line, {{1}})};
  std::vector<Subgroup> l3 = {span_of(line, {}), span_of(line, {}),
                              span_of(line, {{1}})};
  FilteredObject1 e2 = filtered1_fin(w2, l2, 0, TailTag::finite_stable,
                                     TailTag::finite_stable, 0);
  FilteredObject1 e1 = filtered1_fin(line, l1, 0, TailTag::trivial,
                                     TailTag::finite_stable, 0);
  FilteredObject1 e3 = filtered1_fin(line, l3, 0, TailTag::finite_stable,
                                     TailTag::trivial, 0);
  Mat alpha = {{1}, {1}};
  Mat beta = {{1, q - 1}};  // (x, y) -> x - y
  return {{e1, e2, e3, alpha, beta}};
}

TEST(Validation, RejectsMalformedChains) {
  FinAbGroup w{{4}};
  Subgroup z = span_of(w, {});
  Subgroup two = span_of(w, {{2}});
  Subgroup full = span_of(w, {{1}});

  EXPECT_THROW(filtered1_fin(w, {two, full}, 0, TailTag::trivial,
                             TailTag::trivial, 0),
               std::invalid_argument);
  EXPECT_THROW(filtered1_fin(w, {z, two}, 0, TailTag::trivial,
                             TailTag::trivial, 0),
               std::invalid_argument);
  EXPECT_THROW(filtered1_fin(w, {z, full, two}, 0, TailTag::trivial,
                             TailTag::trivial, 0),
               std::invalid_argument);
  EXPECT_THROW(filtered1_fin(w, {z, two, full}, 0, TailTag::trivial,
                             TailTag::trivial, 5),
               std::invalid_argument);
  EXPECT_NO_THROW(filtered1_fin(w, {z, two, full}, 0, TailTag::trivial,
                                TailTag::trivial, 1));
}

TEST(StockWindows, LocalFieldChainShapes) {
  FilteredObject1 lf = local_field_window(2, 2);
  EXPECT_EQ(lf.lo, -2);
  EXPECT_EQ(lf.hi, 2);
  std::vector<i64> orders;
  for (i64 i = lf.lo; i <= lf.hi; ++i) orders.push_back(lf.level(i).order());
  EXPECT_EQ(orders, (std::vector<i64>{1, 2, 4, 8, 16}));
  EXPECT_FALSE(is_compact1(lf));
  EXPECT_FALSE(is_discrete1(lf));

  FilteredObject1 oi = integers_window(3, 2);
  EXPECT_TRUE(is_compact1(oi));
  EXPECT_FALSE(is_discrete1(oi));

  FilteredObject1 qu = quotient_window(3, 2);
  EXPECT_TRUE(is_discrete1(qu));
  EXPECT_FALSE(is_compact1(qu));
}

TEST(Dual1, AnnihilatorLevelsAndBiduality) {
  // [[t]]/t^2 window over q = 3: levels 0 < 3Z/9-like < full. The dual
  // chain must run through the annihilators, orders 1, 3, 9.
  FinAbGroup w{{9}};
  FilteredObject1 e = filtered1_fin(
      w, {span_of(w, {}), span_of(w, {{3}}), span_of(w, {{1}})}, -2,
      TailTag::finite_stable, TailTag::trivial, 0);
  FilteredObject1 d = dual1(e);
  EXPECT_EQ(d.lo, 0);
  EXPECT_EQ(d.hi, 2);
  EXPECT_EQ(d.o_ref, 0);
  EXPECT_EQ(d.level(0).order(), 1);
  EXPECT_EQ(d.level(1).order(), 3);
  EXPECT_EQ(d.level(2).order(), 9);
  EXPECT_EQ(d.below, TailTag::trivial);
  EXPECT_TRUE(is_discrete1(d));
  EXPECT_EQ(dual1(d), e);

  for (i64 q : {2, 3}) {
    FilteredObject1 lf = local_field_window(q, 2, 1);
    EXPECT_EQ(dual1(dual1(lf)), lf);
    EXPECT_EQ(is_compact1(lf), is_discrete1(dual1(lf)));
  }
  FilteredObject1 oi = integers_window(2, 3);
  EXPECT_TRUE(is_discrete1(dual1(oi)));
  EXPECT_EQ(dual1(dual1(oi)), oi);
}

TEST(Completion, IdentityAndDoubleDual) {
  for (i64 q : {2, 3}) {
    FilteredObject1 lf = local_field_window(q, 2);
    EXPECT_EQ(completion_psi(lf), lf);
    EXPECT_EQ(completion_psi(completion_psi(lf)), completion_psi(lf));
    EXPECT_EQ(completion_psi(lf), dual1(dual1(lf)));
  }
}

TEST(Equivalence, RefinementZigZagAndObstructions) {
  FilteredObject1 fine = local_field_window(2, 2);
  EXPECT_TRUE(check_equivalence(fine, fine));

  // Coarse subchain 0 < order-4 < full of the same window.
  std::vector<Subgroup> coarse_levels = {fine.level(-2), fine.level(0),
                                         fine.level(2)};
  FilteredObject1 coarse = filtered1_fin(fine.w, coarse_levels, -1,
                                         fine.below, fine.above, 0);
  EXPECT_TRUE(check_equivalence(fine, coarse));
  EXPECT_TRUE(check_equivalence(coarse, fine));

  auto dom = find_domination(fine, coarse);
  ASSERT_TRUE(dom.has_value());
  EXPECT_TRUE(is_valid_domination(fine, coarse, *dom));
  EXPECT_FALSE(find_domination(coarse, fine).has_value());

  // Incomparable middle levels cannot be commonly refined.
  FinAbGroup w{{2, 2}};
  FilteredObject1 a = filtered1_fin(
      w, {span_of(w, {}), span_of(w, {{1, 0}}), span_of(w, {{1, 0}, {0, 1}})},
      0, TailTag::trivial, TailTag::trivial, 0);
  FilteredObject1 b = filtered1_fin(
      w, {span_of(w, {}), span_of(w, {{0, 1}}), span_of(w, {{1, 0}, {0, 1}})},
      0, TailTag::trivial, TailTag::trivial, 0);
  EXPECT_FALSE(check_equivalence(a, b));

  // Ambient mismatch is an immediate no.
  FilteredObject1 other = local_field_window(3, 2);
  EXPECT_FALSE(check_equivalence(fine, other));
  // Tail tags are part of the germ.
  FilteredObject1 retagged = fine;
  retagged.above = TailTag::trivial;
  EXPECT_FALSE(check_equivalence(fine, retagged));
}

TEST(Equivalence, MorphismSurvivesRefinement) {
  // Validating a map on one presentation validates it on a refinement.
  DeskAdeleTriple d = desk_adele_triple(3);
  Morphism1 m{d.t.e1, d.t.e2, d.t.alpha};
  EXPECT_TRUE(is_morphism1(m));

  // Refine source and target windows in step (repeat a level, which is a
  // legal non-strict chain).
  auto refine = [](const FilteredObject1& e) {
    std::vector<Subgroup> ls;
    for (i64 i = e.lo; i <= e.hi; ++i) {
      ls.push_back(e.level(i));
      if (i == e.lo) ls.push_back(e.level(i));
    }
    return filtered1_fin(e.w, ls, e.lo, e.below, e.above, e.o_ref);
  };
  Morphism1 mr{refine(d.t.e1), refine(d.t.e2), d.t.alpha};
  EXPECT_TRUE(is_morphism1(mr));
  EXPECT_TRUE(check_equivalence(mr.src, d.t.e1));
}

TEST(ArFlavor, EntriesPredicatesAndDuality) {
  // Pure real line: one R axis, trivial finite part.
  C0arObject rline{canonical_group({1}), 0, 0, 1};
  FinAbGroup triv = canonical_group({1});
  std::vector<Subgroup> lv = {span_of(triv, {}), span_of(triv, {})};
  FilteredObject1 e = filtered1_ar(rline, lv, {}, {}, {1}, 0,
                                   TailTag::finite_stable,
                                   TailTag::finite_stable, 0);
  EXPECT_FALSE(is_compact1(e));
  EXPECT_FALSE(is_discrete1(e));
  FilteredObject1 de = dual1(e);
  EXPECT_EQ(de.aw.q, 1);
  EXPECT_EQ(de.rentry, (std::vector<i64>{0}));
  EXPECT_EQ(dual1(de), e);

  // Z lattice with trivial below tag is discrete; its dual is a circle,
  // compact.
  C0arObject zline{canonical_group({1}), 1, 0, 0};
  FilteredObject1 z = filtered1_ar(zline, lv, {1}, {}, {}, 0,
                                   TailTag::trivial, TailTag::finite_stable,
                                   0);
  EXPECT_TRUE(is_discrete1(z));
  EXPECT_FALSE(is_compact1(z));
  FilteredObject1 dz = dual1(z);
  EXPECT_EQ(dz.aw.p, 1);
  EXPECT_EQ(dz.aw.r, 0);
  EXPECT_TRUE(is_compact1(dz));
  EXPECT_FALSE(is_discrete1(dz));
  EXPECT_EQ(dual1(dz), z);

  // Entry indices outside (lo, hi] are rejected.
  EXPECT_THROW(filtered1_ar(zline, lv, {0}, {}, {}, 0, TailTag::trivial,
                            TailTag::finite_stable, 0),
               std::invalid_argument);
}

TEST(FiberedProduct, IdentityZeroAndOrderFormula) {
  DeskAdeleTriple d = desk_adele_triple(2);
  ASSERT_TRUE(is_admissible_triple1(d.t));

  // gamma = identity: the product reproduces E2 levelwise.
  Morphism1 id{d.t.e3, d.t.e3, {{1}}};
  FiberedProduct1 fp = fibered_product1(d.t, id);
  EXPECT_TRUE(is_admissible_triple1(fp.triple));
  for (i64 i = d.t.e2.lo; i <= d.t.e2.hi; ++i)
    EXPECT_EQ(fp.triple.e2.level(i).order(), d.t.e2.level(i).order()) << i;

  // gamma = zero map: the product degenerates to E1 x D.
  Morphism1 zero{d.t.e3, d.t.e3, {{0}}};
  FiberedProduct1 fz = fibered_product1(d.t, zero);
  for (i64 i = d.t.e2.lo; i <= d.t.e2.hi; ++i) {
    i64 expect = d.t.e1.level(i).order() * d.t.e3.level(i).order();
    EXPECT_EQ(fz.triple.e2.level(i).order(), expect) << i;
  }

  // Levelwise order identity |P_i| = |E2_i| |D_i| / |E3_i|; with D = E3
  // and gamma the identity this is just |E2_i| again, checked above, so
  // exercise it on the zero map where D and E3 differ as factors.
  for (i64 i = d.t.e2.lo; i <= d.t.e2.hi; ++i) {
    i64 expect = d.t.e1.level(i).order() * d.t.e3.level(i).order();
    EXPECT_EQ(fz.triple.e2.level(i).order(), expect) << i;
  }

  // D = 0 collapses the product onto E1.
  FinAbGroup znil{std::vector<i64>{}};
  std::vector<Subgroup> zl(3, span_of(znil, {}));
  FilteredObject1 dzero = filtered1_fin(znil, zl, 0, d.t.e3.below,
                                        d.t.e3.above, 0);
  Morphism1 gz{dzero, d.t.e3, mat_zero(1, 0)};
  FiberedProduct1 f0 = fibered_product1(d.t, gz);
  for (i64 i = d.t.e2.lo; i <= d.t.e2.hi; ++i)
    EXPECT_EQ(f0.triple.e2.level(i).order(), d.t.e1.level(i).order()) << i;

  // A non-morphism is rejected before any construction runs.
  FinAbGroup line{{2}};
  std::vector<Subgroup> early = {span_of(line, {}), span_of(line, {{1}}),
                                 span_of(line, {{1}})};
  FilteredObject1 bad = filtered1_fin(line, early, 0, TailTag::trivial,
                                      TailTag::finite_stable, 0);
  Morphism1 gbad{bad, d.t.e3, {{1}}};
  EXPECT_FALSE(is_morphism1(gbad));
  EXPECT_THROW(fibered_product1(d.t, gbad), std::invalid_argument);
}

TEST(Amalgam, PushoutOrdersAndTriple) {
  DeskAdeleTriple d = desk_adele_triple(2);
  Morphism1 id{d.t.e1, d.t.e1, {{1}}};
  Amalgam1 am = amalgam1(d.t, id);
  EXPECT_TRUE(is_admissible_triple1(am.triple));
  // Pushing out along the identity reproduces E2 levelwise.
  for (i64 i = d.t.e2.lo; i <= d.t.e2.hi; ++i)
    EXPECT_EQ(am.triple.e2.level(i).order(), d.t.e2.level(i).order()) << i;
}

TEST(ExadStructure, DiscreteIntoCompactQuotient) {
  DeskAdeleTriple d = desk_adele_triple(3);
  EXPECT_TRUE(is_admissible_triple1(d.t));
  EXPECT_TRUE(is_discrete1(d.t.e1));
  EXPECT_FALSE(is_compact1(d.t.e1));
  EXPECT_TRUE(is_compact1(d.t.e3));

  AdmissibleTriple1 dt = dual_triple1(d.t);
  EXPECT_TRUE(is_admissible_triple1(dt));
  EXPECT_TRUE(is_discrete1(dt.e1));
  EXPECT_TRUE(is_compact1(dt.e3));
  EXPECT_EQ(dt.e1, dual1(d.t.e3));
  EXPECT_EQ(dt.e3, dual1(d.t.e1));
}

}  // namespace
