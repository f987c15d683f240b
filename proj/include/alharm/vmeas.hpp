#pragma once

// Virtual measure spaces attached to ordered pairs of outer indices. For
// i <= j the space holds honest measures on the slice F(j)/F(i); for i > j
// it is the formal inverse line. Every element is a scalar against the
// reference basis b, the slice Haar normalized so the image of the inner
// reference level has volume one. That basis is multiplicative across
// nested pairs and self dual, which keeps all the coherence scalars exact.

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "alharm/filt2.hpp"
#include "alharm/harm1.hpp"

namespace alharm {

struct VirtualMeasure {
  FilteredObject2 parent;
  i64 i = 0, j = 0;
  cx s{1.0, 0.0};
};

inline VirtualMeasure virtual_measure(const FilteredObject2& e, i64 i, i64 j,
                                      cx s) {
  if (e.box.flavor != Flavor1::fin)
    throw std::invalid_argument("virtual_measure: finite flavor required");
  if (i < e.ilo() || i > e.ihi() || j < e.ilo() || j > e.ihi())
    throw std::invalid_argument("virtual_measure: index outside the window");
  return {e, i, j, s};
}

// Chart order and reference level order of the slice between two indices.
struct SliceVolume {
  i64 chart = 1;
  i64 ref = 1;
};

inline SliceVolume slice_volume(const FilteredObject2& e, i64 i, i64 j) {
  FilteredObject1 s = slice2(e, std::min(i, j), std::max(i, j));
  return {s.w.order(), s.level(s.o_ref).order()};
}

inline VirtualMeasure compose_gamma(const VirtualMeasure& a,
                                    const VirtualMeasure& b) {
  if (!(a.parent == b.parent))
    throw std::invalid_argument("compose_gamma: parents differ");
  if (a.j != b.i)
    throw std::invalid_argument("compose_gamma: middle index mismatch");
  return {a.parent, a.i, b.j, a.s * b.s};
}

inline VirtualMeasure invert_vm(const VirtualMeasure& m) {
  if (m.s == cx{0.0, 0.0})
    throw std::invalid_argument("invert_vm: zero element");
  return {m.parent, m.j, m.i, cx{1.0, 0.0} / m.s};
}

// The honest view: for i <= j the element is a measure line on the slice,
// in the same normalization harm1 uses.
inline MeasureLine1 to_measure_line1(const VirtualMeasure& m) {
  if (m.i > m.j)
    throw std::invalid_argument("to_measure_line1: formal direction");
  return {slice2(m.parent, m.i, m.j), m.s};
}

// Total mass one element, available when slices are compact.
inline VirtualMeasure canonical_one(const FilteredObject2& e, i64 i, i64 j) {
  if (!predicates2(e).cf)
    throw std::invalid_argument("canonical_one: requires cf");
  if (i > j) return invert_vm(canonical_one(e, j, i));
  SliceVolume v = slice_volume(e, i, j);
  return virtual_measure(e, i, j, cx(double(v.ref) / double(v.chart), 0.0));
}

// Counting element, available when slices are discrete.
inline VirtualMeasure canonical_delta(const FilteredObject2& e, i64 i, i64 j) {
  if (!predicates2(e).df)
    throw std::invalid_argument("canonical_delta: requires df");
  if (i > j) return invert_vm(canonical_delta(e, j, i));
  SliceVolume v = slice_volume(e, i, j);
  return virtual_measure(e, i, j, cx(double(v.ref), 0.0));
}

// Pushforward along an automorphism descriptor. The coefficient is the
// Haar comparison on the slice: each monomial row r sees its inner
// threshold move by ushift + shear * r, so the reference volume picks up
// one factor of q per unit of total shift. The outer relabeling moves the
// index pair by tshift.
inline VirtualMeasure transport_lg(const Automorphism2& g,
                                   const VirtualMeasure& m) {
  if (!(m.parent == g.parent))
    throw std::invalid_argument("transport_lg: parent mismatch");
  if (std::gcd(((g.unit % g.mb.q) + g.mb.q) % g.mb.q, g.mb.q) != 1)
    throw std::invalid_argument("transport_lg: unit is not invertible");
  i64 lo = std::min(m.i, m.j), hi = std::max(m.i, m.j);
  i64 sum = 0;
  for (i64 r = lo; r < hi; ++r) sum += g.ushift + g.shear * r;
  double rho = std::pow(double(g.mb.q), double(m.i <= m.j ? -sum : sum));
  i64 ni = m.i + g.tshift, nj = m.j + g.tshift;
  if (ni < m.parent.ilo() || ni > m.parent.ihi() || nj < m.parent.ilo() ||
      nj > m.parent.ihi())
    throw std::invalid_argument("transport_lg: image leaves the outer window");
  return {m.parent, ni, nj, m.s * rho};
}

// The dual pairing identifies measures between a slice and the matching
// dual slice. Indices negate in place, so the honest direction maps to the
// formal one and back, and in the b basis the scalar carries over unchanged.
inline VirtualMeasure dual_transport(const VirtualMeasure& m) {
  return {dual2(m.parent), -m.i, -m.j, m.s};
}

}  // namespace alharm
