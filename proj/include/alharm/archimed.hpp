#pragma once

// Archimedean ground layer: objects A x Z^r x T^p x R^q with Schwartz data
// held as coefficient tensors in Fourier-closed bases. The real-line basis
// is the Hermite family scaled so the kernel exp(-2*pi*i*x*y) acts
// diagonally with eigenvalues (-i)^m; circle functions live in finitely many
// character modes, integer-line functions in a finite index box. Transforms,
// translations, canonical integrals, and coordinate-aligned image maps all
// act blockwise on the tensor axes.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "alharm/finabel.hpp"
#include "alharm/quadrature.hpp"

namespace alharm {

// Values h_0(x) .. h_{count-1}(x) with h_m(x) = H_m(sqrt(2 pi) x) e^{-pi x^2}.
inline std::vector<double> hermite_values(int count, double x) {
  std::vector<double> h(count, 0.0);
  if (count == 0) return h;
  double g = std::exp(-M_PI * x * x);
  double t = std::sqrt(2.0 * M_PI) * x;
  double p0 = 1.0, p1 = 2.0 * t;
  h[0] = p0 * g;
  if (count > 1) h[1] = p1 * g;
  for (int m = 2; m < count; ++m) {
    double p2 = 2.0 * t * p1 - 2.0 * (m - 1) * p0;
    h[m] = p2 * g;
    p0 = p1;
    p1 = p2;
  }
  return h;
}

// Squared L^2 norm of h_m under Lebesgue measure: 2^m m! / sqrt(2).
inline double hermite_norm_sq(int m) {
  double v = 1.0 / std::sqrt(2.0);
  for (int j = 1; j <= m; ++j) v *= 2.0 * j;
  return v;
}

inline cx minus_i_power(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

struct C0arObject {
  FinAbGroup a;  // finite part
  int r = 0;     // free rank (Z factors)
  int p = 0;     // torus rank (T factors)
  int q = 0;     // vector rank (R factors)

  int dim() const { return p + q; }
  int pi0_rank() const { return r; }
  bool operator==(const C0arObject& o) const {
    return a.moduli == o.a.moduli && r == o.r && p == o.p && q == o.q;
  }
};

inline C0arObject dual_object(const C0arObject& o) {
  return {dual_group(o.a), o.p, o.r, o.q};
}

struct MeasureC0ar {
  // Scalar against counting x counting x (mass-1 circle) x Lebesgue.
  cx scale{1.0, 0.0};
};

inline MeasureC0ar inverse_measure(const MeasureC0ar& mu, const C0arObject& o) {
  if (std::abs(mu.scale) == 0.0)
    throw std::invalid_argument("inverse_measure: zero measure");
  return {cx{1.0, 0.0} / (mu.scale * double(o.a.order()))};
}

struct AxisBoxes {
  std::vector<std::pair<i64, i64>> zbox;  // inclusive index ranges
  std::vector<std::pair<i64, i64>> tbox;  // inclusive mode ranges
  std::vector<int> hcut;                  // Hermite degrees 0..hcut-1
};

namespace ardetail {

inline std::vector<i64> tensor_dims(const C0arObject& o, const AxisBoxes& b) {
  if (int(b.zbox.size()) != o.r || int(b.tbox.size()) != o.p ||
      int(b.hcut.size()) != o.q)
    throw std::invalid_argument("tensor boxes do not match object ranks");
  std::vector<i64> d;
  d.push_back(o.a.order());
  for (auto& z : b.zbox) {
    if (z.second < z.first) throw std::invalid_argument("empty Z box");
    d.push_back(z.second - z.first + 1);
  }
  for (auto& t : b.tbox) {
    if (t.second < t.first) throw std::invalid_argument("empty T box");
    d.push_back(t.second - t.first + 1);
  }
  for (int h : b.hcut) {
    if (h < 1) throw std::invalid_argument("empty Hermite cutoff");
    d.push_back(h);
  }
  return d;
}

inline i64 dims_size(const std::vector<i64>& d) {
  i64 s = 1;
  for (i64 x : d) s *= x;
  return s;
}

// First axis is fastest, matching the flat index convention on FinAbGroup.
inline std::vector<i64> strides(const std::vector<i64>& d) {
  std::vector<i64> s(d.size());
  i64 acc = 1;
  for (size_t i = 0; i < d.size(); ++i) {
    s[i] = acc;
    acc *= d[i];
  }
  return s;
}

// Sum an axis against a weight vector.
inline void contract_axis(std::vector<cx>& data, std::vector<i64>& dims,
                          int axis, const std::vector<cx>& w) {
  i64 len = dims[axis];
  if (i64(w.size()) != len)
    throw std::invalid_argument("contract_axis: weight length mismatch");
  i64 inner = 1, outer = 1;
  for (int i = 0; i < axis; ++i) inner *= dims[i];
  for (size_t i = axis + 1; i < dims.size(); ++i) outer *= dims[i];
  std::vector<cx> out(inner * outer, cx{0.0, 0.0});
  for (i64 o = 0; o < outer; ++o)
    for (i64 k = 0; k < len; ++k) {
      const cx wk = w[k];
      if (wk == cx{0.0, 0.0}) continue;
      const cx* src = data.data() + (o * len + k) * inner;
      cx* dst = out.data() + o * inner;
      for (i64 i = 0; i < inner; ++i) dst[i] += wk * src[i];
    }
  data = std::move(out);
  dims.erase(dims.begin() + axis);
}

// Add a new axis at position, tensoring with a weight vector.
inline void insert_axis(std::vector<cx>& data, std::vector<i64>& dims,
                        int axis, const std::vector<cx>& w) {
  i64 len = i64(w.size());
  i64 inner = 1, outer = 1;
  for (int i = 0; i < axis; ++i) inner *= dims[i];
  for (size_t i = axis; i < dims.size(); ++i) outer *= dims[i];
  std::vector<cx> out(inner * outer * len);
  for (i64 o = 0; o < outer; ++o)
    for (i64 k = 0; k < len; ++k)
      for (i64 i = 0; i < inner; ++i)
        out[(o * len + k) * inner + i] = w[k] * data[o * inner + i];
  data = std::move(out);
  dims.insert(dims.begin() + axis, len);
}

inline void scale_axis(std::vector<cx>& data, const std::vector<i64>& dims,
                       int axis, const std::vector<cx>& diag) {
  i64 len = dims[axis];
  i64 inner = 1, outer = 1;
  for (int i = 0; i < axis; ++i) inner *= dims[i];
  for (size_t i = axis + 1; i < dims.size(); ++i) outer *= dims[i];
  for (i64 o = 0; o < outer; ++o)
    for (i64 k = 0; k < len; ++k) {
      cx* row = data.data() + (o * len + k) * inner;
      for (i64 i = 0; i < inner; ++i) row[i] *= diag[k];
    }
}

inline void reverse_axis(std::vector<cx>& data, const std::vector<i64>& dims,
                         int axis) {
  i64 len = dims[axis];
  i64 inner = 1, outer = 1;
  for (int i = 0; i < axis; ++i) inner *= dims[i];
  for (size_t i = axis + 1; i < dims.size(); ++i) outer *= dims[i];
  for (i64 o = 0; o < outer; ++o)
    for (i64 k = 0; k < len / 2; ++k) {
      cx* a = data.data() + (o * len + k) * inner;
      cx* b = data.data() + (o * len + (len - 1 - k)) * inner;
      for (i64 i = 0; i < inner; ++i) std::swap(a[i], b[i]);
    }
}

// Reorder axes by a permutation: out axis j carries old axis perm[j].
inline void permute_axes(std::vector<cx>& data, std::vector<i64>& dims,
                         const std::vector<int>& perm) {
  std::vector<i64> nd(dims.size());
  for (size_t j = 0; j < perm.size(); ++j) nd[j] = dims[perm[j]];
  std::vector<i64> os = strides(dims), ns = strides(nd);
  std::vector<cx> out(data.size());
  std::vector<i64> idx(nd.size(), 0);
  for (i64 flat = 0; flat < i64(data.size()); ++flat) {
    i64 src = 0;
    for (size_t j = 0; j < nd.size(); ++j) src += idx[j] * os[perm[j]];
    out[flat] = data[src];
    for (size_t j = 0; j < nd.size(); ++j) {
      if (++idx[j] < nd[j]) break;
      idx[j] = 0;
    }
  }
  data = std::move(out);
  dims = std::move(nd);
}

}  // namespace ardetail

struct SchwartzC0ar {
  C0arObject obj;
  AxisBoxes boxes;
  std::vector<cx> coeff;  // flat, axis order [A, Z..., T..., R...], A fastest
};

// Same layout; entries are coordinates against the dual basis, so pairing
// with a SchwartzC0ar of identical shape is the plain tensor dot.
struct DistC0ar {
  C0arObject obj;
  AxisBoxes boxes;
  std::vector<cx> coeff;
};

inline SchwartzC0ar make_schwartz(const C0arObject& o, const AxisBoxes& b) {
  SchwartzC0ar f{o, b, {}};
  f.coeff.assign(ardetail::dims_size(ardetail::tensor_dims(o, b)),
                 cx{0.0, 0.0});
  return f;
}

inline DistC0ar make_dist(const C0arObject& o, const AxisBoxes& b) {
  DistC0ar f{o, b, {}};
  f.coeff.assign(ardetail::dims_size(ardetail::tensor_dims(o, b)),
                 cx{0.0, 0.0});
  return f;
}

struct C0arPoint {
  std::vector<i64> a;       // finite coordinates
  std::vector<i64> n;       // integer coordinates
  std::vector<double> th;   // circle coordinates (mod 1)
  std::vector<double> x;    // real coordinates
};

inline cx eval_c0ar(const SchwartzC0ar& f, const C0arPoint& pt) {
  const C0arObject& o = f.obj;
  if (int(pt.n.size()) != o.r || int(pt.th.size()) != o.p ||
      int(pt.x.size()) != o.q)
    throw std::invalid_argument("eval_c0ar: point shape mismatch");
  std::vector<i64> dims = ardetail::tensor_dims(o, f.boxes);
  i64 aidx = o.a.index_of(o.a.reduce(pt.a));
  std::vector<std::vector<cx>> wt;
  for (int j = 0; j < o.p; ++j) {
    auto& tb = f.boxes.tbox[j];
    std::vector<cx> w;
    for (i64 k = tb.first; k <= tb.second; ++k)
      w.push_back(std::polar(1.0, 2.0 * M_PI * double(k) * pt.th[j]));
    wt.push_back(std::move(w));
  }
  std::vector<std::vector<double>> wh;
  for (int j = 0; j < o.q; ++j)
    wh.push_back(hermite_values(f.boxes.hcut[j], pt.x[j]));

  cx total{0.0, 0.0};
  std::vector<i64> st = ardetail::strides(dims);
  std::vector<i64> idx(dims.size(), 0);
  for (i64 flat = 0; flat < i64(f.coeff.size()); ++flat) {
    bool live = (idx[0] == aidx);
    for (int j = 0; live && j < o.r; ++j)
      live = (f.boxes.zbox[j].first + idx[1 + j] == pt.n[j]);
    if (live) {
      cx term = f.coeff[flat];
      for (int j = 0; j < o.p; ++j) term *= wt[j][idx[1 + o.r + j]];
      for (int j = 0; j < o.q; ++j) term *= wh[j][idx[1 + o.r + o.p + j]];
      total += term;
    }
    for (size_t j = 0; j < dims.size(); ++j) {
      if (++idx[j] < dims[j]) break;
      idx[j] = 0;
    }
  }
  return total;
}

// Embed both tensors into union boxes and take the sup difference. The
// second argument may be either flavor since the layout is shared.
namespace ardetail {

template <typename T>
inline std::vector<cx> embed_to(const T& f, const AxisBoxes& big) {
  const C0arObject& o = f.obj;
  std::vector<i64> sd = tensor_dims(o, f.boxes);
  std::vector<i64> bd = tensor_dims(o, big);
  std::vector<i64> bs = strides(bd);
  std::vector<cx> out(dims_size(bd), cx{0.0, 0.0});
  std::vector<i64> idx(sd.size(), 0);
  for (i64 flat = 0; flat < i64(f.coeff.size()); ++flat) {
    i64 dst = idx[0] * bs[0];
    bool fits = true;
    for (int j = 0; fits && j < o.r; ++j) {
      i64 v = f.boxes.zbox[j].first + idx[1 + j] - big.zbox[j].first;
      if (v < 0 || v >= bd[1 + j]) fits = false;
      dst += v * bs[1 + j];
    }
    for (int j = 0; fits && j < o.p; ++j) {
      i64 v = f.boxes.tbox[j].first + idx[1 + o.r + j] - big.tbox[j].first;
      if (v < 0 || v >= bd[1 + o.r + j]) fits = false;
      dst += v * bs[1 + o.r + j];
    }
    for (int j = 0; fits && j < o.q; ++j)
      dst += idx[1 + o.r + o.p + j] * bs[1 + o.r + o.p + j];
    if (fits) out[dst] = f.coeff[flat];
    for (size_t j = 0; j < sd.size(); ++j) {
      if (++idx[j] < sd[j]) break;
      idx[j] = 0;
    }
  }
  return out;
}

template <typename T>
inline AxisBoxes union_boxes(const T& a, const T& b) {
  AxisBoxes u;
  for (size_t j = 0; j < a.boxes.zbox.size(); ++j)
    u.zbox.push_back({std::min(a.boxes.zbox[j].first, b.boxes.zbox[j].first),
                      std::max(a.boxes.zbox[j].second, b.boxes.zbox[j].second)});
  for (size_t j = 0; j < a.boxes.tbox.size(); ++j)
    u.tbox.push_back({std::min(a.boxes.tbox[j].first, b.boxes.tbox[j].first),
                      std::max(a.boxes.tbox[j].second, b.boxes.tbox[j].second)});
  for (size_t j = 0; j < a.boxes.hcut.size(); ++j)
    u.hcut.push_back(std::max(a.boxes.hcut[j], b.boxes.hcut[j]));
  return u;
}

}  // namespace ardetail

template <typename T>
inline double deviation_c0ar(const T& a, const T& b) {
  if (!(a.obj == b.obj)) return 1.0 / 0.0;
  AxisBoxes u = ardetail::union_boxes(a, b);
  std::vector<cx> ea = ardetail::embed_to(a, u);
  std::vector<cx> eb = ardetail::embed_to(b, u);
  double d = 0.0;
  for (size_t i = 0; i < ea.size(); ++i) d = std::max(d, std::abs(ea[i] - eb[i]));
  return d;
}

// Reflection x -> -x on every coordinate.
template <typename T>
inline T reflect_c0ar(const T& f) {
  using namespace ardetail;
  const C0arObject& o = f.obj;
  T out = f;
  std::vector<i64> dims = tensor_dims(o, f.boxes);
  // Finite axis: index negation.
  {
    i64 an = o.a.order();
    std::vector<cx> tmp(out.coeff.size());
    i64 outer = i64(out.coeff.size()) / an;
    for (i64 blk = 0; blk < outer; ++blk)
      for (i64 i = 0; i < an; ++i) {
        i64 ni = o.a.index_of(o.a.neg(o.a.coords_of(i)));
        tmp[blk * an + ni] = out.coeff[blk * an + i];
      }
    out.coeff = std::move(tmp);
  }
  for (int j = 0; j < o.r; ++j) {
    reverse_axis(out.coeff, dims, 1 + j);
    auto& zb = out.boxes.zbox[j];
    zb = {-zb.second, -zb.first};
  }
  for (int j = 0; j < o.p; ++j) {
    reverse_axis(out.coeff, dims, 1 + o.r + j);
    auto& tb = out.boxes.tbox[j];
    tb = {-tb.second, -tb.first};
  }
  for (int j = 0; j < o.q; ++j) {
    std::vector<cx> par(f.boxes.hcut[j]);
    for (int m = 0; m < f.boxes.hcut[j]; ++m)
      par[m] = (m % 2 == 0) ? cx{1.0, 0.0} : cx{-1.0, 0.0};
    scale_axis(out.coeff, dims, 1 + o.r + o.p + j, par);
  }
  return out;
}

namespace ardetail {

// Shared transform core: finite DFT on the A axis, Z and T axes exchanged
// (Z picks up an index flip), diagonal (-i)^m on Hermite axes, then axes
// restored to the canonical [A, Z..., T..., R...] order of the dual object.
template <typename TOut, typename TIn>
inline TOut fourier_core(const TIn& f, cx scale) {
  const C0arObject& o = f.obj;
  std::vector<i64> dims = tensor_dims(o, f.boxes);
  std::vector<cx> data = f.coeff;

  i64 an = o.a.order();
  if (an > 1) {
    i64 outer = i64(data.size()) / an;
    std::vector<cx> buf(an);
    for (i64 blk = 0; blk < outer; ++blk) {
      std::copy_n(data.data() + blk * an, an, buf.data());
      dft_mixed(buf, o.a.moduli, -1);
      std::copy_n(buf.data(), an, data.data() + blk * an);
    }
  }

  AxisBoxes nb;
  // Old T axes become the dual's Z axes with the same index range.
  for (auto& tb : f.boxes.tbox) nb.zbox.push_back(tb);
  // Old Z axes become T axes with negated range.
  for (int j = 0; j < o.r; ++j) {
    reverse_axis(data, dims, 1 + j);
    auto zb = f.boxes.zbox[j];
    nb.tbox.push_back({-zb.second, -zb.first});
  }
  nb.hcut = f.boxes.hcut;
  for (int j = 0; j < o.q; ++j) {
    std::vector<cx> diag(f.boxes.hcut[j]);
    for (int m = 0; m < f.boxes.hcut[j]; ++m) diag[m] = minus_i_power(m);
    scale_axis(data, dims, 1 + o.r + o.p + j, diag);
  }

  std::vector<int> perm;
  perm.push_back(0);
  for (int j = 0; j < o.p; ++j) perm.push_back(1 + o.r + j);  // new Z
  for (int j = 0; j < o.r; ++j) perm.push_back(1 + j);        // new T
  for (int j = 0; j < o.q; ++j) perm.push_back(1 + o.r + o.p + j);
  permute_axes(data, dims, perm);

  for (cx& c : data) c *= scale;
  return TOut{dual_object(o), nb, std::move(data)};
}

}  // namespace ardetail

inline SchwartzC0ar fourier_c0ar(const SchwartzC0ar& f, const MeasureC0ar& mu) {
  return ardetail::fourier_core<SchwartzC0ar>(f, mu.scale);
}

inline DistC0ar fourier_c0ar_dist(const DistC0ar& f, const MeasureC0ar& mu) {
  return ardetail::fourier_core<DistC0ar>(f, mu.scale);
}

// Canonical integral functional: counting on A and Z, total mass on T,
// Lebesgue on R (where the basis integral is (-i)^m h_m(0)).
inline cx integral_c0ar(const SchwartzC0ar& f, const MeasureC0ar& mu) {
  using namespace ardetail;
  const C0arObject& o = f.obj;
  std::vector<i64> dims = tensor_dims(o, f.boxes);
  std::vector<cx> data = f.coeff;
  for (int j = o.q - 1; j >= 0; --j) {
    std::vector<double> h0 = hermite_values(f.boxes.hcut[j], 0.0);
    std::vector<cx> w(f.boxes.hcut[j]);
    for (int m = 0; m < f.boxes.hcut[j]; ++m) w[m] = minus_i_power(m) * h0[m];
    contract_axis(data, dims, 1 + o.r + o.p + j, w);
  }
  for (int j = o.p - 1; j >= 0; --j) {
    auto& tb = f.boxes.tbox[j];
    std::vector<cx> w(tb.second - tb.first + 1, cx{0.0, 0.0});
    if (tb.first <= 0 && 0 <= tb.second) w[-tb.first] = cx{1.0, 0.0};
    contract_axis(data, dims, 1 + o.r + j, w);
  }
  for (int j = o.r - 1; j >= 0; --j) {
    auto& zb = f.boxes.zbox[j];
    std::vector<cx> w(zb.second - zb.first + 1, cx{1.0, 0.0});
    contract_axis(data, dims, 1 + j, w);
  }
  cx total{0.0, 0.0};
  for (const cx& c : data) total += c;
  return total * mu.scale;
}

inline cx pair_c0ar(const SchwartzC0ar& f, const DistC0ar& d) {
  if (!(f.obj == d.obj))
    throw std::invalid_argument("pair_c0ar: object mismatch");
  AxisBoxes u = ardetail::union_boxes(
      f, SchwartzC0ar{d.obj, d.boxes, d.coeff});
  std::vector<cx> ef = ardetail::embed_to(f, u);
  std::vector<cx> ed = ardetail::embed_to(d, u);
  cx total{0.0, 0.0};
  for (size_t i = 0; i < ef.size(); ++i) total += ef[i] * ed[i];
  return total;
}

// -------------------------------------------------------------------------
// Translation. Finite, Z, and T coordinates shift exactly; R coordinates
// are re-expanded by exact Gauss-Hermite projection and the L^2 mass lost
// to the cutoff is reported.

struct TranslateReport {
  SchwartzC0ar fun;
  double residual = 0.0;  // L^2 norm of the truncated remainder, per call
};

namespace ardetail {

// Matrix sending coefficients of f on degrees < cols to coefficients of
// x -> f(x - a) on degrees < rows. Extra rows beyond the storage cutoff
// let the caller measure the truncated mass as a plain sum of squares,
// which avoids the cancellation that plagues a before-minus-after norm.
inline std::vector<std::vector<cx>> hermite_shift_matrix(int rows, int cols,
                                                         double a) {
  std::vector<double> gx, gw;
  gauss_hermite(std::max(rows, cols) + 8, gx, gw);
  double s = std::sqrt(2.0 * M_PI) * a / 2.0;
  double pref = std::exp(-M_PI * a * a / 2.0) / std::sqrt(2.0 * M_PI);
  // H_m values at u - s and u + s for each node.
  auto hvals = [](double t, int n) {
    std::vector<double> h(n);
    double p0 = 1.0, p1 = 2.0 * t;
    h[0] = p0;
    if (n > 1) h[1] = p1;
    for (int m = 2; m < n; ++m) {
      double p2 = 2.0 * t * p1 - 2.0 * (m - 1) * p0;
      h[m] = p2;
      p0 = p1;
      p1 = p2;
    }
    return h;
  };
  std::vector<std::vector<cx>> mat(rows, std::vector<cx>(cols, cx{0.0, 0.0}));
  for (size_t i = 0; i < gx.size(); ++i) {
    std::vector<double> hm = hvals(gx[i] - s, cols);  // source, shifted
    std::vector<double> hj = hvals(gx[i] + s, rows);  // target
    for (int j = 0; j < rows; ++j) {
      double wj = gw[i] * pref * hj[j] / hermite_norm_sq(j);
      for (int m = 0; m < cols; ++m) mat[j][m] += cx{wj * hm[m], 0.0};
    }
  }
  return mat;
}

}  // namespace ardetail

inline TranslateReport translate_with_report(const SchwartzC0ar& f,
                                             const C0arPoint& a) {
  using namespace ardetail;
  const C0arObject& o = f.obj;
  if (int(a.n.size()) != o.r || int(a.th.size()) != o.p ||
      int(a.x.size()) != o.q)
    throw std::invalid_argument("translate: point shape mismatch");
  SchwartzC0ar out = f;
  std::vector<i64> dims = tensor_dims(o, f.boxes);

  // Finite part: (T_a f)(b) = f(b + a), a cyclic index shift.
  if (!a.a.empty()) {
    std::vector<i64> av = o.a.reduce(a.a);
    i64 an = o.a.order();
    std::vector<cx> tmp(out.coeff.size());
    i64 outer = i64(out.coeff.size()) / an;
    for (i64 blk = 0; blk < outer; ++blk)
      for (i64 i = 0; i < an; ++i) {
        i64 src = o.a.index_of(o.a.add(o.a.coords_of(i), av));
        tmp[blk * an + i] = out.coeff[blk * an + src];
      }
    out.coeff = std::move(tmp);
  }
  // Z axes: coefficient at m becomes old coefficient at m + n, so the box
  // slides by -n with data unchanged.
  for (int j = 0; j < o.r; ++j) {
    out.boxes.zbox[j].first -= a.n[j];
    out.boxes.zbox[j].second -= a.n[j];
  }
  // T axes: mode k picks up exp(2 pi i k theta).
  for (int j = 0; j < o.p; ++j) {
    auto& tb = f.boxes.tbox[j];
    std::vector<cx> diag(tb.second - tb.first + 1);
    for (i64 k = tb.first; k <= tb.second; ++k)
      diag[k - tb.first] = std::polar(1.0, 2.0 * M_PI * double(k) * a.th[j]);
    scale_axis(out.coeff, dims, 1 + o.r + j, diag);
  }
  // R axes: exact projection. Sixteen padded rows past the cutoff collect
  // the truncated mass; a shift violent enough to matter always raises
  // these, since displaced degree profiles rise and fall without gaps.
  double residual_sq = 0.0;
  constexpr int kPad = 16;
  for (int j = 0; j < o.q; ++j) {
    if (a.x[j] == 0.0) continue;
    int axis = 1 + o.r + o.p + j;
    int cut = f.boxes.hcut[j];
    // The shift matrix produces f(x - b); translation wants f(x + a).
    auto mat = hermite_shift_matrix(cut + kPad, cut, -a.x[j]);
    i64 len = dims[axis], inner = 1, outer = 1;
    for (int i = 0; i < axis; ++i) inner *= dims[i];
    for (size_t i = axis + 1; i < dims.size(); ++i) outer *= dims[i];
    std::vector<cx> col(len);
    for (i64 ob = 0; ob < outer; ++ob)
      for (i64 i = 0; i < inner; ++i) {
        for (i64 k = 0; k < len; ++k)
          col[k] = out.coeff[(ob * len + k) * inner + i];
        for (int r = 0; r < cut + kPad; ++r) {
          cx acc{0.0, 0.0};
          for (i64 k = 0; k < len; ++k) acc += mat[r][k] * col[k];
          if (r < cut)
            out.coeff[(ob * len + r) * inner + i] = acc;
          else
            residual_sq += std::norm(acc) * hermite_norm_sq(r);
        }
      }
  }
  return {std::move(out), std::sqrt(residual_sq)};
}

inline SchwartzC0ar translate(const SchwartzC0ar& f, const C0arPoint& a,
                              double max_residual = 1e-6) {
  TranslateReport r = translate_with_report(f, a);
  if (r.residual > max_residual)
    throw std::runtime_error("translate: cutoff overflow, residual " +
                             std::to_string(r.residual));
  return std::move(r.fun);
}

// -------------------------------------------------------------------------
// Classical Poisson check for the lattice Z inside R: both sides of
// sum f(n) = sum (Ff)(n) by direct summation with controlled tails.

struct PoissonLatticeReport {
  cx lhs{0.0, 0.0};
  cx rhs{0.0, 0.0};
  double deviation = 0.0;
};

inline PoissonLatticeReport poisson_lattice_check(const SchwartzC0ar& f) {
  if (f.obj.q != 1 || f.obj.r != 0 || f.obj.p != 0 || f.obj.a.order() != 1)
    throw std::invalid_argument(
        "poisson_lattice_check: expected a pure real-line function");
  for (const cx& c : f.coeff)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument(
          "poisson_lattice_check: non-finite coefficients");
  SchwartzC0ar g = fourier_c0ar(f, MeasureC0ar{cx{1.0, 0.0}});
  auto lattice_sum = [](const SchwartzC0ar& h) {
    cx total = eval_c0ar(h, {{}, {}, {}, {0.0}});
    int quiet = 0;
    for (i64 n = 1; n <= 64 && quiet < 3; ++n) {
      cx term = eval_c0ar(h, {{}, {}, {}, {double(n)}}) +
                eval_c0ar(h, {{}, {}, {}, {-double(n)}});
      total += term;
      quiet = (std::abs(term) < 1e-14) ? quiet + 1 : 0;
    }
    return total;
  };
  PoissonLatticeReport rep;
  rep.lhs = lattice_sum(f);
  rep.rhs = lattice_sum(g);
  rep.deviation = std::abs(rep.lhs - rep.rhs);
  return rep;
}

// -------------------------------------------------------------------------
// Coordinate-aligned admissible triples. Each Z, T, R axis of the middle
// object is assigned to the kernel or the quotient; the finite parts form
// an ordinary admissible triple. Dense windings and lattice inclusions are
// deliberately not expressible here.

enum class BlockSide { kernel, quotient };

struct TripleC0ar {
  C0arObject g1, g2, g3;
  TripleC0 fin;
  std::vector<BlockSide> zside, tside, rside;
};

inline TripleC0ar make_triple_c0ar(const TripleC0& fin,
                                   std::vector<BlockSide> zside,
                                   std::vector<BlockSide> tside,
                                   std::vector<BlockSide> rside) {
  if (!is_admissible_triple(fin))
    throw std::invalid_argument("make_triple_c0ar: finite part not admissible");
  auto count = [](const std::vector<BlockSide>& v, BlockSide s) {
    return int(std::count(v.begin(), v.end(), s));
  };
  TripleC0ar t;
  t.fin = fin;
  t.zside = std::move(zside);
  t.tside = std::move(tside);
  t.rside = std::move(rside);
  t.g2 = {fin.g2, int(t.zside.size()), int(t.tside.size()),
          int(t.rside.size())};
  t.g1 = {fin.g1, count(t.zside, BlockSide::kernel),
          count(t.tside, BlockSide::kernel), count(t.rside, BlockSide::kernel)};
  t.g3 = {fin.g3, count(t.zside, BlockSide::quotient),
          count(t.tside, BlockSide::quotient),
          count(t.rside, BlockSide::quotient)};
  return t;
}

inline bool is_admissible_triple_c0ar(const TripleC0ar& t) {
  TripleC0ar ref = make_triple_c0ar(t.fin, t.zside, t.tside, t.rside);
  return t.g1 == ref.g1 && t.g2 == ref.g2 && t.g3 == ref.g3;
}

inline TripleC0ar dual_triple_c0ar(const TripleC0ar& t) {
  auto flip = [](const std::vector<BlockSide>& v) {
    std::vector<BlockSide> out;
    for (BlockSide s : v)
      out.push_back(s == BlockSide::kernel ? BlockSide::quotient
                                           : BlockSide::kernel);
    return out;
  };
  // Z and T exchange roles under duality; sides flip because the dual
  // kernel is the annihilator of the original kernel.
  return make_triple_c0ar(dual_triple(t.fin), flip(t.tside), flip(t.zside),
                          flip(t.rside));
}

namespace ardetail {

inline void require_triple(const TripleC0ar& t, const char* who) {
  if (!is_admissible_triple_c0ar(t))
    throw std::invalid_argument(std::string(who) + ": triple is not admissible");
}

// Apply a finite-part map fiberwise along the A axis. widen gives the
// output A length.
template <typename F>
inline void apply_finite(std::vector<cx>& data, std::vector<i64>& dims,
                         i64 out_len, F&& op) {
  i64 an = dims[0];
  i64 outer = i64(data.size()) / an;
  std::vector<cx> out(outer * out_len);
  std::vector<cx> buf(an);
  for (i64 blk = 0; blk < outer; ++blk) {
    std::copy_n(data.data() + blk * an, an, buf.data());
    std::vector<cx> res = op(buf);
    std::copy_n(res.data(), out_len, out.data() + blk * out_len);
  }
  data = std::move(out);
  dims[0] = out_len;
}

struct SplitBoxes {
  AxisBoxes kernel, quotient;
};

inline SplitBoxes split_boxes(const TripleC0ar& t, const AxisBoxes& b) {
  SplitBoxes s;
  for (size_t j = 0; j < t.zside.size(); ++j)
    (t.zside[j] == BlockSide::kernel ? s.kernel : s.quotient)
        .zbox.push_back(b.zbox[j]);
  for (size_t j = 0; j < t.tside.size(); ++j)
    (t.tside[j] == BlockSide::kernel ? s.kernel : s.quotient)
        .tbox.push_back(b.tbox[j]);
  for (size_t j = 0; j < t.rside.size(); ++j)
    (t.rside[j] == BlockSide::kernel ? s.kernel : s.quotient)
        .hcut.push_back(b.hcut[j]);
  return s;
}

// Integration weights over one axis: counting on Z, total mass on T,
// Lebesgue on R.
inline std::vector<cx> int_weights_z(std::pair<i64, i64> zb) {
  return std::vector<cx>(zb.second - zb.first + 1, cx{1.0, 0.0});
}
inline std::vector<cx> int_weights_t(std::pair<i64, i64> tb) {
  std::vector<cx> w(tb.second - tb.first + 1, cx{0.0, 0.0});
  if (tb.first <= 0 && 0 <= tb.second) w[-tb.first] = cx{1.0, 0.0};
  return w;
}
inline std::vector<cx> int_weights_r(int cut) {
  std::vector<double> h0 = hermite_values(cut, 0.0);
  std::vector<cx> w(cut);
  for (int m = 0; m < cut; ++m) w[m] = minus_i_power(m) * h0[m];
  return w;
}

// Evaluation-at-zero weights: delta index on Z, all modes on T, basis
// values on R.
inline std::vector<cx> eval_weights_z(std::pair<i64, i64> zb) {
  std::vector<cx> w(zb.second - zb.first + 1, cx{0.0, 0.0});
  if (zb.first <= 0 && 0 <= zb.second) w[-zb.first] = cx{1.0, 0.0};
  return w;
}
inline std::vector<cx> eval_weights_t(std::pair<i64, i64> tb) {
  return std::vector<cx>(tb.second - tb.first + 1, cx{1.0, 0.0});
}
inline std::vector<cx> eval_weights_r(int cut) {
  std::vector<double> h0 = hermite_values(cut, 0.0);
  std::vector<cx> w(cut);
  for (int m = 0; m < cut; ++m) w[m] = cx{h0[m], 0.0};
  return w;
}

}  // namespace ardetail

// Default boxes for axes created by image maps.
struct BoxDefaults {
  i64 zhalf = 64;
  i64 thalf = 32;
  int hcut = 32;
};

// (beta_* f)(z) = integral of f over the kernel against mu.
inline SchwartzC0ar epi_pushforward(const TripleC0ar& t, const SchwartzC0ar& f,
                                    const MeasureC0ar& mu) {
  using namespace ardetail;
  require_triple(t, "epi_pushforward");
  if (!(f.obj == t.g2))
    throw std::invalid_argument("epi_pushforward: function not on middle object");
  std::vector<i64> dims = tensor_dims(f.obj, f.boxes);
  std::vector<cx> data = f.coeff;
  const C0arObject& o = f.obj;
  // Contract kernel axes from the back so positions stay valid.
  for (int j = o.q - 1; j >= 0; --j)
    if (t.rside[j] == BlockSide::kernel)
      contract_axis(data, dims, 1 + o.r + o.p + j, int_weights_r(f.boxes.hcut[j]));
  for (int j = o.p - 1; j >= 0; --j)
    if (t.tside[j] == BlockSide::kernel)
      contract_axis(data, dims, 1 + o.r + j, int_weights_t(f.boxes.tbox[j]));
  for (int j = o.r - 1; j >= 0; --j)
    if (t.zside[j] == BlockSide::kernel)
      contract_axis(data, dims, 1 + j, int_weights_z(f.boxes.zbox[j]));
  apply_finite(data, dims, t.g3.a.order(), [&](const std::vector<cx>& buf) {
    FunctionC0 fn{t.fin.g2, buf};
    return epi_pushforward(t.fin, fn, MeasureC0{cx{1.0, 0.0}}).table;
  });
  for (cx& c : data) c *= mu.scale;
  return {t.g3, split_boxes(t, f.boxes).quotient, std::move(data)};
}

// (alpha^* f) = f restricted to the kernel coordinates.
inline SchwartzC0ar mono_pullback(const TripleC0ar& t, const SchwartzC0ar& f) {
  using namespace ardetail;
  require_triple(t, "mono_pullback");
  if (!(f.obj == t.g2))
    throw std::invalid_argument("mono_pullback: function not on middle object");
  std::vector<i64> dims = tensor_dims(f.obj, f.boxes);
  std::vector<cx> data = f.coeff;
  const C0arObject& o = f.obj;
  for (int j = o.q - 1; j >= 0; --j)
    if (t.rside[j] == BlockSide::quotient)
      contract_axis(data, dims, 1 + o.r + o.p + j, eval_weights_r(f.boxes.hcut[j]));
  for (int j = o.p - 1; j >= 0; --j)
    if (t.tside[j] == BlockSide::quotient)
      contract_axis(data, dims, 1 + o.r + j, eval_weights_t(f.boxes.tbox[j]));
  for (int j = o.r - 1; j >= 0; --j)
    if (t.zside[j] == BlockSide::quotient)
      contract_axis(data, dims, 1 + j, eval_weights_z(f.boxes.zbox[j]));
  apply_finite(data, dims, t.g1.a.order(), [&](const std::vector<cx>& buf) {
    FunctionC0 fn{t.fin.g2, buf};
    return mono_pullback(t.fin, fn).table;
  });
  return {t.g1, split_boxes(t, f.boxes).kernel, std::move(data)};
}

// (beta^* f) = f composed with the projection; kernel must be compact.
inline SchwartzC0ar epi_pullback(const TripleC0ar& t, const SchwartzC0ar& f) {
  using namespace ardetail;
  require_triple(t, "epi_pullback");
  if (!(f.obj == t.g3))
    throw std::invalid_argument("epi_pullback: function not on quotient object");
  if (t.g1.r != 0 || t.g1.q != 0)
    throw std::invalid_argument("epi_pullback: kernel is not compact");
  std::vector<i64> dims = tensor_dims(f.obj, f.boxes);
  std::vector<cx> data = f.coeff;
  apply_finite(data, dims, t.g2.a.order(), [&](const std::vector<cx>& buf) {
    FunctionC0 fn{t.fin.g3, buf};
    return epi_pullback(t.fin, fn).table;
  });
  // Rebuild axes in g2 order: quotient axes carry f's data, kernel T axes
  // hold the constant at mode zero.
  AxisBoxes ob;
  const C0arObject& o2 = t.g2;
  int zq = 0;
  for (int j = 0; j < o2.r; ++j) {
    // Kernel Z would contradict compactness, checked above.
    ob.zbox.push_back(f.boxes.zbox[zq++]);
  }
  int tq = 0;
  for (int j = 0; j < o2.p; ++j) {
    if (t.tside[j] == BlockSide::kernel) {
      insert_axis(data, dims, 1 + o2.r + j, {cx{1.0, 0.0}});
      ob.tbox.push_back({0, 0});
    } else {
      ob.tbox.push_back(f.boxes.tbox[tq++]);
    }
  }
  int rq = 0;
  for (int j = 0; j < o2.q; ++j) ob.hcut.push_back(f.boxes.hcut[rq++]);
  return {t.g2, ob, std::move(data)};
}

// (alpha_* f) = extension by zero; quotient must be discrete.
inline SchwartzC0ar mono_pushforward(const TripleC0ar& t,
                                     const SchwartzC0ar& f) {
  using namespace ardetail;
  require_triple(t, "mono_pushforward");
  if (!(f.obj == t.g1))
    throw std::invalid_argument("mono_pushforward: function not on kernel object");
  if (t.g3.p != 0 || t.g3.q != 0)
    throw std::invalid_argument("mono_pushforward: quotient is not discrete");
  std::vector<i64> dims = tensor_dims(f.obj, f.boxes);
  std::vector<cx> data = f.coeff;
  apply_finite(data, dims, t.g2.a.order(), [&](const std::vector<cx>& buf) {
    FunctionC0 fn{t.fin.g1, buf};
    return mono_pushforward(t.fin, fn).table;
  });
  AxisBoxes ob;
  const C0arObject& o2 = t.g2;
  int zk = 0;
  for (int j = 0; j < o2.r; ++j) {
    if (t.zside[j] == BlockSide::kernel) {
      ob.zbox.push_back(f.boxes.zbox[zk++]);
    } else {
      insert_axis(data, dims, 1 + j, {cx{1.0, 0.0}});
      ob.zbox.push_back({0, 0});
    }
  }
  int tk = 0;
  for (int j = 0; j < o2.p; ++j) ob.tbox.push_back(f.boxes.tbox[tk++]);
  int rk = 0;
  for (int j = 0; j < o2.q; ++j) ob.hcut.push_back(f.boxes.hcut[rk++]);
  return {t.g2, ob, std::move(data)};
}

// Distribution adjoints. Layouts mirror the function maps with the roles of
// insertion and contraction exchanged.

inline DistC0ar epi_pullback_dist(const TripleC0ar& t, const DistC0ar& d,
                                  const MeasureC0ar& mu,
                                  const BoxDefaults& bd = {}) {
  using namespace ardetail;
  require_triple(t, "epi_pullback_dist");
  if (!(d.obj == t.g3))
    throw std::invalid_argument("epi_pullback_dist: input not on quotient");
  std::vector<i64> dims = tensor_dims(d.obj, d.boxes);
  std::vector<cx> data = d.coeff;
  apply_finite(data, dims, t.g2.a.order(), [&](const std::vector<cx>& buf) {
    DistributionC0 dn{t.fin.g3, buf};
    return epi_pullback_dist(t.fin, dn, MeasureC0{cx{1.0, 0.0}}).table;
  });
  AxisBoxes ob;
  const C0arObject& o2 = t.g2;
  int zq = 0;
  for (int j = 0; j < o2.r; ++j) {
    if (t.zside[j] == BlockSide::kernel) {
      std::pair<i64, i64> zb{-bd.zhalf, bd.zhalf};
      insert_axis(data, dims, 1 + j, int_weights_z(zb));
      ob.zbox.push_back(zb);
    } else {
      ob.zbox.push_back(d.boxes.zbox[zq++]);
    }
  }
  int tq = 0;
  for (int j = 0; j < o2.p; ++j) {
    if (t.tside[j] == BlockSide::kernel) {
      insert_axis(data, dims, 1 + o2.r + j, {cx{1.0, 0.0}});
      ob.tbox.push_back({0, 0});
    } else {
      ob.tbox.push_back(d.boxes.tbox[tq++]);
    }
  }
  int rq = 0;
  for (int j = 0; j < o2.q; ++j) {
    if (t.rside[j] == BlockSide::kernel) {
      insert_axis(data, dims, 1 + o2.r + o2.p + j, int_weights_r(bd.hcut));
      ob.hcut.push_back(bd.hcut);
    } else {
      ob.hcut.push_back(d.boxes.hcut[rq++]);
    }
  }
  for (cx& c : data) c *= mu.scale;
  return {t.g2, ob, std::move(data)};
}

inline DistC0ar epi_pushforward_dist(const TripleC0ar& t, const DistC0ar& d) {
  using namespace ardetail;
  require_triple(t, "epi_pushforward_dist");
  if (!(d.obj == t.g2))
    throw std::invalid_argument("epi_pushforward_dist: input not on middle");
  for (size_t j = 0; j < t.rside.size(); ++j)
    if (t.rside[j] == BlockSide::kernel)
      throw std::invalid_argument(
          "epi_pushforward_dist: real kernel coordinates unsupported");
  std::vector<i64> dims = tensor_dims(d.obj, d.boxes);
  std::vector<cx> data = d.coeff;
  const C0arObject& o = d.obj;
  for (int j = o.p - 1; j >= 0; --j)
    if (t.tside[j] == BlockSide::kernel)
      contract_axis(data, dims, 1 + o.r + j, int_weights_t(d.boxes.tbox[j]));
  for (int j = o.r - 1; j >= 0; --j)
    if (t.zside[j] == BlockSide::kernel)
      contract_axis(data, dims, 1 + j, int_weights_z(d.boxes.zbox[j]));
  apply_finite(data, dims, t.g3.a.order(), [&](const std::vector<cx>& buf) {
    DistributionC0 dn{t.fin.g2, buf};
    return epi_pushforward_dist(t.fin, dn).table;
  });
  return {t.g3, split_boxes(t, d.boxes).quotient, std::move(data)};
}

inline DistC0ar mono_pullback_dist(const TripleC0ar& t, const DistC0ar& d) {
  using namespace ardetail;
  require_triple(t, "mono_pullback_dist");
  if (!(d.obj == t.g2))
    throw std::invalid_argument("mono_pullback_dist: input not on middle");
  std::vector<i64> dims = tensor_dims(d.obj, d.boxes);
  std::vector<cx> data = d.coeff;
  const C0arObject& o = d.obj;
  for (int j = o.q - 1; j >= 0; --j)
    if (t.rside[j] == BlockSide::quotient)
      contract_axis(data, dims, 1 + o.r + o.p + j, eval_weights_r(d.boxes.hcut[j]));
  for (int j = o.p - 1; j >= 0; --j)
    if (t.tside[j] == BlockSide::quotient)
      contract_axis(data, dims, 1 + o.r + j, eval_weights_t(d.boxes.tbox[j]));
  for (int j = o.r - 1; j >= 0; --j)
    if (t.zside[j] == BlockSide::quotient)
      contract_axis(data, dims, 1 + j, eval_weights_z(d.boxes.zbox[j]));
  apply_finite(data, dims, t.g1.a.order(), [&](const std::vector<cx>& buf) {
    DistributionC0 dn{t.fin.g2, buf};
    return mono_pullback_dist(t.fin, dn).table;
  });
  return {t.g1, split_boxes(t, d.boxes).kernel, std::move(data)};
}

inline DistC0ar mono_pushforward_dist(const TripleC0ar& t, const DistC0ar& d,
                                      const BoxDefaults& bd = {}) {
  using namespace ardetail;
  require_triple(t, "mono_pushforward_dist");
  if (!(d.obj == t.g1))
    throw std::invalid_argument("mono_pushforward_dist: input not on kernel");
  std::vector<i64> dims = tensor_dims(d.obj, d.boxes);
  std::vector<cx> data = d.coeff;
  apply_finite(data, dims, t.g2.a.order(), [&](const std::vector<cx>& buf) {
    DistributionC0 dn{t.fin.g1, buf};
    return mono_pushforward_dist(t.fin, dn).table;
  });
  AxisBoxes ob;
  const C0arObject& o2 = t.g2;
  int zk = 0;
  for (int j = 0; j < o2.r; ++j) {
    if (t.zside[j] == BlockSide::kernel) {
      ob.zbox.push_back(d.boxes.zbox[zk++]);
    } else {
      insert_axis(data, dims, 1 + j, {cx{1.0, 0.0}});
      ob.zbox.push_back({0, 0});
    }
  }
  int tk = 0;
  for (int j = 0; j < o2.p; ++j) {
    if (t.tside[j] == BlockSide::kernel) {
      ob.tbox.push_back(d.boxes.tbox[tk++]);
    } else {
      std::pair<i64, i64> tb{-bd.thalf, bd.thalf};
      insert_axis(data, dims, 1 + o2.r + j, eval_weights_t(tb));
      ob.tbox.push_back(tb);
    }
  }
  int rk = 0;
  for (int j = 0; j < o2.q; ++j) {
    if (t.rside[j] == BlockSide::kernel) {
      ob.hcut.push_back(d.boxes.hcut[rk++]);
    } else {
      insert_axis(data, dims, 1 + o2.r + o2.p + j, eval_weights_r(bd.hcut));
      ob.hcut.push_back(bd.hcut);
    }
  }
  return {t.g2, ob, std::move(data)};
}

// -------------------------------------------------------------------------
// Transform-against-image squares, archimedean version. Scale bookkeeping
// matches the finite case with only the finite part contributing a group
// order; every continuous factor is self-normalized under the canonical
// measures.

inline double ar_square_push_function(const TripleC0ar& t,
                                      const SchwartzC0ar& f2,
                                      const MeasureC0ar& mu1,
                                      const MeasureC0ar& mu3) {
  TripleC0ar dt = dual_triple_c0ar(t);
  SchwartzC0ar lhs = fourier_c0ar(epi_pushforward(t, f2, mu1), mu3);
  SchwartzC0ar rhs =
      mono_pullback(dt, fourier_c0ar(f2, MeasureC0ar{mu1.scale * mu3.scale}));
  return deviation_c0ar(lhs, rhs);
}

inline double ar_square_pull_function(const TripleC0ar& t,
                                      const SchwartzC0ar& f2,
                                      const MeasureC0ar& s,
                                      const MeasureC0ar& nu3) {
  TripleC0ar dt = dual_triple_c0ar(t);
  MeasureC0ar nu1{s.scale * nu3.scale * double(t.g3.a.order())};
  SchwartzC0ar lhs = fourier_c0ar(mono_pullback(t, f2), nu1);
  SchwartzC0ar rhs = epi_pushforward(dt, fourier_c0ar(f2, s), nu3);
  return deviation_c0ar(lhs, rhs);
}

inline double ar_square_copull_function(const TripleC0ar& t,
                                        const SchwartzC0ar& f3,
                                        const MeasureC0ar& mu3) {
  TripleC0ar dt = dual_triple_c0ar(t);
  MeasureC0ar m2{mu3.scale / double(t.g1.a.order())};
  SchwartzC0ar lhs = fourier_c0ar(epi_pullback(t, f3), m2);
  SchwartzC0ar rhs = mono_pushforward(dt, fourier_c0ar(f3, mu3));
  return deviation_c0ar(lhs, rhs);
}

inline double ar_square_copush_function(const TripleC0ar& t,
                                        const SchwartzC0ar& f1,
                                        const MeasureC0ar& mu1) {
  TripleC0ar dt = dual_triple_c0ar(t);
  SchwartzC0ar lhs = fourier_c0ar(mono_pushforward(t, f1), mu1);
  SchwartzC0ar rhs = epi_pullback(dt, fourier_c0ar(f1, mu1));
  return deviation_c0ar(lhs, rhs);
}

inline double ar_square_pull_dist(const TripleC0ar& t, const DistC0ar& d3,
                                  const MeasureC0ar& nu2,
                                  const MeasureC0ar& mu1,
                                  const BoxDefaults& bd) {
  TripleC0ar dt = dual_triple_c0ar(t);
  DistC0ar lhs = fourier_c0ar_dist(epi_pullback_dist(t, d3, mu1, bd), nu2);
  MeasureC0ar inner{nu2.scale * mu1.scale * double(t.g1.a.order())};
  DistC0ar rhs =
      mono_pushforward_dist(dt, fourier_c0ar_dist(d3, inner), bd);
  return deviation_c0ar(lhs, rhs);
}

inline double ar_square_push_dist(const TripleC0ar& t, const DistC0ar& d1,
                                  const MeasureC0ar& nu1,
                                  const MeasureC0ar& nu3,
                                  const BoxDefaults& bd) {
  TripleC0ar dt = dual_triple_c0ar(t);
  DistC0ar lhs = fourier_c0ar_dist(mono_pushforward_dist(t, d1, bd),
                                   MeasureC0ar{nu1.scale * nu3.scale});
  DistC0ar rhs = epi_pullback_dist(dt, fourier_c0ar_dist(d1, nu1), nu3, bd);
  return deviation_c0ar(lhs, rhs);
}

inline double ar_square_copush_dist(const TripleC0ar& t, const DistC0ar& d2,
                                    const MeasureC0ar& nu) {
  TripleC0ar dt = dual_triple_c0ar(t);
  DistC0ar lhs = fourier_c0ar_dist(epi_pushforward_dist(t, d2), nu);
  DistC0ar rhs = mono_pullback_dist(dt, fourier_c0ar_dist(d2, nu));
  return deviation_c0ar(lhs, rhs);
}

inline double ar_square_copull_dist(const TripleC0ar& t, const DistC0ar& d2,
                                    const MeasureC0ar& s) {
  TripleC0ar dt = dual_triple_c0ar(t);
  MeasureC0ar nu1{s.scale * double(t.g3.a.order())};
  DistC0ar lhs = fourier_c0ar_dist(mono_pullback_dist(t, d2), nu1);
  DistC0ar rhs = epi_pushforward_dist(dt, fourier_c0ar_dist(d2, s));
  return deviation_c0ar(lhs, rhs);
}

// -------------------------------------------------------------------------
// Random data for property tests.

inline SchwartzC0ar random_schwartz_c0ar(const C0arObject& o,
                                         const AxisBoxes& b,
                                         std::mt19937_64& rng) {
  SchwartzC0ar f = make_schwartz(o, b);
  std::normal_distribution<double> g(0.0, 1.0);
  for (cx& c : f.coeff) c = cx{g(rng), g(rng)};
  return f;
}

inline DistC0ar random_dist_c0ar(const C0arObject& o, const AxisBoxes& b,
                                 std::mt19937_64& rng) {
  DistC0ar f = make_dist(o, b);
  std::normal_distribution<double> g(0.0, 1.0);
  for (cx& c : f.coeff) c = cx{g(rng), g(rng)};
  return f;
}

// One pass over all eight squares on fresh random data, honoring each
// square's side hypotheses. Reused by the test suite and the CLI driver.
struct NamedDeviationAr {
  std::string name;
  double deviation;
};

inline std::vector<NamedDeviationAr> run_c0ar_square_batch(
    std::mt19937_64& rng) {
  std::vector<NamedDeviationAr> out;
  TripleC0 fin = random_triple(rng, 48);
  const BlockSide K = BlockSide::kernel, Q = BlockSide::quotient;
  auto coin = [&rng, K, Q]() {
    return std::uniform_int_distribution<int>(0, 1)(rng) ? K : Q;
  };
  AxisBoxes b2;
  b2.zbox = {{-4, 4}};
  b2.tbox = {{-4, 4}};
  b2.hcut = {6};
  BoxDefaults bd{4, 4, 6};
  MeasureC0ar m1{random_measure(rng).scale}, m2{random_measure(rng).scale};

  {
    TripleC0ar t = make_triple_c0ar(fin, {coin()}, {coin()}, {coin()});
    SchwartzC0ar f2 = random_schwartz_c0ar(t.g2, b2, rng);
    out.push_back({"ar_push_function", ar_square_push_function(t, f2, m1, m2)});
    out.push_back({"ar_pull_function", ar_square_pull_function(t, f2, m1, m2)});
    AxisBoxes b3 = ardetail::split_boxes(t, b2).quotient;
    out.push_back({"ar_pull_dist",
                   ar_square_pull_dist(t, random_dist_c0ar(t.g3, b3, rng), m1,
                                       m2, bd)});
    AxisBoxes b1 = ardetail::split_boxes(t, b2).kernel;
    out.push_back({"ar_push_dist",
                   ar_square_push_dist(t, random_dist_c0ar(t.g1, b1, rng), m1,
                                       m2, bd)});
  }
  {
    // Compact kernel: finite and torus coordinates only.
    TripleC0ar t = make_triple_c0ar(fin, {Q}, {K}, {Q});
    AxisBoxes b3 = ardetail::split_boxes(t, b2).quotient;
    out.push_back({"ar_copull_function",
                   ar_square_copull_function(
                       t, random_schwartz_c0ar(t.g3, b3, rng), m1)});
  }
  {
    // Discrete quotient: finite and integer coordinates only.
    TripleC0ar t = make_triple_c0ar(fin, {Q}, {K}, {K});
    AxisBoxes b1 = ardetail::split_boxes(t, b2).kernel;
    out.push_back({"ar_copush_function",
                   ar_square_copush_function(
                       t, random_schwartz_c0ar(t.g1, b1, rng), m1)});
  }
  {
    // No real kernel coordinates for the distribution pushforward.
    TripleC0ar t = make_triple_c0ar(fin, {coin()}, {coin()}, {Q});
    out.push_back({"ar_copush_dist",
                   ar_square_copush_dist(
                       t, random_dist_c0ar(t.g2, b2, rng), m1)});
  }
  {
    // No real quotient coordinates so the dual kernel stays R-free.
    TripleC0ar t = make_triple_c0ar(fin, {coin()}, {coin()}, {K});
    out.push_back({"ar_copull_dist",
                   ar_square_copull_dist(
                       t, random_dist_c0ar(t.g2, b2, rng), m1)});
  }
  return out;
}

}  // namespace alharm
