#pragma once

// Mixed-radix discrete Fourier transform for tables indexed by products of
// cyclic groups. Composite lengths split by Cooley-Tukey; prime lengths fall
// back to the direct sum with a precomputed root table, which is fine at
// desk scale.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace alharm {

using cx = std::complex<double>;

namespace detail {

inline int smallest_prime_factor(int n) {
  for (int p = 2; 1LL * p * p <= n; ++p)
    if (n % p == 0) return p;
  return n;
}

inline std::vector<cx> unit_roots(int n, int sign) {
  const double tau = 2.0 * std::numbers::pi;
  std::vector<cx> w(n);
  for (int j = 0; j < n; ++j) {
    double ang = sign * tau * j / n;
    w[j] = cx(std::cos(ang), std::sin(ang));
  }
  return w;
}

// In-place length-n DFT of buf with kernel exp(sign * 2*pi*i * jk / n).
inline void dft_line(std::vector<cx>& buf, int n, int sign) {
  if (n <= 1) return;
  int p = smallest_prime_factor(n);
  if (p == n) {
    std::vector<cx> w = unit_roots(n, sign);
    std::vector<cx> out(n);
    for (int k = 0; k < n; ++k) {
      cx acc(0.0, 0.0);
      long long jk = 0;
      for (int j = 0; j < n; ++j) {
        acc += buf[j] * w[jk];
        jk += k;
        if (jk >= n) jk -= n;
      }
      out[k] = acc;
    }
    buf.swap(out);
    return;
  }
  int m = n / p;
  std::vector<cx> w = unit_roots(n, sign);
  std::vector<std::vector<cx>> part(p, std::vector<cx>(m));
  for (int r = 0; r < p; ++r)
    for (int q = 0; q < m; ++q) part[r][q] = buf[1LL * q * p + r];
  for (int r = 0; r < p; ++r) dft_line(part[r], m, sign);
  for (int k = 0; k < n; ++k) {
    cx acc(0.0, 0.0);
    for (int r = 0; r < p; ++r)
      acc += part[r][k % m] * w[(1LL * r * k) % n];
    buf[k] = acc;
  }
}

}  // namespace detail

// Applies the one-dimensional DFT along every axis of a mixed-radix table.
// Index convention: flat index = x1 + d1*(x2 + d2*(x3 + ...)).
// sign = -1 gives the conjugated kernel exp(-2*pi*i*x*chi/d) on each axis.
inline void dft_mixed(std::vector<cx>& table, const std::vector<long long>& moduli,
                      int sign) {
  long long total = 1;
  for (long long d : moduli) total *= d;
  if (static_cast<long long>(table.size()) != total) return;
  std::vector<cx> line;
  long long stride = 1;
  for (long long dl : moduli) {
    int d = static_cast<int>(dl);
    long long block = stride * d;
    line.resize(d);
    for (long long base = 0; base < total; base += block)
      for (long long off = 0; off < stride; ++off) {
        for (int x = 0; x < d; ++x) line[x] = table[base + off + stride * x];
        detail::dft_line(line, d, sign);
        for (int x = 0; x < d; ++x) table[base + off + stride * x] = line[x];
      }
    stride = block;
  }
}

}  // namespace alharm
