#pragma once

// Gauss quadrature rules used for re-expanding translated Hermite data and
// as independent oracles in tests. Nodes are found by Newton iteration on
// the orthogonal-polynomial recurrences, so no tables are hardcoded.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace alharm {

// Weight exp(-t^2) on the whole line. Nodes in x, weights in w.
inline void gauss_hermite(int n, std::vector<double>& x,
                          std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need n >= 1");
  const double eps = 3e-14;
  const double pi4 = std::pow(M_PI, -0.25);
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  int m = (n + 1) / 2;
  double z = 0.0, pp = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(double(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    for (int it = 0; it < 100; ++it) {
      double p1 = pi4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

// Weight 1 on [a, b].
inline void gauss_legendre(int n, double a, double b, std::vector<double>& x,
                           std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  const double eps = 3e-14;
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  int m = (n + 1) / 2;
  double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    x[i] = xm - xl * z;
    x[n - 1 - i] = xm + xl * z;
    w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace alharm
