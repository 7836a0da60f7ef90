// SPDX-License-Identifier: Apache-2.0

#include "molt/desc/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace molt::desc {

std::vector<double> real_sph_harm(int l_max,
                                  const std::array<double, 3>& dir) {
  if (l_max < 0) throw std::invalid_argument("real_sph_harm: l_max < 0");
  const double r =
      std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  double ct = 1.0, st = 0.0, cphi = 1.0, sphi = 0.0;
  if (r > 0.0) {
    ct = dir[2] / r;
    const double rxy = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1]);
    st = rxy / r;
    if (rxy > 0.0) {
      cphi = dir[0] / rxy;
      sphi = dir[1] / rxy;
    }
  }

  const int n_lm = (l_max + 1) * (l_max + 1);
  std::vector<double> out(static_cast<std::size_t>(n_lm), 0.0);

  // Fully normalized associated Legendre values P̄_lm(cos θ), built per m
  // by the standard stable three-term recurrence.
  std::vector<double> plm(
      static_cast<std::size_t>((l_max + 1) * (l_max + 2) / 2), 0.0);
  auto P = [l_max, &plm](int l, int m) -> double& {
    return plm[static_cast<std::size_t>(l * (l + 1) / 2 + m)];
  };

  P(0, 0) = std::sqrt(1.0 / (4.0 * std::numbers::pi));
  for (int m = 1; m <= l_max; ++m) {
    P(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * P(m - 1, m - 1);
  }
  for (int m = 0; m < l_max; ++m) {
    P(m + 1, m) = std::sqrt(2.0 * m + 3.0) * ct * P(m, m);
  }
  for (int m = 0; m <= l_max; ++m) {
    for (int l = m + 2; l <= l_max; ++l) {
      const double a =
          std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      const double b = std::sqrt(
          ((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      P(l, m) = a * (ct * P(l - 1, m) - b * P(l - 2, m));
    }
  }

  // cos(mφ), sin(mφ) by recurrence.
  std::vector<double> cm(static_cast<std::size_t>(l_max + 1), 1.0);
  std::vector<double> sm(static_cast<std::size_t>(l_max + 1), 0.0);
  for (int m = 1; m <= l_max; ++m) {
    cm[m] = cm[m - 1] * cphi - sm[m - 1] * sphi;
    sm[m] = sm[m - 1] * cphi + cm[m - 1] * sphi;
  }

  const double sqrt2 = std::numbers::sqrt2;
  for (int l = 0; l <= l_max; ++l) {
    out[static_cast<std::size_t>(l * l + l)] = P(l, 0);
    for (int m = 1; m <= l; ++m) {
      // Condon-Shortley phase removed so real harmonics follow the
      // (-1)^m-free convention used for descriptor bases.
      const double p = ((m % 2) ? -1.0 : 1.0) * P(l, m);
      out[static_cast<std::size_t>(l * l + l + m)] = sqrt2 * p * cm[m];
      out[static_cast<std::size_t>(l * l + l - m)] = sqrt2 * p * sm[m];
    }
  }
  return out;
}

std::vector<double> scaled_bessel_i(int l_max, double x) {
  if (l_max < 0 || x < 0.0) {
    throw std::invalid_argument("scaled_bessel_i: bad arguments");
  }
  std::vector<double> out(static_cast<std::size_t>(l_max + 1), 0.0);

  if (x < 30.0) {
    // Positive-term series i_l(x) = sum_k x^(l+2k) / (2^k k! (2l+2k+1)!!),
    // folded with exp(-x) term by term so nothing overflows.
    const double ex = std::exp(-x);
    for (int l = 0; l <= l_max; ++l) {
      double term = ex;
      for (int j = 1; j <= l; ++j) term *= x / (2.0 * j + 1.0);
      // term = exp(-x) x^l / (2l+1)!!
      double acc = term;
      for (int k = 1; k < 400; ++k) {
        term *= x * x / (2.0 * k * (2.0 * l + 2.0 * k + 1.0));
        acc += term;
        if (term < acc * 1e-17) break;
      }
      out[static_cast<std::size_t>(l)] = acc;
    }
    return out;
  }

  // Large x: closed forms for l = 0,1 followed by the upward recurrence
  // ĩ_{l+1} = ĩ_{l-1} - (2l+1)/x ĩ_l, stable here since l_max << x.
  const double e2 = std::exp(-2.0 * x);
  out[0] = (1.0 - e2) / (2.0 * x);
  if (l_max >= 1) {
    out[1] = ((x - 1.0) + (x + 1.0) * e2) / (2.0 * x * x);
  }
  for (int l = 1; l < l_max; ++l) {
    out[static_cast<std::size_t>(l + 1)] =
        out[static_cast<std::size_t>(l - 1)] -
        ((2.0 * l + 1.0) / x) * out[static_cast<std::size_t>(l)];
  }
  return out;
}

Quadrature gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double xl = 0.5 * (b - a);
    const double xm = 0.5 * (b + a);
    q.nodes[static_cast<std::size_t>(i)] = xm - xl * x;
    q.nodes[static_cast<std::size_t>(n - 1 - i)] = xm + xl * x;
    const double w = 2.0 * xl / ((1.0 - x * x) * pp * pp);
    q.weights[static_cast<std::size_t>(i)] = w;
    q.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return q;
}

}  // namespace molt::desc
