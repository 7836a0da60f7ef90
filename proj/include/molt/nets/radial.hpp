// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_NETS_RADIAL_HPP_
#define MOLT_NETS_RADIAL_HPP_

#include <cmath>
#include <numbers>
#include <vector>

namespace molt::nets {

// 0.5 (cos(pi r / r_cut) + 1) inside the cutoff, 0 outside.
inline double cosine_cutoff(double r, double r_cut) {
  if (r >= r_cut) return 0.0;
  return 0.5 * (std::cos(std::numbers::pi * r / r_cut) + 1.0);
}

// Gaussian radial basis with centers equally spaced on [0, r_cut] and
// width set by the center spacing: phi_k(r) = exp(-gamma (r - mu_k)^2),
// gamma = 1 / (2 dmu^2).
inline std::vector<double> gaussian_rbf(double r, int n_rbf, double r_cut) {
  std::vector<double> out(static_cast<std::size_t>(n_rbf), 0.0);
  if (n_rbf == 1) {
    out[0] = std::exp(-0.5 * r * r);
    return out;
  }
  const double dmu = r_cut / (n_rbf - 1);
  const double gamma = 1.0 / (2.0 * dmu * dmu);
  for (int k = 0; k < n_rbf; ++k) {
    const double d = r - k * dmu;
    out[static_cast<std::size_t>(k)] = std::exp(-gamma * d * d);
  }
  return out;
}

}  // namespace molt::nets

#endif  // MOLT_NETS_RADIAL_HPP_
