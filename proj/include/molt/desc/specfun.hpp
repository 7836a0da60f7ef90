// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_DESC_SPECFUN_HPP_
#define MOLT_DESC_SPECFUN_HPP_

#include <array>
#include <vector>

namespace molt::desc {

// Orthonormal real spherical harmonics Y_lm evaluated at a direction
// (need not be normalized; the zero vector maps to the +z pole).
// Output is indexed lm = l*l + (m + l) for l = 0..l_max, m = -l..l.
std::vector<double> real_sph_harm(int l_max, const std::array<double, 3>& dir);

// Exponentially scaled modified spherical Bessel functions of the first
// kind: out[l] = exp(-x) * i_l(x) for l = 0..l_max, x >= 0.
std::vector<double> scaled_bessel_i(int l_max, double x);

// Gauss-Legendre nodes and weights on [a, b].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n, double a, double b);

}  // namespace molt::desc

#endif  // MOLT_DESC_SPECFUN_HPP_
