// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_DESC_SOAP_HPP_
#define MOLT_DESC_SOAP_HPP_

#include <string>
#include <vector>

#include "molt/chem/molecule.hpp"
#include "molt/desc/specfun.hpp"

namespace molt::desc {

struct SoapParams {
  double r_cut = 5.0;   // Angstrom
  int n_max = 7;        // radial functions
  int l_max = 7;        // angular momentum
  double sigma = 1.0;   // Gaussian smearing width, Angstrom
  std::vector<int> species;  // sorted, unique atomic numbers

  void validate() const;
};

// Power-spectrum SOAP. The neighbor density around a center is a sum of
// width-sigma Gaussians at all atom positions within r_cut (the center
// included), each weighted by the cosine cutoff of its distance. The
// density is projected onto an orthonormalized Gaussian-type radial basis
// times real spherical harmonics; the rotation-invariant power spectrum
//   p^{Z1 Z2}_{n n' l} = pi sqrt(8/(2l+1)) sum_m c^{Z1}_{nlm} c^{Z2}_{n'lm}
// is stored once per symmetric entry (Z1 <= Z2; n <= n' when Z1 = Z2).
class SoapCalculator {
 public:
  explicit SoapCalculator(SoapParams params);

  const SoapParams& params() const { return params_; }
  std::size_t dim() const;
  std::vector<std::string> column_labels() const;

  // Expansion coefficients for one center, indexed
  // [species][n][lm] flattened as s * n_max * n_lm + n * n_lm + lm with
  // lm = l*l + l + m.
  std::vector<double> expansion(const chem::Molecule& mol,
                                std::size_t center) const;
  std::size_t n_lm() const;
  std::size_t coeff_index(std::size_t species_idx, int n, int l, int m) const;

  std::vector<double> atomic(const chem::Molecule& mol,
                             std::size_t center) const;
  std::vector<double> molecular(const chem::Molecule& mol) const;

  // g_{nl}(r): orthonormalized radial basis, exposed so an independent
  // quadrature can project onto the same basis.
  double radial_basis(int n, int l, double r) const;

 private:
  std::size_t species_index(int z) const;

  SoapParams params_;
  std::vector<double> alphas_;  // (l_max+1) x n_max
  std::vector<double> betas_;   // (l_max+1) x n_max x n_max
  Quadrature radial_;           // projection grid on [0, r_cut]
  std::vector<double> g_at_nodes_;  // (l, n, node)
};

}  // namespace molt::desc

#endif  // MOLT_DESC_SOAP_HPP_
