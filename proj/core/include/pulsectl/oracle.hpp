// SPDX-License-Identifier: Apache-2.0
//
// Brute-force check of the fast inner product R: finite differences for
// L_f = d^2/dxi^2 - 1 + 3 sech^2(xi/2) on a truncated symmetric domain with
// zero boundary values, a direct banded solve for v_in, and trapezoidal
// quadrature. Independent of the closed form in spectral.hpp.

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace pulsectl {

using cplx = std::complex<double>;

struct FastGrid {
  double xi_min = -40.0;
  double xi_max = 40.0;
  std::size_t n = 8001;

  double h() const { return (xi_max - xi_min) / static_cast<double>(n - 1); }
  double xi(std::size_t i) const { return xi_min + h() * static_cast<double>(i); }

  /// Throws InvalidParameter unless the domain is symmetric, resolved and wide enough.
  void validate() const;
};

/// Fast pulse 3/2 sech^2(xi/2).
double fast_pulse(double xi);

/// Centred second differences over the interior nodes (boundary values are zero).
struct FastOperator {
  FastGrid grid;
  std::vector<double> diag;  ///< interior nodes 1 .. n-2
  double off = 0.0;          ///< 1/h^2 on both off-diagonals

  static FastOperator build(const FastGrid& grid);
  std::size_t size() const { return diag.size(); }
  bool is_symmetric() const { return true; }
};

/// k largest eigenvalues, descending, by Sturm-sequence bisection.
std::vector<double> top_eigenvalues(const FastOperator& op, std::size_t k);

/// Solution of (L_f - z) v = -v_p^2 on every grid node (zero at both ends).
/// Throws NearEigenvalue within 1e-6 of a discrete eigenvalue.
std::vector<cplx> solve_vin(cplx z, const FastGrid& grid);

/// Trapezoidal <v_in, v_p> on one grid, second order in h.
cplx r_oracle_raw(cplx z, const FastGrid& grid);

/// Richardson-extrapolated <v_in, v_p> from grid and its half-spacing refinement.
cplx r_oracle(cplx z, const FastGrid& grid = {});

struct IdentityCheck {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Inner products of the closed-form bound states of L_f with v_p and v_p^2,
/// their norms, and the odd mode's orthogonality.
std::vector<IdentityCheck> eigenfunction_identities(const FastGrid& grid = {});

/// <theta(., mu), v_p> with theta from direct ODE integration,
/// theta(0) = 1, theta'(0) = 0. Throws OutOfContinuum for mu >= -1.
cplx theta_inner_product(double mu_hat, const FastGrid& grid = {});

/// Closed-form value -(3 pi / 4) k csch(pi k), k = sqrt(-1 - mu).
double theta_inner_product_exact(double mu_hat);

/// Discrete-mode resolvent identity <v_p^2, psi_i> = (z - z_i) <v_in, psi_i>;
/// returns the absolute residual for mode i in {0, 2}.
double resolvent_identity_residual(cplx z, int mode, const FastGrid& grid = {});

}  // namespace pulsectl
