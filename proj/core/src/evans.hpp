// SPDX-License-Identifier: Apache-2.0
//
// Internal evaluation kernels shared by spectral.cpp and roots.cpp.

#pragma once

#include <complex>
#include <cstdint>

#include "pulsectl/model.hpp"

namespace pulsectl::detail {

using cplx = std::complex<double>;

/// pi^2 / 8192 * 81: the bound-state weight shared by both poles.
inline constexpr double kBoundWeight = 81.0 * 9.869604401089358 / 8192.0;
/// 9 pi / 16: prefactor of the continuum integral.
inline constexpr double kContinuumWeight = 9.0 * 3.141592653589793 / 16.0;
/// Truncation point of the kappa integral.
inline constexpr double kKappaMax = 12.0;

struct ContinuumSums {
  cplx i1;             ///< int_0^kmax w(k) / (z + 1 + k^2) dk
  cplx i2;             ///< int_0^kmax w(k) / (z + 1 + k^2)^2 dk
  double error = 0.0;  ///< error estimate for i1, tail included
};

/// Continuum integrals with the i1 error driven below abs_tol.
/// Throws EssentialRay / QuadratureFailure.
ContinuumSums continuum_integrals(cplx z, double abs_tol);

/// g(z) = (z - 5/4)(z + 3/4) Phi(z): Phi without its two poles.
struct EvansSample {
  cplx g;
  cplx dg;
  cplx phi;  ///< may be infinite at the poles
};

class EvansFunction {
public:
  EvansFunction(const ReducedCoefficients& coeffs, double control_slope,
                double quad_tol = 1e-12)
      : alpha_(coeffs.alpha), beta_(coeffs.beta), slope_(control_slope), tol_(quad_tol) {}

  EvansSample operator()(cplx z) const;

  std::int64_t evaluations() const noexcept { return evals_; }

private:
  double alpha_, beta_, slope_, tol_;
  mutable std::int64_t evals_ = 0;
};

}  // namespace pulsectl::detail
