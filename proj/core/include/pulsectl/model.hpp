// SPDX-License-Identifier: Apache-2.0
//
// Toy-model data for the singular pulse
//
//   u_t = u_xx - u + (1/eps) f(u)^2 T_o(u) v^2 / 3
//   v_t = eps^2 v_xx - v + f(u) v^2 + l(v - v_p)
//
// The spectral side only needs point data at the pulse amplitude u*
// (ModelParams). The time-domain simulator needs the functions themselves,
// realised here by the power-law family f(u) = phi u^gamma,
// T_o(u) = u*^(1-delta) u^delta.

#pragma once

#include <utility>

namespace pulsectl {

struct ModelParams {
  double u_star = 1.0;         ///< pulse amplitude of u at x = 0
  double f_val = 1.0;          ///< f(u*)
  double f_der = 0.0;          ///< f'(u*)
  double to_log_der = 0.0;     ///< T_o'(u*) / T_o(u*)
  double eps = 0.02;           ///< scale separation
  double control_slope = 0.0;  ///< l'(0)

  /// 2 f'(u*)/f(u*) + T_o'(u*)/T_o(u*).
  double nu() const noexcept { return 2.0 * f_der / f_val + to_log_der; }

  ModelParams with_gain(double gain) const {
    ModelParams p = *this;
    p.control_slope = gain;
    return p;
  }

  /// Throws InvalidParameter / UnstableEssential when an invariant is violated.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

struct ReducedCoefficients {
  double alpha = 0.0;
  double beta = 1.0;
  double nu = 0.0;
};

/// f(u) = phi u^gamma and T_o(u) = u_star^(1-delta) u^delta, so T_o(u*) = u*.
struct PowerLawModel {
  double phi = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  double u_star = 1.0;

  double f(double u) const;
  double f_prime(double u) const;
  double to(double u) const;
  double to_prime(double u) const;

  /// Power law reproducing the point data of `params` (u*, f, f', T_o'/T_o).
  static PowerLawModel from_params(const ModelParams& params);

  /// Point data at u*, completed with eps and control slope.
  ModelParams induced_params(double eps, double control_slope) const;

  void validate() const;

  bool operator==(const PowerLawModel&) const = default;
};

/// u^2 - T_o(u)^2; its nondegenerate positive roots are the admissible pulse amplitudes.
double existence_residual(double u, const PowerLawModel& model);

struct PulseSample {
  double u = 0.0;
  double v = 0.0;
};

/// Leading-order pulse (u* e^{-|x|}, 3/(2 f(u*)) sech^2(x / 2 eps)).
PulseSample pulse_profile(const ModelParams& params, double x);

/// Throws DegenerateControl when f'(u*) = 0.
ReducedCoefficients reduced_coefficients(const ModelParams& params);

/// sech^2 without overflow for large |y|.
double sech2(double y) noexcept;

}  // namespace pulsectl
