// SPDX-License-Identifier: Apache-2.0
//
// Reduced Evans problem for the controlled pulse.
//
// With the shifted spectral parameter z = lambda - l'(0), point eigenvalues
// other than the translation mode are the zeros of
//
//   Phi(z) = alpha + beta sqrt(1 + z + l'(0)) - R(z),
//
// where R(z) = <(L_f - z)^{-1}(-v_p^2), v_p> is the fast inner product,
// L_f = d^2/dxi^2 - 1 + 3 sech^2(xi/2). R splits into a part from the two
// even bound states of L_f (poles at 5/4 and -3/4) and a continuum integral
// over the spectral ray (-inf, -1].

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "pulsectl/model.hpp"

namespace pulsectl {

using cplx = std::complex<double>;

inline constexpr double kPoleHigh = 1.25;   ///< even bound state of L_f
inline constexpr double kPoleLow = -0.75;   ///< second even bound state
inline constexpr double kDefaultQuadTol = 1e-10;

struct RValue {
  cplx r_d;
  cplx r_c;
  cplx total;
  double quad_error = 0.0;
};

struct ContinuumValue {
  cplx value;
  double error = 0.0;
};

/// Bound-state part; throws PoleAtInput at z = 5/4 or z = -3/4.
cplx r_discrete(cplx z);

/// Continuum part; throws EssentialRay for real z <= -1, QuadratureFailure when tol is unreachable.
ContinuumValue r_continuous(cplx z, double tol = kDefaultQuadTol);

RValue r_total(cplx z, double tol = kDefaultQuadTol);

/// dR/dz, used by Newton refinement.
cplx r_total_derivative(cplx z, double tol = kDefaultQuadTol);

/// alpha + beta * principal sqrt(1 + z + l'(0)); throws BranchCut on the negative real axis.
cplx lhs(cplx z, const ReducedCoefficients& coeffs, double control_slope);

struct EssentialEdges {
  double edge_lambda = -1.0;      ///< -1 + max(l'(0), 0)
  double edge_lambda_hat = -1.0;  ///< -1 + max(0, -l'(0))
};

/// Throws UnstableEssential when control_slope >= 1.
EssentialEdges essential_edges(double control_slope);

struct RealInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Rect {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
  bool operator==(const Rect&) const = default;
};

struct RootDiagnostics {
  std::int64_t function_evaluations = 0;
  int winding_total = 0;
  int cells_examined = 0;
};

/// Real zeros of Phi in the window, ascending, each refined to |Phi| <= 1e-12
/// (or to machine resolution of z when that is coarser).
std::vector<double> find_real_roots(const ReducedCoefficients& coeffs, double control_slope,
                                    RealInterval window);

/// All zeros of Phi inside rect by argument principle plus quadrisection,
/// sorted by (Re desc, Im asc) and closed under conjugation.
std::vector<cplx> find_complex_roots(const ReducedCoefficients& coeffs, double control_slope,
                                     Rect rect, RootDiagnostics* diagnostics = nullptr);

/// Number of zeros of Phi inside rect, counted by winding only.
int count_roots(const ReducedCoefficients& coeffs, double control_slope, Rect rect,
                RootDiagnostics* diagnostics = nullptr);

/// Default search rectangle in the z-plane; no zero of Phi lies right of or
/// above it. Requires f'(u*) != 0.
Rect default_search_window(const ReducedCoefficients& coeffs, double control_slope);

enum class Verdict { Stable, NeutrallyStable, Unstable };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct SpectrumReport {
  std::vector<cplx> eigenvalues;  ///< lambda (unshifted), including the translation mode
  cplx translation_eigenvalue;
  double essential_edge = -1.0;      ///< in lambda
  double essential_edge_hat = -1.0;  ///< in z
  Verdict verdict = Verdict::Unstable;
  double max_real_part = 0.0;
  Rect search_window;  ///< z-plane; empty when f'(u*) = 0
  RootDiagnostics diagnostics;
};

SpectrumReport assemble_spectrum(const ModelParams& params);

/// Verdict only, skipping root isolation: counts zeros with Re lambda >= 0.
/// Agrees with assemble_spectrum(params).verdict.
Verdict stability_verdict(const ModelParams& params, RootDiagnostics* diagnostics = nullptr);

}  // namespace pulsectl
