// SPDX-License-Identifier: Apache-2.0
//
// Time integration of the controlled toy model on [-L, L] with zero-flux
// boundaries. Diffusion is implicit, reaction and the linear control
// l(s) = l'(0) s explicit. Perturbation growth rates are compared with the
// spectral prediction.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pulsectl/model.hpp"

namespace pulsectl {

namespace detail {
class TridiagonalFactor;
}

enum class PerturbationShape { EvenBump, Random };

std::string to_string(PerturbationShape s);
PerturbationShape perturbation_shape_from_string(const std::string& s);

struct SimConfig {
  PowerLawModel model;
  ModelParams params;  ///< eps and control slope are read from here
  double half_length = 10.0;
  double dx = 0.0;  ///< 0: eps / 4
  double dt = 0.0;  ///< 0: eps / 40
  double t_end = 30.0;
  double eta = 1e-4;
  PerturbationShape shape = PerturbationShape::EvenBump;
  std::uint64_t seed = 0;
  std::size_t record_every = 0;  ///< 0: about every 0.01 time units

  /// Power-law model matching `params` at u*.
  static SimConfig from_params(const ModelParams& params);

  double grid_dx() const;  ///< effective spacing, L / ceil(L / dx)
  double grid_dt() const;
  std::size_t half_intervals() const;
  std::size_t nodes() const { return 2 * half_intervals() + 1; }
  double x(std::size_t k) const;
  std::size_t recording_stride() const;

  /// Throws InvalidParameter when the grid under-resolves the core, the
  /// domain truncates the pulse, or model and params disagree at u*.
  void validate() const;
};

struct SimState {
  std::vector<double> u;
  std::vector<double> v;
};

struct GrowthFit {
  double rate = 0.0;
  double r2 = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
};

enum class SimExit { Grew, Decayed, ReachedEnd };

std::string to_string(SimExit e);

struct SimTrace {
  std::vector<double> times;
  std::vector<double> deviation_norms;
  double fitted_rate = 0.0;
  double fit_r2 = 0.0;
  double fit_t_begin = 0.0;
  double fit_t_end = 0.0;
  SimExit exit = SimExit::ReachedEnd;
  double relaxation_residual = 0.0;  ///< max |rhs| of the refined profile
  int relaxation_iterations = 0;
};

/// sqrt(sum (du^2 + eps dv^2) dx).
double deviation_norm(const SimState& a, const SimState& b, double eps, double dx);

/// Least-squares slope of log(norm) over the longest run of samples inside
/// [lo, hi], minus its first quarter (transient). Oscillating traces are
/// fitted through their local maxima.
GrowthFit fit_growth(const std::vector<double>& times, const std::vector<double>& norms, double lo,
                     double hi);

class PulseSimulation {
public:
  /// Builds the grid, refines the stationary profile and factors the
  /// implicit diffusion operators.
  explicit PulseSimulation(SimConfig config);

  const SimConfig& config() const noexcept { return config_; }
  /// Leading-order profile sampled on the grid.
  SimState leading_order() const;
  /// Discrete stationary state; also the control reference.
  const SimState& reference() const noexcept { return reference_; }
  double relaxation_residual() const noexcept { return relax_residual_; }
  int relaxation_iterations() const noexcept { return relax_iterations_; }

  /// Exact discrete right-hand side; throws NumericalBlowup on non-finite input.
  SimState rhs(const SimState& s) const;
  /// l'(0) (v - v_ref) pointwise.
  std::vector<double> control_term(const SimState& s) const;
  /// One IMEX Euler step of length config().grid_dt().
  void step(SimState& s, double t = 0.0) const;
  /// reference + eta * shape.
  SimState perturbed() const;
  double deviation(const SimState& s) const;

  SimTrace run() const;

private:
  void relax();

  SimConfig config_;
  double dx_ = 0.0;
  double dt_ = 0.0;
  std::size_t n_ = 0;
  double log_prefactor_ = 0.0;  ///< log(phi^2 u*^(1 - delta))
  SimState reference_;
  double relax_residual_ = 0.0;
  int relax_iterations_ = 0;
  std::shared_ptr<const detail::TridiagonalFactor> implicit_u_;
  std::shared_ptr<const detail::TridiagonalFactor> implicit_v_;
};

/// PulseSimulation(config).run().
SimTrace run(const SimConfig& config);

}  // namespace pulsectl
