// SPDX-License-Identifier: Apache-2.0
//
// Parameter-plane classification of the controlled pulse: the closed-form
// controllability classes, a numerical sweep of the uncontrolled verdict over
// (f'(u*), nu), tracing of the stability boundary, and minimal stabilising
// control gains.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pulsectl/model.hpp"
#include "pulsectl/spectral.hpp"

namespace pulsectl {

enum class TheoremClass {
  UnstableUncontrollable_fPrimeZero,
  Controllable_fPrimeNegative,
  UnstableUncontrollable_NuLarge,
  Controllable_NuSmall,
};

std::string to_string(TheoremClass c);
TheoremClass theorem_class_from_string(const std::string& s);
bool is_controllable(TheoremClass c);

/// f' = 0; f' < 0; f' > 0 with nu >= 1/u*; f' > 0 with nu < 1/u*.
TheoremClass classify_theorem(const ModelParams& params);

/// Verdict of the spectrum at zero control gain.
Verdict uncontrolled_verdict(const ModelParams& params);

struct GainScanPoint {
  double gain = 0.0;
  Verdict verdict = Verdict::Unstable;
};

struct GainSearchResult {
  double gain = 0.0;          ///< stabilising; gain + tol is not (up to bracket width)
  double unstable_gain = 0.0; ///< destabilising end of the final bracket
  bool monotone = true;       ///< at most one stable/unstable change along the scan
  int transitions = 0;
  int evaluations = 0;
  std::vector<GainScanPoint> scan;
};

inline constexpr double kDefaultGainFloor = -64.0;
inline constexpr double kMaxGainFloor = -4096.0;
inline constexpr double kDefaultGainTol = 1e-3;

/// Least negative stabilising gain: a geometric scan of [gain_floor, 0]
/// locates the first stabilising gain, then bisection refines the bracket.
/// Throws NotControllable for uncontrollable classes and FloorInsufficient
/// when no scanned gain stabilises.
GainSearchResult min_control_gain(const ModelParams& params, double gain_floor = kDefaultGainFloor,
                                  double tol = kDefaultGainTol);

/// As min_control_gain, doubling the floor on FloorInsufficient down to kMaxGainFloor.
GainSearchResult min_control_gain_auto(const ModelParams& params,
                                       double gain_floor = kDefaultGainFloor,
                                       double tol = kDefaultGainTol);

enum class BoundaryTag { Hopf, Fold };

std::string to_string(BoundaryTag t);

struct RegionCell {
  double f_der = 0.0;
  double nu = 0.0;
  TheoremClass theorem_class = TheoremClass::UnstableUncontrollable_fPrimeZero;
  Verdict uncontrolled_verdict = Verdict::Unstable;
  double max_real_part = 0.0;
  std::optional<BoundaryTag> boundary_tag;
  std::optional<double> min_gain;
  std::string error;       ///< non-empty when the uncontrolled spectrum failed
  std::string gain_error;  ///< non-empty when the gain search failed
};

struct SweepSpec {
  double f_der_min = -3.0;
  double f_der_max = 3.0;
  double nu_min = -3.0;
  double nu_max = 3.0;
  std::size_t n_f_der = 121;
  std::size_t n_nu = 121;
  double u_star = 1.0;
  double f_val = 1.0;
  double eps = 0.02;
  unsigned threads = 0;  ///< 0: hardware concurrency
  bool compute_min_gain = true;
  double gain_floor = kDefaultGainFloor;
  double gain_tol = kDefaultGainTol;
  double boundary_tol = 1e-4;

  void validate() const;
  double f_der_at(std::size_t i) const;
  double nu_at(std::size_t j) const;
};

/// Point data for a plane coordinate, using T_o'/T_o = nu - 2 f'/f.
ModelParams plane_params(double f_der, double nu, const SweepSpec& spec);

struct BoundaryCrossing {
  double f_der = 0.0;
  double nu = 0.0;
  BoundaryTag tag = BoundaryTag::Fold;
  std::size_t cell_a = 0;  ///< stable side
  std::size_t cell_b = 0;  ///< unstable side
};

struct Polyline {
  BoundaryTag tag = BoundaryTag::Fold;
  std::vector<std::pair<double, double>> points;  ///< (f_der, nu)
};

struct SweepResult {
  SweepSpec spec;
  std::vector<RegionCell> cells;  ///< row-major: index = i_f * n_nu + j_nu
  std::vector<BoundaryCrossing> crossings;
  std::vector<Polyline> polylines;

  const RegionCell& at(std::size_t i_f, std::size_t j_nu) const {
    return cells[i_f * spec.n_nu + j_nu];
  }
};

/// Closed-form class from the plane coordinates alone (no validity checks).
TheoremClass classify_point(double f_der, double nu, double u_star);

/// Stable set for boundary tracing: not Unstable at zero gain.
bool uncontrolled_stable(const RegionCell& c);

SweepResult sweep_plane(const SweepSpec& spec);

}  // namespace pulsectl
