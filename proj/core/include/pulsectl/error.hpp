// SPDX-License-Identifier: Apache-2.0
//
// Error types shared by every pulsectl module.
//
// Two families matter to callers: DomainError (the inputs describe an
// inadmissible problem, e.g. an unstable essential spectrum) and
// NumericalError (the inputs are fine but a solver could not deliver the
// requested accuracy). The command-line tool maps them to exit codes 1 and 2.

#pragma once

#include <stdexcept>
#include <string>

namespace pulsectl {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

// --- domain errors -----------------------------------------------------------

class InvalidParameter : public DomainError {
public:
  using DomainError::DomainError;
};

/// f'(u*) = 0: the (alpha, beta) reduction of the Evans equation does not exist.
class DegenerateControl : public DomainError {
public:
  using DomainError::DomainError;
};

/// Control slope >= 1 pushes the essential spectrum into the right half plane.
class UnstableEssential : public DomainError {
public:
  using DomainError::DomainError;
};

class PoleAtInput : public DomainError {
public:
  PoleAtInput(double pole, const std::string& what) : DomainError(what), pole_(pole) {}
  double pole() const noexcept { return pole_; }

private:
  double pole_;
};

/// Spectral parameter on the real cut where the continuum integral is singular.
class EssentialRay : public DomainError {
public:
  using DomainError::DomainError;
};

/// Argument of the principal square root on the negative real axis.
class BranchCut : public DomainError {
public:
  using DomainError::DomainError;
};

class OutOfContinuum : public DomainError {
public:
  using DomainError::DomainError;
};

/// min_control_gain called for a parameter point the classifier marks uncontrollable.
class NotControllable : public DomainError {
public:
  using DomainError::DomainError;
};

// --- numerical errors --------------------------------------------------------

class QuadratureFailure : public NumericalError {
public:
  QuadratureFailure(double achieved, const std::string& what)
      : NumericalError(what), achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

private:
  double achieved_;
};

class RootIsolationFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NearEigenvalue : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class FloorInsufficient : public NumericalError {
public:
  FloorInsufficient(double floor, const std::string& what)
      : NumericalError(what), floor_(floor) {}
  double floor() const noexcept { return floor_; }

private:
  double floor_;
};

class NumericalBlowup : public NumericalError {
public:
  NumericalBlowup(double last_finite_time, const std::string& what)
      : NumericalError(what), last_finite_time_(last_finite_time) {}
  double last_finite_time() const noexcept { return last_finite_time_; }

private:
  double last_finite_time_;
};

/// Newton refinement of the stationary profile did not converge.
class RelaxationFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace pulsectl
