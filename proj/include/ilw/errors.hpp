#pragma once

#include <stdexcept>
#include <string>

namespace ilw {

/// Violated precondition (bad parameters, wrong grid, non-Hermitian symbol).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sample count or coefficient count does not match the grid.
class DimensionError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// A numerical procedure failed to converge or produced an inconsistent result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters inside the admissible range but too close to a singular limit.
class RegimeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// L_u + κ is not positive definite: κ is below the admissible threshold.
class KappaTooSmall : public NumericalError {
 public:
  KappaTooSmall(const std::string& what, double kappa, double lambda_min)
      : NumericalError(what), kappa_(kappa), lambda_min_(lambda_min) {}
  double kappa() const noexcept { return kappa_; }
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double kappa_;
  double lambda_min_;
};

/// Time integration produced non-finite values or exceeded the growth cap.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double time, double sup_norm)
      : NumericalError(what), time_(time), sup_norm_(sup_norm) {}
  double time() const noexcept { return time_; }
  double sup_norm() const noexcept { return sup_norm_; }

 private:
  double time_;
  double sup_norm_;
};

}  // namespace ilw
