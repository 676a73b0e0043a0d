#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace circadia {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or non-physical input. `field()` names the offending parameter.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A physical regime the requested operation refuses to handle.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// beta is at or above the invertibility threshold; the consistency
/// equation has several branches and no single effective potential exists.
class MultivaluedRegime : public RegimeError {
 public:
  MultivaluedRegime(double beta, double beta_crit)
      : RegimeError("multivalued regime: beta=" + std::to_string(beta) +
                    " >= beta_crit=" + std::to_string(beta_crit)),
        beta_(beta),
        beta_crit_(beta_crit) {}
  double beta() const noexcept { return beta_; }
  double beta_crit() const noexcept { return beta_crit_; }

 private:
  double beta_;
  double beta_crit_;
};

/// Gate charge inside |n_g - 1/2| <= kappa^2.
class DegenerateFastGround : public RegimeError {
 public:
  using RegimeError::RegimeError;
};

/// Iterative or bracketing numerics that did not reach their contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& what, std::vector<double> best_residuals)
      : NumericalError(what), best_residuals_(std::move(best_residuals)) {}
  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

class UnresolvedCluster : public NumericalError {
 public:
  UnresolvedCluster(double lo, double hi)
      : NumericalError("unresolved cluster of roots in [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]"),
        lo_(lo),
        hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

class GridTooNarrow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepTooLarge : public NumericalError {
 public:
  StepTooLarge(const std::string& what, double suggested_dt)
      : NumericalError(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Evaluation of a tabulated potential outside its support.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

/// Admittance evaluated too close to one of its poles.
class PoleProximity : public Error {
 public:
  using Error::Error;
};

/// Number of detected admittance poles differs from the requested model.
class StructuralMismatch : public Error {
 public:
  StructuralMismatch(const std::string& what, std::vector<double> asymptotes)
      : Error(what), asymptotes_(std::move(asymptotes)) {}
  const std::vector<double>& asymptotes() const noexcept { return asymptotes_; }

 private:
  std::vector<double> asymptotes_;
};

}  // namespace circadia
