#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace circadia {

struct Resonance {
  double inv_L = 0.0;  // residue 1 / L_k
  double omega = 0.0;  // Omega_k
};

/// Lossless one-port admittance
///   Y(i w) = i [c_inf w - 1 / (l_zero w) + sum_k w / (L_k (Omega_k^2 - w^2))].
struct FosterModel {
  double c_inf = 0.0;
  std::optional<double> l_zero;
  std::vector<Resonance> resonances;

  /// Nonnegative residues and c_inf, positive l_zero, strictly increasing Omega_k.
  void validate() const;
  nlohmann::json to_json() const;
  static FosterModel from_json(const nlohmann::json& j);
};

/// Im Y(i w). Throws PoleProximity within a relative margin of 1e-9 of a pole.
double susceptance(const FosterModel& m, double omega);
std::vector<std::complex<double>> eval_admittance(const FosterModel& m, const std::vector<double>& omegas);
/// d(Im Y)/dw, positive wherever defined.
double susceptance_slope(const FosterModel& m, double omega);

struct FosterSample {
  double omega = 0.0;
  double im_y = 0.0;
  double re_y = 0.0;
};

struct FitReport {
  double rms = 0.0;
  std::vector<std::string> parameters;
  std::vector<double> values;
  /// sqrt of the diagonal of sigma^2 (J^T J)^-1.
  std::vector<double> standard_errors;
  /// Brackets (lo, hi) of the detected finite poles, flattened.
  std::vector<double> asymptotes;
  bool l_zero_detected = false;
  int sweeps = 0;

  nlohmann::json to_json() const;
};

struct FosterFit {
  FosterModel model;
  FitReport report;
};

/// Least-squares fit of Im Y. Poles are located from the sign changes of the
/// sampled susceptance and refined by golden-section search with the linear
/// coefficients solved exactly for each trial (variable projection), then
/// polished by Gauss-Newton. `with_l_zero` unset detects the w -> 0 pole
/// from the sign of the lowest sample.
FosterFit fit_foster(std::vector<FosterSample> samples, int n_resonances,
                     std::optional<bool> with_l_zero = std::nullopt);

/// Columns omega, ImY and optionally ReY. A non-numeric first line is a header
/// and selects the columns by name; rows with ImY = nan (pole markers) are skipped.
std::vector<FosterSample> read_foster_csv(const std::string& path);

}  // namespace circadia
