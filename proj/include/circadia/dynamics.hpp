#pragma once

#include <string>
#include <vector>

#include "circadia/params.hpp"
#include "circadia/potentials.hpp"
#include "json.hpp"

namespace circadia {

/// Regularized circuit in units of hbar omega'_r and time 1/omega'_r:
///   h = kappa^2 p_x^2 / 2 + p_y^2 / 2 + (y - kappa x)^2 / 2 + kappa^2 (lambdaJ / xi) u(y / (kappa sqrt(xi)))
struct PhaseState {
  double x = 0.0;
  double px = 0.0;
  double y = 0.0;
  double py = 0.0;
};

enum class Integrator {
  StormerVerlet,  // order 2
  Yoshida6,       // order 6 composition of Stormer-Verlet
};
std::string to_string(Integrator i);

struct IntegrateOptions {
  double dt = 0.02;
  Integrator scheme = Integrator::Yoshida6;
  /// Keep every n-th step in the record (the last step is always kept).
  int record_every = 1;
  /// Largest accepted |E(t) - E(0)| / |E(0)|.
  double energy_tolerance = 1e-8;
};

struct TrajectoryRecord {
  double kappa = 0.0;
  double xi = 0.0;
  double lambdaJ = 0.0;
  double dt = 0.0;
  Integrator scheme = Integrator::Yoshida6;
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<double> energy;
  double max_relative_energy_error = 0.0;

  /// Columns t, x, p_x, y, p_y, E.
  std::string to_csv() const;
  nlohmann::json meta() const;
};

double regularized_energy(const ReducedCircuit& rc, const PotentialModel& p, const PhaseState& s);

/// Symplectic integration of the regularized equations of motion. dt <= 0.05.
/// kappa = 0 is accepted only for potentials with bounded slope, where the
/// junction term vanishes and (y, p_y) is a unit oscillator.
/// Energy error above the tolerance throws StepTooLarge with a suggested dt.
TrajectoryRecord integrate(const ReducedCircuit& rc, const PotentialModel& p, PhaseState s0, double t_end,
                           const IntegrateOptions& opt = {});

/// Slow-manifold coordinate eta_1(x): x = eta_1 + (lambdaJ / xi^(3/2)) u'(eta_1 / sqrt(xi)).
double slow_eta(const ReducedCircuit& rc, const PotentialModel& p, double x);

/// Period 2 pi / (kappa^2 sqrt(V''(x_min))) of the harmonic slow motion, V in
/// hbar omega_C units; 2 pi / kappa^2 when V has no curvature.
double default_slow_period(const ReducedCircuit& rc, const PotentialModel& p);

struct SlowManifoldResidual {
  double max_y_residual = 0.0;   // max |y - kappa eta_1(x)|
  double max_py = 0.0;           // max |p_y|
  double transient = 0.0;        // excluded initial time
  double t_end = 0.0;
  double max_relative_energy_error = 0.0;
};

/// Starts on the manifold (y = kappa eta_1(x0), p_x = p_y = 0) and measures the
/// residuals after a transient of five fast periods. t_end <= 0 selects two
/// slow periods.
SlowManifoldResidual slow_manifold_residual(const ReducedCircuit& rc, const PotentialModel& p, double x0,
                                            double t_end = 0.0, const IntegrateOptions& opt = {});

struct ShadowComparison {
  double max_deviation = 0.0;  // max |x_full - x_reduced|
  double t_end = 0.0;
  double slow_time_end = 0.0;  // kappa^2 t_end
  std::vector<double> times;
  std::vector<double> x_full;
  std::vector<double> x_reduced;
};

/// Full trajectory against the reduced dynamics kappa^2 [p_x^2 / 2 + V(x)].
/// Refuses beta >= beta_crit with MultivaluedRegime. t_end <= 0 selects one
/// slow period.
ShadowComparison shadow_reduced_dynamics(const ReducedCircuit& rc, const PotentialModel& p, double x0,
                                         double px0, double t_end = 0.0, const IntegrateOptions& opt = {});

}  // namespace circadia
