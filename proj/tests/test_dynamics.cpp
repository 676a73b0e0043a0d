#include <cmath>
#include <numbers>
#include <sstream>

#include "circadia/dynamics.hpp"
#include "circadia/errors.hpp"
#include "doctest.h"

using namespace circadia;

namespace {

constexpr double kPi = std::numbers::pi;

// Least-squares slope of log v against log k.
double log_slope(const std::vector<double>& k, const std::vector<double>& v) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k.size(); ++i) mx += std::log(k[i]), my += std::log(v[i]);
  mx /= k.size();
  my /= k.size();
  double a = 0, b = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    a += (std::log(k[i]) - mx) * (std::log(v[i]) - my);
    b += (std::log(k[i]) - mx) * (std::log(k[i]) - mx);
  }
  return a / b;
}

double final_x(const ReducedCircuit& rc, const PotentialModel& p, PhaseState s, double t_end, double dt) {
  IntegrateOptions o;
  o.dt = dt;
  o.scheme = Integrator::StormerVerlet;
  o.energy_tolerance = 1e-2;
  o.record_every = 1 << 20;
  return integrate(rc, p, s, t_end, o).states.back().x;
}

}  // namespace

TEST_CASE("without junction the motion is harmonic and the energy is conserved") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 10.0, 0.0);
  const PotentialModel c = PotentialModel::cosine();
  const PhaseState s0{1.0, 0.3, -0.2, 0.5};
  IntegrateOptions o;
  o.energy_tolerance = 1e-10;
  const TrajectoryRecord r = integrate(rc, c, s0, 200.0, o);
  CHECK(r.max_relative_energy_error < 1e-10);
  CHECK(r.energy.front() == doctest::Approx(regularized_energy(rc, c, s0)));
}

TEST_CASE("zero kappa freezes x and leaves a unit oscillator") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.0, 10.0, 5.0);
  const PhaseState s0{0.7, 0.4, 0.3, -0.2};
  IntegrateOptions o;
  o.dt = 2 * kPi / 400;
  const TrajectoryRecord r = integrate(rc, PotentialModel::cosine(), s0, 2 * kPi, o);
  for (std::size_t i = 0; i < r.states.size(); ++i) {
    const double t = r.times[i];
    CHECK(r.states[i].x == s0.x);
    CHECK(std::abs(r.states[i].y - (s0.y * std::cos(t) + s0.py * std::sin(t))) < 1e-6);
    CHECK(std::abs(r.states[i].py - (s0.py * std::cos(t) - s0.y * std::sin(t))) < 1e-6);
  }
  CHECK(std::abs(r.times.back() - 2 * kPi) < 1e-12);
  CHECK(std::abs(r.states.back().y - s0.y) < 1e-6);
  CHECK_THROWS_AS(integrate(rc, PotentialModel::polynomial_even({0.0, 0.5}), s0, 1.0), ValidationError);
}

TEST_CASE("Stormer-Verlet halves its error by four when the step halves") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.3, 1.0, 0.5);
  const PotentialModel c = PotentialModel::cosine();
  const PhaseState s0{1.0, 0.0, 0.3 * slow_eta(rc, c, 1.0) + 0.1, 0.0};
  const double t_end = 20.0, dt = 0.04;
  const double a = final_x(rc, c, s0, t_end, dt), b = final_x(rc, c, s0, t_end, dt / 2),
               d = final_x(rc, c, s0, t_end, dt / 4);
  CHECK((a - b) / (b - d) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("integration is time reversible") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.3, 1.0, 0.5);
  const PotentialModel c = PotentialModel::cosine();
  const PhaseState s0{0.8, 0.2, 0.1, -0.3};
  const TrajectoryRecord fwd = integrate(rc, c, s0, 30.0);
  PhaseState back = fwd.states.back();
  back.px = -back.px;
  back.py = -back.py;
  const PhaseState end = integrate(rc, c, back, 30.0).states.back();
  CHECK(std::abs(end.x - s0.x) < 1e-8);
  CHECK(std::abs(end.y - s0.y) < 1e-8);
  CHECK(std::abs(-end.px - s0.px) < 1e-8);
  CHECK(std::abs(-end.py - s0.py) < 1e-8);
}

TEST_CASE("step limits and energy drift guard") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.3, 1.0, 0.5);
  const PotentialModel c = PotentialModel::cosine();
  const PhaseState s0{1.0, 0.0, 0.5, 0.0};
  IntegrateOptions o;
  o.dt = 0.06;
  CHECK_THROWS_AS(integrate(rc, c, s0, 1.0, o), ValidationError);
  o.dt = 0.0;
  CHECK_THROWS_AS(integrate(rc, c, s0, 1.0, o), ValidationError);
  o.dt = 0.05;
  o.scheme = Integrator::StormerVerlet;
  o.energy_tolerance = 1e-12;
  try {
    integrate(rc, c, s0, 10.0, o);
    FAIL("expected StepTooLarge");
  } catch (const StepTooLarge& e) {
    CHECK(e.suggested_dt() > 0.0);
    CHECK(e.suggested_dt() < 0.05);
  }
}

TEST_CASE("slow manifold residuals scale as powers of kappa") {
  const PotentialModel c = PotentialModel::cosine();
  const std::vector<double> ks{0.2, 0.1, 0.05};
  std::vector<double> ys, ps;
  for (double k : ks) {
    const SlowManifoldResidual s = slow_manifold_residual(ReducedCircuit::from_ratios(k, 1.0, 0.5), c, 1.0);
    ys.push_back(s.max_y_residual);
    ps.push_back(s.max_py);
    CHECK(s.transient == doctest::Approx(10 * kPi));
  }
  CHECK(log_slope(ks, ps) == doctest::Approx(3.0).epsilon(0.5 / 3.0));
  CHECK(log_slope(ks, ys) >= 2.0);
}

TEST_CASE("without junction the slow manifold is exact") {
  const SlowManifoldResidual s =
      slow_manifold_residual(ReducedCircuit::from_ratios(0.1, 1.0, 0.0), PotentialModel::cosine(), 1.0);
  CHECK(s.max_y_residual < 1e-12);
  CHECK(s.max_py < 1e-12);
}

TEST_CASE("full dynamics shadows the reduced dynamics") {
  const PotentialModel c = PotentialModel::cosine();
  const ShadowComparison sh = shadow_reduced_dynamics(ReducedCircuit::from_ratios(0.1, 1.0, 0.5), c, 1.0, 0.0);
  CHECK(sh.max_deviation < 0.05);
  CHECK(sh.slow_time_end == doctest::Approx(0.01 * sh.t_end));
  CHECK(sh.times.size() == sh.x_full.size());
  CHECK(sh.x_full.size() == sh.x_reduced.size());
  CHECK_THROWS_AS(shadow_reduced_dynamics(ReducedCircuit::from_ratios(0.1, 1.0, 1.2), c, 1.0, 0.0),
                  MultivaluedRegime);
}

TEST_CASE("trajectory export") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.3, 1.0, 0.5);
  IntegrateOptions o;
  o.record_every = 10;
  const TrajectoryRecord r = integrate(rc, PotentialModel::cosine(), {1.0, 0.0, 0.3, 0.0}, 1.0, o);
  CHECK(r.times.back() == doctest::Approx(1.0));
  std::istringstream in(r.to_csv());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("t[1/omega'_r],x[Phi_C],p_x[1],y[kappa Phi_C],p_y[1],E[hbar omega'_r]", 0) == 0);
  CHECK(r.meta()["scheme"] == to_string(Integrator::Yoshida6));
}
