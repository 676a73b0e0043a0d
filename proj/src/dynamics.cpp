#include "circadia/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "circadia/classical_reduction.hpp"
#include "circadia/errors.hpp"
#include "circadia/sweep_table.hpp"

namespace circadia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Yoshida's 6th-order solution A, outermost stage first: w3, w2, w1.
constexpr std::array<double, 3> kYoshida6{0.784513610477560, 0.235573213359357, -1.17767998417887};

std::vector<double> stage_weights(Integrator s) {
  if (s == Integrator::StormerVerlet) return {1.0};
  const auto [w3, w2, w1] = kYoshida6;
  const double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
  return {w3, w2, w1, w0, w1, w2, w3};
}

struct Model {
  double kappa, xi, lambdaJ, amp, scale, slope_amp;
  const PotentialModel* p;

  Model(const ReducedCircuit& rc, const PotentialModel& pot) : p(&pot) {
    kappa = rc.kappa;
    xi = rc.xi;
    lambdaJ = rc.lambdaJ;
    amp = kappa * kappa * lambdaJ / xi;
    scale = kappa > 0.0 ? 1.0 / (kappa * std::sqrt(xi)) : 0.0;
    slope_amp = kappa * lambdaJ / std::pow(xi, 1.5);
  }
  double junction(double y) const { return (kappa > 0.0 && lambdaJ != 0.0) ? amp * p->value(y * scale) : 0.0; }
  double junction_force(double y) const {
    return (kappa > 0.0 && lambdaJ != 0.0) ? slope_amp * p->slope(y * scale) : 0.0;
  }
  double energy(const PhaseState& s) const {
    const double d = s.y - kappa * s.x;
    return 0.5 * kappa * kappa * s.px * s.px + 0.5 * s.py * s.py + 0.5 * d * d + junction(s.y);
  }
  void kick(PhaseState& s, double h) const {
    const double d = s.y - kappa * s.x;
    s.px += h * kappa * d;
    s.py -= h * (d + junction_force(s.y));
  }
  void drift(PhaseState& s, double h) const {
    s.x += h * kappa * kappa * s.px;
    s.y += h * s.py;
  }
  void step(PhaseState& s, double dt, const std::vector<double>& w) const {
    for (double c : w) {
      kick(s, 0.5 * c * dt);
      drift(s, c * dt);
      kick(s, 0.5 * c * dt);
    }
  }
};

void check_dt(double dt) {
  if (!(dt > 0.0) || dt > 0.05) throw ValidationError("dt", "must lie in (0, 0.05]");
}

void check_circuit(const ReducedCircuit& rc, const PotentialModel& p) {
  if (rc.kappa < 0.0) throw ValidationError("kappa", "must be nonnegative");
  if (!(rc.xi > 0.0)) throw ValidationError("xi", "must be positive");
  if (rc.lambdaJ < 0.0) throw ValidationError("lambdaJ", "must be nonnegative");
  if (rc.kappa == 0.0 && rc.lambdaJ > 0.0 && !p.bounded_slope())
    throw ValidationError("kappa", "kappa = 0 needs a potential with bounded slope");
}

}  // namespace

std::string to_string(Integrator i) { return i == Integrator::StormerVerlet ? "stormer-verlet" : "yoshida6"; }

double regularized_energy(const ReducedCircuit& rc, const PotentialModel& p, const PhaseState& s) {
  return Model(rc, p).energy(s);
}

TrajectoryRecord integrate(const ReducedCircuit& rc, const PotentialModel& p, PhaseState s, double t_end,
                           const IntegrateOptions& opt) {
  check_dt(opt.dt);
  check_circuit(rc, p);
  if (!(t_end >= 0.0)) throw ValidationError("t_end", "must be nonnegative");
  if (opt.record_every < 1) throw ValidationError("record_every", "must be positive");
  const Model m(rc, p);
  const std::vector<double> w = stage_weights(opt.scheme);
  TrajectoryRecord r;
  r.kappa = rc.kappa;
  r.xi = rc.xi;
  r.lambdaJ = rc.lambdaJ;
  r.dt = opt.dt;
  r.scheme = opt.scheme;
  const double e0 = m.energy(s);
  const double denom = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
  const long steps = std::lround(std::ceil(t_end / opt.dt - 1e-9));
  r.times.push_back(0.0);
  r.states.push_back(s);
  r.energy.push_back(e0);
  for (long n = 1; n <= steps; ++n) {
    m.step(s, opt.dt, w);
    const double e = m.energy(s);
    const double err = std::abs(e - e0) / denom;
    r.max_relative_energy_error = std::max(r.max_relative_energy_error, err);
    if (!(err <= opt.energy_tolerance)) {
      const int order = opt.scheme == Integrator::StormerVerlet ? 2 : 6;
      const double suggest = opt.dt * 0.5 * std::pow(opt.energy_tolerance / std::max(err, 1e-300), 1.0 / order);
      throw StepTooLarge("relative energy error " + std::to_string(err) + " exceeds tolerance at t=" +
                             std::to_string(n * opt.dt),
                         std::min(suggest, 0.5 * opt.dt));
    }
    if (n % opt.record_every == 0 || n == steps) {
      r.times.push_back(n * opt.dt);
      r.states.push_back(s);
      r.energy.push_back(e);
    }
  }
  return r;
}

std::string TrajectoryRecord::to_csv() const {
  SweepTable t({"t", "x", "p_x", "y", "p_y", "E"},
               {"1/omega'_r", "Phi_C", "1", "kappa Phi_C", "1", "hbar omega'_r"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& s = states[i];
    t.add_row({times[i], s.x, s.px, s.y, s.py, energy[i]});
  }
  return t.to_csv();
}

nlohmann::json TrajectoryRecord::meta() const {
  return {{"kappa", kappa},
          {"xi", xi},
          {"lambdaJ", lambdaJ},
          {"dt", dt},
          {"scheme", to_string(scheme)},
          {"steps_recorded", times.size()},
          {"max_relative_energy_error", max_relative_energy_error}};
}

double slow_eta(const ReducedCircuit& rc, const PotentialModel& p, double x) {
  const double s = std::sqrt(rc.xi);
  if (rc.lambdaJ == 0.0) return x;
  return s * solve_single_branch(p, rc.beta, x / s);
}

double default_slow_period(const ReducedCircuit& rc, const PotentialModel& p) {
  if (!(rc.kappa > 0.0)) throw ValidationError("kappa", "the slow period needs kappa > 0");
  double curv = 0.0;
  if (rc.lambdaJ > 0.0) {
    const double beta_crit = invertibility_threshold(p);
    if (rc.beta >= beta_crit) throw MultivaluedRegime(rc.beta, beta_crit);
    // V'' = beta u'' / (1 + beta u'') at the deepest minimum of u, hbar omega_C units
    const std::vector<double> g = p.periodic() ? uniform_grid(0.0, kTwoPi, 2048, false)
                                               : uniform_grid(-50.0, 50.0, 20001);
    double best = std::numeric_limits<double>::infinity(), at = 0.0;
    for (double phi : g) {
      double v;
      try {
        v = p.value(phi);
      } catch (const ExtrapolationError&) {
        continue;
      }
      if (v < best) best = v, at = phi;
    }
    const double up = p.curvature(at);
    curv = rc.beta * up / (1.0 + rc.beta * up);
  }
  const double k2 = rc.kappa * rc.kappa;
  return curv > 0.0 ? kTwoPi / (k2 * std::sqrt(curv)) : kTwoPi / k2;
}

SlowManifoldResidual slow_manifold_residual(const ReducedCircuit& rc, const PotentialModel& p, double x0,
                                            double t_end, const IntegrateOptions& opt) {
  check_dt(opt.dt);
  check_circuit(rc, p);
  if (!(rc.kappa > 0.0)) throw ValidationError("kappa", "must be positive");
  if (rc.lambdaJ > 0.0) {
    const double beta_crit = invertibility_threshold(p);
    if (rc.beta >= beta_crit) throw MultivaluedRegime(rc.beta, beta_crit);
  }
  SlowManifoldResidual out;
  out.t_end = t_end > 0.0 ? t_end : 2.0 * default_slow_period(rc, p);
  out.transient = 5.0 * kTwoPi;
  if (out.t_end <= out.transient) throw ValidationError("t_end", "must exceed the five-period transient");

  const Model m(rc, p);
  const std::vector<double> w = stage_weights(opt.scheme);
  PhaseState s{x0, 0.0, rc.kappa * slow_eta(rc, p, x0), 0.0};
  const double e0 = m.energy(s);
  const double denom = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
  const long steps = std::lround(std::ceil(out.t_end / opt.dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    m.step(s, opt.dt, w);
    const double err = std::abs(m.energy(s) - e0) / denom;
    out.max_relative_energy_error = std::max(out.max_relative_energy_error, err);
    if (!(err <= opt.energy_tolerance))
      throw StepTooLarge("relative energy error " + std::to_string(err) + " exceeds tolerance", 0.5 * opt.dt);
    if (n * opt.dt < out.transient) continue;
    out.max_py = std::max(out.max_py, std::abs(s.py));
    out.max_y_residual = std::max(out.max_y_residual, std::abs(s.y - rc.kappa * slow_eta(rc, p, s.x)));
  }
  return out;
}

ShadowComparison shadow_reduced_dynamics(const ReducedCircuit& rc, const PotentialModel& p, double x0,
                                         double px0, double t_end, const IntegrateOptions& opt) {
  check_dt(opt.dt);
  check_circuit(rc, p);
  if (!(rc.kappa > 0.0)) throw ValidationError("kappa", "must be positive");
  const double beta_crit = invertibility_threshold(p);
  if (rc.beta >= beta_crit) throw MultivaluedRegime(rc.beta, beta_crit);

  ShadowComparison out;
  out.t_end = t_end > 0.0 ? t_end : default_slow_period(rc, p);
  const double k2 = rc.kappa * rc.kappa;
  out.slow_time_end = k2 * out.t_end;

  const Model m(rc, p);
  const std::vector<double> w = stage_weights(opt.scheme);
  PhaseState full{x0, px0, rc.kappa * slow_eta(rc, p, x0), 0.0};
  double xr = x0, pr = px0;
  // reduced force -kappa^2 V'(x) with V'(x) = x - eta_1(x)
  auto kick = [&](double h) { pr -= h * (xr - slow_eta(rc, p, xr)); };
  const long steps = std::lround(std::ceil(out.t_end / opt.dt - 1e-9));
  const long every = std::max(1L, steps / 2000);
  out.times.push_back(0.0);
  out.x_full.push_back(x0);
  out.x_reduced.push_back(x0);
  for (long n = 1; n <= steps; ++n) {
    m.step(full, opt.dt, w);
    for (double c : w) {
      kick(0.5 * c * opt.dt * k2);
      xr += c * opt.dt * k2 * pr;
      kick(0.5 * c * opt.dt * k2);
    }
    out.max_deviation = std::max(out.max_deviation, std::abs(full.x - xr));
    if (n % every == 0 || n == steps) {
      out.times.push_back(n * opt.dt);
      out.x_full.push_back(full.x);
      out.x_reduced.push_back(xr);
    }
  }
  return out;
}

}  // namespace circadia
