#include "circadia/classical_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "circadia/errors.hpp"

namespace circadia {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Bisection on a bracket [a, b] with g(a), g(b) of opposite sign.
double bisect(auto&& g, double a, double b, double ga) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double circular_distance(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

Interval default_window(const PotentialModel& p, double beta, double phi) {
  if (p.periodic()) {
    const double k = std::floor(phi / kTwoPi);
    return {kTwoPi * k, kTwoPi * (k + 1.0)};
  }
  if (auto s = p.support()) return {s->first, s->second};
  // Even polynomial: grow a symmetric window until the ends are monotone and bracket.
  auto g = [&](double r) { return r + beta * p.slope(r) - phi; };
  auto dg = [&](double r) { return 1.0 + beta * p.curvature(r); };
  double R = 1.0 + std::abs(phi);
  for (int it = 0; it < 60; ++it, R *= 2.0) {
    if (g(R) > 0.0 && g(-R) < 0.0 && dg(R) > 0.0 && dg(-R) > 0.0) return {-R, R};
  }
  throw NumericalError("could not bound the roots of the consistency equation");
}

struct RootCollector {
  std::vector<double> roots;
  void add(double r) { roots.push_back(r); }
};

// Roots of g on [a, b] where g' keeps one sign (a monotone cell).
void monotone_cell(auto&& g, double a, double b, double ga, double gb, RootCollector& out) {
  if (ga == 0.0) {
    out.add(a);
    return;
  }
  if (gb == 0.0) return;  // picked up as the left end of the next cell
  if ((ga < 0.0) != (gb < 0.0)) out.add(bisect(g, a, b, ga));
}

void scan_cell(auto&& g, auto&& dg, double a, double b, int depth, RootCollector& out) {
  const double ga = g(a), gb = g(b);
  const double da = dg(a), db = dg(b), dm = dg(0.5 * (a + b));
  const bool fold_ab = (da < 0.0) != (db < 0.0);
  const bool double_fold = !fold_ab && ((dm < 0.0) != (da < 0.0));
  if (!fold_ab && !double_fold) {
    monotone_cell(g, a, b, ga, gb, out);
    return;
  }
  if (fold_ab) {
    // Single fold: split at the zero of g' and treat both halves as monotone.
    const double c = bisect(dg, a, b, da);
    const double gc = g(c);
    if (std::abs(gc) < 1e-14) {
      if (ga != 0.0) out.add(c);
      else out.add(a);
      return;
    }
    monotone_cell(g, a, c, ga, gc, out);
    if ((gc < 0.0) != (gb < 0.0) && gb != 0.0) out.add(bisect(g, c, b, gc));
    return;
  }
  if (depth >= 2) throw UnresolvedCluster(a, b);
  constexpr int sub = 64;
  for (int i = 0; i < sub; ++i) {
    const double lo = a + (b - a) * i / sub;
    const double hi = i + 1 == sub ? b : a + (b - a) * (i + 1) / sub;
    scan_cell(g, dg, lo, hi, depth + 1, out);
  }
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, int n, bool closed) {
  if (n < 1) throw ValidationError("points", "must be >= 1");
  std::vector<double> g(n);
  const double step = (hi - lo) / (closed && n > 1 ? n - 1 : n);
  for (int i = 0; i < n; ++i) g[i] = lo + step * i;
  if (closed && n > 1) g.back() = hi;
  return g;
}

std::string to_string(Basis b) { return b == Basis::ExtendedX ? "extended_x" : "compact_phi"; }

BranchSolution solve_consistency(const PotentialModel& p, double beta, double phi,
                                 std::optional<Interval> window, int grid_points) {
  if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("beta", "must be finite and >= 0");
  if (!std::isfinite(phi)) throw ValidationError("phi", "must be finite");
  const Interval w = window ? *window : default_window(p, beta, phi);
  if (!(w.hi > w.lo)) throw ValidationError("window", "empty interval");
  if (p.periodic() && w.length() < kTwoPi * (1.0 - 1e-12))
    throw ValidationError("window", "periodic potentials need a window of length >= 2 pi");
  const int n = std::max(grid_points, 4096);

  auto g = [&](double r) { return r + beta * p.slope(r) - phi; };
  auto dg = [&](double r) { return 1.0 + beta * p.curvature(r); };

  BranchSolution out;
  out.drive_phi = phi;
  out.window = w;
  out.jacobian_min = kInf;

  RootCollector roots;
  const double h = w.length() / n;
  for (int i = 0; i < n; ++i) {
    const double a = w.lo + h * i;
    const double b = i + 1 == n ? w.hi : w.lo + h * (i + 1);
    out.jacobian_min = std::min(out.jacobian_min, dg(a));
    scan_cell(g, dg, a, b, 0, roots);
  }
  // The window is half-open for periodic potentials; closed otherwise.
  if (!p.periodic()) {
    out.jacobian_min = std::min(out.jacobian_min, dg(w.hi));
    if (g(w.hi) == 0.0) roots.add(w.hi);
  }

  auto& r = roots.roots;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
          r.end());
  if (p.periodic()) r.erase(std::remove_if(r.begin(), r.end(), [&](double x) { return x >= w.hi; }), r.end());

  if (!r.empty()) {
    auto dist = [&](double x) {
      return p.periodic() ? circular_distance(x, phi) : std::abs(x - phi);
    };
    auto best = std::min_element(r.begin(), r.end(),
                                 [&](double a, double b) { return dist(a) < dist(b); });
    std::rotate(r.begin(), best, best + 1);
  }
  out.roots = std::move(r);
  out.invertible = out.jacobian_min > 0.0;
  return out;
}

double solve_single_branch(const PotentialModel& p, double beta, double phi) {
  if (beta == 0.0) return phi;
  auto g = [&](double r) { return r + beta * p.slope(r) - phi; };
  double d = 1.0;
  double lo = phi - d, hi = phi + d;
  double glo = g(lo), ghi = g(hi);
  for (int it = 0; it < 200 && !(glo <= 0.0 && ghi >= 0.0); ++it) {
    d *= 2.0;
    lo = phi - d;
    hi = phi + d;
    glo = g(lo);
    ghi = g(hi);
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if (!(glo < 0.0 && ghi > 0.0)) throw NumericalError("no bracket for the single-valued branch");
  return bisect(g, lo, hi, glo);
}

double invertibility_threshold(const PotentialModel& p) {
  if (p.kind() == PotentialKind::PolynomialEven) {
    const auto& c = p.coefficients();
    std::size_t top = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (c[k] != 0.0) top = k;
    if (top >= 2 && c[top] < 0.0) return 0.0;  // -u'' unbounded above
  }
  Interval w{0.0, kTwoPi};
  if (auto s = p.support()) w = {s->first, s->second};
  else if (!p.periodic()) w = {-50.0, 50.0};

  constexpr int n = 20001;
  const double h = w.length() / (n - 1);
  auto neg_curv = [&](double x) { return -p.curvature(x); };
  int best = 0;
  double best_val = -kInf;
  for (int i = 0; i < n; ++i) {
    const double v = neg_curv(w.lo + h * i);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = std::max(w.lo, w.lo + h * (best - 1));
  const double b = std::min(w.hi, w.lo + h * (best + 1));
  auto [xm, fm] = boost::math::tools::brent_find_minima(
      [&](double x) { return -neg_curv(x); }, a, b, std::numeric_limits<double>::digits);
  (void)xm;
  const double max_neg = std::max(best_val, -fm);
  if (max_neg <= 0.0) return kInf;
  return 1.0 / max_neg;
}

namespace {

struct Evaluated {
  double V, dV, d2V;
};

Evaluated evaluate_compact(const PotentialModel& p, const ReducedCircuit& rc, double phi) {
  const double beta = rc.beta;
  const double pc = solve_single_branch(p, beta, phi);
  const double u = p.value(pc), du = p.slope(pc), d2u = p.curvature(pc);
  return {rc.lambdaJ * (u + 0.5 * beta * du * du), rc.lambdaJ * du,
          rc.lambdaJ * d2u / (1.0 + beta * d2u)};
}

// Extended route: solve x = eta + (lambdaJ / xi^{3/2}) u'(eta / sqrt(xi)) for
// eta and use V = (lambdaJ/xi) u + (x - eta)^2 / 2 in hbar omega_C units.
Evaluated evaluate_extended(const PotentialModel& p, const ReducedCircuit& rc, double x) {
  const double s = std::sqrt(rc.xi);
  const double a = rc.lambdaJ / (rc.xi * s);
  double eta = x;
  if (a != 0.0) {
    auto g = [&](double e) { return e + a * p.slope(e / s) - x; };
    double d = 1.0;
    double lo = x - d, hi = x + d;
    double glo = g(lo), ghi = g(hi);
    for (int it = 0; it < 200 && !(glo <= 0.0 && ghi >= 0.0); ++it) {
      d *= 2.0;
      lo = x - d;
      hi = x + d;
      glo = g(lo);
      ghi = g(hi);
    }
    if (glo == 0.0) eta = lo;
    else if (ghi == 0.0) eta = hi;
    else if (glo < 0.0 && ghi > 0.0) eta = bisect(g, lo, hi, glo);
    else throw NumericalError("no bracket for the extended consistency equation");
  }
  const double pc = eta / s;
  const double d2u = p.curvature(pc);
  const double V_omega = (rc.lambdaJ / rc.xi) * p.value(pc) + 0.5 * (x - eta) * (x - eta);
  return {rc.xi * V_omega, rc.xi * (x - eta), rc.xi * rc.beta * d2u / (1.0 + rc.beta * d2u)};
}

}  // namespace

EffectivePotential effective_potential(const PotentialModel& p, const ReducedCircuit& rc,
                                       Basis basis, std::span<const double> grid) {
  const double beta_crit = invertibility_threshold(p);
  if (!(rc.beta < beta_crit)) throw MultivaluedRegime(rc.beta, beta_crit);
  if (grid.empty()) throw ValidationError("grid", "must not be empty");

  auto eval = [&](double c) {
    return basis == Basis::CompactPhi ? evaluate_compact(p, rc, c) : evaluate_extended(p, rc, c);
  };

  EffectivePotential ep;
  ep.basis = basis;
  ep.circuit = rc;
  ep.samples.reserve(grid.size());
  for (double c : grid) {
    const auto e = eval(c);
    ep.samples.push_back({c, e.V, e.dV, e.d2V, 1});
  }

  const std::size_t n = ep.samples.size();
  if (n < 2) return ep;
  const double span = grid.back() - grid.front();
  const double step = span / double(n - 1);
  const double period = basis == Basis::CompactPhi ? kTwoPi : kTwoPi * std::sqrt(rc.xi);
  const bool cyclic = p.periodic() && std::abs(span + step - period) < 1e-9 * period;

  auto refine = [&](double a, double b, double da) {
    auto dV = [&](double c) { return eval(c).dV; };
    double loc = da == 0.0 ? a : bisect(dV, a, b, da);
    return PotentialMinimum{loc, eval(loc).d2V};
  };
  const std::size_t pairs = cyclic ? n : n - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& s0 = ep.samples[i];
    const auto& s1 = ep.samples[(i + 1) % n];
    if (s0.dV < 0.0 && s1.dV >= 0.0) {
      const double a = s0.coordinate;
      const double b = i + 1 < n ? s1.coordinate : s0.coordinate + step;
      ep.minima.push_back(s1.dV == 0.0 ? PotentialMinimum{i + 1 < n ? b : s1.coordinate, s1.d2V}
                                       : refine(a, b, s0.dV));
    }
  }
  return ep;
}

double crosscheck_bases(const PotentialModel& p, const ReducedCircuit& rc, int points) {
  Interval w{0.0, kTwoPi};
  if (auto s = p.support()) w = {s->first, s->second};
  else if (!p.periodic()) w = {-std::numbers::pi, std::numbers::pi};
  const auto phis = uniform_grid(w.lo, w.hi, points, !p.periodic());
  std::vector<double> xs(phis.size());
  const double s = std::sqrt(rc.xi);
  std::transform(phis.begin(), phis.end(), xs.begin(), [&](double v) { return s * v; });
  const auto compact = effective_potential(p, rc, Basis::CompactPhi, phis);
  const auto extended = effective_potential(p, rc, Basis::ExtendedX, xs);
  double dev = 0.0;
  for (std::size_t i = 0; i < phis.size(); ++i)
    dev = std::max(dev, std::abs(compact.samples[i].V - extended.samples[i].V));
  return dev;
}

std::vector<BranchSolution> enumerate_branches(const PotentialModel& p, double beta,
                                               std::span<const double> drives) {
  std::vector<BranchSolution> out;
  out.reserve(drives.size());
  for (double d : drives) out.push_back(solve_consistency(p, beta, d));
  return out;
}

nlohmann::json to_json(const BranchSolution& b) {
  return {{"drive_phi", b.drive_phi},
          {"window", {b.window.lo, b.window.hi}},
          {"roots", b.roots},
          {"invertible", b.invertible},
          {"jacobian_min", b.jacobian_min}};
}

}  // namespace circadia
