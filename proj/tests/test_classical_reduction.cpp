#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "circadia/classical_reduction.hpp"
#include "circadia/errors.hpp"
#include "doctest.h"

using namespace circadia;

namespace {

constexpr double kPi = std::numbers::pi;

double residual(const PotentialModel& p, double beta, double phi, double r) {
  return std::abs(phi - r - beta * p.slope(r));
}

// Sign changes of phi - r - beta u'(r) on a dense grid of [lo, hi).
int dense_root_count(const PotentialModel& p, double beta, double phi, double lo, double hi, int n = 200000) {
  int count = 0;
  double prev = phi - lo - beta * p.slope(lo);
  for (int i = 1; i < n; ++i) {
    const double r = lo + (hi - lo) * i / n;
    const double f = phi - r - beta * p.slope(r);
    if (f == 0.0) {
      ++count;
      prev = -prev;  // count an exact grid hit once
      continue;
    }
    if ((f < 0) != (prev < 0)) ++count;
    prev = f;
  }
  return count;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("odd symmetry gives the trivial root") {
  const BranchSolution b = solve_consistency(PotentialModel::cosine(), 0.5, 0.0);
  REQUIRE(b.roots.size() == 1);
  CHECK(std::abs(b.roots[0]) < 1e-12);
  CHECK(b.invertible);
}

TEST_CASE("supercritical drive at pi has three roots including pi") {
  const PotentialModel c = PotentialModel::cosine();
  const BranchSolution b = solve_consistency(c, 2.0, kPi);
  CHECK(b.roots.size() == 3);
  CHECK(dense_root_count(c, 2.0, kPi, 0.0, 2 * kPi) == 3);
  // pi itself, up to the rounding of sin(pi) in double precision
  CHECK(std::abs(b.roots[0] - kPi) <= 4 * std::numeric_limits<double>::epsilon() * kPi);
  CHECK_FALSE(b.invertible);
  CHECK(b.jacobian_min == doctest::Approx(-1.0));
  for (double r : b.roots) CHECK(residual(c, 2.0, kPi, r) < 1e-12);
}

TEST_CASE("subcritical root agrees with an independent bisection") {
  const PotentialModel c = PotentialModel::cosine();
  const BranchSolution b = solve_consistency(c, 0.5, 1.0);
  REQUIRE(b.roots.size() == 1);
  const double oracle = bisect([](double r) { return 1.0 - r - 0.5 * std::sin(r); }, 0.0, 1.0);
  CHECK(b.roots[0] == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(b.roots[0] == doctest::Approx(0.684).epsilon(1e-3));
  CHECK(residual(c, 0.5, 1.0, b.roots[0]) < 1e-12);
}

TEST_CASE("root counts below and above the bifurcation") {
  const PotentialModel c = PotentialModel::cosine();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> drive(-10.0, 10.0);
  for (double beta : {0.3, 0.9, 0.999}) {
    for (int i = 0; i < 50; ++i) {
      const double phi = drive(rng);
      const BranchSolution b = solve_consistency(c, beta, phi);
      CHECK(b.roots.size() == 1);
      CHECK(residual(c, beta, phi, b.roots[0]) < 1e-12);
    }
  }
  for (double beta : {1.5, 3.0, 7.0}) {
    for (int i = 0; i < 50; ++i) {
      const double phi = drive(rng);
      const BranchSolution b = solve_consistency(c, beta, phi);
      const double lo = b.window.lo, hi = b.window.hi;
      CHECK(int(b.roots.size()) == dense_root_count(c, beta, phi, lo, hi));
      for (double r : b.roots) CHECK(residual(c, beta, phi, r) < 1e-12);
    }
  }
}

TEST_CASE("periodic windows shorter than a period are rejected") {
  CHECK_THROWS_AS(solve_consistency(PotentialModel::cosine(), 0.5, 0.0, Interval{0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(solve_consistency(PotentialModel::cosine(), -0.1, 0.0), ValidationError);
}

TEST_CASE("invertibility thresholds") {
  CHECK(invertibility_threshold(PotentialModel::cosine()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(invertibility_threshold(PotentialModel::polynomial_even({0.0, 0.5}))));
  // grid maximum of -u'' for the biased cosine
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) worst = std::max(worst, std::cos(2 * kPi * i / 100000.0 - kPi / 3));
  CHECK(invertibility_threshold(PotentialModel::biased_cosine(kPi / 3)) == doctest::Approx(1.0 / worst).epsilon(1e-9));
}

TEST_CASE("curvature at the origin") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 10.0, 50.0);  // beta = 0.5
  const std::vector<double> g{0.0};
  const EffectivePotential ep = effective_potential(PotentialModel::cosine(), rc, Basis::CompactPhi, g);
  CHECK(ep.samples[0].d2V == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("zero screening returns lambdaJ u") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 10.0, 0.0);
  const ReducedCircuit rc2 = [] {
    ReducedCircuit r = ReducedCircuit::from_ratios(0.5, 10.0, 0.0);
    r.lambdaJ = 7.0;  // beta kept at zero deliberately
    return r;
  }();
  const std::vector<double> g = uniform_grid(-kPi, kPi, 101);
  const PotentialModel c = PotentialModel::cosine();
  for (const auto& s : effective_potential(c, rc2, Basis::CompactPhi, g).samples)
    CHECK(s.V == 7.0 * c.value(s.coordinate));
  for (const auto& s : effective_potential(c, rc, Basis::CompactPhi, g).samples) CHECK(s.V == 0.0);
}

TEST_CASE("minima count matches u near the bifurcation") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 10.0, 90.0);  // beta = 0.9
  const std::vector<double> g = uniform_grid(-kPi + 0.013, kPi + 0.013, 4001, false);
  const EffectivePotential ep = effective_potential(PotentialModel::cosine(), rc, Basis::CompactPhi, g);
  REQUIRE(ep.minima.size() == 1);
  CHECK(std::abs(ep.minima[0].location) < 1e-6);
}

TEST_CASE("parametric derivatives agree with finite differences") {
  const PotentialModel c = PotentialModel::cosine();
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 10.0, 50.0);
  const double h = 1e-4;
  for (double phi = 0.05; phi < 2 * kPi; phi += 0.1) {
    const std::vector<double> g{phi - h, phi, phi + h};
    const EffectivePotential ep = effective_potential(c, rc, Basis::CompactPhi, g);
    const auto& s = ep.samples;
    const double root = solve_single_branch(c, rc.beta, phi);
    CHECK(std::abs(s[1].dV - rc.lambdaJ * c.slope(root)) < 1e-8);
    CHECK(std::abs((s[2].V - s[0].V) / (2 * h) - s[1].dV) < 1e-6 * std::max(1.0, std::abs(s[1].dV)));
    const double fd2 = (s[2].V - 2 * s[1].V + s[0].V) / (h * h);
    CHECK(std::abs(fd2 - s[1].d2V) < 1e-5 * std::max(1.0, std::abs(s[1].d2V)));
  }
}

TEST_CASE("compact potential is 2 pi periodic and the extended slope carries the basis factor") {
  const PotentialModel c = PotentialModel::cosine();
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 10.0, 50.0);
  const std::vector<double> g = uniform_grid(-3.0, 3.0, 61);
  std::vector<double> shifted;
  for (double x : g) shifted.push_back(x + 2 * kPi);
  const auto a = effective_potential(c, rc, Basis::CompactPhi, g);
  const auto b = effective_potential(c, rc, Basis::CompactPhi, shifted);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(a.samples[i].V - b.samples[i].V) < 1e-10);

  const double sx = std::sqrt(rc.xi);
  std::vector<double> xs;
  for (double x : g) xs.push_back(sx * x);
  const auto e = effective_potential(c, rc, Basis::ExtendedX, xs);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double root = solve_single_branch(c, rc.beta, g[i]);
    CHECK(std::abs(e.samples[i].dV - rc.lambdaJ * c.slope(root) / sx) < 1e-8);
  }
}

TEST_CASE("multivalued regime is refused with its threshold") {
  const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, 1.0, 2.0);
  const std::vector<double> g{0.0, 1.0};
  try {
    effective_potential(PotentialModel::cosine(), rc, Basis::CompactPhi, g);
    FAIL("expected MultivaluedRegime");
  } catch (const MultivaluedRegime& e) {
    CHECK(e.beta_crit() == doctest::Approx(1.0));
    CHECK(e.beta() == doctest::Approx(2.0));
  }
}

TEST_CASE("both reductions give the same curve") {
  CHECK(crosscheck_bases(PotentialModel::cosine(), ReducedCircuit::from_ratios(0.5, 10.0, 50.0)) < 1e-8);
  CHECK(crosscheck_bases(PotentialModel::cosine(), ReducedCircuit::from_ratios(0.5, 10.0, 0.0)) < 1e-13);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(0.0, 0.5);
  for (int i = 0; i < 5; ++i) {
    const PotentialModel p = PotentialModel::polynomial_even({coef(rng), coef(rng), 0.1 * coef(rng)});
    for (double xi : {1.0, 10.0}) {
      const ReducedCircuit rc = ReducedCircuit::from_ratios(0.5, xi, 0.3 * xi * xi);
      CHECK(crosscheck_bases(p, rc) < 1e-8);
    }
  }
}

TEST_CASE("branch enumeration past the threshold") {
  const std::vector<double> drives = uniform_grid(-kPi, kPi, 33);
  const auto bs = enumerate_branches(PotentialModel::cosine(), 2.0, drives);
  REQUIRE(bs.size() == drives.size());
  std::size_t most = 0;
  for (const auto& b : bs) {
    CHECK(b.roots.size() % 2 == 1);
    most = std::max(most, b.roots.size());
  }
  CHECK(most == 3);
  CHECK(to_json(bs[0]).contains("roots"));
}
