#include "circadia/born_oppenheimer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "circadia/errors.hpp"
#include "circadia/parallel.hpp"

namespace circadia {

namespace {

double outer_mass(const SpectrumResult& r) {
  const Eigen::VectorXd v = r.vectors.col(0);
  const int n = int(v.size());
  const int band = std::max(1, n / 10);
  const double total = v.squaredNorm();
  double outer = 0.0;
  for (int i = 0; i < band; ++i) outer += v(i) * v(i) + v(n - 1 - i) * v(n - 1 - i);
  return outer / total;
}

}  // namespace

std::string to_string(BOVerdict v) {
  switch (v) {
    case BOVerdict::Decreasing: return "decreasing";
    case BOVerdict::ConvergesNonzero: return "converges-nonzero";
    case BOVerdict::Vanishing: return "vanishing";
    case BOVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

FastGround bo_fast_ground_detail(double kappa, double xi, double lambdaJ, const PotentialModel& p, double x,
                                 Grid1D y) {
  if (!(kappa > 0.0)) throw ValidationError("kappa", "must be positive");
  if (!(xi > 0.0)) throw ValidationError("xi", "must be positive");
  if (lambdaJ < 0.0) throw ValidationError("lambdaJ", "must be nonnegative");
  FastGround out;
  for (int attempt = 0; attempt < 2; ++attempt) {
    FastAtX f;
    f.kappa = kappa;
    f.xi = xi;
    f.lambdaJ = lambdaJ;
    f.potential = p;
    f.x = x;
    f.y = y;
    const SpectrumResult r = lowest_eigenvalues(f, 1, true);
    out.e0 = r.eigenvalues[0];
    out.grid = y;
    out.boundary_mass = outer_mass(r);
    if (out.boundary_mass < 1e-12) return out;
    out.widened = true;
    y.half_width *= 1.5;
    y.points = int(std::lround((y.points + 1) * 1.5)) - 1;
  }
  throw GridTooNarrow("fast ground state reaches the grid edge (outer mass " +
                      std::to_string(out.boundary_mass) + ") after widening");
}

double bo_fast_ground(double kappa, double xi, double lambdaJ, const PotentialModel& p, double x, Grid1D y) {
  return bo_fast_ground_detail(kappa, xi, lambdaJ, p, x, y).e0;
}

BOTable bo_effective_potential(const std::vector<double>& kappas, const std::vector<double>& x, double xi,
                               double lambdaJ, const PotentialModel& p, Grid1D y, int jobs) {
  if (kappas.size() < 3) throw ValidationError("kappa_ladder", "needs at least three entries");
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] > 0.0)) throw ValidationError("kappa_ladder", "entries must be positive");
    if (i > 0 && !(kappas[i] < kappas[i - 1]))
      throw ValidationError("kappa_ladder", "must be strictly decreasing");
  }
  if (x.empty()) throw ValidationError("x_grid", "must not be empty");

  BOTable t;
  t.kappas = kappas;
  t.x = x;
  const std::size_t nk = kappas.size(), nx = x.size();
  // column 0 of each kappa row is the reference point x = 0
  auto e0 = parallel_map(nk * (nx + 1), jobs, [&](std::size_t idx) {
    const double kap = kappas[idx / (nx + 1)];
    const std::size_t j = idx % (nx + 1);
    return bo_fast_ground(kap, xi, lambdaJ, p, j == 0 ? 0.0 : x[j - 1], y);
  });

  for (std::size_t i = 0; i < nk; ++i) {
    std::vector<double> raw(nx), nrm(nx);
    double sup = 0.0;
    for (std::size_t j = 0; j < nx; ++j) {
      raw[j] = e0[i * (nx + 1) + j + 1] - e0[i * (nx + 1)];
      nrm[j] = raw[j] / (kappas[i] * kappas[i]);
      sup = std::max(sup, std::abs(raw[j]));
    }
    t.raw.push_back(raw);
    t.normalized.push_back(nrm);
    t.sup_raw.push_back(sup);
    t.sup_normalized.push_back(sup / (kappas[i] * kappas[i]));

    Eigen::MatrixXd a(nx, 3);
    Eigen::VectorXd b(nx);
    for (std::size_t j = 0; j < nx; ++j) {
      a(j, 0) = x[j] * x[j];
      a(j, 1) = x[j] * x[j] * x[j];
      a(j, 2) = x[j] * x[j] * x[j] * x[j];
      b(j) = nrm[j];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    t.fit_quadratic.push_back(c(0));
  }

  const bool all_zero = std::all_of(t.sup_raw.begin(), t.sup_raw.end(), [](double s) { return s == 0.0; });
  bool stable = true;
  for (std::size_t i = 0; i < nk; ++i)
    if (!(std::abs(t.fit_quadratic[i]) > 1e-10)) stable = false;
  for (std::size_t i = 1; i < nk && stable; ++i)
    if (std::abs(t.fit_quadratic[i] - t.fit_quadratic[i - 1]) > 0.1 * std::abs(t.fit_quadratic[i - 1]))
      stable = false;
  bool decreasing = true;
  for (std::size_t i = 1; i < nk; ++i)
    if (!(t.sup_raw[i] < t.sup_raw[i - 1])) decreasing = false;

  if (all_zero) {
    t.verdict = BOVerdict::Vanishing;
    t.detail = "every difference is exactly zero";
  } else if (stable) {
    t.verdict = BOVerdict::ConvergesNonzero;
    t.detail = "fitted x^2 coefficient stable within 10% along the ladder";
  } else if (decreasing) {
    t.verdict = BOVerdict::Decreasing;
    t.detail = "sup_x |e0(x) - e0(0)| strictly decreasing along the ladder";
  } else {
    t.verdict = BOVerdict::Inconclusive;
    t.detail = "neither monotone decrease nor a stable nonzero curvature";
  }
  return t;
}

SweepTable BOTable::table() const {
  SweepTable s({"kappa", "x", "raw", "normalized"}, {"1", "Phi_C", "hbar omega'_r", "hbar omega_C"});
  for (std::size_t i = 0; i < kappas.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) s.add_row({kappas[i], x[j], raw[i][j], normalized[i][j]});
  s.meta = summary();
  return s;
}

nlohmann::json BOTable::summary() const {
  return {{"kappas", kappas},
          {"sup_raw", sup_raw},
          {"sup_normalized", sup_normalized},
          {"fit_quadratic", fit_quadratic},
          {"verdict", to_string(verdict)},
          {"detail", detail}};
}

}  // namespace circadia
