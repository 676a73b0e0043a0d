#include "circadia/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCore>

#include "circadia/eigensolvers.hpp"
#include "circadia/errors.hpp"
#include "circadia/parallel.hpp"
#include "detail.hpp"

namespace circadia {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double spacing(const Grid1D& g, Boundary b) {
  return b == Boundary::Box ? 2.0 * g.half_width / (g.points + 1) : 2.0 * g.half_width / g.points;
}

void check_grid(const Grid1D& g, int min_points, const char* field) {
  if (!(g.half_width > 0.0) || !std::isfinite(g.half_width))
    throw ValidationError(field, "half_width must be positive and finite");
  if (g.points < min_points)
    throw ValidationError(field, "needs at least " + std::to_string(min_points) + " points");
}

int compact_nmax(const Compact1D& c) {
  const int auto_n = int(std::ceil(3.0 * std::sqrt(c.lambdaJ))) + 10;
  if (c.n_max == 0) return auto_n;
  if (c.n_max < 3.0 * std::sqrt(c.lambdaJ) + 10.0)
    throw ValidationError("n_max", "must be at least 3 sqrt(lambdaJ) + 10");
  return c.n_max;
}

std::vector<double> phase_nodes(int n) {
  const int m = (n - 1) / 2;
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = 2.0 * kPi * (j - m) / n;
  return out;
}

// Fourier DVR matrix of kinetic (n - ng)^2 on an odd periodic grid.
Eigen::MatrixXcd dvr_kinetic(int n, double ng, double kinetic) {
  const int m = (n - 1) / 2;
  Eigen::MatrixXcd t(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      std::complex<double> s = 0.0;
      const double d = 2.0 * kPi * (j - l) / n;
      for (int q = -m; q <= m; ++q) s += (q - ng) * (q - ng) * std::polar(1.0, q * d);
      t(j, l) = kinetic * s / double(n);
    }
  return t;
}

struct Assembled {
  EigenPairs pairs;
  std::vector<double> grid;
};

SpectrumResult finish(const HamiltonianSpec& spec, const std::string& variant, const std::string& units,
                      Assembled a, bool keep_vectors) {
  SpectrumResult r;
  r.variant = variant;
  r.units = units;
  r.eigenvalues = a.pairs.values;
  r.residual_norms = a.pairs.residuals;
  r.spectral_scale = a.pairs.spectral_scale;
  r.method = a.pairs.method;
  r.iterations = a.pairs.iterations;
  r.spec = to_json(spec);
  for (double res : r.residual_norms)
    if (!(res < 1e-8 * r.spectral_scale))
      throw NonConvergence(variant + ": residual contract violated", r.residual_norms);
  if (keep_vectors) {
    r.vectors = std::move(a.pairs.vectors);
    r.grid = std::move(a.grid);
  }
  return r;
}

Assembled solve_extended(const Extended1D& s, int k) {
  const std::vector<double> q = grid_nodes(s.grid, s.boundary);
  const double h = spacing(s.grid, s.boundary);
  std::vector<double> v(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) v[i] = s.potential ? s.potential(q[i]) : 0.0;
  if (s.boundary == Boundary::Box) return {banded_lowest(detail::fd4_box(v, h, s.kinetic), k), q};
  const int n = int(q.size());
  double c0, c1, c2;
  detail::fd4_coefficients(h, c0, c1, c2);
  detail::Triplets t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, s.kinetic * c0 + v[i]);
    for (int d : {-2, -1, 1, 2}) t.emplace_back(i, (i + d + n) % n, s.kinetic * (std::abs(d) == 1 ? c1 : c2));
  }
  Eigen::SparseMatrix<double> hm(n, n);
  hm.setFromTriplets(t.begin(), t.end());
  return {lanczos_lowest(hm, k), q};
}

Assembled solve_compact(const Compact1D& c, int k) {
  const int nmax = compact_nmax(c);
  BandedMatrix a(2 * nmax + 1, 1);
  for (int i = 0; i <= 2 * nmax; ++i) {
    const double n = i - nmax - c.ng;
    a.set(i, i, c.kinetic * n * n);
    if (i < 2 * nmax) a.set(i, i + 1, -0.5 * c.lambdaJ);
  }
  std::vector<double> charges;
  for (int i = -nmax; i <= nmax; ++i) charges.push_back(i);
  return {banded_lowest(a, k), charges};
}

Assembled solve_phase_grid(const PhaseGrid1D& s, int k) {
  const std::vector<double> phi = phase_nodes(s.points);
  Eigen::MatrixXcd hm = dvr_kinetic(s.points, s.ng, s.kinetic);
  for (int j = 0; j < s.points; ++j) hm(j, j) += s.potential ? s.potential(phi[j]) : 0.0;
  if (s.ng == 0.0) return {dense_lowest(hm.real(), k), phi};
  return {dense_hermitian_lowest(hm, k), phi};
}

Assembled solve_regularized(const Regularized2D& s0, int k) {
  const Regularized2D s = with_default_grids(s0);
  const std::vector<double> phi = grid_nodes(s.phi, Boundary::Box);
  const double hp = spacing(s.phi, Boundary::Box);
  const int n1 = int(phi.size());
  const bool compact = s.basis_y == FastBasis::Compact;
  const std::vector<double> phic = compact ? phase_nodes(s.phi_c.points) : grid_nodes(s.phi_c, Boundary::Box);
  const int n2 = int(phic.size());
  const double fast = s.kinetic / std::pow(s.kappa, 4);
  auto idx = [n2](int i, int j) { return i * n2 + j; };

  std::vector<double> u(n2);
  for (int j = 0; j < n2; ++j) u[j] = s.lambdaJ * s.potential.value(phic[j]);

  detail::Triplets t;
  double c0, c1, c2;
  detail::fd4_coefficients(hp, c0, c1, c2);
  Eigen::MatrixXd tc;
  double d0 = 0, d1 = 0, d2 = 0;
  if (compact) tc = dvr_kinetic(n2, 0.0, fast).real();
  else {
    detail::fd4_coefficients(spacing(s.phi_c, Boundary::Box), d0, d1, d2);
    d0 *= fast, d1 *= fast, d2 *= fast;
  }
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const int r = idx(i, j);
      const double dphi = phi[i] - phic[j];
      double diag = s.kinetic * detail::fd4_box_diagonal(i, n1, c0, c2) + 0.5 * s.xi * s.xi * dphi * dphi + u[j];
      // loop-phase kinetic term
      for (int d : {-2, -1, 1, 2}) {
        const int ii = i + d;
        if (ii >= 0 && ii < n1) t.emplace_back(r, idx(ii, j), s.kinetic * (std::abs(d) == 1 ? c1 : c2));
      }
      // junction-phase kinetic term
      if (compact) {
        diag += tc(j, j);
        for (int jj = 0; jj < n2; ++jj)
          if (jj != j) t.emplace_back(r, idx(i, jj), tc(j, jj));
      } else {
        diag += detail::fd4_box_diagonal(j, n2, d0, d2);
        for (int d : {-2, -1, 1, 2}) {
          const int jj = j + d;
          if (jj >= 0 && jj < n2) t.emplace_back(r, idx(i, jj), std::abs(d) == 1 ? d1 : d2);
        }
      }
      t.emplace_back(r, r, diag);
    }
  Eigen::SparseMatrix<double> hm(n1 * n2, n1 * n2);
  hm.setFromTriplets(t.begin(), t.end());
  return {lanczos_lowest(hm, k), {}};
}

Assembled solve_fast(const FastAtX& f, int k) {
  if (!(f.kappa > 0.0)) throw ValidationError("kappa", "the fast operator needs kappa > 0");
  const double center = f.kappa * f.x;
  // offsets from the centre are exact grid values, so lambdaJ = 0 is x-independent bit for bit
  const std::vector<double> offset = grid_nodes(f.y, Boundary::Box);
  const double h = spacing(f.y, Boundary::Box);
  const double amp = f.kappa * f.kappa * f.lambdaJ / f.xi;
  const double scale = 1.0 / (f.kappa * std::sqrt(f.xi));
  std::vector<double> v(offset.size()), y(offset.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = offset[i];
    y[i] = center + d;
    v[i] = 0.5 * d * d + (amp == 0.0 ? 0.0 : amp * f.potential.value(y[i] * scale));
  }
  return {banded_lowest(detail::fd4_box(v, h, 0.5), k), y};
}

nlohmann::json grid_json(const Grid1D& g) { return {{"half_width", g.half_width}, {"points", g.points}}; }

}  // namespace

std::string to_string(Boundary b) { return b == Boundary::Box ? "box" : "periodic"; }
std::string to_string(FastBasis b) { return b == FastBasis::Extended ? "extended" : "compact"; }

FastBasis fast_basis_from_string(const std::string& s) {
  if (s == "extended") return FastBasis::Extended;
  if (s == "compact") return FastBasis::Compact;
  throw ValidationError("basis", "expected extended or compact, got '" + s + "'");
}

std::vector<double> grid_nodes(const Grid1D& g, Boundary b, double center) {
  const double h = spacing(g, b);
  std::vector<double> out(g.points);
  for (int i = 0; i < g.points; ++i)
    out[i] = center + (b == Boundary::Box ? -g.half_width + (i + 1) * h : -g.half_width + i * h);
  return out;
}

Regularized2D with_default_grids(Regularized2D s) {
  if (!(s.kappa > 0.0)) throw ValidationError("kappa", "the regularized circuit needs kappa > 0");
  if (!(s.xi > 0.0)) throw ValidationError("xi", "must be positive");
  if (s.lambdaJ < 0.0) throw ValidationError("lambdaJ", "must be nonnegative");
  const double fast = s.kinetic / std::pow(s.kappa, 4);
  const double spring = 0.5 * s.xi * s.xi + 0.5 * s.lambdaJ * std::abs(s.potential.curvature(0.0));
  const double sigma_c = std::sqrt(0.5 * std::sqrt(fast / spring));
  const double sigma_p = std::sqrt(0.5 * std::sqrt(s.kinetic / (0.5 * s.xi * s.xi)));
  if (s.phi.points == 0) {
    s.phi.half_width = (s.basis_y == FastBasis::Compact ? kPi : 2.0 * kPi) + 8.0 * sigma_p;
    s.phi.points = std::max(64, int(std::ceil(2.0 * s.phi.half_width / (sigma_p / 5.0))));
  }
  if (s.phi_c.points == 0) {
    if (s.basis_y == FastBasis::Compact) {
      const int m = std::min(40, int(std::ceil(4.0 / sigma_c)) + 6);
      s.phi_c = {kPi, 2 * m + 1};
    } else {
      s.phi_c.half_width = s.phi.half_width + 4.0 * sigma_c;
      const double h = std::min(sigma_c / 5.0, 2.0 * kPi / 32.0);
      s.phi_c.points = std::max(64, int(std::ceil(2.0 * s.phi_c.half_width / h)));
    }
  }
  check_grid(s.phi, 64, "phi");
  if (s.basis_y == FastBasis::Compact) {
    if (s.phi_c.points < 3 || s.phi_c.points % 2 == 0)
      throw ValidationError("phi_c", "compact grids need an odd point count");
    s.phi_c.half_width = kPi;
  } else {
    check_grid(s.phi_c, 64, "phi_c");
  }
  return s;
}

int dimension(const HamiltonianSpec& spec) {
  return std::visit(Overloaded{
                        [](const Extended1D& s) { return s.grid.points; },
                        [](const Compact1D& c) { return 2 * compact_nmax(c) + 1; },
                        [](const PhaseGrid1D& s) { return s.points; },
                        [](const Regularized2D& s) {
                          const Regularized2D g = with_default_grids(s);
                          return g.phi.points * g.phi_c.points;
                        },
                        [](const FastAtX& f) { return f.y.points; },
                    },
                    spec);
}

nlohmann::json to_json(const HamiltonianSpec& spec) {
  return std::visit(
      Overloaded{
          [](const Extended1D& s) -> nlohmann::json {
            return {{"variant", "extended_1d"}, {"grid", grid_json(s.grid)},
                    {"boundary", to_string(s.boundary)}, {"kinetic", s.kinetic},
                    {"potential", s.potential_desc}, {"units", s.units}, {"discretization", "fd4"}};
          },
          [](const Compact1D& c) -> nlohmann::json {
            return {{"variant", "compact_1d"}, {"lambdaJ", c.lambdaJ}, {"ng", c.ng},
                    {"n_max", compact_nmax(c)}, {"kinetic", c.kinetic}, {"units", "E_C"},
                    {"discretization", "charge basis"}};
          },
          [](const PhaseGrid1D& s) -> nlohmann::json {
            return {{"variant", "phase_grid_1d"}, {"points", s.points}, {"ng", s.ng},
                    {"kinetic", s.kinetic}, {"potential", s.potential_desc}, {"units", "E_C"},
                    {"discretization", "periodic Fourier DVR"}};
          },
          [](const Regularized2D& s0) -> nlohmann::json {
            const Regularized2D s = with_default_grids(s0);
            return {{"variant", "regularized_2d"}, {"kappa", s.kappa}, {"xi", s.xi},
                    {"lambdaJ", s.lambdaJ}, {"potential", s.potential.to_json()},
                    {"basis_y", to_string(s.basis_y)}, {"phi", grid_json(s.phi)},
                    {"phi_c", grid_json(s.phi_c)}, {"kinetic", s.kinetic}, {"units", "E_C"},
                    {"discretization", s.basis_y == FastBasis::Compact ? "fd4 x periodic Fourier DVR"
                                                                       : "fd4 x fd4"}};
          },
          [](const FastAtX& f) -> nlohmann::json {
            return {{"variant", "fast_at_x"}, {"kappa", f.kappa}, {"xi", f.xi},
                    {"lambdaJ", f.lambdaJ}, {"potential", f.potential.to_json()}, {"x", f.x},
                    {"y", grid_json(f.y)}, {"units", "hbar omega'_r"}, {"discretization", "fd4"}};
          },
      },
      spec);
}

SpectrumResult lowest_eigenvalues(const HamiltonianSpec& spec, int k, bool keep_vectors) {
  if (k < 1) throw ValidationError("k", "must be positive");
  std::visit(Overloaded{
                 [](const Extended1D& s) { check_grid(s.grid, 128, "grid"); },
                 [](const Compact1D& c) {
                   if (c.lambdaJ < 0.0) throw ValidationError("lambdaJ", "must be nonnegative");
                 },
                 [](const PhaseGrid1D& s) {
                   if (s.points < 3 || s.points % 2 == 0)
                     throw ValidationError("points", "phase grids need an odd point count");
                 },
                 [](const Regularized2D&) {},
                 [](const FastAtX& f) { check_grid(f.y, 128, "y"); },
             },
             spec);
  const int dim = dimension(spec);
  if (4 * k > dim) throw ValidationError("k", "must not exceed dimension / 4");
  return std::visit(
      Overloaded{
          [&](const Extended1D& s) {
            return finish(spec, "extended_1d", s.units, solve_extended(s, k), keep_vectors);
          },
          [&](const Compact1D& c) {
            return finish(spec, "compact_1d", "E_C", solve_compact(c, k), keep_vectors);
          },
          [&](const PhaseGrid1D& s) {
            return finish(spec, "phase_grid_1d", "E_C", solve_phase_grid(s, k), keep_vectors);
          },
          [&](const Regularized2D& s) {
            return finish(spec, "regularized_2d", "E_C", solve_regularized(s, k), false);
          },
          [&](const FastAtX& f) {
            return finish(spec, "fast_at_x", "hbar omega'_r", solve_fast(f, k), keep_vectors);
          },
      },
      spec);
}

nlohmann::json to_json(const SpectrumResult& r) {
  return {{"variant", r.variant},          {"units", r.units},
          {"k", r.eigenvalues.size()},     {"eigenvalues", r.eigenvalues},
          {"residual_norms", r.residual_norms}, {"spectral_scale", r.spectral_scale},
          {"method", r.method},            {"iterations", r.iterations},
          {"spec", r.spec}};
}

std::string to_csv(const SpectrumResult& r) {
  SweepTable t({"level", "energy", "residual"}, {"1", r.units, r.units});
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
    t.add_row({(long long)i, r.eigenvalues[i], r.residual_norms[i]});
  return "# " + r.spec.dump() + "\n" + t.to_csv();
}

Extended1D reduced_extended(const PotentialModel& p, const ReducedCircuit& rc, Basis basis, Grid1D grid,
                            double kinetic_phi, Boundary boundary) {
  const double beta_crit = invertibility_threshold(p);
  if (rc.beta >= beta_crit) throw MultivaluedRegime(rc.beta, beta_crit);
  Extended1D s;
  s.grid = grid;
  s.boundary = boundary;
  const bool x_basis = basis == Basis::ExtendedX;
  s.kinetic = x_basis ? rc.xi * kinetic_phi : kinetic_phi;
  const double to_phi = x_basis ? 1.0 / std::sqrt(rc.xi) : 1.0;
  const double lambdaJ = rc.lambdaJ, beta = rc.beta;
  s.potential = [p, lambdaJ, beta, to_phi](double q) {
    if (lambdaJ == 0.0) return 0.0;
    const double pc = solve_single_branch(p, beta, q * to_phi);
    const double d = p.slope(pc);
    return lambdaJ * (p.value(pc) + 0.5 * beta * d * d);
  };
  s.potential_desc = {{"kind", "effective"}, {"basis", to_string(basis)}, {"u", p.to_json()},
                      {"circuit", to_json(rc)}};
  return s;
}

PhaseGrid1D reduced_compact(const PotentialModel& p, const ReducedCircuit& rc, int points,
                            double kinetic_phi) {
  if (!p.periodic()) throw ValidationError("potential", "the compact basis needs a periodic potential");
  Extended1D e = reduced_extended(p, rc, Basis::CompactPhi, {kPi, 128}, kinetic_phi);
  PhaseGrid1D s;
  s.points = points;
  s.ng = rc.ng;
  s.kinetic = kinetic_phi;
  s.potential = e.potential;
  s.potential_desc = e.potential_desc;
  return s;
}

SpacingStats spacing_stats(const std::vector<double>& levels) {
  SpacingStats st;
  if (levels.size() < 2) return st;
  st.count = int(levels.size()) - 1;
  st.min = std::numeric_limits<double>::infinity();
  st.max = -st.min;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double d = levels[i] - levels[i - 1];
    st.mean += d;
    st.min = std::min(st.min, d);
    st.max = std::max(st.max, d);
  }
  st.mean /= st.count;
  return st;
}

SpacingStats spacing_stats(const std::vector<double>& levels, double lo, double hi) {
  std::vector<double> in;
  for (double e : levels)
    if (e >= lo && e <= hi) in.push_back(e);
  return spacing_stats(in);
}

NaiveAdiabatic naive_compact_adiabatic(double kappa, double xi, double ng, int k, double kinetic,
                                       Grid1D grid) {
  if (!(kappa > 0.0)) throw ValidationError("kappa", "must be positive");
  if (!(xi > 0.0)) throw ValidationError("xi", "must be positive");
  if (ng < 0.0 || ng >= 1.0) throw ValidationError("ng", "must lie in [0, 1)");
  if (k < 1) throw ValidationError("k", "must be positive");
  if (std::abs(ng - 0.5) <= kappa * kappa)
    throw DegenerateFastGround("degenerate fast ground state: |ng - 1/2| <= kappa^2");

  NaiveAdiabatic out;
  out.kappa = kappa;
  out.xi = xi;
  out.ng = ng;
  const double k4 = std::pow(kappa, 4);
  for (int i = 0; i < k; ++i) out.formula.push_back(std::sqrt(2.0) * k4 * xi * (i + 0.5));

  // <phi_c> over the flat fast ground state on the representative window
  const int nq = 4096;
  double mean = 0.0;
  for (int i = 0; i < nq; ++i) mean += -kPi + (i + 0.5) * 2.0 * kPi / nq;
  out.mean_phi_c = mean / nq;

  if (grid.points == 0) {
    const double sigma = std::sqrt(0.5 * std::sqrt(kinetic / (0.5 * xi * xi)));
    grid = {sigma * (std::sqrt(2.0 * k + 1.0) + 10.0), 1024};
  }
  Extended1D s;
  s.grid = grid;
  s.kinetic = k4 * kinetic;
  const double c = out.mean_phi_c;
  s.potential = [k4, xi, c](double phi) { return 0.5 * k4 * xi * xi * (phi - c) * (phi - c); };
  s.potential_desc = {{"kind", "slow operator averaged over flat fast ground state"}, {"mean_phi_c", c}};
  s.units = "E'_C";
  const SpectrumResult r = lowest_eigenvalues(s, k);
  out.numerical = r.eigenvalues;
  for (int i = 0; i < k; ++i)
    out.max_relative_deviation =
        std::max(out.max_relative_deviation, std::abs(out.numerical[i] - out.formula[i]) / out.formula[i]);
  return out;
}

SweepTable spectrum_vs_kappa(const Regularized2D& base, const std::vector<double>& kappas, int k,
                             int jobs) {
  if (kappas.empty()) throw ValidationError("kappa_ladder", "must not be empty");
  if (k < 1) throw ValidationError("k", "must be positive");
  std::vector<std::string> names{"kappa", "basis_y"};
  std::vector<std::string> units{"1", "label"};
  for (int i = 0; i < k; ++i) {
    names.push_back("E" + std::to_string(i));
    units.push_back("E_C");
  }
  for (const char* n : {"gap", "mean_spacing", "min_spacing", "naive_gap", "classical_gap", "max_residual"}) {
    names.push_back(n);
    units.push_back("E_C");
  }
  names.push_back("status");
  units.push_back("label");
  SweepTable table(names, units);

  // classical-reduction harmonic gap sqrt(2 kinetic V''(min)); NaN when multivalued
  double classical_gap = kNaN;
  try {
    const ReducedCircuit rc = ReducedCircuit::from_ratios(0.0, base.xi, base.lambdaJ);
    const double beta_crit = invertibility_threshold(base.potential);
    if (rc.beta < beta_crit && base.lambdaJ > 0.0) {
      const std::vector<double> g = uniform_grid(-kPi, kPi, 257, false);
      const EffectivePotential ep = effective_potential(base.potential, rc, Basis::CompactPhi, g);
      if (!ep.minima.empty()) {
        double curv = ep.minima.front().curvature;
        for (const auto& m : ep.minima) curv = std::min(curv, m.curvature);
        classical_gap = std::sqrt(2.0 * base.kinetic * curv);
      }
    }
  } catch (const Error&) {
  }
  const double naive_gap = base.xi * std::sqrt(2.0 * base.kinetic);

  struct Point {
    std::vector<Cell> row;
  };
  const std::size_t n = kappas.size() * 2;
  auto rows = parallel_map(n, jobs, [&](std::size_t idx) {
    Regularized2D s = base;
    s.kappa = kappas[idx / 2];
    s.basis_y = idx % 2 == 0 ? FastBasis::Extended : FastBasis::Compact;
    if (s.basis_y != base.basis_y) s.phi_c = {0.0, 0};
    std::vector<Cell> row{s.kappa, to_string(s.basis_y)};
    try {
      const SpectrumResult r = lowest_eigenvalues(s, k);
      for (double e : r.eigenvalues) row.push_back(e);
      const SpacingStats st = spacing_stats(r.eigenvalues);
      row.push_back(k > 1 ? r.eigenvalues[1] - r.eigenvalues[0] : kNaN);
      row.push_back(k > 1 ? st.mean : kNaN);
      row.push_back(k > 1 ? st.min : kNaN);
      row.push_back(naive_gap);
      row.push_back(classical_gap);
      row.push_back(*std::max_element(r.residual_norms.begin(), r.residual_norms.end()));
      row.push_back(std::string("ok"));
    } catch (const std::exception& e) {
      row.resize(2);
      for (int i = 0; i < k + 3; ++i) row.push_back(kNaN);
      row.push_back(naive_gap);
      row.push_back(classical_gap);
      row.push_back(kNaN);
      row.push_back(std::string("error: ") + e.what());
    }
    return Point{row};
  });
  for (auto& p : rows) table.add_row(std::move(p.row));
  table.meta = {{"base", to_json(HamiltonianSpec{base})}, {"kappas", kappas}, {"k", k}};
  return table;
}

TransmonComparison transmon_limit_check(double lambdaJ, double ng, const std::vector<double>& ratios,
                                        double kinetic, int levels) {
  if (lambdaJ < 10.0) throw ValidationError("lambdaJ", "the transmon comparison needs lambdaJ >= 10");
  if (levels < 2) throw ValidationError("levels", "need at least two levels");
  TransmonComparison out;
  out.lambdaJ = lambdaJ;
  out.ng = ng;
  out.ratios = ratios;
  out.levels_without_cj = lowest_eigenvalues(Compact1D{lambdaJ, ng, 0, kinetic}, levels).eigenvalues;
  const double gap0 = out.levels_without_cj[1] - out.levels_without_cj[0];
  for (double r : ratios) {
    if (r < 0.0) throw ValidationError("ratio", "C_J / C must be nonnegative");
    const auto lv = lowest_eigenvalues(Compact1D{lambdaJ, ng, 0, kinetic / (1.0 + r)}, levels).eigenvalues;
    out.levels_with_cj.push_back(lv);
    out.gap_relative_shift.push_back((gap0 - (lv[1] - lv[0])) / gap0);
    std::vector<double> rel;
    for (int i = 0; i < levels; ++i)
      rel.push_back((out.levels_without_cj[i] - lv[i]) / std::abs(out.levels_without_cj[i]));
    out.level_relative_shift.push_back(rel);
  }
  return out;
}

std::vector<double> free_particle_levels(double kinetic, Grid1D grid, int k) {
  Extended1D s;
  s.grid = grid;
  s.kinetic = kinetic;
  s.potential_desc = {{"kind", "free"}};
  return lowest_eigenvalues(s, k).eigenvalues;
}

}  // namespace circadia
