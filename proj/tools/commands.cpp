#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "circadia/born_oppenheimer.hpp"
#include "circadia/classical_reduction.hpp"
#include "circadia/dynamics.hpp"
#include "circadia/errors.hpp"
#include "circadia/foster.hpp"
#include "circadia/output.hpp"
#include "circadia/parallel.hpp"
#include "circadia/spectra.hpp"
#include "circadia/sweep_table.hpp"
#include "manifest.hpp"

namespace circadia::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void require_circuit(const CommonOptions& o) {
  if (o.circuit.empty()) throw ValidationError("--circuit", "a circuit file is required");
}

nlohmann::json common_params(const CommonOptions& o) {
  return {{"grid", o.grid}, {"basis", o.basis}, {"charge_half_factor", o.charge_half_factor},
          {"kappa_ladder", o.kappa_ladder}};
}

double compact_kinetic(const CommonOptions& o) { return o.charge_half_factor ? 0.5 : 1.0; }

// Range of the loop phase shown for a potential.
std::pair<double, double> phase_range(const PotentialModel& p) {
  if (p.periodic()) return {-kPi, kPi};
  if (auto s = p.support()) return *s;
  return {-2.0 * kPi, 2.0 * kPi};
}

SweepTable potential_table(const EffectivePotential& ep) {
  const bool x = ep.basis == Basis::ExtendedX;
  SweepTable t({"coordinate", "V", "Vp", "Vpp", "branch_count"},
               {x ? "Phi_C" : "rad", "E_C", x ? "E_C/Phi_C" : "E_C/rad", x ? "E_C/Phi_C^2" : "E_C/rad^2", "1"});
  for (const auto& s : ep.samples) t.add_row({s.coordinate, s.V, s.dV, s.d2V, (long long)s.branch_count});
  return t;
}

nlohmann::json minima_json(const EffectivePotential& ep) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& m : ep.minima) a.push_back({{"location", m.location}, {"curvature", m.curvature}});
  return a;
}

// U_BO in E_C units on the loop phase: (xi / kappa^2) (e0(sqrt(xi) phi) - e0(0)).
std::function<double(double)> bo_potential(const ReducedCircuit& rc, const PotentialModel& p, double phi_extent,
                                           int jobs) {
  const double sx = std::sqrt(rc.xi);
  const double k2 = rc.kappa * rc.kappa;
  const double unit = rc.xi / k2;
  const double e_ref = bo_fast_ground(rc.kappa, rc.xi, rc.lambdaJ, p, 0.0);
  if (p.periodic()) {
    const int m = 96;
    const double period = 2.0 * kPi * sx;
    auto e = parallel_map(m, jobs, [&](std::size_t j) {
      return bo_fast_ground(rc.kappa, rc.xi, rc.lambdaJ, p, period * double(j) / m) - e_ref;
    });
    std::vector<double> a(m / 2 + 1, 0.0), b(m / 2 + 1, 0.0);
    for (int k = 0; k <= m / 2; ++k)
      for (int j = 0; j < m; ++j) {
        a[k] += 2.0 / m * e[j] * std::cos(2.0 * kPi * k * j / m);
        b[k] += 2.0 / m * e[j] * std::sin(2.0 * kPi * k * j / m);
      }
    return [a, b, m, period, sx, unit](double phi) {
      const double th = 2.0 * kPi * (sx * phi) / period;
      double s = 0.5 * a[0] + 0.5 * a[m / 2] * std::cos(0.5 * m * th);
      for (int k = 1; k < m / 2; ++k) s += a[k] * std::cos(k * th) + b[k] * std::sin(k * th);
      return unit * s;
    };
  }
  const std::vector<double> phis = uniform_grid(-phi_extent, phi_extent, 513);
  auto e = parallel_map(phis.size(), jobs, [&](std::size_t j) {
    return bo_fast_ground(rc.kappa, rc.xi, rc.lambdaJ, p, sx * phis[j]) - e_ref;
  });
  const PotentialModel spline = PotentialModel::custom(phis, e);
  return [spline, unit](double phi) { return unit * spline.value(phi); };
}

struct Column {
  Column(std::string s, std::string n) : section(std::move(s)), name(std::move(n)) {}
  std::string section;
  std::string name;
  nlohmann::json info = nlohmann::json::object();
  std::vector<std::pair<double, std::vector<double>>> ladders;  // (box half width or NaN, levels)
};

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError(field, "not a number: '" + item + "'");
    }
    if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
      throw ValidationError(field, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(field, "empty list");
  return out;
}

LoadedCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--circuit", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos)
    throw ValidationError("--circuit", "empty circuit file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("--circuit", std::string("invalid JSON: ") + e.what());
  }
  LoadedCircuit c;
  c.description = j;
  if (j.contains("xi") || j.contains("lambdaJ") || j.contains("kappa")) {
    c.rc = ReducedCircuit::from_ratios(j.value("kappa", 0.0), j.value("xi", 1.0), j.value("lambdaJ", 0.0),
                                       j.value("ng", 0.0));
  } else {
    const Reduction r = reduce(circuit_from_json(j));
    c.rc = r.circuit;
    c.description["derived"] = {{"reduced", to_json(r.circuit)}, {"scales", to_json(r.scales)}};
  }
  if (j.contains("potential")) c.potential = PotentialModel::from_json(j["potential"]);
  return c;
}

int cmd_reduce(const CommonOptions& o) {
  const Stopwatch clock;
  require_circuit(o);
  const LoadedCircuit c = load_circuit(o.circuit);
  const int n = o.grid > 0 ? o.grid : 257;
  if (n < 8) throw ValidationError("--grid", "needs at least 8 points");
  RunManifest m("reduce", common_params(o), o.out);
  m.add_input(o.circuit);

  const PotentialModel& p = c.potential;
  const double beta = c.rc.beta;
  const double beta_crit = invertibility_threshold(p);
  const auto [lo, hi] = phase_range(p);
  const std::vector<double> drives = uniform_grid(lo, hi, n);

  SweepTable branches({"drive_phi", "root_index", "phi_c", "jacobian_min", "invertible"},
                      {"rad", "1", "rad", "1", "bool"});
  std::size_t max_roots = 0;
  for (const auto& b : enumerate_branches(p, beta, drives)) {
    max_roots = std::max(max_roots, b.roots.size());
    for (std::size_t i = 0; i < b.roots.size(); ++i)
      branches.add_row({b.drive_phi, (long long)i, b.roots[i], b.jacobian_min, (long long)(b.invertible ? 1 : 0)});
  }
  m.write_csv("branches.csv", branches.to_csv());

  nlohmann::json report{{"circuit", c.description},  {"reduced", to_json(c.rc)}, {"potential", p.to_json()},
                        {"beta", beta},              {"beta_crit", beta_crit},  {"max_roots_per_drive", max_roots}};
  if (beta >= beta_crit) {
    report["verdict"] = "multivalued";
    m.write_json("report.json", report);
    m.finish(clock.seconds(), kRegime);
    std::cerr << "multivalued regime: beta=" << format_number(beta) << " >= beta_crit=" << format_number(beta_crit)
              << "\n";
    std::cout << "verdict: multivalued (beta_crit=" << format_number(beta_crit) << ")\n";
    return kRegime;
  }

  const EffectivePotential compact = effective_potential(p, c.rc, Basis::CompactPhi, drives);
  std::vector<double> xs;
  for (double phi : drives) xs.push_back(std::sqrt(c.rc.xi) * phi);
  const EffectivePotential extended = effective_potential(p, c.rc, Basis::ExtendedX, xs);
  m.write_csv("potential_compact.csv", potential_table(compact).to_csv());
  m.write_csv("potential_extended.csv", potential_table(extended).to_csv());

  Series vs{"V(phi)", {}, {}}, us{"lambdaJ u(phi)", {}, {}};
  for (const auto& s : compact.samples) {
    vs.x.push_back(s.coordinate);
    vs.y.push_back(s.V);
    us.x.push_back(s.coordinate);
    us.y.push_back(c.rc.lambdaJ * p.value(s.coordinate));
  }
  m.write_svg("potential.svg", svg_line_plot({vs, us}, "Effective potential", "phi [rad]", "V [E_C]"));

  report["verdict"] = "single-valued";
  report["minima_compact"] = minima_json(compact);
  report["minima_extended"] = minima_json(extended);
  report["crosscheck_max_deviation_E_C"] = crosscheck_bases(p, c.rc);
  m.write_json("report.json", report);
  m.finish(clock.seconds(), kOk);
  std::cout << "verdict: single-valued (beta=" << format_number(beta) << ", beta_crit=" << format_number(beta_crit)
            << ")\n";
  return kOk;
}

int cmd_bo_sweep(const CommonOptions& o, const BoOptions& b) {
  const Stopwatch clock;
  require_circuit(o);
  const LoadedCircuit c = load_circuit(o.circuit);
  const std::vector<double> kappas = parse_list(o.kappa_ladder.empty() ? "0.6,0.45,0.3" : o.kappa_ladder,
                                                "--kappa-ladder");
  const std::vector<double> xr = parse_list(b.x_range, "--x-range");
  if (xr.size() != 3 || xr[2] < 2 || xr[1] <= xr[0]) throw ValidationError("--x-range", "expected lo,hi,n");
  const std::vector<double> xs = uniform_grid(xr[0], xr[1], int(xr[2]));
  const Grid1D y{b.y_half_width, o.grid > 0 ? o.grid : 1201};

  nlohmann::json params = common_params(o);
  params["x_range"] = b.x_range;
  params["y_half_width"] = b.y_half_width;
  RunManifest m("bo-sweep", params, o.out);
  m.add_input(o.circuit);

  const BOTable t = bo_effective_potential(kappas, xs, c.rc.xi, c.rc.lambdaJ, c.potential, y, o.jobs);
  m.write_csv("bo_table.csv", t.table().to_csv());
  nlohmann::json summary = t.summary();
  summary["circuit"] = to_json(c.rc);
  summary["potential"] = c.potential.to_json();
  m.write_json("bo_summary.json", summary);
  std::vector<Series> series;
  for (std::size_t i = 0; i < kappas.size(); ++i)
    series.push_back({"kappa=" + format_number(kappas[i]), xs, t.normalized[i]});
  m.write_svg("bo.svg", svg_line_plot(series, "Born-Oppenheimer potential estimate", "x [Phi_C]",
                                      "(e0(x)-e0(0))/kappa^2 [hbar omega_C]"));
  m.finish(clock.seconds(), kOk);
  std::cout << "verdict: " << to_string(t.verdict) << "\n";
  return kOk;
}

int cmd_compare(const CommonOptions& o) {
  const Stopwatch clock;
  require_circuit(o);
  const LoadedCircuit c = load_circuit(o.circuit);
  const ReducedCircuit& rc = c.rc;
  const PotentialModel& p = c.potential;
  if (!o.basis.empty() && o.basis != "extended" && o.basis != "compact" && o.basis != "both")
    throw ValidationError("--basis", "expected extended, compact or both");
  const bool do_ext = o.basis.empty() || o.basis == "both" || o.basis == "extended";
  const bool do_cmp = o.basis.empty() || o.basis == "both" || o.basis == "compact";
  const int n1 = o.grid > 0 ? o.grid : 2048;
  const double kin_c = compact_kinetic(o);
  RunManifest m("compare", common_params(o), o.out);
  m.add_input(o.circuit);

  std::vector<Column> columns;
  auto attempt = [&](Column col, auto&& body) {
    try {
      body(col);
    } catch (const std::exception& e) {
      col.info["error"] = e.what();
    }
    columns.push_back(std::move(col));
  };

  if (do_ext) {
    // Extended loop phase with the physical Q^2/2C kinetic term, two boxes.
    const double l1 = 10.0 * kPi;
    const double kin_e = 0.5;
    auto box_run = [&](Column& col, const std::function<double(double)>& v) {
      std::vector<double> samples;
      for (double q : uniform_grid(-l1, l1, 4001)) samples.push_back(v(q));
      const double vmin = *std::min_element(samples.begin(), samples.end());
      const double vmax = *std::max_element(samples.begin(), samples.end());
      const double s = std::max(vmax - vmin, 1.0);
      const double lo = vmax + 0.1 * s, hi = vmax + s;
      col.info["window_E_C"] = {lo, hi};
      nlohmann::json stats = nlohmann::json::array();
      for (int f : {1, 2}) {
        Extended1D e;
        e.grid = {f * l1, f * n1 + (f - 1)};
        e.kinetic = kin_e;
        e.potential = v;
        e.potential_desc = {{"column", col.name}};
        const int est = int(std::ceil(2.0 * e.grid.half_width * std::sqrt((hi - vmin) / kin_e) / kPi * 1.2)) + 10;
        const int k = std::min(e.grid.points / 4, est);
        const SpectrumResult r = lowest_eigenvalues(e, k);
        const SpacingStats st = spacing_stats(r.eigenvalues, lo, hi);
        col.ladders.push_back({e.grid.half_width, std::vector<double>(r.eigenvalues.begin(), r.eigenvalues.begin() + 3)});
        stats.push_back({{"box_half_width", e.grid.half_width}, {"levels_in_window", st.count + 1},
                         {"mean_spacing", st.mean}, {"top_level", r.eigenvalues.back()}});
      }
      col.info["spacing"] = stats;
      col.info["spacing_ratio"] = stats[0]["mean_spacing"].get<double>() / stats[1]["mean_spacing"].get<double>();
    };
    attempt(Column{"extended", "classical_reduced"}, [&](Column& col) {
      const Extended1D e = reduced_extended(p, rc, Basis::CompactPhi, {l1, n1}, kin_e);
      box_run(col, e.potential);
    });
    attempt(Column{"extended", "born_oppenheimer"}, [&](Column& col) {
      if (!(rc.kappa > 0.0)) throw ValidationError("kappa", "the Born-Oppenheimer column needs C' > 0");
      box_run(col, bo_potential(rc, p, 2.0 * l1, o.jobs));
    });
  }

  if (do_cmp) {
    attempt(Column{"compact", "classical_reduced"}, [&](Column& col) {
      const PhaseGrid1D s = reduced_compact(p, rc, 255, kin_c);
      const SpectrumResult r = lowest_eigenvalues(s, 3);
      col.ladders.push_back({kNaN, r.eigenvalues});
      col.info["gap"] = r.eigenvalues[1] - r.eigenvalues[0];
      col.info["depends_on"] = "lambdaJ / xi through V''";
    });
    attempt(Column{"compact", "naive_adiabatic"}, [&](Column& col) {
      if (!(rc.kappa > 0.0)) throw ValidationError("kappa", "the adiabatic column needs C' > 0");
      const NaiveAdiabatic na = naive_compact_adiabatic(rc.kappa, rc.xi, rc.ng, 3, kin_c);
      const double k4 = std::pow(rc.kappa, 4);
      std::vector<double> lv;
      for (double e : na.numerical) lv.push_back(e / k4);
      col.ladders.push_back({kNaN, lv});
      std::vector<double> formula;
      for (double e : na.formula) formula.push_back(e / k4);
      col.info["formula_E_C"] = formula;
      col.info["gap"] = lv[1] - lv[0];
      col.info["depends_on"] = "kappa^4 xi only";
    });
    attempt(Column{"compact", "regularized_2d"}, [&](Column& col) {
      if (!(rc.kappa > 0.0)) throw ValidationError("kappa", "the two-mode column needs C' > 0");
      if (rc.ng != 0.0) throw ValidationError("ng", "the two-mode compact column supports ng = 0 only");
      Regularized2D s;
      s.kappa = rc.kappa;
      s.xi = rc.xi;
      s.lambdaJ = rc.lambdaJ;
      s.potential = p;
      s.basis_y = FastBasis::Compact;
      s.kinetic = kin_c;
      const SpectrumResult r = lowest_eigenvalues(s, 3);
      col.ladders.push_back({kNaN, r.eigenvalues});
      col.info["gap"] = r.eigenvalues[1] - r.eigenvalues[0];
      col.info["spec"] = r.spec;
    });
  }

  SweepTable t({"section", "column", "box_half_width", "level", "energy"}, {"label", "label", "rad", "1", "E_C"});
  nlohmann::json report{{"circuit", to_json(rc)}, {"potential", p.to_json()},
                        {"compact_kinetic", kin_c}, {"extended_kinetic", 0.5}};
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : columns) {
    for (const auto& [w, lv] : col.ladders)
      for (std::size_t i = 0; i < lv.size(); ++i) t.add_row({col.section, col.name, w, (long long)i, lv[i]});
    nlohmann::json cj = col.info;
    cj["section"] = col.section;
    cj["column"] = col.name;
    cols.push_back(cj);
    std::cout << col.section << "/" << col.name << ": "
              << (col.info.contains("error") ? "error: " + col.info["error"].get<std::string>() : "ok") << "\n";
  }
  report["columns"] = cols;
  m.write_csv("compare.csv", t.to_csv());
  m.write_json("compare.json", report);
  m.finish(clock.seconds(), kOk);
  return kOk;
}

int cmd_dynamics(const CommonOptions& o, const DynamicsOptions& d) {
  const Stopwatch clock;
  require_circuit(o);
  const LoadedCircuit c = load_circuit(o.circuit);
  IntegrateOptions io;
  io.dt = d.dt;
  io.energy_tolerance = d.energy_tolerance;
  if (d.scheme == "yoshida6") io.scheme = Integrator::Yoshida6;
  else if (d.scheme == "stormer-verlet") io.scheme = Integrator::StormerVerlet;
  else throw ValidationError("--scheme", "expected yoshida6 or stormer-verlet");
  if (!(d.dt > 0.0)) throw ValidationError("--dt", "must be positive");
  // whole number of steps so that the halved runs end at the same time
  const double t_req = d.t_end > 0.0 ? d.t_end : default_slow_period(c.rc, c.potential);
  const long steps = std::max(1L, std::lround(std::ceil(t_req / d.dt - 1e-9)));
  const double t_end = double(steps) * d.dt;
  io.record_every = int(std::max(1L, steps / 5000));

  nlohmann::json params = common_params(o);
  params.update({{"t_end", t_end}, {"dt", d.dt}, {"x0", d.x0}, {"px0", d.px0}, {"scheme", d.scheme},
                 {"energy_tolerance", d.energy_tolerance}, {"step_halving", d.step_halving}});
  RunManifest m("dynamics", params, o.out);
  m.add_input(o.circuit);

  const double y0 = c.rc.kappa * (c.rc.kappa > 0.0 ? slow_eta(c.rc, c.potential, d.x0) : 0.0);
  const PhaseState s0{d.x0, d.px0, y0, 0.0};
  const TrajectoryRecord r = integrate(c.rc, c.potential, s0, t_end, io);
  m.write_csv("trajectory.csv", r.to_csv());
  nlohmann::json out = r.meta();
  out["initial_state"] = {{"x", s0.x}, {"p_x", s0.px}, {"y", s0.y}, {"p_y", s0.py}};
  out["t_end"] = t_end;

  if (d.step_halving) {
    // endpoint differences between dt, dt/2, dt/4
    std::vector<PhaseState> ends;
    for (int f : {1, 2, 4}) {
      IntegrateOptions h = io;
      h.dt = d.dt / f;
      h.record_every = 1 << 30;
      ends.push_back(integrate(c.rc, c.potential, s0, t_end, h).states.back());
    }
    auto dist = [](const PhaseState& a, const PhaseState& b) {
      return std::sqrt(std::pow(a.x - b.x, 2) + std::pow(a.px - b.px, 2) + std::pow(a.y - b.y, 2) +
                       std::pow(a.py - b.py, 2));
    };
    const double e1 = dist(ends[0], ends[1]), e2 = dist(ends[1], ends[2]);
    out["step_halving"] = {{"difference_dt_dt2", e1}, {"difference_dt2_dt4", e2}, {"ratio", e1 / e2}};
    std::cout << "step-halving ratio: " << format_number(e1 / e2) << "\n";
  }
  m.write_json("dynamics.json", out);
  Series xs{"x(t)", {}, {}};
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    xs.x.push_back(r.times[i]);
    xs.y.push_back(r.states[i].x);
  }
  m.write_svg("trajectory.svg", svg_line_plot({xs}, "Slow coordinate", "t [1/omega'_r]", "x [Phi_C]"));
  m.finish(clock.seconds(), kOk);
  std::cout << "max relative energy error: " << format_number(r.max_relative_energy_error) << "\n";
  return kOk;
}

int cmd_foster(const CommonOptions& o, const FosterOptions& f) {
  const Stopwatch clock;
  if (f.samples.empty() == f.model.empty())
    throw ValidationError("--samples/--model", "give exactly one of --samples or --model");
  nlohmann::json params{{"resonances", f.resonances}, {"l_zero", f.l_zero}, {"omega", f.omega}};
  RunManifest m("foster", params, o.out);

  if (!f.samples.empty()) {
    m.add_input(f.samples);
    std::optional<bool> lz;
    if (f.l_zero == "yes") lz = true;
    else if (f.l_zero == "no") lz = false;
    else if (f.l_zero != "auto") throw ValidationError("--l-zero", "expected auto, yes or no");
    const std::vector<FosterSample> data = read_foster_csv(f.samples);
    const FosterFit fit = fit_foster(data, f.resonances, lz);
    SweepTable t({"omega", "ImY_data", "ImY_fit", "residual"}, {"rad/s", "S", "S", "S"});
    Series sd{"data", {}, {}}, sf{"fit", {}, {}};
    for (const auto& s : data) {
      const double y = susceptance(fit.model, s.omega);
      t.add_row({s.omega, s.im_y, y, y - s.im_y});
      sd.x.push_back(s.omega), sd.y.push_back(s.im_y);
      sf.x.push_back(s.omega), sf.y.push_back(y);
    }
    m.write_csv("foster_fit.csv", t.to_csv());
    m.write_json("foster_model.json", {{"model", fit.model.to_json()}, {"report", fit.report.to_json()}});
    m.write_svg("foster.svg", svg_line_plot({sd, sf}, "Foster fit", "omega [rad/s]", "Im Y [S]"));
    std::cout << "rms residual: " << format_number(fit.report.rms) << "\n";
  } else {
    m.add_input(f.model);
    std::ifstream in(f.model);
    if (!in) throw ValidationError("--model", "cannot open " + f.model);
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos)
      throw ValidationError("--model", "empty model file");
    const FosterModel model = FosterModel::from_json(nlohmann::json::parse(ss.str()));
    const std::vector<double> w = parse_list(f.omega, "--omega");
    if (w.size() != 3 || w[2] < 2 || !(w[1] > w[0]) || !(w[0] > 0.0))
      throw ValidationError("--omega", "expected lo,hi,n with 0 < lo < hi");
    SweepTable t({"omega", "ImY", "dImY_domega"}, {"rad/s", "S", "S s/rad"});
    for (double om : uniform_grid(w[0], w[1], int(w[2]))) {
      try {
        t.add_row({om, susceptance(model, om), susceptance_slope(model, om)});
      } catch (const PoleProximity&) {
        t.add_row({om, kNaN, kNaN});
      }
    }
    m.write_csv("admittance.csv", t.to_csv());
  }
  m.finish(clock.seconds(), kOk);
  return kOk;
}

}  // namespace circadia::cli
