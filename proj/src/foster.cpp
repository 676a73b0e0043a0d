#include "circadia/foster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "circadia/errors.hpp"

namespace circadia {

void FosterModel::validate() const {
  if (!(c_inf >= 0.0) || !std::isfinite(c_inf)) throw ValidationError("c_inf", "must be nonnegative");
  if (l_zero && !(*l_zero > 0.0)) throw ValidationError("l_zero", "must be positive");
  for (std::size_t k = 0; k < resonances.size(); ++k) {
    const auto& r = resonances[k];
    if (!(r.inv_L >= 0.0) || !std::isfinite(r.inv_L)) throw ValidationError("inv_L", "residues must be nonnegative");
    if (!(r.omega > 0.0) || !std::isfinite(r.omega)) throw ValidationError("omega", "must be positive");
    if (k > 0 && !(r.omega > resonances[k - 1].omega))
      throw ValidationError("omega", "resonances must be strictly increasing and distinct");
  }
}

nlohmann::json FosterModel::to_json() const {
  nlohmann::json res = nlohmann::json::array();
  for (const auto& r : resonances) res.push_back({{"inv_L", r.inv_L}, {"L", 1.0 / r.inv_L}, {"omega", r.omega}});
  nlohmann::json j{{"c_inf", c_inf}, {"resonances", res}};
  j["l_zero"] = l_zero ? nlohmann::json(*l_zero) : nlohmann::json(nullptr);
  return j;
}

FosterModel FosterModel::from_json(const nlohmann::json& j) {
  FosterModel m;
  m.c_inf = j.value("c_inf", 0.0);
  if (j.contains("l_zero") && !j["l_zero"].is_null()) m.l_zero = j["l_zero"].get<double>();
  for (const auto& r : j.value("resonances", nlohmann::json::array())) {
    Resonance x;
    if (r.contains("inv_L")) x.inv_L = r["inv_L"].get<double>();
    else if (r.contains("L")) x.inv_L = 1.0 / r["L"].get<double>();
    else throw ValidationError("resonances", "each entry needs inv_L or L");
    x.omega = r.at("omega").get<double>();
    m.resonances.push_back(x);
  }
  m.validate();
  return m;
}

double susceptance(const FosterModel& m, double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("omega", "must be positive and finite");
  double b = m.c_inf * w;
  if (m.l_zero) b -= 1.0 / (*m.l_zero * w);
  for (const auto& r : m.resonances) {
    if (std::abs(w - r.omega) <= 1e-9 * r.omega)
      throw PoleProximity("omega=" + std::to_string(w) + " lies on the pole at " + std::to_string(r.omega));
    b += r.inv_L * w / (r.omega * r.omega - w * w);
  }
  return b;
}

std::vector<std::complex<double>> eval_admittance(const FosterModel& m, const std::vector<double>& omegas) {
  std::vector<std::complex<double>> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.emplace_back(0.0, susceptance(m, w));
  return out;
}

double susceptance_slope(const FosterModel& m, double w) {
  susceptance(m, w);  // domain and pole checks
  double s = m.c_inf;
  if (m.l_zero) s += 1.0 / (*m.l_zero * w * w);
  for (const auto& r : m.resonances) {
    const double d = r.omega * r.omega - w * w;
    s += r.inv_L * (r.omega * r.omega + w * w) / (d * d);
  }
  return s;
}

nlohmann::json FitReport::to_json() const {
  return {{"rms", rms},
          {"parameters", parameters},
          {"values", values},
          {"standard_errors", standard_errors},
          {"asymptotes", asymptotes},
          {"l_zero_detected", l_zero_detected},
          {"sweeps", sweeps}};
}

namespace {

struct Problem {
  Eigen::VectorXd w, b;
  bool l_zero = false;
  int n = 0;
  int linear_count() const { return 1 + (l_zero ? 1 : 0) + n; }
};

Eigen::MatrixXd linear_basis(const Problem& p, const std::vector<double>& poles) {
  const int m = int(p.w.size());
  Eigen::MatrixXd a(m, p.linear_count());
  for (int i = 0; i < m; ++i) {
    const double w = p.w(i);
    int c = 0;
    a(i, c++) = w;
    if (p.l_zero) a(i, c++) = -1.0 / w;
    for (double om : poles) a(i, c++) = w / (om * om - w * w);
  }
  return a;
}

// Linear coefficients and residual norm^2 at fixed poles.
double project(const Problem& p, const std::vector<double>& poles, Eigen::VectorXd* coef = nullptr) {
  const Eigen::MatrixXd a = linear_basis(p, poles);
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(p.b);
  if (coef) *coef = c;
  return (a * c - p.b).squaredNorm();
}

}  // namespace

FosterFit fit_foster(std::vector<FosterSample> samples, int n, std::optional<bool> with_l_zero) {
  if (n < 0) throw ValidationError("n_resonances", "must be nonnegative");
  if (int(samples.size()) < 3 * (1 + 2 * n))
    throw ValidationError("samples", "need at least 3 (1 + 2 n_resonances) samples");
  for (const auto& s : samples) {
    if (!(s.omega > 0.0) || !std::isfinite(s.omega) || !std::isfinite(s.im_y))
      throw ValidationError("samples", "omega must be positive and values finite");
    if (std::abs(s.re_y) > 1e-9 * std::hypot(s.re_y, s.im_y))
      throw ValidationError("ReY", "lossy sample at omega=" + std::to_string(s.omega));
  }
  std::sort(samples.begin(), samples.end(), [](auto& a, auto& b) { return a.omega < b.omega; });
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].omega == samples[i - 1].omega) throw ValidationError("samples", "duplicate omega");

  // Im Y increases between poles, so a decrease marks a pole in between.
  std::vector<std::pair<double, double>> brackets;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].im_y < samples[i - 1].im_y) brackets.emplace_back(samples[i - 1].omega, samples[i].omega);
  FitReport rep;
  for (auto [lo, hi] : brackets) {
    rep.asymptotes.push_back(lo);
    rep.asymptotes.push_back(hi);
  }
  if (int(brackets.size()) != n) {
    std::vector<double> mids;
    for (auto [lo, hi] : brackets) mids.push_back(0.5 * (lo + hi));
    throw StructuralMismatch("detected " + std::to_string(brackets.size()) + " poles, requested " +
                                 std::to_string(n),
                             mids);
  }

  Problem p;
  p.n = n;
  p.l_zero = with_l_zero.value_or(samples.front().im_y < 0.0);
  rep.l_zero_detected = p.l_zero;
  p.w.resize(samples.size());
  p.b.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    p.w(i) = samples[i].omega;
    p.b(i) = samples[i].im_y;
  }

  std::vector<double> poles;
  for (auto [lo, hi] : brackets) poles.push_back(std::sqrt(lo * hi));

  // cyclic golden-section search, one pole at a time inside its bracket
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double prev = project(p, poles);
  for (int sweep = 0; sweep < (n > 1 ? 20 : 1) && n > 0; ++sweep) {
    rep.sweeps = sweep + 1;
    for (int k = 0; k < n; ++k) {
      const double span = brackets[k].second - brackets[k].first;
      double a = brackets[k].first + 1e-12 * span, d = brackets[k].second - 1e-12 * span;
      auto f = [&](double om) {
        poles[k] = om;
        return project(p, poles);
      };
      double x1 = d - g * (d - a), x2 = a + g * (d - a);
      double f1 = f(x1), f2 = f(x2);
      while (d - a > 1e-15 * d) {
        if (f1 < f2) {
          d = x2, x2 = x1, f2 = f1;
          x1 = d - g * (d - a), f1 = f(x1);
        } else {
          a = x1, x1 = x2, f1 = f2;
          x2 = a + g * (d - a), f2 = f(x2);
        }
      }
      poles[k] = f1 < f2 ? x1 : x2;
    }
    const double now = project(p, poles);
    if (std::abs(prev - now) <= 1e-14 * std::max(prev, 1e-300)) break;
    prev = now;
  }

  // Gauss-Newton polish on all parameters
  Eigen::VectorXd coef;
  double cost = project(p, poles, &coef);
  const int nl = p.linear_count(), m = int(p.w.size());
  auto jacobian = [&](const Eigen::VectorXd& c, const std::vector<double>& om) {
    Eigen::MatrixXd j(m, nl + n);
    j.leftCols(nl) = linear_basis(p, om);
    const int off = 1 + (p.l_zero ? 1 : 0);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < m; ++i) {
        const double w = p.w(i), d = om[k] * om[k] - w * w;
        j(i, nl + k) = -c(off + k) * w * 2.0 * om[k] / (d * d);
      }
    return j;
  };
  for (int it = 0; it < 8 && n > 0; ++it) {
    const Eigen::MatrixXd j = jacobian(coef, poles);
    const Eigen::VectorXd r = linear_basis(p, poles) * coef - p.b;
    const Eigen::VectorXd step = j.colPivHouseholderQr().solve(-r);
    std::vector<double> om = poles;
    bool inside = true;
    for (int k = 0; k < n; ++k) {
      om[k] += step(nl + k);
      if (!(om[k] > brackets[k].first && om[k] < brackets[k].second)) inside = false;
    }
    if (!inside) break;
    Eigen::VectorXd c2;
    const double cost2 = project(p, om, &c2);
    if (!(cost2 < cost)) break;
    poles = om, coef = c2, cost = cost2;
  }

  FosterFit fit;
  const int off = 1 + (p.l_zero ? 1 : 0);
  const double scale = p.b.cwiseAbs().maxCoeff() + 1e-300;
  auto nonneg = [&](double v, const char* name) {
    if (v < 0.0 && std::abs(v) * p.w.maxCoeff() > 1e-10 * scale)
      throw NumericalError(std::string("fit violates the positive-real structure: negative ") + name);
    return std::max(v, 0.0);
  };
  fit.model.c_inf = nonneg(coef(0), "c_inf");
  if (p.l_zero) {
    if (!(coef(1) > 0.0)) throw NumericalError("fit violates the positive-real structure: l_zero");
    fit.model.l_zero = 1.0 / coef(1);
  }
  for (int k = 0; k < n; ++k) fit.model.resonances.push_back({nonneg(coef(off + k), "residue"), poles[k]});
  fit.model.validate();

  rep.rms = std::sqrt(cost / m);
  rep.parameters.push_back("c_inf");
  rep.values.push_back(coef(0));
  if (p.l_zero) {
    rep.parameters.push_back("inv_l_zero");
    rep.values.push_back(coef(1));
  }
  for (int k = 0; k < n; ++k) {
    rep.parameters.push_back("inv_L" + std::to_string(k + 1));
    rep.values.push_back(coef(off + k));
  }
  for (int k = 0; k < n; ++k) {
    rep.parameters.push_back("Omega" + std::to_string(k + 1));
    rep.values.push_back(poles[k]);
  }
  const Eigen::MatrixXd j = jacobian(coef, poles);
  const int dof = std::max(1, m - (nl + n));
  const double sigma2 = cost / dof;
  const Eigen::MatrixXd jtj = j.transpose() * j;
  const Eigen::MatrixXd cov = sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  for (int i = 0; i < nl + n; ++i) rep.standard_errors.push_back(std::sqrt(std::max(cov(i, i), 0.0)));
  fit.report = rep;
  return fit;
}

std::vector<FosterSample> read_foster_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("samples", "cannot open " + path);
  std::vector<FosterSample> out;
  // column positions of omega, ImY and ReY; a header may reorder or omit them
  int c_omega = 0, c_im = 1, c_re = 2;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<std::string> cells;
    for (std::string c; ls >> c;) cells.push_back(c);
    std::vector<double> v;
    bool numeric = !cells.empty();
    for (const auto& c : cells) {
      char* end = nullptr;
      v.push_back(std::strtod(c.c_str(), &end));
      numeric = numeric && end && *end == '\0';
    }
    if (!numeric) {
      if (!first) throw ValidationError("samples", "malformed line: " + line);
      first = false;
      c_omega = c_im = c_re = -1;
      for (int i = 0; i < int(cells.size()); ++i) {
        const std::string name = cells[i].substr(0, cells[i].find('['));
        if (name == "omega") c_omega = i;
        if (name == "ImY") c_im = i;
        if (name == "ReY") c_re = i;
      }
      if (c_omega < 0 || c_im < 0) throw ValidationError("samples", "header needs omega and ImY columns");
      continue;
    }
    first = false;
    if (int(v.size()) <= std::max(c_omega, c_im)) throw ValidationError("samples", "malformed line: " + line);
    FosterSample s;
    s.omega = v[c_omega];
    s.im_y = v[c_im];
    if (std::isnan(s.im_y)) continue;  // pole marker written by model evaluation
    if (c_re >= 0 && c_re < int(v.size())) s.re_y = v[c_re];
    out.push_back(s);
  }
  if (out.empty()) throw ValidationError("samples", "no samples in " + path);
  return out;
}

}  // namespace circadia
