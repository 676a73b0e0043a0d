#include "circadia/eigensolvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include "circadia/errors.hpp"

namespace circadia {

BandedMatrix::BandedMatrix(int n, int kd) : n_(n), kd_(kd), ab_(Eigen::MatrixXd::Zero(kd + 1, n)) {
  if (n < 1 || kd < 0 || kd >= n) throw ValidationError("banded", "invalid size or bandwidth");
}

void BandedMatrix::set(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  ab_(kd_ + i - j, j) = v;
}

void BandedMatrix::add(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  ab_(kd_ + i - j, j) += v;
}

double BandedMatrix::get(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (j - i > kd_) return 0.0;
  return ab_(kd_ + i - j, j);
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    y(j) += ab_(kd_, j) * x(j);
    for (int d = 1; d <= kd_ && j - d >= 0; ++d) {
      const double a = ab_(kd_ - d, j);  // A(j-d, j)
      y(j - d) += a * x(j);
      y(j) += a * x(j - d);
    }
  }
  return y;
}

double BandedMatrix::inf_norm() const {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n_);
  for (int j = 0; j < n_; ++j) {
    row(j) += std::abs(ab_(kd_, j));
    for (int d = 1; d <= kd_ && j - d >= 0; ++d) {
      const double a = std::abs(ab_(kd_ - d, j));
      row(j - d) += a;
      row(j) += a;
    }
  }
  return row.maxCoeff();
}

namespace {

void check_k(int k, int n) {
  if (k < 1 || k > n) throw ValidationError("k", "must lie in [1, dimension]");
}

// Inverse iteration for one eigenvector of a band matrix near `lambda`.
Eigen::VectorXd band_inverse_iteration(const BandedMatrix& a, double lambda, std::mt19937_64& rng,
                                       const Eigen::MatrixXd& previous, int ncols) {
  const int n = a.size(), kd = a.bandwidth();
  const int ldab = 3 * kd + 1;
  Eigen::MatrixXd gb = Eigen::MatrixXd::Zero(ldab, n);
  // general band storage: gb(2kd + i - j, j) = A(i, j)
  std::vector<lapack_int> ipiv(n);
  lapack_int info = 0;
  double offset = 1e-13;
  for (int attempt = 0; attempt < 4; ++attempt, offset *= 100.0) {
    const double shift = lambda + offset * std::max(1.0, std::abs(lambda));
    gb.setZero();
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - kd); i <= std::min(n - 1, j + kd); ++i)
        gb(2 * kd + i - j, j) = a.get(i, j) - (i == j ? shift : 0.0);
    info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, gb.data(), ldab, ipiv.data());
    if (info == 0) break;
  }
  if (info != 0) throw NumericalError("dgbtrf failed");
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  for (int it = 0; it < 3; ++it) {
    for (int c = 0; c < ncols; ++c) v -= previous.col(c).dot(v) * previous.col(c);
    v.normalize();
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kd, kd, 1, gb.data(), ldab, ipiv.data(), v.data(), n);
    if (info != 0) throw NumericalError("dgbtrs failed");
    for (int c = 0; c < ncols; ++c) v -= previous.col(c).dot(v) * previous.col(c);
    v.normalize();
  }
  return v;
}

}  // namespace

EigenPairs banded_lowest(const BandedMatrix& a, int k) {
  const int n = a.size(), kd = a.bandwidth();
  check_k(k, n);
  EigenPairs out;
  out.method = "lapack-dsbevx";
  out.spectral_scale = a.inf_norm();
  Eigen::MatrixXd ab = a.storage();
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  lapack_int m = 0;
  const bool direct_vectors = n <= 256;
  Eigen::MatrixXd z;
  Eigen::MatrixXd q;
  if (direct_vectors) {
    z.resize(n, k);
    q.resize(n, n);
  }
  const lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, direct_vectors ? 'V' : 'N', 'I', 'U', n, kd, ab.data(), kd + 1,
      direct_vectors ? q.data() : nullptr, n, 0.0, 0.0, 1, k, 2.0 * LAPACKE_dlamch('S'), &m, w.data(),
      direct_vectors ? z.data() : nullptr, n, ifail.data());
  if (info != 0 || m != k)
    throw NonConvergence("dsbevx failed (info=" + std::to_string(info) + ")", {});
  out.values.assign(w.begin(), w.begin() + k);
  if (direct_vectors) {
    out.vectors = std::move(z);
  } else {
    out.vectors.resize(n, k);
    std::mt19937_64 rng(0x1234abcdULL);
    for (int c = 0; c < k; ++c) {
      // vectors of nearly degenerate values are orthogonalized within their cluster
      int first = c;
      while (first > 0 && std::abs(out.values[first - 1] - out.values[c]) <
                              1e-8 * std::max(1.0, std::abs(out.values[c])))
        --first;
      Eigen::MatrixXd prev = out.vectors.middleCols(first, c - first);
      out.vectors.col(c) = band_inverse_iteration(a, out.values[c], rng, prev, c - first);
    }
  }
  out.residuals.resize(k);
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXd v = out.vectors.col(c);
    out.residuals[c] = (a.multiply(v) - out.values[c] * v).norm() / v.norm();
  }
  return out;
}

EigenPairs dense_lowest(const Eigen::MatrixXd& a, int k) {
  check_k(k, int(a.rows()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NonConvergence("dense eigensolver failed", {});
  EigenPairs out;
  out.method = "dense-selfadjoint";
  out.spectral_scale = a.cwiseAbs().rowwise().sum().maxCoeff();
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  out.vectors = es.eigenvectors().leftCols(k);
  for (int c = 0; c < k; ++c)
    out.residuals.push_back((a * out.vectors.col(c) - out.values[c] * out.vectors.col(c)).norm());
  return out;
}

EigenPairs dense_hermitian_lowest(const Eigen::MatrixXcd& a, int k) {
  check_k(k, int(a.rows()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success) throw NonConvergence("dense eigensolver failed", {});
  EigenPairs out;
  out.method = "dense-hermitian";
  out.spectral_scale = a.cwiseAbs().rowwise().sum().maxCoeff();
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXcd v = es.eigenvectors().col(c);
    out.residuals.push_back((a * v - out.values[c] * v).norm());
  }
  return out;
}

double sparse_inf_norm(const Eigen::SparseMatrix<double>& h) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(h.rows());
  for (int c = 0; c < h.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, c); it; ++it) row(it.row()) += std::abs(it.value());
  return row.maxCoeff();
}

namespace {

using Sparse = Eigen::SparseMatrix<double>;
using Ldlt = Eigen::SimplicialLDLT<Sparse>;

double gershgorin_lower(const Sparse& h) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(h.rows());
  Eigen::VectorXd off = Eigen::VectorXd::Zero(h.rows());
  for (int c = 0; c < h.outerSize(); ++c)
    for (Sparse::InnerIterator it(h, c); it; ++it) {
      if (it.row() == it.col()) diag(it.row()) += it.value();
      else off(it.row()) += std::abs(it.value());
    }
  return (diag - off).minCoeff();
}

// Number of eigenvalues below sigma, or -1 when the factorization fails.
int count_below(const Sparse& h, const Sparse& eye, double sigma, Ldlt& ldlt, bool analyzed) {
  Sparse a = h - sigma * eye;
  if (!analyzed) ldlt.analyzePattern(a);
  ldlt.factorize(a);
  if (ldlt.info() != Eigen::Success) return -1;
  const auto& d = ldlt.vectorD();
  int neg = 0;
  for (int i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0 || !std::isfinite(d(i))) return -1;
    if (d(i) < 0.0) ++neg;
  }
  return neg;
}

// Smallest Ritz value after a short unshifted Lanczos run.
double rough_bottom(const Sparse& h, std::mt19937_64& rng) {
  const int n = int(h.rows());
  const int m = std::min(n, 60);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  V.col(0) = v.normalized();
  std::vector<double> alpha, beta;
  int steps = 0;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = h * V.col(j);
    alpha.push_back(V.col(j).dot(w));
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    steps = j + 1;
    const double b = w.norm();
    if (j + 1 == m || b < 1e-14) break;
    beta.push_back(b);
    V.col(j + 1) = w / b;
  }
  Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), steps);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max(steps - 1, 0));
  for (int i = 0; i + 1 < steps; ++i) e(i) = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

EigenPairs lanczos_lowest(const Sparse& h, int k, const LanczosOptions& opt) {
  const int n = int(h.rows());
  check_k(k, n);
  if (n <= 600) {
    EigenPairs d = dense_lowest(Eigen::MatrixXd(h), k);
    d.method = "dense-selfadjoint (small sparse)";
    return d;
  }
  const double scale = sparse_inf_norm(h);
  std::mt19937_64 rng(opt.seed);

  Sparse eye(n, n);
  eye.setIdentity();
  Ldlt ldlt;
  bool analyzed = false;

  // Bracket the bottom of the spectrum by inertia and keep the shift below it.
  double lo = gershgorin_lower(h) - 1e-9 * scale;
  double hi = rough_bottom(h, rng) + 1e-12 * scale;
  int factorizations = 0;
  for (int it = 0; it < 12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int cnt = count_below(h, eye, mid, ldlt, analyzed);
    analyzed = true;
    ++factorizations;
    if (cnt == 0) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-3 * (std::abs(hi) + 1e-6 * scale)) break;
  }
  double sigma = lo;
  if (count_below(h, eye, sigma, ldlt, analyzed) != 0)
    throw NonConvergence("could not place the Lanczos shift below the spectrum", {});

  std::normal_distribution<double> nd;
  const int chunk = 64;
  Eigen::MatrixXd V(n, chunk);
  {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = nd(rng);
    V.col(0) = v.normalized();
  }
  std::vector<double> alpha, beta;
  std::vector<double> best_res;

  for (int j = 0; j < opt.max_iterations && j < n; ++j) {
    Eigen::VectorXd w = ldlt.solve(V.col(j));
    const double a = V.col(j).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    double b = w.norm();
    const int m = j + 1;
    const bool exhausted = b < 1e-14 * std::abs(a) || m == n;

    if (m >= k && (m % 8 == 0 || exhausted || m + 1 == opt.max_iterations)) {
      Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd e(m - 1);
      for (int i = 0; i + 1 < m; ++i) e(i) = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      bool ritz_ok = true;
      for (int i = 0; i < k; ++i) {
        const int col = m - 1 - i;  // largest mu <-> lowest eigenvalue
        const double mu = es.eigenvalues()(col);
        const double est = std::abs(b * es.eigenvectors()(m - 1, col));
        if (!(mu > 0.0) || est > opt.tolerance * std::abs(mu)) ritz_ok = false;
      }
      if (ritz_ok || exhausted) {
        EigenPairs out;
        out.method = "shift-invert-lanczos";
        out.spectral_scale = scale;
        out.iterations = m;
        out.vectors.resize(n, k);
        for (int i = 0; i < k; ++i) {
          const int col = m - 1 - i;
          out.values.push_back(sigma + 1.0 / es.eigenvalues()(col));
          Eigen::VectorXd x = V.leftCols(m) * es.eigenvectors().col(col);
          x.normalize();
          out.vectors.col(i) = x;
          out.residuals.push_back((h * x - out.values.back() * x).norm());
        }
        best_res = out.residuals;
        const bool res_ok = std::all_of(out.residuals.begin(), out.residuals.end(),
                                        [&](double r) { return r < 1e-8 * scale; });
        if (res_ok) {
          // No eigenvalue missed: exactly k lie below a point just above the k-th.
          const double top = out.values.back();
          const double above = top + 1e-7 * (top - out.values.front()) + 1e-11 * scale;
          const int cnt = count_below(h, eye, above, ldlt, analyzed);
          // restore the shifted factorization
          count_below(h, eye, sigma, ldlt, analyzed);
          if (cnt == k || cnt < 0 || exhausted) return out;
        }
      }
    }
    if (exhausted) break;
    beta.push_back(b);
    if (m >= V.cols()) V.conservativeResize(Eigen::NoChange, V.cols() + chunk);
    V.col(m) = w / b;
  }
  throw NonConvergence("Lanczos did not converge within the iteration cap", best_res);
}

}  // namespace circadia
