#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace circadia {

/// Lowest eigenpairs of a real symmetric (or Hermitian) operator.
struct EigenPairs {
  std::vector<double> values;
  /// Column i belongs to values[i]; empty for complex problems.
  Eigen::MatrixXd vectors;
  /// ||H v - E v|| / ||v|| per pair.
  std::vector<double> residuals;
  /// Upper bound of |H| used to scale the residual contract.
  double spectral_scale = 0.0;
  int iterations = 0;
  std::string method;
};

/// Symmetric band matrix in LAPACK upper storage: ab(kd + i - j, j) = A(i, j).
class BandedMatrix {
 public:
  BandedMatrix(int n, int kd);
  int size() const noexcept { return n_; }
  int bandwidth() const noexcept { return kd_; }
  /// Sets A(i, j) and A(j, i); |i - j| <= kd.
  void set(int i, int j, double v);
  void add(int i, int j, double v);
  double get(int i, int j) const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  double inf_norm() const;
  const Eigen::MatrixXd& storage() const noexcept { return ab_; }

 private:
  int n_;
  int kd_;
  Eigen::MatrixXd ab_;
};

/// k lowest eigenpairs of a band matrix (LAPACK dsbevx; inverse iteration
/// supplies vectors for large n).
EigenPairs banded_lowest(const BandedMatrix& a, int k);

EigenPairs dense_lowest(const Eigen::MatrixXd& a, int k);

/// Eigenvalues and residuals of a Hermitian matrix; no vectors are returned.
EigenPairs dense_hermitian_lowest(const Eigen::MatrixXcd& a, int k);

struct LanczosOptions {
  int max_iterations = 1500;
  /// Ritz convergence tolerance relative to the shifted-inverse eigenvalue.
  double tolerance = 1e-12;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Shift-invert Lanczos with full reorthogonalization. The shift sits below
/// the spectrum, verified through the inertia of the LDL^T factorization.
EigenPairs lanczos_lowest(const Eigen::SparseMatrix<double>& h, int k,
                          const LanczosOptions& opt = {});

double sparse_inf_norm(const Eigen::SparseMatrix<double>& h);

}  // namespace circadia
