#pragma once

#include <Eigen/Dense>

#include "pnes/density.hpp"

namespace pnes {

/// Two-mode covariance matrix sigma_ij = (1/2)<{dR_i, dR_j}> with quadrature
/// ordering (x_a, p_a, x_b, p_b), x = (a + a^dagger)/sqrt2. Vacuum is I/2.
class CovarianceMatrix {
 public:
  CovarianceMatrix() : m_(Eigen::Matrix4d::Identity() * 0.5) {}
  /// Throws DomainError unless `m` is symmetric to 1e-12.
  explicit CovarianceMatrix(const Eigen::Matrix4d& m);

  /// Diagonal `diag`, off-diagonal block diag(c, -c): the form taken by a
  /// PNES (diag = N + 1/2, c = C) and by its evolution in the channel.
  static CovarianceMatrix standard_form(double diag, double c);

  const Eigen::Matrix4d& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  bool is_standard_form(double tol = 1e-12) const;

  /// Lambda sigma Lambda with Lambda = diag(1, 1, 1, -1).
  CovarianceMatrix partially_transposed() const;

  /// Symplectic eigenvalues, ascending.
  Eigen::Vector2d symplectic_eigenvalues() const;

  /// sigma + (i/2) Omega >= -tol
  bool is_physical(double tol = 1e-9) const;

 private:
  Eigen::Matrix4d m_;
};

/// Symplectic form blockdiag([[0,1],[-1,0]], [[0,1],[-1,0]]).
Eigen::Matrix4d symplectic_form();

/// Symplectic eigenvalues of any positive-definite 4x4 matrix, ascending:
/// the singular values of S Omega S with S = sqrt(sigma).
Eigen::Vector2d symplectic_eigenvalues(const Eigen::Matrix4d& sigma);

/// CM of the state rho, first moments subtracted.
CovarianceMatrix cm_from_density(const DensityMatrix& rho);

}  // namespace pnes
