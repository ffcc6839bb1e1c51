#include "pnes/covariance.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "pnes/error.hpp"
#include "pnes/spectral.hpp"

namespace pnes {

CovarianceMatrix::CovarianceMatrix(const Eigen::Matrix4d& m) : m_(m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw DomainError("CovarianceMatrix: matrix is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
}

CovarianceMatrix CovarianceMatrix::standard_form(double diag, double c) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity() * diag;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return CovarianceMatrix(m);
}

bool CovarianceMatrix::is_standard_form(double tol) const {
  const Eigen::Matrix4d ref = standard_form(m_(0, 0), m_(0, 2)).matrix();
  return (m_ - ref).cwiseAbs().maxCoeff() <= tol;
}

CovarianceMatrix CovarianceMatrix::partially_transposed() const {
  const Eigen::Vector4d lambda(1.0, 1.0, 1.0, -1.0);
  return CovarianceMatrix(lambda.asDiagonal() * m_ * lambda.asDiagonal());
}

Eigen::Vector2d CovarianceMatrix::symplectic_eigenvalues() const {
  if (is_standard_form()) {
    // Standard form splits into two identical 2x2 problems; both
    // eigenvalues equal sqrt(a^2 - c^2).
    const double a = m_(0, 0), c = m_(0, 2);
    const double nu = std::sqrt(std::max(a * a - c * c, 0.0));
    return {nu, nu};
  }
  return pnes::symplectic_eigenvalues(m_);
}

bool CovarianceMatrix::is_physical(double tol) const {
  Eigen::Matrix4cd h = m_.cast<cplx>() + cplx(0.0, 0.5) * symplectic_form().cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
  w(0, 1) = w(2, 3) = 1.0;
  w(1, 0) = w(3, 2) = -1.0;
  return w;
}

Eigen::Vector2d symplectic_eigenvalues(const Eigen::Matrix4d& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sigma);
  if (es.eigenvalues().minCoeff() <= 0.0) throw DomainError("symplectic_eigenvalues: matrix not positive definite");
  const Eigen::Matrix4d s = es.operatorSqrt();
  const Eigen::Matrix4d k = s * symplectic_form() * s;
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(k);
  // Singular values come in equal pairs, descending.
  const Eigen::Vector4d sv = svd.singularValues();
  return {0.5 * (sv(2) + sv(3)), 0.5 * (sv(0) + sv(1))};
}

CovarianceMatrix cm_from_density(const DensityMatrix& rho) {
  const double norm = rho.trace().real();
  auto mom = [&](int p, int q, int r, int s) { return moment(rho, p, q, r, s) / norm; };
  const double r2 = std::sqrt(2.0);
  const cplx a = mom(0, 1, 0, 0), b = mom(0, 0, 0, 1);
  const Eigen::Vector4d mean(r2 * a.real(), r2 * a.imag(), r2 * b.real(), r2 * b.imag());

  Eigen::Matrix4d m;
  auto local = [&](int base, cplx sq, double num) {
    m(base, base) = sq.real() + num + 0.5;
    m(base + 1, base + 1) = -sq.real() + num + 0.5;
    m(base, base + 1) = m(base + 1, base) = sq.imag();
  };
  local(0, mom(0, 2, 0, 0), mom(1, 1, 0, 0).real());
  local(2, mom(0, 0, 0, 2), mom(0, 0, 1, 1).real());
  const cplx ab = mom(0, 1, 0, 1);
  const cplx adb = mom(1, 0, 0, 1);  // <a^dagger b>
  m(0, 2) = ab.real() + adb.real();
  m(0, 3) = ab.imag() + adb.imag();
  m(1, 2) = ab.imag() - adb.imag();
  m(1, 3) = -ab.real() + adb.real();
  m(2, 0) = m(0, 2);
  m(3, 0) = m(0, 3);
  m(2, 1) = m(1, 2);
  m(3, 1) = m(1, 3);
  m -= mean * mean.transpose();
  return CovarianceMatrix(m);
}

}  // namespace pnes
