#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "pnes/density.hpp"
#include "pnes/fock.hpp"

namespace pnes {

/// |psi><psi| for a PNES.
DensityMatrix to_density(const PnesState& state);

/// rho_a (x) rho_b from single-mode matrices of equal dimension.
DensityMatrix product_state(const Eigen::MatrixXcd& rho_a, const Eigen::MatrixXcd& rho_b);

/// Truncated thermal state with mean occupation `mean`, renormalized.
Eigen::MatrixXcd thermal_state(int dim, double mean);

/// Reduced state of mode 0 (a) or 1 (b).
Eigen::MatrixXcd reduced_state(const DensityMatrix& rho, int mode);

/// Diagonal of the reduced state of `mode`.
std::vector<double> marginal_populations(const DensityMatrix& rho, int mode);

/// Tr(rho a^dagger^p a^q b^dagger^r b^s) with truncated ladder operators.
/// Throws RangeError when p + q or r + s reach the truncation.
cplx moment(const DensityMatrix& rho, int p, int q, int r, int s);

/// All dim^2 eigenvalues of a Hermitian operator, ascending. The operator is
/// split into its connected components over the Fock basis and each
/// component is diagonalized on its own.
std::vector<double> hermitian_spectrum(const DensityMatrix& rho);

/// -Tr rho ln rho over eigenvalues above 1e-14. An eigenvalue below -tol
/// raises PositivityError.
double von_neumann_entropy(const DensityMatrix& rho, double tol = 1e-9);

/// sum |lambda_i| of a Hermitian operator.
double hermitian_trace_norm(const DensityMatrix& rho);

/// (1/2) || a - b ||_1
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Tr rho^2
double purity(const DensityMatrix& rho);

/// Transpose on mode b.
DensityMatrix partial_transpose(const DensityMatrix& rho);

/// Realignment R[(m,mu),(n,nu)] = rho[(m,n),(mu,nu)] with row index
/// m * dim + mu and column index n * dim + nu. Applying it twice returns rho.
Eigen::SparseMatrix<cplx> realign(const DensityMatrix& rho);

/// ||R(rho)||_1 computed block-wise without forming R.
double realigned_trace_norm(const DensityMatrix& rho);

/// Trace norm of an arbitrary sparse matrix, splitting it into independent
/// row/column components first.
double trace_norm(const Eigen::SparseMatrix<cplx>& m);

}  // namespace pnes
