#pragma once

#include <complex>
#include <compare>
#include <map>

#include <Eigen/Dense>

namespace pnes {

using cplx = std::complex<double>;

/// Coherence order of a matrix element <n1,n2| . |m1,m2> on each mode:
/// (q1, q2) = (n1 - m1, n2 - m2).
struct Coherence {
  int q1 = 0;
  int q2 = 0;
  auto operator<=>(const Coherence&) const = default;
};

/// Operator on the two-mode Fock space truncated to `dim` levels per mode.
///
/// Storage is split by coherence order. The block for (q1, q2) is a dense
/// (dim-|q1|) x (dim-|q2|) matrix X with
///
///   X(i1, i2) = <n1, n2| rho |n1 - q1, n2 - q2>,   n_k = i_k + max(q_k, 0).
///
/// Absent blocks are zero. Phase-covariant dynamics never mixes blocks, and
/// states descended from a PNES occupy only the q1 == q2 blocks, so the
/// representation stays O(dim^3) for them while remaining fully general.
///
/// Dense import/export uses the row-major basis index n1 * dim + n2.
///
/// The type carries no positivity invariant: partial transposes and
/// differences of states use it too.
class DensityMatrix {
 public:
  using Block = Eigen::MatrixXcd;
  using BlockMap = std::map<Coherence, Block>;

  explicit DensityMatrix(int dim);

  int dim() const noexcept { return dim_; }

  static int basis_index(int n1, int n2, int dim) noexcept { return n1 * dim + n2; }
  /// Number of rows (q = q1) or columns (q = q2) in a block.
  static int extent(int q, int dim) noexcept { return dim - (q < 0 ? -q : q); }
  /// Fock level of block row/column 0 for coherence q.
  static int offset(int q) noexcept { return q > 0 ? q : 0; }

  cplx operator()(int n1, int n2, int m1, int m2) const;
  void set(int n1, int n2, int m1, int m2, cplx value);

  const Block* find(Coherence c) const;
  /// Returns the block, inserting a zero block when absent.
  Block& block(Coherence c);
  const BlockMap& blocks() const noexcept { return blocks_; }

  /// Drops blocks whose entries are all exactly zero.
  void prune();

  cplx trace() const;
  bool is_real() const;
  /// max |rho_xy - conj(rho_yx)|
  double hermiticity_defect() const;

  DensityMatrix& operator+=(const DensityMatrix& other);
  DensityMatrix& operator-=(const DensityMatrix& other);
  DensityMatrix& operator*=(double s);

  /// Same operator on `new_dim` levels: truncates or zero-pads.
  DensityMatrix resized(int new_dim) const;

  Eigen::MatrixXcd to_dense() const;
  static DensityMatrix from_dense(const Eigen::MatrixXcd& m, int dim);

 private:
  int dim_;
  BlockMap blocks_;
};

inline DensityMatrix operator-(DensityMatrix a, const DensityMatrix& b) {
  a -= b;
  return a;
}
inline DensityMatrix operator+(DensityMatrix a, const DensityMatrix& b) {
  a += b;
  return a;
}

}  // namespace pnes
