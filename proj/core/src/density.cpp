#include "pnes/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pnes/error.hpp"

namespace pnes {

namespace {

bool in_range(int n, int dim) { return n >= 0 && n < dim; }

}  // namespace

DensityMatrix::DensityMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw DomainError("DensityMatrix: dimension must be >= 1, got " + std::to_string(dim));
}

cplx DensityMatrix::operator()(int n1, int n2, int m1, int m2) const {
  if (!in_range(n1, dim_) || !in_range(n2, dim_) || !in_range(m1, dim_) || !in_range(m2, dim_)) {
    throw RangeError("DensityMatrix: level outside truncation");
  }
  const Coherence c{n1 - m1, n2 - m2};
  const Block* b = find(c);
  if (!b) return {0.0, 0.0};
  return (*b)(n1 - offset(c.q1), n2 - offset(c.q2));
}

void DensityMatrix::set(int n1, int n2, int m1, int m2, cplx value) {
  if (!in_range(n1, dim_) || !in_range(n2, dim_) || !in_range(m1, dim_) || !in_range(m2, dim_)) {
    throw RangeError("DensityMatrix: level outside truncation");
  }
  const Coherence c{n1 - m1, n2 - m2};
  if (value == cplx{} && !find(c)) return;
  block(c)(n1 - offset(c.q1), n2 - offset(c.q2)) = value;
}

const DensityMatrix::Block* DensityMatrix::find(Coherence c) const {
  auto it = blocks_.find(c);
  return it == blocks_.end() ? nullptr : &it->second;
}

DensityMatrix::Block& DensityMatrix::block(Coherence c) {
  if (extent(c.q1, dim_) <= 0 || extent(c.q2, dim_) <= 0) {
    throw RangeError("DensityMatrix: coherence order exceeds truncation");
  }
  auto it = blocks_.find(c);
  if (it == blocks_.end()) {
    it = blocks_.emplace(c, Block::Zero(extent(c.q1, dim_), extent(c.q2, dim_))).first;
  }
  return it->second;
}

void DensityMatrix::prune() {
  std::erase_if(blocks_, [](const auto& kv) { return (kv.second.array() == cplx{}).all(); });
}

cplx DensityMatrix::trace() const {
  const Block* b = find({0, 0});
  return b ? b->sum() : cplx{};
}

bool DensityMatrix::is_real() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const auto& kv) { return (kv.second.imag().array() == 0.0).all(); });
}

double DensityMatrix::hermiticity_defect() const {
  // rho^dagger maps block (q1, q2) onto the conjugate of block (-q1, -q2),
  // entry for entry.
  double worst = 0.0;
  for (const auto& [c, b] : blocks_) {
    const Block* mirror = find({-c.q1, -c.q2});
    const double d = mirror ? (b - mirror->conjugate()).cwiseAbs().maxCoeff() : b.cwiseAbs().maxCoeff();
    worst = std::max(worst, d);
  }
  return worst;
}

DensityMatrix& DensityMatrix::operator+=(const DensityMatrix& other) {
  if (other.dim_ != dim_) throw DomainError("DensityMatrix: dimension mismatch");
  for (const auto& [c, b] : other.blocks_) block(c) += b;
  return *this;
}

DensityMatrix& DensityMatrix::operator-=(const DensityMatrix& other) {
  if (other.dim_ != dim_) throw DomainError("DensityMatrix: dimension mismatch");
  for (const auto& [c, b] : other.blocks_) block(c) -= b;
  return *this;
}

DensityMatrix& DensityMatrix::operator*=(double s) {
  for (auto& [c, b] : blocks_) b *= s;
  return *this;
}

DensityMatrix DensityMatrix::resized(int new_dim) const {
  DensityMatrix out(new_dim);
  for (const auto& [c, b] : blocks_) {
    const int r = extent(c.q1, new_dim);
    const int k = extent(c.q2, new_dim);
    if (r <= 0 || k <= 0) continue;
    Block& dst = out.block(c);
    const int rr = std::min(r, static_cast<int>(b.rows()));
    const int kk = std::min(k, static_cast<int>(b.cols()));
    dst.topLeftCorner(rr, kk) = b.topLeftCorner(rr, kk);
  }
  out.prune();
  return out;
}

Eigen::MatrixXcd DensityMatrix::to_dense() const {
  const int d2 = dim_ * dim_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d2, d2);
  for (const auto& [c, b] : blocks_) {
    const int o1 = offset(c.q1), o2 = offset(c.q2);
    for (int i1 = 0; i1 < b.rows(); ++i1) {
      for (int i2 = 0; i2 < b.cols(); ++i2) {
        const int n1 = i1 + o1, n2 = i2 + o2;
        m(basis_index(n1, n2, dim_), basis_index(n1 - c.q1, n2 - c.q2, dim_)) = b(i1, i2);
      }
    }
  }
  return m;
}

DensityMatrix DensityMatrix::from_dense(const Eigen::MatrixXcd& m, int dim) {
  const int d2 = dim * dim;
  if (m.rows() != d2 || m.cols() != d2) throw DomainError("from_dense: shape does not match dimension");
  DensityMatrix out(dim);
  for (int x = 0; x < d2; ++x) {
    for (int y = 0; y < d2; ++y) {
      if (m(x, y) != cplx{}) out.set(x / dim, x % dim, y / dim, y % dim, m(x, y));
    }
  }
  return out;
}

}  // namespace pnes
