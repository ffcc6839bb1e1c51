#include "pnes/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "pnes/error.hpp"

namespace pnes {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Component id and position inside the component for every node.
struct Components {
  std::vector<int> id;
  std::vector<int> pos;
  std::vector<int> size;
};

Components label(DisjointSets& sets, int n) {
  Components c;
  c.id.assign(static_cast<std::size_t>(n), -1);
  c.pos.assign(static_cast<std::size_t>(n), 0);
  std::vector<int> root_to_id(static_cast<std::size_t>(n), -1);
  for (int x = 0; x < n; ++x) {
    const int r = sets.find(x);
    if (root_to_id[r] < 0) {
      root_to_id[r] = static_cast<int>(c.size.size());
      c.size.push_back(0);
    }
    c.id[x] = root_to_id[r];
    c.pos[x] = c.size[c.id[x]]++;
  }
  return c;
}

template <class Matrix>
double nuclear_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

template <class Matrix>
void append_eigenvalues(const Matrix& m, std::vector<double>& out) {
  if (m.rows() == 1) {
    out.push_back(std::real(m(0, 0)));
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw PositivityError("hermitian_spectrum: eigensolver failed");
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
}

template <class Scalar>
std::vector<double> spectrum_impl(const DensityMatrix& rho) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int d = rho.dim();
  const int d2 = d * d;
  DisjointSets sets(d2);
  for (const auto& [c, b] : rho.blocks()) {
    const int o1 = DensityMatrix::offset(c.q1), o2 = DensityMatrix::offset(c.q2);
    for (int i2 = 0; i2 < b.cols(); ++i2) {
      for (int i1 = 0; i1 < b.rows(); ++i1) {
        if (b(i1, i2) == cplx{}) continue;
        const int n1 = i1 + o1, n2 = i2 + o2;
        sets.unite(DensityMatrix::basis_index(n1, n2, d), DensityMatrix::basis_index(n1 - c.q1, n2 - c.q2, d));
      }
    }
  }
  const Components comp = label(sets, d2);
  std::vector<Matrix> mats;
  mats.reserve(comp.size.size());
  for (int s : comp.size) mats.push_back(Matrix::Zero(s, s));
  for (const auto& [c, b] : rho.blocks()) {
    const int o1 = DensityMatrix::offset(c.q1), o2 = DensityMatrix::offset(c.q2);
    for (int i2 = 0; i2 < b.cols(); ++i2) {
      for (int i1 = 0; i1 < b.rows(); ++i1) {
        const cplx v = b(i1, i2);
        if (v == cplx{}) continue;
        const int n1 = i1 + o1, n2 = i2 + o2;
        const int x = DensityMatrix::basis_index(n1, n2, d);
        const int y = DensityMatrix::basis_index(n1 - c.q1, n2 - c.q2, d);
        if constexpr (std::is_same_v<Scalar, double>) {
          mats[comp.id[x]](comp.pos[x], comp.pos[y]) = v.real();
        } else {
          mats[comp.id[x]](comp.pos[x], comp.pos[y]) = v;
        }
      }
    }
  }
  std::vector<double> eig;
  eig.reserve(static_cast<std::size_t>(d2));
  for (const Matrix& m : mats) append_eigenvalues(m, eig);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace

DensityMatrix to_density(const PnesState& state) {
  const int d = state.dim();
  DensityMatrix rho(d);
  for (int q = -(d - 1); q < d; ++q) {
    const int o = DensityMatrix::offset(q);
    const int len = DensityMatrix::extent(q, d);
    bool any = false;
    for (int i = 0; i < len && !any; ++i) any = state[i + o] * state[i + o - q] != 0.0;
    if (!any) continue;
    auto& b = rho.block({q, q});
    for (int i = 0; i < len; ++i) b(i, i) = state[i + o] * state[i + o - q];
  }
  return rho;
}

DensityMatrix product_state(const Eigen::MatrixXcd& rho_a, const Eigen::MatrixXcd& rho_b) {
  const int d = static_cast<int>(rho_a.rows());
  if (rho_a.cols() != d || rho_b.rows() != d || rho_b.cols() != d) {
    throw DomainError("product_state: factors must be square with equal dimension");
  }
  auto diagonal = [d](const Eigen::MatrixXcd& m, int q) {
    const int o = DensityMatrix::offset(q);
    Eigen::VectorXcd v(DensityMatrix::extent(q, d));
    for (int i = 0; i < v.size(); ++i) v(i) = m(i + o, i + o - q);
    return v;
  };
  DensityMatrix rho(d);
  for (int q1 = -(d - 1); q1 < d; ++q1) {
    const Eigen::VectorXcd u = diagonal(rho_a, q1);
    if ((u.array() == cplx{}).all()) continue;
    for (int q2 = -(d - 1); q2 < d; ++q2) {
      const Eigen::VectorXcd w = diagonal(rho_b, q2);
      if ((w.array() == cplx{}).all()) continue;
      rho.block({q1, q2}) = u * w.transpose();
    }
  }
  return rho;
}

Eigen::MatrixXcd thermal_state(int dim, double mean) {
  if (dim < 1 || !(mean >= 0.0)) throw DomainError("thermal_state: need dim >= 1 and mean >= 0");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const double ratio = mean / (1.0 + mean);
  double p = 1.0, total = 0.0;
  for (int n = 0; n < dim; ++n) {
    m(n, n) = p;
    total += p;
    p *= ratio;
  }
  return m / total;
}

Eigen::MatrixXcd reduced_state(const DensityMatrix& rho, int mode) {
  if (mode != 0 && mode != 1) throw DomainError("reduced_state: mode must be 0 or 1");
  const int d = rho.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [c, b] : rho.blocks()) {
    if (mode == 0 && c.q2 == 0) {
      const int o = DensityMatrix::offset(c.q1);
      const Eigen::VectorXcd s = b.rowwise().sum();
      for (int i = 0; i < s.size(); ++i) out(i + o, i + o - c.q1) = s(i);
    } else if (mode == 1 && c.q1 == 0) {
      const int o = DensityMatrix::offset(c.q2);
      const Eigen::RowVectorXcd s = b.colwise().sum();
      for (int i = 0; i < s.size(); ++i) out(i + o, i + o - c.q2) = s(i);
    }
  }
  return out;
}

std::vector<double> marginal_populations(const DensityMatrix& rho, int mode) {
  const Eigen::MatrixXcd r = reduced_state(rho, mode);
  std::vector<double> p(static_cast<std::size_t>(rho.dim()));
  for (int n = 0; n < rho.dim(); ++n) p[n] = r(n, n).real();
  return p;
}

cplx moment(const DensityMatrix& rho, int p, int q, int r, int s) {
  const int d = rho.dim();
  if (p < 0 || q < 0 || r < 0 || s < 0) throw DomainError("moment: negative power");
  if (p + q >= d || r + s >= d) {
    throw RangeError("moment: order " + std::to_string(p + q) + "/" + std::to_string(r + s) +
                     " needs more than " + std::to_string(d) + " levels");
  }
  // Tr(rho O) = sum_x c(x) rho[x, pi(x)] where O|x> = c(x)|pi(x)>.
  const Coherence c{q - p, s - r};
  const auto* b = rho.find(c);
  if (!b) return {};
  cplx total{};
  for (int x1 = 0; x1 < d; ++x1) {
    const auto a1 = ladder_monomial(p, q, x1, d);
    if (!a1) continue;
    for (int x2 = 0; x2 < d; ++x2) {
      const auto a2 = ladder_monomial(r, s, x2, d);
      if (!a2) continue;
      total += a1->amplitude * a2->amplitude *
               (*b)(x1 - DensityMatrix::offset(c.q1), x2 - DensityMatrix::offset(c.q2));
    }
  }
  return total;
}

std::vector<double> hermitian_spectrum(const DensityMatrix& rho) {
  return rho.is_real() ? spectrum_impl<double>(rho) : spectrum_impl<cplx>(rho);
}

double von_neumann_entropy(const DensityMatrix& rho, double tol) {
  double s = 0.0;
  for (double l : hermitian_spectrum(rho)) {
    if (l < -tol) {
      throw PositivityError("von_neumann_entropy: eigenvalue " + std::to_string(l) + " below -" +
                            std::to_string(tol));
    }
    if (l > 1e-14) s -= l * std::log(l);
  }
  return s;
}

double hermitian_trace_norm(const DensityMatrix& rho) {
  double s = 0.0;
  for (double l : hermitian_spectrum(rho)) s += std::abs(l);
  return s;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return 0.5 * hermitian_trace_norm(a - b);
}

double purity(const DensityMatrix& rho) {
  double s = 0.0;
  for (const auto& [c, b] : rho.blocks()) s += b.squaredNorm();
  return s;
}

DensityMatrix partial_transpose(const DensityMatrix& rho) {
  DensityMatrix out(rho.dim());
  for (const auto& [c, b] : rho.blocks()) out.block({c.q1, -c.q2}) = b;
  return out;
}

Eigen::SparseMatrix<cplx> realign(const DensityMatrix& rho) {
  const int d = rho.dim();
  std::vector<Eigen::Triplet<cplx>> trips;
  for (const auto& [c, b] : rho.blocks()) {
    const int o1 = DensityMatrix::offset(c.q1), o2 = DensityMatrix::offset(c.q2);
    for (int i2 = 0; i2 < b.cols(); ++i2) {
      for (int i1 = 0; i1 < b.rows(); ++i1) {
        if (b(i1, i2) == cplx{}) continue;
        const int m = i1 + o1, n = i2 + o2;
        trips.emplace_back(m * d + (m - c.q1), n * d + (n - c.q2), b(i1, i2));
      }
    }
  }
  Eigen::SparseMatrix<cplx> r(d * d, d * d);
  r.setFromTriplets(trips.begin(), trips.end());
  return r;
}

double realigned_trace_norm(const DensityMatrix& rho) {
  // Rows of R with fixed m - mu form one group, columns with fixed n - nu
  // another; block (q1, q2) of rho is exactly the (q1, q2) tile of R.
  const int d = rho.dim();
  const int groups = 2 * d - 1;
  DisjointSets sets(2 * groups);
  std::vector<Coherence> present;
  for (const auto& [c, b] : rho.blocks()) {
    if ((b.array() == cplx{}).all()) continue;
    present.push_back(c);
    sets.unite(c.q1 + d - 1, groups + c.q2 + d - 1);
  }
  std::map<int, std::vector<Coherence>> by_root;
  for (const Coherence& c : present) by_root[sets.find(c.q1 + d - 1)].push_back(c);

  double total = 0.0;
  const bool real = rho.is_real();
  for (const auto& [root, tiles] : by_root) {
    std::map<int, int> row_at, col_at;
    int rows = 0, cols = 0;
    for (const Coherence& c : tiles) {
      if (row_at.emplace(c.q1, rows).second) rows += DensityMatrix::extent(c.q1, d);
      if (col_at.emplace(c.q2, cols).second) cols += DensityMatrix::extent(c.q2, d);
    }
    if (tiles.size() == 1) {
      const auto& b = *rho.find(tiles.front());
      total += real ? nuclear_norm(Eigen::MatrixXd(b.real())) : nuclear_norm(b);
      continue;
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
    for (const Coherence& c : tiles) {
      const auto& b = *rho.find(c);
      m.block(row_at[c.q1], col_at[c.q2], b.rows(), b.cols()) = b;
    }
    total += real ? nuclear_norm(Eigen::MatrixXd(m.real())) : nuclear_norm(m);
  }
  return total;
}

double trace_norm(const Eigen::SparseMatrix<cplx>& m) {
  const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
  DisjointSets sets(rows + cols);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(m, k); it; ++it) {
      if (it.value() != cplx{}) sets.unite(static_cast<int>(it.row()), rows + static_cast<int>(it.col()));
    }
  }
  const Components comp = label(sets, rows + cols);
  std::vector<int> nr(comp.size.size(), 0), nc(comp.size.size(), 0);
  std::vector<int> local(static_cast<std::size_t>(rows + cols));
  for (int x = 0; x < rows + cols; ++x) local[x] = x < rows ? nr[comp.id[x]]++ : nc[comp.id[x]]++;
  std::vector<Eigen::MatrixXcd> mats;
  for (std::size_t k = 0; k < comp.size.size(); ++k) mats.push_back(Eigen::MatrixXcd::Zero(nr[k], nc[k]));
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(m, k); it; ++it) {
      const int r = static_cast<int>(it.row()), c = rows + static_cast<int>(it.col());
      mats[comp.id[r]](local[r], local[c]) = it.value();
    }
  }
  double total = 0.0;
  for (const auto& mat : mats) total += nuclear_norm(mat);
  return total;
}

}  // namespace pnes
