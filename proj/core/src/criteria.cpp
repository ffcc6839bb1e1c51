#include "pnes/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "pnes/error.hpp"
#include "pnes/spectral.hpp"

namespace pnes {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::SI: return "si";
    case Criterion::SH: return "sh";
    case Criterion::SP: return "sp";
    case Criterion::RE: return "re";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  for (Criterion c : {Criterion::SI, Criterion::SH, Criterion::SP, Criterion::RE}) {
    if (name == to_string(c)) return c;
  }
  throw ConfigError("unknown criterion '" + std::string(name) + "' (valid: si, sh, sp, re)");
}

Verdict simon(const CovarianceMatrix& sigma) {
  if (sigma.symplectic_eigenvalues()(0) < 0.5 - kDetectionMargin) {
    throw DomainError("simon: covariance matrix violates the uncertainty relation");
  }
  const double nu = sigma.partially_transposed().symplectic_eigenvalues()(0);
  return {Criterion::SI, nu < 0.5 - kDetectionMargin, nu};
}

double t_simon(double n, double c, const ChannelParams& params) {
  params.validate();
  const double excess = std::abs(c) - n;
  if (excess <= 0.0) return 0.0;
  if (params.n_bath == 0.0) return std::numeric_limits<double>::infinity();
  return std::log1p(excess / params.n_bath) / params.gamma;
}

std::vector<Monomial> sh_monomials(int max_degree) {
  if (max_degree < 0) throw DomainError("sh_monomials: negative degree");
  std::vector<Monomial> out;
  for (int d = 0; d <= max_degree; ++d) {
    for (int p = d; p >= 0; --p) {
      for (int q = d - p; q >= 0; --q) {
        for (int r = d - p - q; r >= 0; --r) out.push_back({p, q, r, d - p - q - r});
      }
    }
  }
  return out;
}

namespace {

struct Hop {
  int x;
  int y;
  double coeff;
};

// Pairs (x, y) on one mode with a^dagger^pj a^qj |x> and a^dagger^pi a^qi |y>
// landing on the same level, with the product of their amplitudes.
std::vector<Hop> hops(int pi, int qi, int pj, int qj, int dim) {
  std::vector<Hop> out;
  for (int x = 0; x < dim; ++x) {
    const auto aj = ladder_monomial(pj, qj, x, dim);
    if (!aj) continue;
    const int y = aj->target + qi - pi;
    if (y < 0 || y >= dim) continue;
    const auto ai = ladder_monomial(pi, qi, y, dim);
    if (!ai) continue;
    out.push_back({x, y, aj->amplitude * ai->amplitude});
  }
  return out;
}

template <class Matrix>
std::vector<double> leading_minima(const Matrix& m, const std::vector<Monomial>& basis) {
  std::vector<double> out;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const bool closes = k + 1 == basis.size() || basis[k + 1].degree() != basis[k].degree();
    if (!closes) continue;
    const Eigen::Index n = static_cast<Eigen::Index>(k + 1);
    Matrix lead = m.topLeftCorner(n, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(lead, Eigen::EigenvaluesOnly);
    out.push_back(es.eigenvalues().minCoeff());
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd sh_moment_matrix(const DensityMatrix& rho, const std::vector<Monomial>& basis) {
  const int d = rho.dim();
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Monomial& fi = basis[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      const Monomial& fj = basis[j];
      // x - y is fixed for the pair, so a single block of rho^PT is read:
      // rho^PT[x, y] = rho[(x1, y2), (y1, x2)].
      const int d1 = (fj.q - fj.p) - (fi.q - fi.p);
      const int d2 = (fj.s - fj.r) - (fi.s - fi.r);
      if (std::abs(d1) >= d || std::abs(d2) >= d) continue;
      const auto* b = rho.find({d1, -d2});
      if (!b) continue;
      const auto h1 = hops(fi.p, fi.q, fj.p, fj.q, d);
      const auto h2 = hops(fi.r, fi.s, fj.r, fj.s, d);
      const int o1 = DensityMatrix::offset(d1), o2 = DensityMatrix::offset(-d2);
      cplx acc{};
      for (const Hop& a : h1) {
        for (const Hop& c : h2) acc += a.coeff * c.coeff * (*b)(a.x - o1, c.y - o2);
      }
      m(i, j) = acc;
    }
  }
  return m;
}

ShReport shchukin_vogel_report(const DensityMatrix& rho, int max_order) {
  if (max_order < 2 || max_order % 2 != 0 || max_order > 2 * (rho.dim() - 1)) {
    throw RangeError("shchukin_vogel: order " + std::to_string(max_order) + " must be even and at most " +
                     std::to_string(2 * (rho.dim() - 1)));
  }
  const auto basis = sh_monomials(max_order / 2);
  const Eigen::MatrixXcd m = sh_moment_matrix(rho, basis);
  ShReport report{{Criterion::SH, false, 0.0}, {}};
  if ((m.imag().array() == 0.0).all()) {
    report.leading_min_eigenvalues = leading_minima(Eigen::MatrixXd(m.real()), basis);
  } else {
    report.leading_min_eigenvalues = leading_minima(m, basis);
  }
  const double lo = *std::min_element(report.leading_min_eigenvalues.begin(), report.leading_min_eigenvalues.end());
  report.verdict = {Criterion::SH, lo < -kDetectionMargin, lo};
  return report;
}

Verdict shchukin_vogel(const DensityMatrix& rho, int max_order) {
  return shchukin_vogel_report(rho, max_order).verdict;
}

WitnessSet::WitnessSet(int dim, int count, std::uint64_t seed, bool decreasing) : seed_(seed) {
  if (dim < 2 || count < 1) throw DomainError("WitnessSet: need dim >= 2 and count >= 1");
  phi_.resize(dim, count);
  max_sq_.resize(count);
  std::mt19937_64 rng(seed);
  std::vector<double> w(static_cast<std::size_t>(dim));
  for (int k = 0; k < count; ++k) {
    double total = 0.0;
    for (double& v : w) {
      const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      total += v = -std::log(u);
    }
    if (decreasing) std::sort(w.begin(), w.end(), std::greater<>());
    double mx = 0.0;
    for (int n = 0; n < dim; ++n) {
      const double p = w[n] / total;
      phi_(n, k) = std::sqrt(p);
      mx = std::max(mx, p);
    }
    max_sq_(k) = mx;
  }
}

Verdict sperling_vogel(const DensityMatrix& rho, const WitnessSet& witnesses) {
  const int w = witnesses.dim();
  if (rho.dim() < w) {
    throw DomainError("sperling_vogel: state dimension " + std::to_string(rho.dim()) + " below witness dimension " +
                      std::to_string(w));
  }
  const double tr = rho.trace().real();
  Eigen::MatrixXd b(w, w);
  for (int m = 0; m < w; ++m) {
    for (int n = 0; n < w; ++n) b(m, n) = rho(m, m, n, n).real() / tr;
  }
  const Eigen::MatrixXd& phi = witnesses.vectors();
  const Eigen::RowVectorXd quad = (b * phi).cwiseProduct(phi).colwise().sum();
  const double margin = (quad - witnesses.max_squares().transpose()).maxCoeff();
  return {Criterion::SP, margin > kDetectionMargin, margin};
}

Verdict realignment_test(const DensityMatrix& rho) {
  const double norm = realigned_trace_norm(rho) / std::abs(rho.trace().real());
  return {Criterion::RE, norm > 1.0 + kDetectionMargin, norm - 1.0};
}

Verdict evaluate(Criterion c, const DensityMatrix& rho, const CriterionContext& ctx) {
  switch (c) {
    case Criterion::SI: {
      DensityMatrix unit = rho;
      unit *= 1.0 / rho.trace().real();
      return simon(cm_from_density(unit));
    }
    case Criterion::SH: return shchukin_vogel(rho, ctx.sh_order);
    case Criterion::SP:
      if (!ctx.witnesses) throw ConfigError("sperling_vogel: no witness set configured");
      return sperling_vogel(rho, *ctx.witnesses);
    case Criterion::RE: return realignment_test(rho);
  }
  throw ConfigError("unknown criterion");
}

TimeEstimate separation_time(const PnesState& state, const ChannelParams& params, Criterion criterion,
                             const SeparationOptions& opts) {
  opts.search.validate();
  const auto grid = time_grid(opts.search);
  std::vector<char> flags;
  flags.reserve(grid.size());
  if (criterion == Criterion::SI && opts.si_path == SiPath::Analytic) {
    // CM route: the channel acts on sigma in closed form, no density matrix needed
    const auto sigma0 = cm_of_pnes(state);
    auto detected = [&](double t) { return simon(cm_evolve(sigma0, t, params)).entangled; };
    for (double t : grid) flags.push_back(detected(t));
    return last_true(grid, flags, detected, opts.search.precision);
  }
  Trajectory traj(to_density(state), params, opts.evolution);
  auto detected = [&](double t) { return evaluate(criterion, traj.at(t), opts.context).entangled; };
  for (double t : grid) flags.push_back(detected(t));
  return last_true(grid, flags, detected, opts.search.precision);
}

}  // namespace pnes
