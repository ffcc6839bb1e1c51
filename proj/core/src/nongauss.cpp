#include "pnes/nongauss.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pnes/error.hpp"
#include "pnes/spectral.hpp"

namespace pnes {

double entropic_f(double x) {
  if (!(x >= 0.5 - 1e-12)) throw DomainError("entropic_f: argument " + std::to_string(x) + " below 1/2");
  if (x <= 0.5) return 0.0;
  const double lo = x - 0.5;
  return (x + 0.5) * std::log(x + 0.5) - lo * std::log(lo);
}

double entropic_f_inverse(double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("entropic_f_inverse: argument must be >= 0");
  if (y == 0.0) return 0.5;
  // f(x) ~ ln(x) + 1 for large x
  double lo = 0.5, hi = 1.0;
  while (entropic_f(hi) < y) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (entropic_f(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double gaussian_entropy(const CovarianceMatrix& sigma) {
  const Eigen::Vector2d nu = sigma.symplectic_eigenvalues();
  return entropic_f(nu(0)) + entropic_f(nu(1));
}

NonGaussReport nongaussianity(const DensityMatrix& rho) {
  DensityMatrix unit = rho;
  unit *= 1.0 / rho.trace().real();
  const CovarianceMatrix sigma = cm_from_density(unit);
  NonGaussReport r{};
  r.d_minus = sigma.symplectic_eigenvalues()(0);
  r.s_tau = gaussian_entropy(sigma);
  r.s_rho = von_neumann_entropy(unit);
  r.delta = r.s_tau - r.s_rho;
  if (r.delta < 0.0 && r.delta >= -1e-9) r.delta = 0.0;
  return r;
}

double delta0_closed_form(double n, double c) {
  const double d2 = (n + 0.5) * (n + 0.5) - c * c;
  if (n < 0.0 || d2 < 0.25 - 1e-9) {
    throw DomainError("delta0_closed_form: (N, C) = (" + std::to_string(n) + ", " + std::to_string(c) +
                      ") is not physical");
  }
  return 2.0 * entropic_f(std::sqrt(std::max(d2, 0.25)));
}

double t_si_from_delta0(double n, double delta0, const ChannelParams& params) {
  params.validate();
  if (!(delta0 >= 0.0) || delta0 > 2.0 * entropic_f(n + 0.5) + 1e-12) {
    throw DomainError("t_si_from_delta0: delta0 outside [0, 2 f(N + 1/2)]");
  }
  const double nu = entropic_f_inverse(0.5 * delta0);
  const double c = std::sqrt(std::max((n + 0.5) * (n + 0.5) - nu * nu, 0.0));
  if (c <= n) return 0.0;
  if (params.n_bath == 0.0) return std::numeric_limits<double>::infinity();
  return std::log1p((c - n) / params.n_bath) / params.gamma;
}

TimeEstimate gaussification_time(Trajectory& trajectory, double threshold, const TimeSearchOptions& opts) {
  const auto grid = time_grid(opts);
  auto below = [&](double t) { return nongaussianity(trajectory.at(t)).delta < threshold; };
  std::vector<char> flags;
  flags.reserve(grid.size());
  for (double t : grid) {
    flags.push_back(below(t));
    if (flags.back()) break;
  }
  flags.resize(grid.size(), 1);
  return first_true(grid, flags, below, opts.precision);
}

TimeEstimate gaussification_time(const PnesState& state, const ChannelParams& params, double threshold,
                                 const TimeSearchOptions& opts, const EvolutionSpec& spec) {
  if (!(threshold > 0.0)) throw DomainError("gaussification_time: threshold must be > 0");
  Trajectory traj(to_density(state), params, spec);
  return gaussification_time(traj, threshold, opts);
}

}  // namespace pnes
