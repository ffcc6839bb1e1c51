#pragma once

#include "pnes/channel.hpp"
#include "pnes/covariance.hpp"
#include "pnes/density.hpp"
#include "pnes/timesearch.hpp"

namespace pnes {

/// f(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2), defined for x >= 1/2.
double entropic_f(double x);

/// Inverse of f on [1/2, inf).
double entropic_f_inverse(double y);

/// Entropy of the Gaussian state with CM sigma: sum_k f(nu_k).
double gaussian_entropy(const CovarianceMatrix& sigma);

struct NonGaussReport {
  double delta;
  double s_rho;
  double s_tau;
  /// Smallest symplectic eigenvalue of the state's CM.
  double d_minus;
};

/// delta[rho] = S(tau_rho) - S(rho), with rho renormalized to unit trace.
/// Values in [-1e-9, 0) are reported as 0.
NonGaussReport nongaussianity(const DensityMatrix& rho);

/// delta of a pure PNES: 2 f(sqrt((N + 1/2)^2 - C^2)).
/// Throws DomainError when (n, c) is not a physical pair.
double delta0_closed_form(double n, double c);

/// t_SI of a PNES with energy n and initial non-Gaussianity delta0.
/// Returns 0 when the state is not Simon-detected and +inf when it never
/// separates (zero-temperature bath). Requires 0 <= delta0 <= 2 f(n + 1/2).
double t_si_from_delta0(double n, double delta0, const ChannelParams& params);

/// First time delta[rho_t] drops below `threshold`.
TimeEstimate gaussification_time(Trajectory& trajectory, double threshold, const TimeSearchOptions& opts);
TimeEstimate gaussification_time(const PnesState& state, const ChannelParams& params, double threshold,
                                 const TimeSearchOptions& opts, const EvolutionSpec& spec = {});

}  // namespace pnes
