#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pnes/channel.hpp"
#include "pnes/covariance.hpp"
#include "pnes/density.hpp"
#include "pnes/fock.hpp"
#include "pnes/timesearch.hpp"

namespace pnes {

enum class Criterion { SI, SH, SP, RE };
std::string_view to_string(Criterion c);
/// "si", "sh", "sp", "re"; throws ConfigError otherwise.
Criterion parse_criterion(std::string_view name);

/// Strictness applied to every criterion.
inline constexpr double kDetectionMargin = 1e-9;

/// `witness_value` is the criterion's own statistic: the smallest PT
/// symplectic eigenvalue (SI), the smallest moment-matrix eigenvalue (SH),
/// the best witness margin (SP) or the realigned trace norm minus 1 (RE).
struct Verdict {
  Criterion criterion;
  bool entangled;
  double witness_value;
};

/// Entangled iff the smallest symplectic eigenvalue of the partially
/// transposed CM is below 1/2. Throws DomainError for an unphysical CM.
Verdict simon(const CovarianceMatrix& sigma);

/// Closed-form Simon separation time of a PNES with energy n and
/// correlation c. 0 when |c| <= n, +inf when n_bath = 0 and |c| > n.
double t_simon(double n, double c, const ChannelParams& params);

/// Normally ordered monomial a^dagger^p a^q b^dagger^r b^s.
struct Monomial {
  int p, q, r, s;
  int degree() const noexcept { return p + q + r + s; }
  bool operator==(const Monomial&) const = default;
};

/// Every monomial of degree <= max_degree, by degree, lexicographically
/// descending inside a degree (degree 1 is a^dagger, a, b^dagger, b).
std::vector<Monomial> sh_monomials(int max_degree);

/// M_ij = Tr(rho^PT f_i^dagger f_j).
Eigen::MatrixXcd sh_moment_matrix(const DensityMatrix& rho, const std::vector<Monomial>& basis);

struct ShReport {
  Verdict verdict;
  /// Smallest eigenvalue of the leading block of each degree.
  std::vector<double> leading_min_eigenvalues;
};

/// Moment test built from all monomials up to total operator order
/// `max_order` (degree max_order / 2). `max_order` must be even and at most
/// 2 (dim - 1); RangeError otherwise.
ShReport shchukin_vogel_report(const DensityMatrix& rho, int max_order = 8);
Verdict shchukin_vogel(const DensityMatrix& rho, int max_order = 8);

/// Product-state witnesses phi = sqrt(p), p ~ Dirichlet(1) in `dim`
/// levels. Fixed once per run and shared read-only between threads.
class WitnessSet {
 public:
  WitnessSet(int dim = 20, int count = 10000, std::uint64_t seed = 20240611, bool decreasing = false);

  int dim() const noexcept { return static_cast<int>(phi_.rows()); }
  int count() const noexcept { return static_cast<int>(phi_.cols()); }
  std::uint64_t seed() const noexcept { return seed_; }
  /// One witness per column.
  const Eigen::MatrixXd& vectors() const noexcept { return phi_; }
  /// max_k phi_k^2 for each witness.
  const Eigen::VectorXd& max_squares() const noexcept { return max_sq_; }

 private:
  Eigen::MatrixXd phi_;
  Eigen::VectorXd max_sq_;
  std::uint64_t seed_;
};

/// Best margin phi^T B phi - max_k phi_k^2 over the witness set, with
/// B_mn = <m,m|rho|n,n>. Requires rho.dim() >= witnesses.dim().
Verdict sperling_vogel(const DensityMatrix& rho, const WitnessSet& witnesses);

/// Entangled iff ||R(rho)||_1 > 1 (rho renormalized).
Verdict realignment_test(const DensityMatrix& rho);

/// Evaluates one density-matrix criterion. SI goes through cm_from_density.
struct CriterionContext {
  int sh_order = 8;
  std::shared_ptr<const WitnessSet> witnesses;
};
Verdict evaluate(Criterion c, const DensityMatrix& rho, const CriterionContext& ctx);

enum class SiPath { Analytic, Density };

struct SeparationOptions {
  TimeSearchOptions search;
  EvolutionSpec evolution;
  CriterionContext context;
  SiPath si_path = SiPath::Analytic;
};

/// Last time `criterion` detects entanglement in the evolved PNES.
TimeEstimate separation_time(const PnesState& state, const ChannelParams& params, Criterion criterion,
                             const SeparationOptions& opts);

}  // namespace pnes
