#pragma once

#include <map>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pnes/covariance.hpp"
#include "pnes/density.hpp"
#include "pnes/fock.hpp"

namespace pnes {

/// Identical local thermal-loss channels on both modes:
/// d rho/dt = sum_k (gamma/2) { (N+1) D[a_k] + N D[a_k^dagger] } rho.
struct ChannelParams {
  double gamma = 1.0;
  double n_bath = 0.0;
  /// Throws DomainError unless gamma > 0 and n_bath >= 0.
  void validate() const;
};

/// e^{-gamma t}
double transmissivity(double t, const ChannelParams& params);

/// zeta_t = arctan sqrt(e^{gamma t} - 1), so cos^2 zeta_t = e^{-gamma t}.
double mixing_angle(double t, const ChannelParams& params);

/// CM of a PNES: diagonal N + 1/2, off-diagonal block diag(C, -C).
CovarianceMatrix cm_of_pnes(const PnesState& state);

/// sigma_t = e^{-gamma t} sigma_0 + (1 - e^{-gamma t}) (N_T + 1/2) I.
/// Accepts t = +inf.
CovarianceMatrix cm_evolve(const CovarianceMatrix& sigma0, double t, const ChannelParams& params);

enum class Engine { AncillaMap, LindbladRk4 };
std::string_view to_string(Engine e);
/// "ancilla" or "rk4"; throws ConfigError otherwise.
Engine parse_engine(std::string_view name);

struct EvolutionSpec {
  Engine engine = Engine::AncillaMap;
  /// Ancilla levels; 0 picks ancilla_dim_for(n_bath).
  int ancilla_dim = 0;
  double rk4_step = 1e-3;
  /// When > 0 the ancilla engine drops output levels whose predicted
  /// marginal population is below this mass, keeping at least
  /// `compact_floor` levels.
  double compact_tail = 0.0;
  int compact_floor = 0;
};

/// Default ancilla tail. Order-8 moments amplify the non-Gaussian error of
/// a truncated bath by roughly n^4, so anything looser than double precision
/// shows up as spurious moment-test detections.
inline constexpr double kAncillaTailTol = 1e-16;

/// Smallest A with (N/(1+N))^A < tol, at least 2.
int ancilla_dim_for(double n_bath, double tol = kAncillaTailTol);

/// One mode of the channel at a fixed time, dilated with a thermal
/// ancilla truncated to `ancilla_dim` levels. Coherence order is conserved:
/// block(q) maps the q-th diagonal of the input (levels n, n-q) to the q-th
/// diagonal of the output, rows indexed by output level n' - max(q, 0).
class SingleModeChannel {
 public:
  SingleModeChannel(double t, const ChannelParams& params, int in_dim, int ancilla_dim);

  int in_dim() const noexcept { return in_dim_; }
  int out_dim() const noexcept { return out_dim_; }
  int ancilla_dim() const noexcept { return ancilla_dim_; }

  /// Restricts the output to the first `out_dim` levels (<= in_dim).
  void truncate_output(int out_dim);

  const Eigen::MatrixXd& block(int q) const;

  /// Output populations for input populations (q = 0 block).
  Eigen::VectorXd apply_populations(const Eigen::VectorXd& p) const;

 private:
  int in_dim_;
  int out_dim_;
  int ancilla_dim_;
  std::vector<Eigen::MatrixXd> blocks_;  // index q + in_dim - 1
};

/// The same single-mode channel on both modes.
DensityMatrix apply_local(const DensityMatrix& rho, const SingleModeChannel& channel);

/// Throws TruncationError when an explicit ancilla_dim is too small.
DensityMatrix evolve_ancilla(const DensityMatrix& rho0, double t, const ChannelParams& params,
                             const EvolutionSpec& spec = {});

/// Fixed-step RK4 on the truncated generator. Requires 0 < dt <= 1e-2;
/// throws StepSizeError when the result has an eigenvalue below -1e-6.
DensityMatrix evolve_lindblad(const DensityMatrix& rho0, double t, const ChannelParams& params,
                              double dt = 1e-3);

/// Generator applied to rho with levels outside the truncation set to zero.
DensityMatrix lindblad_rhs(const DensityMatrix& rho, const ChannelParams& params);

DensityMatrix evolve(const DensityMatrix& rho0, double t, const ChannelParams& params, const EvolutionSpec& spec);

/// rho_t at arbitrary times for one initial state. The RK4 engine resumes
/// from the latest cached state at or before t.
class Trajectory {
 public:
  Trajectory(DensityMatrix rho0, ChannelParams params, EvolutionSpec spec);

  DensityMatrix at(double t);
  const DensityMatrix& initial() const noexcept { return rho0_; }
  const ChannelParams& params() const noexcept { return params_; }
  const EvolutionSpec& spec() const noexcept { return spec_; }
  int ancilla_dim() const noexcept;

 private:
  DensityMatrix rho0_;
  ChannelParams params_;
  EvolutionSpec spec_;
  std::map<double, DensityMatrix> checkpoints_;
};

}  // namespace pnes
