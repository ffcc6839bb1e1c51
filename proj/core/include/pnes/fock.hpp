#pragma once

#include <optional>
#include <span>
#include <vector>

namespace pnes {

/// Photon-number entangled state sum_n psi_n |n>|n> on a Fock space
/// truncated to `dim` levels per mode. Coefficients are real, non-negative
/// and L2-normalized; zeros are allowed (finite support, truncation tails).
class PnesState {
 public:
  int dim() const noexcept { return static_cast<int>(coeffs_.size()); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](int n) const { return coeffs_[static_cast<std::size_t>(n)]; }

 private:
  explicit PnesState(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}
  friend PnesState make_pnes(std::span<const double> raw, int dim);

  std::vector<double> coeffs_;
};

/// Pads `raw` with zeros to `dim` levels and normalizes.
/// Throws DomainError on negative/non-finite entries or raw.size() > dim,
/// DegenerateStateError when every entry is zero.
PnesState make_pnes(std::span<const double> raw, int dim);

/// Re-embeds a state in a different truncation. Shrinking is allowed only
/// when the dropped coefficients are exactly zero.
PnesState embed(const PnesState& state, int dim);

/// N = sum_n psi_n^2 n (mean photon number per mode).
double mean_photon(const PnesState& state);

/// C = sum_n psi_n psi_{n+1} (n+1), equal to <ab>.
double correlation(const PnesState& state);

/// Entanglement entropy -sum psi_n^2 ln psi_n^2 in nats.
double schmidt_entropy(const PnesState& state);

/// Action of the truncated monomial a^dagger^p a^q on |n>: the target level
/// and the (real, positive) amplitude, or nullopt when it annihilates |n> or
/// leaves the truncated space.
struct LadderAction {
  int target;
  double amplitude;
};
std::optional<LadderAction> ladder_monomial(int p, int q, int n, int dim);

}  // namespace pnes
