#include "pnes/fock.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "pnes/error.hpp"

namespace pnes {

PnesState make_pnes(std::span<const double> raw, int dim) {
  if (dim < 1) {
    throw DomainError("make_pnes: dimension must be >= 1, got " + std::to_string(dim));
  }
  if (raw.size() > static_cast<std::size_t>(dim)) {
    throw DomainError("make_pnes: " + std::to_string(raw.size()) +
                      " coefficients do not fit in dimension " + std::to_string(dim));
  }
  std::vector<double> coeffs(static_cast<std::size_t>(dim), 0.0);
  double norm2 = 0.0;
  for (std::size_t n = 0; n < raw.size(); ++n) {
    const double v = raw[n];
    if (!std::isfinite(v)) {
      throw DomainError("make_pnes: non-finite coefficient at n=" + std::to_string(n));
    }
    if (v < 0.0) {
      throw DomainError("make_pnes: negative coefficient at n=" + std::to_string(n));
    }
    coeffs[n] = v;
    norm2 += v * v;
  }
  if (norm2 == 0.0) {
    throw DegenerateStateError("make_pnes: all coefficients are zero");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& c : coeffs) c *= inv;
  return PnesState(std::move(coeffs));
}

PnesState embed(const PnesState& state, int dim) {
  auto c = state.coeffs();
  if (dim < state.dim()) {
    for (int n = dim; n < state.dim(); ++n) {
      if (c[static_cast<std::size_t>(n)] != 0.0) {
        throw RangeError("embed: cannot drop nonzero coefficient at n=" + std::to_string(n));
      }
    }
    return make_pnes(c.first(static_cast<std::size_t>(dim)), dim);
  }
  return make_pnes(c, dim);
}

double mean_photon(const PnesState& state) {
  double n_mean = 0.0;
  for (int n = 0; n < state.dim(); ++n) n_mean += state[n] * state[n] * n;
  return n_mean;
}

double correlation(const PnesState& state) {
  double c = 0.0;
  for (int n = 0; n + 1 < state.dim(); ++n) c += state[n] * state[n + 1] * (n + 1);
  return c;
}

double schmidt_entropy(const PnesState& state) {
  double s = 0.0;
  for (double psi : state.coeffs()) {
    const double p = psi * psi;
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

std::optional<LadderAction> ladder_monomial(int p, int q, int n, int dim) {
  if (n < 0 || n >= dim || n < q) return std::nullopt;
  const int mid = n - q;
  const int target = mid + p;
  if (target >= dim) return std::nullopt;
  double amp2 = 1.0;
  for (int k = mid + 1; k <= n; ++k) amp2 *= k;
  for (int k = mid + 1; k <= target; ++k) amp2 *= k;
  return LadderAction{target, std::sqrt(amp2)};
}

}  // namespace pnes
