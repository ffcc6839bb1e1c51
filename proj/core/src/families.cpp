#include "pnes/families.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pnes/error.hpp"

namespace pnes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kXMax = 1.0 - 1e-9;
constexpr int kMaxDim = 4096;
constexpr std::size_t kMaxProfileTerms = std::size_t{1} << 20;

bool is_x_family(Family f) { return f == Family::TWB || f == Family::PSSV || f == Family::PASV; }

void check_param(Family kind, double param) {
  if (!std::isfinite(param)) throw DomainError("family parameter must be finite");
  if (is_x_family(kind) && (param < 0.0 || param >= 1.0)) {
    throw DomainError(std::string(to_string(kind)) + ": x must lie in [0, 1), got " + std::to_string(param));
  }
  if (kind == Family::TMC && param < 0.0) {
    throw DomainError("tmc: lambda must be >= 0, got " + std::to_string(param));
  }
}

// ln psi_n of the unnormalized profile.
double log_amplitude(Family kind, double p, int n) {
  switch (kind) {
    case Family::TWB:
      if (p == 0.0) return n == 0 ? 0.0 : kNegInf;
      return n * std::log(p);
    case Family::PSSV:
      if (p == 0.0) return n == 0 ? 0.0 : kNegInf;
      return std::log(n + 1.0) + n * std::log(p);
    case Family::PASV:
      if (n == 0) return kNegInf;
      if (p == 0.0) return n == 1 ? 0.0 : kNegInf;
      return std::log(static_cast<double>(n)) + (n - 1) * std::log(p);
    case Family::TMC:
      if (p == 0.0) return n == 0 ? 0.0 : kNegInf;
      return n * std::log(p) - std::lgamma(n + 1.0);
    case Family::RANDOM:
      break;
  }
  throw ConfigError("random family has no analytic profile");
}

// psi_n^2 relative to the largest term, extended past the truncation until
// the remaining terms are negligible.
std::vector<double> profile_masses(Family kind, double p, int at_least) {
  std::vector<double> logs;
  double peak = kNegInf;
  for (std::size_t n = 0; n < kMaxProfileTerms; ++n) {
    const double l = 2.0 * log_amplitude(kind, p, static_cast<int>(n));
    logs.push_back(l);
    peak = std::max(peak, l);
    if (n + 1 < static_cast<std::size_t>(at_least) || n < 2) continue;
    const bool decreasing = l <= logs[n - 1];
    if (decreasing && l - peak < -120.0) break;
  }
  std::vector<double> masses(logs.size());
  for (std::size_t n = 0; n < logs.size(); ++n) masses[n] = std::exp(logs[n] - peak);
  return masses;
}

PnesState build_unchecked(Family kind, double p, int dim) {
  std::vector<double> logs(static_cast<std::size_t>(dim));
  double peak = kNegInf;
  for (int n = 0; n < dim; ++n) {
    logs[n] = log_amplitude(kind, p, n);
    peak = std::max(peak, logs[n]);
  }
  if (peak == kNegInf) throw DegenerateStateError(std::string(to_string(kind)) + ": no weight inside truncation");
  std::vector<double> raw(static_cast<std::size_t>(dim));
  for (int n = 0; n < dim; ++n) raw[n] = std::exp(logs[n] - peak);
  return make_pnes(raw, dim);
}

double energy(Family kind, double p, int dim) { return mean_photon(build_unchecked(kind, p, dim)); }

double bisect(const std::function<double(double)>& f, double target, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::abs(v - target) < 1e-13) return mid;
    (v < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::TWB: return "twb";
    case Family::PSSV: return "pssv";
    case Family::PASV: return "pasv";
    case Family::TMC: return "tmc";
    case Family::RANDOM: return "random";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::TWB, Family::PSSV, Family::PASV, Family::TMC, Family::RANDOM}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigError("unknown family '" + std::string(name) + "' (valid: twb, pssv, pasv, tmc, random)");
}

PnesState build(const FamilySpec& spec) {
  if (spec.kind == Family::RANDOM) {
    if (!(spec.param >= 0.0) || spec.param != std::floor(spec.param)) {
      throw DomainError("random: seed must be a non-negative integer");
    }
    return random_pnes(spec.dim, static_cast<std::uint64_t>(spec.param));
  }
  check_param(spec.kind, spec.param);
  if (spec.dim < 2) throw DomainError("build: dimension must be >= 2");
  if (spec.kind == Family::TMC) {
    const double tail = tail_mass(spec.kind, spec.param, spec.dim);
    if (tail > 1e-8) {
      throw TruncationError("tmc: lambda=" + std::to_string(spec.param) + " leaves tail mass " +
                            std::to_string(tail) + " beyond dim " + std::to_string(spec.dim));
    }
  }
  return build_unchecked(spec.kind, spec.param, spec.dim);
}

double tail_mass(Family kind, double param, int dim) {
  check_param(kind, param);
  if (kind == Family::TWB) return param == 0.0 ? 0.0 : std::pow(param, 2.0 * dim);
  const std::vector<double> m = profile_masses(kind, param, dim);
  double head = 0.0, tail = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) (static_cast<int>(n) < dim ? head : tail) += m[n];
  return tail / (head + tail);
}

int minimal_dim(Family kind, double param, double tol) {
  check_param(kind, param);
  if (kind == Family::TWB) {
    if (param == 0.0) return 1;
    const double d = std::log(tol) / (2.0 * std::log(param));
    int dim = std::max(1, static_cast<int>(std::floor(d)));
    while (std::pow(param, 2.0 * dim) >= tol) ++dim;
    if (dim > kMaxDim) throw TruncationError("minimal_dim: exceeds " + std::to_string(kMaxDim));
    return dim;
  }
  const std::vector<double> m = profile_masses(kind, param, 1);
  double total = 0.0;
  for (double v : m) total += v;
  double tail = total;
  for (std::size_t n = 0; n < m.size(); ++n) {
    tail -= m[n];
    if (std::max(tail, 0.0) / total < tol) {
      const int dim = static_cast<int>(n) + 1;
      if (dim > kMaxDim) break;
      return dim;
    }
  }
  throw TruncationError("minimal_dim: exceeds " + std::to_string(kMaxDim));
}

double family_min_energy(Family kind) { return kind == Family::PASV ? 1.0 : 0.0; }

double solve_param_for_energy(Family kind, double n_target, int dim) {
  if (kind == Family::RANDOM) throw ConfigError("random family cannot be solved for energy");
  if (!std::isfinite(n_target)) throw RangeError("energy target must be finite");
  const double n_min = family_min_energy(kind);
  if (n_target < n_min - 1e-12) {
    throw RangeError(std::string(to_string(kind)) + ": N=" + std::to_string(n_target) +
                     " is below the family minimum " + std::to_string(n_min));
  }
  if (n_target <= n_min + 1e-12) return 0.0;
  auto f = [&](double p) { return energy(kind, p, dim); };
  double hi = kXMax;
  if (kind == Family::TMC) {
    hi = 1.0;
    while (f(hi) < n_target) {
      hi *= 2.0;
      if (hi > 1e3) throw RangeError("tmc: N=" + std::to_string(n_target) + " unreachable");
    }
  } else if (f(hi) < n_target) {
    throw RangeError(std::string(to_string(kind)) + ": N=" + std::to_string(n_target) +
                     " unreachable at dim " + std::to_string(dim));
  }
  const double p = bisect(f, n_target, 0.0, hi);
  if (kind == Family::TMC && tail_mass(kind, p, dim) > 1e-8) {
    throw RangeError("tmc: N=" + std::to_string(n_target) + " needs more than " + std::to_string(dim) +
                     " levels");
  }
  return p;
}

PnesState random_pnes(int dim, std::uint64_t seed, bool decreasing, int support) {
  if (support == 0) support = dim;
  if (support < 1 || support > dim) {
    throw DomainError("random_pnes: support must lie in [1, dim], got " + std::to_string(support));
  }
  std::mt19937_64 rng(seed);
  std::vector<double> w(static_cast<std::size_t>(support));
  for (double& v : w) {
    // open interval (0, 1) from the top 53 bits; keeps the stream fixed
    // across standard library implementations.
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    v = -std::log(u);
  }
  if (decreasing) std::sort(w.begin(), w.end(), std::greater<>());
  for (double& v : w) v = std::sqrt(v);
  return make_pnes(w, dim);
}

int choose_dim(Family kind, double param, const DimPolicy& policy) {
  if (!policy.automatic || kind == Family::RANDOM) return policy.fixed;
  return std::max(policy.floor, minimal_dim(kind, param, policy.tail_tol) + policy.padding);
}

ResolvedFamily resolve_for_energy(Family kind, double n_target, const DimPolicy& policy) {
  if (!policy.automatic) return {solve_param_for_energy(kind, n_target, policy.fixed), policy.fixed};
  const double p0 = solve_param_for_energy(kind, n_target, 1024);
  const int dim = choose_dim(kind, p0, policy);
  return {solve_param_for_energy(kind, n_target, dim), dim};
}

}  // namespace pnes
