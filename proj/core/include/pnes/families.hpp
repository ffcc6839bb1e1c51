#pragma once

#include <cstdint>
#include <string_view>

#include "pnes/fock.hpp"

namespace pnes {

enum class Family { TWB, PSSV, PASV, TMC, RANDOM };

std::string_view to_string(Family f);
/// Accepts the lowercase CLI names; throws ConfigError listing the valid set.
Family parse_family(std::string_view name);

/// Profiles (before normalization):
///   TWB   x^n
///   PSSV  (n+1) x^n
///   PASV  n x^(n-1)          (x = 0 gives |1,1>)
///   TMC   lambda^n / n!
/// For RANDOM, `param` is the seed.
struct FamilySpec {
  Family kind = Family::TWB;
  double param = 0.0;
  int dim = 20;
};

/// Throws DomainError for parameters outside [0, 1) (x families) or
/// [0, inf) (TMC), TruncationError when the TMC tail beyond `dim` exceeds 1e-8.
PnesState build(const FamilySpec& spec);

/// Normalized profile mass lost by truncating to `dim` levels.
double tail_mass(Family kind, double param, int dim);

/// Smallest dim with tail_mass < tol. Throws TruncationError above 4096.
int minimal_dim(Family kind, double param, double tol);

/// Smallest mean photon number a family reaches (1 for PASV, else 0).
double family_min_energy(Family kind);

/// Parameter giving mean photon number `n_target` at truncation `dim`.
/// Throws RangeError when the target is below the family minimum or out of
/// reach, ConfigError for RANDOM.
double solve_param_for_energy(Family kind, double n_target, int dim);

/// Schmidt coefficients psi_n = sqrt(p_n), p ~ Dirichlet(1,...,1) over the
/// first `support` levels, embedded in `dim` levels. With `decreasing` the
/// weights are sorted in descending order. Deterministic in `seed`.
PnesState random_pnes(int dim, std::uint64_t seed, bool decreasing = true, int support = 0);

/// Truncation policy. Fixed uses `fixed`; automatic picks
/// max(floor, minimal_dim(tail_tol) + padding).
struct DimPolicy {
  bool automatic = false;
  int fixed = 20;
  double tail_tol = 1e-10;
  int padding = 4;
  int floor = 20;
};

/// Dimension for a parametric state under `policy`.
int choose_dim(Family kind, double param, const DimPolicy& policy);

/// Solves for `n_target` and picks a dimension together. Returns {param, dim}.
struct ResolvedFamily {
  double param;
  int dim;
};
ResolvedFamily resolve_for_energy(Family kind, double n_target, const DimPolicy& policy);

}  // namespace pnes
