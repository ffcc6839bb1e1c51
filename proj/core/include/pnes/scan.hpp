#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pnes/channel.hpp"
#include "pnes/criteria.hpp"
#include "pnes/families.hpp"
#include "pnes/records.hpp"
#include "pnes/timesearch.hpp"

namespace pnes {

/// One state of a sweep: a family with either an explicit parameter or an
/// energy target. RANDOM points carry the seed in `param` and a support
/// size (0 means the full truncation).
struct PointRequest {
  Family family = Family::TWB;
  std::optional<double> param;
  std::optional<double> n_target;
  int support = 0;

  bool operator==(const PointRequest&) const = default;
};

struct SweepConfig {
  std::string protocol = "sweep";
  std::vector<PointRequest> points;
  std::vector<double> n_baths = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  double gamma = 1.0;
  TimeSearchOptions search;
  DimPolicy dim_policy;
  EvolutionSpec evolution;
  std::vector<Criterion> criteria = {Criterion::SI, Criterion::SH, Criterion::SP, Criterion::RE};
  std::vector<double> thresholds = {0.1, 0.01, 0.001};
  /// When false the t_g columns stay empty and delta is never evaluated
  /// past t = 0.
  bool gaussification = true;
  int sh_order = 8;
  int witness_count = 10000;
  std::uint64_t witness_seed = 20240611;
  int witness_dim = 20;
  bool random_decreasing = true;
  SiPath si_path = SiPath::Analytic;
  int jobs = 1;
  /// CSV path; empty keeps results in memory. The sidecar goes to out + ".json".
  std::string out;
  bool resume = true;
  /// Command line that produced the run, stored in the sidecar.
  std::vector<std::string> argv;

  /// Throws ConfigError.
  void validate() const;
};

/// `points` energies evenly spaced on [lo, hi].
std::vector<double> energy_grid(int points, double lo = 0.04, double hi = 5.0);

/// Evaluates one (state, N_T) pair. Never throws for numerical trouble:
/// failures end up in the status column.
ScanRecord evaluate_point(const PointRequest& point, double n_bath, const SweepConfig& config,
                          std::shared_ptr<const WitnessSet> witnesses);

/// Runs every (point, N_T) pair on `jobs` workers and emits records in
/// sweep order. With `resume`, rows already present in `out` (same key)
/// are kept and not recomputed.
std::vector<ScanRecord> run_sweep(const SweepConfig& config);

/// TMC on `n_points` energies, N_T in {1e-5, 1e-1}, fixed D = 20.
SweepConfig fig1_config(int n_points = 25);

/// PASV, PSSV, TMC, TWB on `n_points` energies plus a random cohort of
/// `per_bucket` states per energy bucket, N_T = 1e-3, automatic D. PASV
/// energies below 1 produce rows with status "absent".
SweepConfig fig2_config(int n_points = 25, int per_bucket = 20, int max_support = 20);

/// Random cohort: seeds are tried in order; each draws a support in
/// [2, max_support] and is kept when its energy rounds to a grid point
/// whose bucket still has room.
std::vector<PointRequest> random_cohort(const std::vector<double>& grid, int per_bucket, int max_support,
                                        bool decreasing, std::uint64_t first_seed = 1);

/// Support size drawn for a random-cohort seed.
int cohort_support(std::uint64_t seed, int max_support);

std::vector<ScanRecord> fig1_protocol(const SweepConfig& config = fig1_config());
std::vector<ScanRecord> fig2_protocol(const SweepConfig& config = fig2_config());

/// JSON provenance for a run: the full config, seeds, engine metadata and
/// per-record dimensions.
std::string sidecar_json(const SweepConfig& config, const std::vector<ScanRecord>& records);

/// Inverse of the config part of sidecar_json.
SweepConfig config_from_sidecar(const std::string& json_text);

}  // namespace pnes
