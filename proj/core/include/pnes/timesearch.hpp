#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pnes {

struct TimeSearchOptions {
  double t_max = 15.0;
  double resolution = 0.01;
  /// Final bracket width of the bisection refinement.
  double precision = 1e-3;
  /// Throws ConfigError for non-positive or non-finite values.
  void validate() const;
};

/// 0, r, 2r, ... with t_max as the last point.
std::vector<double> time_grid(const TimeSearchOptions& opts);

struct TimeEstimate {
  double time = 0.0;
  /// Condition still held at t_max; `time` is then t_max.
  bool censored = false;
  /// Criterion did not fire at t = 0; `time` is 0.
  bool undetected_at_start = false;
  /// Condition switched off and on again along the grid.
  bool nonmonotone = false;
};

/// Last time `holds` is true. `flags[i]` is the condition at grid[i]; the
/// crossing after the last true grid point is refined with `probe`.
TimeEstimate last_true(std::span<const double> grid, std::span<const char> flags,
                       const std::function<bool(double)>& probe, double precision);

/// First time the condition becomes true, refined the same way.
TimeEstimate first_true(std::span<const double> grid, std::span<const char> flags,
                        const std::function<bool(double)>& probe, double precision);

}  // namespace pnes
