#include "pnes/timesearch.hpp"

#include <cmath>

#include "pnes/error.hpp"

namespace pnes {

void TimeSearchOptions::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be > 0");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) throw ConfigError("grid resolution must be > 0");
  if (!(precision > 0.0)) throw ConfigError("time precision must be > 0");
}

std::vector<double> time_grid(const TimeSearchOptions& opts) {
  opts.validate();
  std::vector<double> grid;
  const auto steps = static_cast<long>(std::floor(opts.t_max / opts.resolution + 1e-9));
  for (long i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) * opts.resolution);
  if (opts.t_max - grid.back() > 1e-9 * opts.t_max) {
    grid.push_back(opts.t_max);
  } else {
    grid.back() = opts.t_max;
  }
  return grid;
}

namespace {

// `lo` satisfies the condition `lo_value`, `hi` does not.
double refine(double lo, double hi, bool lo_value, const std::function<bool(double)>& probe, double precision) {
  while (hi - lo > precision) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) == lo_value ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TimeEstimate last_true(std::span<const double> grid, std::span<const char> flags,
                       const std::function<bool(double)>& probe, double precision) {
  if (grid.empty() || grid.size() != flags.size()) throw ConfigError("time search: empty or mismatched grid");
  TimeEstimate est;
  std::ptrdiff_t last = -1;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) last = static_cast<std::ptrdiff_t>(i);
  }
  for (std::ptrdiff_t i = 0; i < last; ++i) {
    if (!flags[i]) est.nonmonotone = true;
  }
  if (!flags[0]) {
    est.undetected_at_start = true;
    return est;
  }
  if (last == static_cast<std::ptrdiff_t>(grid.size()) - 1) {
    est.censored = true;
    est.time = grid.back();
    return est;
  }
  est.time = refine(grid[last], grid[last + 1], true, probe, precision);
  return est;
}

TimeEstimate first_true(std::span<const double> grid, std::span<const char> flags,
                        const std::function<bool(double)>& probe, double precision) {
  if (grid.empty() || grid.size() != flags.size()) throw ConfigError("time search: empty or mismatched grid");
  TimeEstimate est;
  std::size_t first = 0;
  while (first < flags.size() && !flags[first]) ++first;
  if (first == flags.size()) {
    est.censored = true;
    est.time = grid.back();
    return est;
  }
  for (std::size_t i = first; i < flags.size(); ++i) {
    if (!flags[i]) est.nonmonotone = true;
  }
  if (first == 0) return est;
  est.time = refine(grid[first - 1], grid[first], false, probe, precision);
  return est;
}

}  // namespace pnes
