#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pnes/criteria.hpp"
#include "pnes/timesearch.hpp"

namespace pnes {

/// One (state, N_T) experiment.
struct ScanRecord {
  std::string family;
  double param = 0.0;
  double n = 0.0;
  double c = 0.0;
  double eps0 = 0.0;
  double delta0 = 0.0;
  double n_bath = 0.0;
  /// Indexed by Criterion (si, sh, sp, re); empty when not evaluated.
  std::array<std::optional<TimeEstimate>, 4> t_k;
  /// Max over present t_k; censored if that maximum is censored.
  std::optional<TimeEstimate> t_m;
  /// One entry per Gaussification threshold.
  std::vector<std::optional<TimeEstimate>> t_g;
  double trace_deficit = 0.0;
  /// ';'-joined tokens, "ok" when nothing to report.
  std::vector<std::string> status;

  // Metadata kept out of the CSV and written to the sidecar.
  int dim = 0;
  int ancilla_dim = 0;
  int support = 0;
};

/// Recomputes t_m from t_k.
void update_t_m(ScanRecord& record);

/// "1e-1" style column suffix for a threshold.
std::string threshold_label(double threshold);

/// Header fields in order; the default thresholds give
/// family,param,N,C,eps0,delta0,n_bath,t_si,t_sh,t_sp,t_re,flags_si,...,status.
std::vector<std::string> csv_header(const std::vector<double>& thresholds);
std::string csv_header_line(const std::vector<double>& thresholds);

/// %.12g, with "inf"/"-inf"/"nan" spelled out.
std::string format_number(double v);

/// ok | censored | undetected_at_start | nonmonotone, '|'-joined when
/// several apply; "absent" for a missing estimate.
std::string flags_token(const std::optional<TimeEstimate>& est);

std::string format_row(const ScanRecord& record);

/// Inverse of format_row for a record written with `n_thresholds` columns.
/// Throws ConfigError on malformed lines.
ScanRecord parse_row(std::string_view line, std::size_t n_thresholds);

/// Upsert key (family, param, n_bath) as formatted in the CSV; rows with a
/// NaN param use N in its place.
std::string record_key(const ScanRecord& record);

/// Reads a CSV written by write_csv. Partial trailing lines are ignored.
/// Throws ConfigError when the header does not match `thresholds`.
std::vector<ScanRecord> read_csv(const std::string& path, const std::vector<double>& thresholds);

void write_csv(const std::string& path, const std::vector<ScanRecord>& records, const std::vector<double>& thresholds);

}  // namespace pnes
