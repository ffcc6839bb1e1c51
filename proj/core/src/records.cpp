#include "pnes/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pnes/error.hpp"

namespace pnes {

namespace {

constexpr std::array<Criterion, 4> kCriteria = {Criterion::SI, Criterion::SH, Criterion::SP, Criterion::RE};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

double parse_number(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) throw ConfigError("csv: bad number '" + tmp + "'");
  return v;
}

std::optional<TimeEstimate> parse_estimate(std::string_view time, std::string_view flags) {
  if (flags == "absent") return std::nullopt;
  TimeEstimate est;
  if (!time.empty()) est.time = parse_number(time);
  for (auto tok : split(flags, '|')) {
    if (tok == "censored") est.censored = true;
    else if (tok == "undetected_at_start") est.undetected_at_start = true;
    else if (tok == "nonmonotone") est.nonmonotone = true;
    else if (tok != "ok") throw ConfigError("csv: unknown flag '" + std::string(tok) + "'");
  }
  return est;
}

}  // namespace

void update_t_m(ScanRecord& record) {
  record.t_m.reset();
  for (const auto& t : record.t_k) {
    if (!t) continue;
    if (!record.t_m || t->time > record.t_m->time || (t->time == record.t_m->time && t->censored)) {
      record.t_m = TimeEstimate{t->time, t->censored, false, false};
    }
  }
  if (record.t_m) {
    record.t_m->undetected_at_start =
        std::all_of(record.t_k.begin(), record.t_k.end(), [](const auto& t) { return !t || t->undetected_at_start; });
  }
}

std::string threshold_label(double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("threshold must be > 0");
  int e = static_cast<int>(std::floor(std::log10(threshold) + 1e-12));
  double mant = threshold / std::pow(10.0, e);
  if (mant >= 10.0 - 1e-9) {
    mant /= 10.0;
    ++e;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6ge%d", mant, e);
  return buf;
}

std::vector<std::string> csv_header(const std::vector<double>& thresholds) {
  std::vector<std::string> h = {"family", "param", "N", "C", "eps0", "delta0", "n_bath"};
  for (Criterion c : kCriteria) h.push_back("t_" + std::string(to_string(c)));
  for (Criterion c : kCriteria) h.push_back("flags_" + std::string(to_string(c)));
  h.push_back("t_m");
  for (double t : thresholds) h.push_back("t_g_" + threshold_label(t));
  h.push_back("trace_deficit");
  h.push_back("status");
  return h;
}

std::string csv_header_line(const std::vector<double>& thresholds) {
  std::string out;
  for (const auto& f : csv_header(thresholds)) {
    if (!out.empty()) out += ',';
    out += f;
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string flags_token(const std::optional<TimeEstimate>& est) {
  if (!est) return "absent";
  std::string out;
  auto add = [&out](const char* tok) {
    if (!out.empty()) out += '|';
    out += tok;
  };
  if (est->censored) add("censored");
  if (est->undetected_at_start) add("undetected_at_start");
  if (est->nonmonotone) add("nonmonotone");
  return out.empty() ? "ok" : out;
}

std::string format_row(const ScanRecord& r) {
  std::ostringstream os;
  auto time = [](const std::optional<TimeEstimate>& t) { return t ? format_number(t->time) : std::string(); };
  os << r.family << ',' << format_number(r.param) << ',' << format_number(r.n) << ',' << format_number(r.c) << ','
     << format_number(r.eps0) << ',' << format_number(r.delta0) << ',' << format_number(r.n_bath);
  for (const auto& t : r.t_k) os << ',' << time(t);
  for (const auto& t : r.t_k) os << ',' << flags_token(t);
  os << ',' << time(r.t_m);
  for (const auto& t : r.t_g) os << ',' << time(t);
  os << ',' << format_number(r.trace_deficit) << ',';
  if (r.status.empty()) {
    os << "ok";
  } else {
    for (std::size_t i = 0; i < r.status.size(); ++i) {
      std::string tok = r.status[i];
      std::replace_if(tok.begin(), tok.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '\r'; }, ' ');
      os << (i ? ";" : "") << tok;
    }
  }
  return os.str();
}

ScanRecord parse_row(std::string_view line, std::size_t n_thresholds) {
  const auto f = split(line, ',');
  const std::size_t expected = 7 + 4 + 4 + 1 + n_thresholds + 2;
  if (f.size() != expected) {
    throw ConfigError("csv: expected " + std::to_string(expected) + " fields, got " + std::to_string(f.size()));
  }
  ScanRecord r;
  r.family = std::string(f[0]);
  r.param = parse_number(f[1]);
  r.n = parse_number(f[2]);
  r.c = parse_number(f[3]);
  r.eps0 = parse_number(f[4]);
  r.delta0 = parse_number(f[5]);
  r.n_bath = parse_number(f[6]);
  for (std::size_t k = 0; k < 4; ++k) r.t_k[k] = parse_estimate(f[7 + k], f[11 + k]);
  const std::size_t status_at = expected - 1;
  if (f[status_at] != "ok") {
    for (auto tok : split(f[status_at], ';')) r.status.emplace_back(tok);
  }
  auto has = [&r](const std::string& tok) { return std::find(r.status.begin(), r.status.end(), tok) != r.status.end(); };
  if (!f[15].empty()) r.t_m = TimeEstimate{parse_number(f[15]), has("t_m_censored"), false, false};
  for (std::size_t k = 0; k < n_thresholds; ++k) {
    if (f[16 + k].empty()) {
      r.t_g.emplace_back();
    } else {
      r.t_g.push_back(TimeEstimate{parse_number(f[16 + k]), false, false, false});
    }
  }
  r.trace_deficit = parse_number(f[16 + n_thresholds]);
  return r;
}

std::string record_key(const ScanRecord& r) {
  // Rows without a parameter (absent or unresolvable points) fall back to N.
  if (std::isnan(r.param)) return r.family + ",N=" + format_number(r.n) + ',' + format_number(r.n_bath);
  return r.family + ',' + format_number(r.param) + ',' + format_number(r.n_bath);
}

std::vector<ScanRecord> read_csv(const std::string& path, const std::vector<double>& thresholds) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<ScanRecord> out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // partial line from an interrupted write
    const std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (header) {
      if (line != csv_header_line(thresholds)) throw ConfigError(path + ": header does not match the scan schema");
      header = false;
      continue;
    }
    if (!line.empty()) out.push_back(parse_row(line, thresholds.size()));
  }
  if (header) throw ConfigError(path + ": missing header");
  return out;
}

void write_csv(const std::string& path, const std::vector<ScanRecord>& records, const std::vector<double>& thresholds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << csv_header_line(thresholds) << '\n';
  for (const auto& r : records) out << format_row(r) << '\n';
}

}  // namespace pnes
