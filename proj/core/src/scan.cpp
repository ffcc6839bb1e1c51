#include "pnes/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "json.hpp"

#include "pnes/error.hpp"
#include "pnes/nongauss.hpp"
#include "pnes/spectral.hpp"

#ifndef PNES_VERSION
#define PNES_VERSION "unknown"
#endif

namespace pnes {

namespace {

using nlohmann::json;

// Extra levels above a random state's support, room for thermal hopping.
constexpr int kRandomPadding = 8;
constexpr double kCompactTail = 1e-14;
constexpr double kTruncationFlag = 1e-4;
constexpr double kValidatedEnergy = 5.0;

struct ResolvedPoint {
  Family family;
  double param = std::numeric_limits<double>::quiet_NaN();
  int dim = 0;
  int support = 0;
  std::optional<double> n_target;
  bool absent = false;
  std::string error;
};

PnesState make_state(const ResolvedPoint& p, bool decreasing) {
  if (p.family == Family::RANDOM) {
    return random_pnes(p.dim, static_cast<std::uint64_t>(p.param), decreasing, p.support);
  }
  return build({p.family, p.param, p.dim});
}

ResolvedPoint resolve(const PointRequest& req, const SweepConfig& cfg) {
  ResolvedPoint r;
  r.family = req.family;
  r.n_target = req.n_target;
  try {
    if (req.family == Family::RANDOM) {
      if (!req.param) throw ConfigError("random point needs a seed");
      r.param = *req.param;
      const int fixed = cfg.dim_policy.fixed;
      r.support = req.support > 0 ? req.support : fixed;
      r.dim = cfg.dim_policy.automatic ? std::max(cfg.dim_policy.floor, r.support + kRandomPadding) : fixed;
      if (r.support > r.dim) throw RangeError("random support exceeds the fixed dimension");
    } else if (req.param) {
      r.param = *req.param;
      r.dim = choose_dim(req.family, r.param, cfg.dim_policy);
    } else if (req.n_target && *req.n_target < family_min_energy(req.family) - 1e-12) {
      r.absent = true;
    } else if (req.n_target) {
      const ResolvedFamily rf = resolve_for_energy(req.family, *req.n_target, cfg.dim_policy);
      r.param = rf.param;
      r.dim = rf.dim;
    } else {
      throw ConfigError("point needs a parameter or an energy target");
    }
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

std::vector<std::string> split_status(const std::string& msg) { return {"error:" + msg}; }

ScanRecord evaluate_resolved(const ResolvedPoint& p, double n_bath, const SweepConfig& cfg,
                             const std::shared_ptr<const WitnessSet>& witnesses) {
  ScanRecord rec;
  rec.family = std::string(to_string(p.family));
  rec.param = p.param;
  rec.n_bath = n_bath;
  rec.dim = p.dim;
  rec.support = p.support;
  rec.t_g.assign(cfg.thresholds.size(), std::nullopt);
  if (p.absent) {
    rec.n = *p.n_target;
    rec.status = {"absent"};
    return rec;
  }
  if (!p.error.empty()) {
    rec.n = p.n_target.value_or(std::numeric_limits<double>::quiet_NaN());
    rec.status = split_status(p.error);
    return rec;
  }
  try {
    const PnesState state = make_state(p, cfg.random_decreasing);
    rec.n = mean_photon(state);
    rec.c = correlation(state);
    rec.eps0 = schmidt_entropy(state);
    rec.delta0 = delta0_closed_form(rec.n, rec.c);
    if (rec.n > kValidatedEnergy + 1e-9) rec.status.push_back("n_above_validated_range");

    const ChannelParams params{cfg.gamma, n_bath};
    params.validate();
    CriterionContext ctx{cfg.sh_order, witnesses};

    std::vector<Criterion> dense;
    for (Criterion c : cfg.criteria) {
      if (c == Criterion::SI && cfg.si_path == SiPath::Analytic) {
        SeparationOptions so;
        so.search = cfg.search;
        rec.t_k[static_cast<int>(c)] = separation_time(state, params, c, so);
      } else {
        dense.push_back(c);
      }
    }

    const bool want_delta = cfg.gaussification && !cfg.thresholds.empty();
    if (!dense.empty() || want_delta) {
      EvolutionSpec ev = cfg.evolution;
      if (ev.engine == Engine::AncillaMap && ev.compact_tail == 0.0) {
        ev.compact_tail = kCompactTail;
        ev.compact_floor = std::min(p.dim, std::max(cfg.witness_dim, 8));
      }
      Trajectory traj(to_density(state), params, ev);
      rec.ancilla_dim = traj.ancilla_dim();
      const auto grid = time_grid(cfg.search);
      std::vector<std::vector<char>> flags(dense.size());
      std::vector<double> delta;
      double deficit = 0.0;
      auto sample = [&](double t) {
        DensityMatrix rho = traj.at(t);
        deficit = std::max(deficit, 1.0 - rho.trace().real());
        return rho;
      };
      for (double t : grid) {
        const DensityMatrix rho = sample(t);
        for (std::size_t k = 0; k < dense.size(); ++k) flags[k].push_back(evaluate(dense[k], rho, ctx).entangled);
        if (want_delta) delta.push_back(nongaussianity(rho).delta);
      }
      for (std::size_t k = 0; k < dense.size(); ++k) {
        const Criterion c = dense[k];
        auto probe = [&](double t) { return evaluate(c, sample(t), ctx).entangled; };
        const TimeEstimate est = last_true(grid, flags[k], probe, cfg.search.precision);
        rec.t_k[static_cast<int>(c)] = est;
        if (est.nonmonotone) rec.status.push_back("nonmonotone:" + std::string(to_string(c)));
      }
      if (want_delta) {
        for (std::size_t k = 0; k < cfg.thresholds.size(); ++k) {
          const double thr = cfg.thresholds[k];
          std::vector<char> below(delta.size());
          for (std::size_t i = 0; i < delta.size(); ++i) below[i] = delta[i] < thr;
          auto probe = [&](double t) { return nongaussianity(sample(t)).delta < thr; };
          const TimeEstimate est = first_true(grid, below, probe, cfg.search.precision);
          rec.t_g[k] = est;
          if (est.censored) rec.status.push_back("t_g_censored:" + threshold_label(thr));
          if (est.nonmonotone) rec.status.push_back("delta_nonmonotone:" + threshold_label(thr));
        }
      }
      rec.trace_deficit = deficit;
      if (deficit > kTruncationFlag) rec.status.push_back("truncation");
    }
    update_t_m(rec);
    if (rec.t_m && rec.t_m->censored) rec.status.push_back("t_m_censored");
  } catch (const std::exception& e) {
    rec.status.push_back("error:" + std::string(e.what()));
  }
  return rec;
}

std::shared_ptr<const WitnessSet> make_witnesses(const SweepConfig& cfg) {
  if (std::find(cfg.criteria.begin(), cfg.criteria.end(), Criterion::SP) == cfg.criteria.end()) return nullptr;
  return std::make_shared<const WitnessSet>(cfg.witness_dim, cfg.witness_count, cfg.witness_seed);
}

json point_to_json(const PointRequest& p) {
  json j{{"family", std::string(to_string(p.family))}, {"support", p.support}};
  if (p.param) j["param"] = *p.param;
  if (p.n_target) j["n_target"] = *p.n_target;
  return j;
}

PointRequest point_from_json(const json& j) {
  PointRequest p;
  p.family = parse_family(j.at("family").get<std::string>());
  if (j.contains("param")) p.param = j["param"].get<double>();
  if (j.contains("n_target")) p.n_target = j["n_target"].get<double>();
  p.support = j.value("support", 0);
  return p;
}

json config_to_json(const SweepConfig& c) {
  json points = json::array();
  for (const auto& p : c.points) points.push_back(point_to_json(p));
  json crit = json::array();
  for (Criterion k : c.criteria) crit.push_back(std::string(to_string(k)));
  return json{
      {"protocol", c.protocol},
      {"points", points},
      {"n_baths", c.n_baths},
      {"gamma", c.gamma},
      {"t_max", c.search.t_max},
      {"grid", c.search.resolution},
      {"precision", c.search.precision},
      {"dim_policy",
       {{"automatic", c.dim_policy.automatic},
        {"fixed", c.dim_policy.fixed},
        {"tail_tol", c.dim_policy.tail_tol},
        {"padding", c.dim_policy.padding},
        {"floor", c.dim_policy.floor}}},
      {"engine", std::string(to_string(c.evolution.engine))},
      {"ancilla_dim", c.evolution.ancilla_dim},
      {"rk4_step", c.evolution.rk4_step},
      {"criteria", crit},
      {"thresholds", c.thresholds},
      {"gaussification", c.gaussification},
      {"sh_order", c.sh_order},
      {"witness_count", c.witness_count},
      {"witness_seed", c.witness_seed},
      {"witness_dim", c.witness_dim},
      {"random_decreasing", c.random_decreasing},
      {"si_path", c.si_path == SiPath::Analytic ? "analytic" : "density"},
      {"jobs", c.jobs},
      {"out", c.out},
  };
}

}  // namespace

void SweepConfig::validate() const {
  search.validate();
  if (points.empty()) throw ConfigError("sweep has no points");
  if (n_baths.empty()) throw ConfigError("sweep has no bath temperatures");
  for (double nb : n_baths) {
    if (!(nb >= 0.0) || !std::isfinite(nb)) throw ConfigError("n_bath must be >= 0");
  }
  if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
  if (criteria.empty()) throw ConfigError("no criteria selected");
  for (double t : thresholds) {
    if (!(t > 0.0)) throw ConfigError("Gaussification thresholds must be > 0");
  }
  for (const auto& p : points) {
    if (p.n_target && *p.n_target > kValidatedEnergy + 1e-9) {
      throw ConfigError("energy target " + std::to_string(*p.n_target) + " above the validated range N <= 5");
    }
  }
  if (sh_order < 2) throw ConfigError("sh order must be >= 2");
  if (witness_count < 1 || witness_dim < 2) throw ConfigError("witness set must be non-empty");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (evolution.engine == Engine::LindbladRk4 && (!(evolution.rk4_step > 0.0) || evolution.rk4_step > 1e-2)) {
    throw ConfigError("rk4 step must lie in (0, 1e-2]");
  }
}

std::vector<double> energy_grid(int points, double lo, double hi) {
  if (points < 1) throw ConfigError("energy grid needs at least one point");
  if (points == 1) return {hi};
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  return g;
}

ScanRecord evaluate_point(const PointRequest& point, double n_bath, const SweepConfig& config,
                          std::shared_ptr<const WitnessSet> witnesses) {
  return evaluate_resolved(resolve(point, config), n_bath, config, witnesses);
}

std::vector<ScanRecord> run_sweep(const SweepConfig& config) {
  config.validate();
  std::vector<ResolvedPoint> resolved;
  for (const auto& p : config.points) resolved.push_back(resolve(p, config));

  struct Task {
    std::size_t point;
    double n_bath;
  };
  std::vector<Task> tasks;
  for (double nb : config.n_baths) {
    for (std::size_t i = 0; i < resolved.size(); ++i) tasks.push_back({i, nb});
  }

  auto key_of = [&](const Task& t) {
    ScanRecord r;
    r.family = std::string(to_string(resolved[t.point].family));
    r.param = resolved[t.point].param;
    r.n_bath = t.n_bath;
    if (std::isnan(r.param)) r.n = resolved[t.point].n_target.value_or(r.n);
    return record_key(r);
  };

  std::map<std::string, ScanRecord> existing;
  std::ofstream out;
  if (!config.out.empty()) {
    if (config.resume && std::filesystem::exists(config.out)) {
      for (auto& r : read_csv(config.out, config.thresholds)) existing.emplace(record_key(r), std::move(r));
    }
    std::vector<ScanRecord> keep;
    for (const auto& t : tasks) {
      auto it = existing.find(key_of(t));
      if (it != existing.end()) keep.push_back(it->second);
    }
    write_csv(config.out, keep, config.thresholds);
    std::ofstream(config.out + ".json") << sidecar_json(config, {});
    out.open(config.out, std::ios::binary | std::ios::app);
  }

  const auto witnesses = make_witnesses(config);
  std::vector<std::optional<ScanRecord>> results(tasks.size());
  std::vector<char> fresh(tasks.size(), 1);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto it = existing.find(key_of(tasks[i]));
    if (it != existing.end()) {
      results[i] = it->second;
      fresh[i] = 0;
    }
  }

  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      if (!fresh[i]) continue;
      ScanRecord rec = evaluate_resolved(resolved[tasks[i].point], tasks[i].n_bath, config, witnesses);
      std::lock_guard lock(mu);
      results[i] = std::move(rec);
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);

  // Records leave in sweep order so that a resumed file is a prefix of a
  // fresh one.
  std::vector<ScanRecord> all;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return results[i].has_value(); });
    ScanRecord rec = *results[i];
    lock.unlock();
    if (fresh[i] && out.is_open()) {
      out << format_row(rec) << '\n';
      out.flush();
    }
    all.push_back(std::move(rec));
  }
  for (auto& t : pool) t.join();
  if (!config.out.empty()) std::ofstream(config.out + ".json") << sidecar_json(config, all);
  return all;
}

SweepConfig fig1_config(int n_points) {
  SweepConfig c;
  c.protocol = "fig1";
  for (double n : energy_grid(n_points)) c.points.push_back({Family::TMC, std::nullopt, n, 0});
  c.n_baths = {1e-5, 1e-1};
  return c;
}

int cohort_support(std::uint64_t seed, int max_support) {
  if (max_support < 2) throw ConfigError("random support must be >= 2");
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  return 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_support - 1));
}

std::vector<PointRequest> random_cohort(const std::vector<double>& grid, int per_bucket, int max_support,
                                        bool decreasing, std::uint64_t first_seed) {
  std::vector<PointRequest> out;
  if (grid.empty() || per_bucket <= 0) return out;
  const double half = grid.size() > 1 ? 0.5 * (grid[1] - grid[0]) : 0.5;
  std::vector<int> filled(grid.size(), 0);
  std::size_t open = grid.size();
  const std::uint64_t budget = 20000ULL * grid.size() * static_cast<std::uint64_t>(per_bucket);
  for (std::uint64_t seed = first_seed; open > 0 && seed < first_seed + budget; ++seed) {
    const int support = cohort_support(seed, max_support);
    const double n = mean_photon(random_pnes(support, seed, decreasing, support));
    const auto it = std::min_element(grid.begin(), grid.end(),
                                     [n](double a, double b) { return std::abs(a - n) < std::abs(b - n); });
    if (std::abs(*it - n) > half) continue;
    const auto k = static_cast<std::size_t>(it - grid.begin());
    if (filled[k] >= per_bucket) continue;
    out.push_back({Family::RANDOM, static_cast<double>(seed), std::nullopt, support});
    if (++filled[k] == per_bucket) --open;
  }
  return out;
}

SweepConfig fig2_config(int n_points, int per_bucket, int max_support) {
  SweepConfig c;
  c.protocol = "fig2";
  c.dim_policy.automatic = true;
  c.n_baths = {1e-3};
  const auto grid = energy_grid(n_points);
  for (Family f : {Family::PASV, Family::PSSV, Family::TMC, Family::TWB}) {
    for (double n : grid) c.points.push_back({f, std::nullopt, n, 0});
  }
  for (auto& p : random_cohort(grid, per_bucket, max_support, c.random_decreasing)) c.points.push_back(p);
  return c;
}

std::vector<ScanRecord> fig1_protocol(const SweepConfig& config) { return run_sweep(config); }
std::vector<ScanRecord> fig2_protocol(const SweepConfig& config) { return run_sweep(config); }

std::string sidecar_json(const SweepConfig& config, const std::vector<ScanRecord>& records) {
  json rows = json::array();
  std::set<int> ancillas;
  for (const auto& r : records) {
    rows.push_back({{"key", record_key(r)}, {"dim", r.dim}, {"ancilla_dim", r.ancilla_dim}, {"support", r.support}});
    if (r.ancilla_dim > 0) ancillas.insert(r.ancilla_dim);
  }
  json anc = json::object();
  for (double nb : config.n_baths) anc[format_number(nb)] = ancilla_dim_for(nb);
  json j{
      {"version", PNES_VERSION},
      {"config", config_to_json(config)},
      {"argv", config.argv},
      {"seeds", {{"witness_seed", config.witness_seed}, {"random_seeds", "param column of random rows"}}},
      {"engine",
       {{"name", std::string(to_string(config.evolution.engine))},
        {"ancilla_dim_by_n_bath", anc},
        {"ancilla_tail_tol", kAncillaTailTol},
        {"compact_tail", kCompactTail}}},
      {"random_distribution",
       "Schmidt weights p ~ Dirichlet(1,...,1) over the support (normalized -ln U draws from mt19937_64), "
       "psi = sqrt(p), sorted descending when random_decreasing is set; cohort support drawn uniformly in "
       "[2, max_support] per seed, embedded with 8 spare levels under the automatic dimension policy"},
      {"records", rows},
  };
  return j.dump(2) + "\n";
}

SweepConfig config_from_sidecar(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sidecar: ") + e.what());
  }
  const json& c = j.contains("config") ? j["config"] : j;
  SweepConfig cfg;
  try {
    cfg.protocol = c.value("protocol", cfg.protocol);
    cfg.points.clear();
    for (const auto& p : c.at("points")) cfg.points.push_back(point_from_json(p));
    cfg.n_baths = c.at("n_baths").get<std::vector<double>>();
    cfg.gamma = c.value("gamma", cfg.gamma);
    cfg.search.t_max = c.value("t_max", cfg.search.t_max);
    cfg.search.resolution = c.value("grid", cfg.search.resolution);
    cfg.search.precision = c.value("precision", cfg.search.precision);
    if (c.contains("dim_policy")) {
      const auto& d = c["dim_policy"];
      cfg.dim_policy.automatic = d.value("automatic", false);
      cfg.dim_policy.fixed = d.value("fixed", 20);
      cfg.dim_policy.tail_tol = d.value("tail_tol", 1e-10);
      cfg.dim_policy.padding = d.value("padding", 4);
      cfg.dim_policy.floor = d.value("floor", 20);
    }
    cfg.evolution.engine = parse_engine(c.value("engine", std::string("ancilla")));
    cfg.evolution.ancilla_dim = c.value("ancilla_dim", 0);
    cfg.evolution.rk4_step = c.value("rk4_step", 1e-3);
    cfg.criteria.clear();
    for (const auto& k : c.at("criteria")) cfg.criteria.push_back(parse_criterion(k.get<std::string>()));
    cfg.thresholds = c.at("thresholds").get<std::vector<double>>();
    cfg.gaussification = c.value("gaussification", true);
    cfg.sh_order = c.value("sh_order", 8);
    cfg.witness_count = c.value("witness_count", 10000);
    cfg.witness_seed = c.value("witness_seed", cfg.witness_seed);
    cfg.witness_dim = c.value("witness_dim", 20);
    cfg.random_decreasing = c.value("random_decreasing", true);
    cfg.si_path = c.value("si_path", std::string("analytic")) == "density" ? SiPath::Density : SiPath::Analytic;
    cfg.jobs = c.value("jobs", 1);
    cfg.out = c.value("out", std::string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sidecar: ") + e.what());
  }
  if (j.contains("argv")) cfg.argv = j["argv"].get<std::vector<std::string>>();
  return cfg;
}

}  // namespace pnes
