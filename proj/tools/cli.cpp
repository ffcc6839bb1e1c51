#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pnes/channel.hpp"
#include "pnes/criteria.hpp"
#include "pnes/error.hpp"
#include "pnes/families.hpp"
#include "pnes/nongauss.hpp"
#include "pnes/records.hpp"
#include "pnes/scan.hpp"
#include "pnes/spectral.hpp"

#ifndef PNES_VERSION
#define PNES_VERSION "unknown"
#endif

namespace pnes::cli {
namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kFamilies = {"twb", "pssv", "pasv", "tmc", "random"};
const std::vector<std::string> kCriteria = {"si", "sh", "sp", "re"};
const std::vector<std::string> kEngines = {"ancilla", "rk4"};
const std::vector<std::string> kFormats = {"csv", "json"};

// "20" or "auto".
CLI::Validator dim_validator() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        if (s == "auto") return {};
        try {
          std::size_t pos = 0;
          const int d = std::stoi(s, &pos);
          if (pos == s.size() && d >= 2) return {};
        } catch (const std::exception&) {
        }
        return "expected an integer >= 2 or 'auto', got '" + s + "'";
      },
      "INT|auto");
}

DimPolicy dim_policy(const std::string& dim) {
  DimPolicy p;
  if (dim == "auto") {
    p.automatic = true;
  } else {
    p.fixed = std::stoi(dim);
    p.floor = p.fixed;
  }
  return p;
}

// Six significant digits after rounding to six decimals; never "-0".
std::string short_number(double v) {
  double r = std::round(v * 1e6) / 1e6 + 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r);
  return buf;
}

struct StateArgs {
  std::string family = "twb";
  std::optional<double> x;
  std::optional<double> lambda;
  std::optional<double> n_target;
  std::optional<std::uint64_t> seed;
  int support = 0;
  bool decreasing = true;
  std::string dim = "20";
};

void add_state_options(CLI::App* app, StateArgs& a) {
  app->add_option("--family", a.family, "State family")->check(CLI::IsMember(kFamilies))->capture_default_str();
  app->add_option("--x", a.x, "Squeezing-like parameter in [0, 1) for twb, pssv, pasv");
  app->add_option("--lambda", a.lambda, "Coherent amplitude for tmc");
  app->add_option("--n-target", a.n_target, "Solve the family parameter for this mean photon number");
  app->add_option("--seed", a.seed, "Seed for random");
  app->add_option("--support", a.support, "Schmidt support of random states (0 = all levels)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--decreasing", a.decreasing, "Sort random Schmidt weights in descending order")
      ->capture_default_str();
  app->add_option("--dim", a.dim, "Fock levels per mode")->check(dim_validator())->capture_default_str();
}

struct BuiltState {
  PnesState state;
  double param;
};

BuiltState build_state(const StateArgs& a) {
  const Family fam = parse_family(a.family);
  const DimPolicy policy = dim_policy(a.dim);
  if (fam == Family::RANDOM) {
    if (!a.seed) throw UsageError("--family random needs --seed");
    if (a.x || a.lambda || a.n_target) throw UsageError("--family random takes only --seed and --support");
    const int dim = policy.automatic ? std::max(policy.floor, a.support + 8) : policy.fixed;
    return {random_pnes(dim, *a.seed, a.decreasing, a.support), static_cast<double>(*a.seed)};
  }
  if (a.seed) throw UsageError("--seed applies to --family random only");
  const bool is_tmc = fam == Family::TMC;
  if (is_tmc && a.x) throw UsageError("--family tmc takes --lambda, not --x");
  if (!is_tmc && a.lambda) throw UsageError("--lambda applies to --family tmc only");
  const std::optional<double> param = is_tmc ? a.lambda : a.x;
  if (param.has_value() == a.n_target.has_value()) {
    throw UsageError(std::string("give exactly one of ") + (is_tmc ? "--lambda" : "--x") + " or --n-target");
  }
  double p = 0.0;
  int dim = 0;
  if (param) {
    p = *param;
    dim = choose_dim(fam, p, policy);
  } else {
    const auto r = resolve_for_energy(fam, *a.n_target, policy);
    p = r.param;
    dim = r.dim;
  }
  return {build(FamilySpec{fam, p, dim}), p};
}

struct ChannelArgs {
  double n_bath = 1e-3;
  double gamma = 1.0;
  std::string engine = "ancilla";
  int ancilla_dim = 0;
  double rk4_step = 1e-3;
};

void add_channel_options(CLI::App* app, ChannelArgs& a) {
  app->add_option("--nbath", a.n_bath, "Thermal photon number of the bath")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--gamma", a.gamma, "Damping rate")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--engine", a.engine, "Evolution engine")->check(CLI::IsMember(kEngines))->capture_default_str();
  app->add_option("--ancilla-dim", a.ancilla_dim, "Ancilla levels (0 = automatic)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--rk4-step", a.rk4_step, "RK4 time step")->capture_default_str();
}

EvolutionSpec evolution_spec(const ChannelArgs& a) {
  EvolutionSpec s;
  s.engine = parse_engine(a.engine);
  s.ancilla_dim = a.ancilla_dim;
  s.rk4_step = a.rk4_step;
  return s;
}

struct CriteriaArgs {
  std::vector<std::string> criteria = kCriteria;
  int sh_order = 8;
  int witness_count = 10000;
  std::uint64_t witness_seed = 20240611;
};

void add_criteria_options(CLI::App* app, CriteriaArgs& a) {
  app->add_option("--criteria", a.criteria, "Comma-separated separability criteria")
      ->delimiter(',')
      ->check(CLI::IsMember(kCriteria))
      ->capture_default_str();
  app->add_option("--sh-order", a.sh_order, "Highest operator order of the moment matrix")->capture_default_str();
  app->add_option("--witness-count", a.witness_count, "Number of product-state witnesses")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--witness-seed", a.witness_seed, "Seed of the witness set")->capture_default_str();
}

std::vector<Criterion> criteria_of(const CriteriaArgs& a) {
  std::vector<Criterion> out;
  for (const auto& c : a.criteria) out.push_back(parse_criterion(c));
  return out;
}

CriterionContext criterion_context(const CriteriaArgs& a, const std::vector<Criterion>& crits) {
  CriterionContext ctx;
  ctx.sh_order = a.sh_order;
  for (Criterion c : crits) {
    if (c == Criterion::SP) ctx.witnesses = std::make_shared<const WitnessSet>(20, a.witness_count, a.witness_seed);
  }
  return ctx;
}

std::string verdict_word(const Verdict& v) {
  if (v.entangled) return "entangled";
  return v.criterion == Criterion::SI ? "separable" : "undetected";
}

void write_command_sidecar(const std::string& path, const std::string& command,
                           const std::vector<std::string>& args) {
  if (path.empty()) return;
  json j{{"version", PNES_VERSION}, {"command", command}, {"argv", args}};
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write sidecar " + path);
  f << j.dump(2) << "\n";
}

int cmd_state(const StateArgs& a, const std::string& format, std::ostream& out) {
  const auto built = build_state(a);
  const double n = mean_photon(built.state);
  const double c = correlation(built.state);
  const double eps0 = schmidt_entropy(built.state);
  const double delta0 = delta0_closed_form(n, c);
  if (format == "json") {
    json j{{"family", a.family}, {"param", built.param}, {"dim", built.state.dim()},
           {"N", n},           {"C", c},               {"eps0", eps0},
           {"delta0", delta0}};
    out << j.dump(2) << "\n";
  } else {
    out << "N=" << short_number(n) << ",C=" << short_number(c) << ",eps0=" << short_number(eps0)
        << ",delta0=" << short_number(delta0) << "\n";
  }
  return 0;
}

int cmd_test(const StateArgs& sa, const ChannelArgs& ca, const CriteriaArgs& cr, double t, const std::string& format,
             std::ostream& out) {
  const auto built = build_state(sa);
  const ChannelParams params{ca.gamma, ca.n_bath};
  params.validate();
  const auto crits = criteria_of(cr);
  const auto ctx = criterion_context(cr, crits);
  const DensityMatrix rho = evolve(to_density(built.state), t, params, evolution_spec(ca));
  json rows = json::array();
  std::ostringstream text;
  text << "criterion,verdict,witness_value\n";
  for (Criterion c : crits) {
    const Verdict v = evaluate(c, rho, ctx);
    rows.push_back({{"criterion", std::string(to_string(c))},
                    {"verdict", verdict_word(v)},
                    {"witness_value", v.witness_value}});
    text << to_string(c) << "," << verdict_word(v) << "," << format_number(v.witness_value) << "\n";
  }
  if (format == "json") {
    out << json{{"t", t}, {"results", rows}}.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return 0;
}

int cmd_evolve(const StateArgs& sa, const ChannelArgs& ca, const CriteriaArgs& cr, const TimeSearchOptions& search,
               const std::string& format, const std::string& out_path, std::ostream& out) {
  const auto built = build_state(sa);
  const ChannelParams params{ca.gamma, ca.n_bath};
  params.validate();
  search.validate();
  const auto crits = criteria_of(cr);
  const auto ctx = criterion_context(cr, crits);
  Trajectory traj(to_density(built.state), params, evolution_spec(ca));

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot write " + out_path);
  }
  std::ostream& sink = out_path.empty() ? out : file;

  json rows = json::array();
  if (format == "csv") {
    sink << "t,trace,delta,d_minus";
    for (Criterion c : crits) sink << "," << to_string(c) << "," << to_string(c) << "_value";
    sink << "\n";
  }
  for (double t : time_grid(search)) {
    const DensityMatrix rho = traj.at(t);
    const double tr = rho.trace().real();
    const NonGaussReport ng = nongaussianity(rho);
    if (format == "csv") {
      sink << format_number(t) << "," << format_number(tr) << "," << format_number(ng.delta) << ","
           << format_number(ng.d_minus);
      for (Criterion c : crits) {
        const Verdict v = evaluate(c, rho, ctx);
        sink << "," << verdict_word(v) << "," << format_number(v.witness_value);
      }
      sink << "\n";
    } else {
      json row{{"t", t}, {"trace", tr}, {"delta", ng.delta}, {"d_minus", ng.d_minus}};
      for (Criterion c : crits) {
        const Verdict v = evaluate(c, rho, ctx);
        row[std::string(to_string(c))] = {{"verdict", verdict_word(v)}, {"witness_value", v.witness_value}};
      }
      rows.push_back(std::move(row));
    }
  }
  if (format == "json") sink << rows.dump(2) << "\n";
  return 0;
}

// Options shared by sweep, fig1 and fig2. Defaults are taken from the
// config the command starts from, so --help shows the protocol values.
struct SweepArgs {
  std::vector<double> n_baths;
  double gamma;
  double t_max;
  double grid;
  double precision;
  ChannelArgs channel;
  CriteriaArgs criteria;
  std::vector<double> thresholds;
  bool no_gauss = false;
  std::string si_path = "analytic";
  std::string dim;
  bool decreasing;
  int jobs;
  std::string out;
  bool no_resume = false;

  explicit SweepArgs(const SweepConfig& c, std::string default_out)
      : n_baths(c.n_baths),
        gamma(c.gamma),
        t_max(c.search.t_max),
        grid(c.search.resolution),
        precision(c.search.precision),
        thresholds(c.thresholds),
        dim(c.dim_policy.automatic ? "auto" : std::to_string(c.dim_policy.fixed)),
        decreasing(c.random_decreasing),
        jobs(c.jobs),
        out(std::move(default_out)) {
    criteria.sh_order = c.sh_order;
    criteria.witness_count = c.witness_count;
    criteria.witness_seed = c.witness_seed;
  }
};

void add_sweep_options(CLI::App* app, SweepArgs& a) {
  app->add_option("--nbaths", a.n_baths, "Comma-separated bath photon numbers")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--gamma", a.gamma, "Damping rate")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--t-max", a.t_max, "End of the time window")->capture_default_str();
  app->add_option("--grid", a.grid, "Time grid spacing")->capture_default_str();
  app->add_option("--precision", a.precision, "Bisection precision of the time estimates")->capture_default_str();
  app->add_option("--engine", a.channel.engine, "Evolution engine")
      ->check(CLI::IsMember(kEngines))
      ->capture_default_str();
  app->add_option("--ancilla-dim", a.channel.ancilla_dim, "Ancilla levels (0 = automatic)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--rk4-step", a.channel.rk4_step, "RK4 time step")->capture_default_str();
  add_criteria_options(app, a.criteria);
  app->add_option("--gauss-thresholds", a.thresholds, "Comma-separated Gaussification thresholds")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_flag("--no-gauss", a.no_gauss, "Skip Gaussification times");
  app->add_option("--si-path", a.si_path, "SI separation time from the closed form or the evolved state")
      ->check(CLI::IsMember({"analytic", "density"}))
      ->capture_default_str();
  app->add_option("--dim", a.dim, "Fock levels per mode")->check(dim_validator())->capture_default_str();
  app->add_option("--decreasing", a.decreasing, "Sort random Schmidt weights in descending order")
      ->capture_default_str();
  app->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--out", a.out, "Output CSV; the sidecar goes next to it with a .json suffix")
      ->capture_default_str();
  app->add_flag("--no-resume", a.no_resume, "Recompute rows already present in the output");
}

void apply_sweep_args(const SweepArgs& a, SweepConfig& c) {
  c.n_baths = a.n_baths;
  c.gamma = a.gamma;
  c.search.t_max = a.t_max;
  c.search.resolution = a.grid;
  c.search.precision = a.precision;
  c.evolution.engine = parse_engine(a.channel.engine);
  c.evolution.ancilla_dim = a.channel.ancilla_dim;
  c.evolution.rk4_step = a.channel.rk4_step;
  c.criteria = criteria_of(a.criteria);
  c.sh_order = a.criteria.sh_order;
  c.witness_count = a.criteria.witness_count;
  c.witness_seed = a.criteria.witness_seed;
  c.thresholds = a.thresholds;
  c.gaussification = !a.no_gauss;
  c.si_path = a.si_path == "density" ? SiPath::Density : SiPath::Analytic;
  c.dim_policy = dim_policy(a.dim);
  c.random_decreasing = a.decreasing;
  c.jobs = a.jobs;
  c.out = a.out;
  c.resume = !a.no_resume;
}

json records_json(const std::vector<ScanRecord>& records, const std::vector<double>& thresholds) {
  const auto header = csv_header(thresholds);
  json rows = json::array();
  for (const auto& r : records) {
    std::vector<std::string> cells;
    std::stringstream ss(format_row(r));
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    json row = json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string v = i < cells.size() ? cells[i] : "";
      char* end = nullptr;
      const double d = std::strtod(v.c_str(), &end);
      if (!v.empty() && end && *end == '\0' && std::isfinite(d)) {
        row[header[i]] = d;
      } else {
        row[header[i]] = v;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int finish_sweep(const SweepConfig& config, const std::string& format, std::ostream& out) {
  config.validate();
  const auto records = run_sweep(config);
  if (format == "json") {
    out << records_json(records, config.thresholds).dump(2) << "\n";
  } else {
    out << csv_header_line(config.thresholds) << "\n";
    for (const auto& r : records) out << format_row(r) << "\n";
  }
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decoherence of photon-number entangled states in a thermal-loss channel", "pnes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PNES_VERSION);

  std::string format = "csv";
  std::string sidecar;
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember(kFormats))->capture_default_str();
  };

  // state
  StateArgs state_args;
  auto* state = app.add_subcommand("state", "Print N, C, eps0 and delta0 of a state");
  add_state_options(state, state_args);
  add_format(state);
  state->add_option("--sidecar", sidecar, "Write a JSON sidecar that replays this command");

  // evolve
  StateArgs evolve_state;
  ChannelArgs evolve_channel;
  CriteriaArgs evolve_criteria;
  TimeSearchOptions evolve_search;
  std::string evolve_out;
  auto* evolve_cmd = app.add_subcommand("evolve", "Trace, delta, d_minus and verdicts on a time grid");
  add_state_options(evolve_cmd, evolve_state);
  add_channel_options(evolve_cmd, evolve_channel);
  add_criteria_options(evolve_cmd, evolve_criteria);
  evolve_cmd->add_option("--t-max", evolve_search.t_max, "End of the time grid")->capture_default_str();
  evolve_cmd->add_option("--grid", evolve_search.resolution, "Time grid spacing")->capture_default_str();
  evolve_cmd->add_option("--out", evolve_out, "Output file (default stdout)");
  add_format(evolve_cmd);
  evolve_cmd->add_option("--sidecar", sidecar, "Write a JSON sidecar that replays this command");

  // test
  StateArgs test_state;
  ChannelArgs test_channel;
  CriteriaArgs test_criteria;
  double test_t = 0.0;
  auto* test_cmd = app.add_subcommand("test", "Run separability criteria at one time");
  add_state_options(test_cmd, test_state);
  add_channel_options(test_cmd, test_channel);
  add_criteria_options(test_cmd, test_criteria);
  test_cmd->add_option("--t", test_t, "Evolution time")->check(CLI::NonNegativeNumber)->capture_default_str();
  add_format(test_cmd);
  test_cmd->add_option("--sidecar", sidecar, "Write a JSON sidecar that replays this command");

  // sweep
  SweepConfig sweep_base;
  SweepArgs sweep_args(sweep_base, "sweep.csv");
  std::vector<std::string> sweep_families = {"twb"};
  std::vector<double> sweep_params;
  std::vector<double> sweep_targets;
  std::vector<std::uint64_t> sweep_seeds;
  int sweep_support = 0;
  int sweep_points = 25;
  auto* sweep = app.add_subcommand("sweep", "Separation and Gaussification times over states and baths");
  sweep->add_option("--families", sweep_families, "Comma-separated families")
      ->delimiter(',')
      ->check(CLI::IsMember(kFamilies))
      ->capture_default_str();
  sweep->add_option("--params", sweep_params, "Comma-separated family parameters (x or lambda)")->delimiter(',');
  sweep->add_option("--n-targets", sweep_targets, "Comma-separated mean photon numbers")->delimiter(',');
  sweep->add_option("--n-points", sweep_points, "Energy grid size on [0.04, 5] when no parameters are given")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--seeds", sweep_seeds, "Comma-separated seeds for random states")->delimiter(',');
  sweep->add_option("--support", sweep_support, "Schmidt support of random states (0 = all levels)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_sweep_options(sweep, sweep_args);
  add_format(sweep);

  // fig1
  int fig1_points = 25;
  SweepArgs fig1_args(fig1_config(), "fig1.csv");
  auto* fig1 = app.add_subcommand("fig1", "TMC separation and Gaussification times at two temperatures");
  fig1->add_option("--n-points", fig1_points, "Energy grid size on [0.04, 5]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_sweep_options(fig1, fig1_args);
  add_format(fig1);

  // fig2
  int fig2_points = 25;
  int fig2_bucket = 20;
  int fig2_support = 20;
  SweepArgs fig2_args(fig2_config(), "fig2.csv");
  auto* fig2 = app.add_subcommand("fig2", "Separation times and delta0 across families and random states");
  fig2->add_option("--n-points", fig2_points, "Energy grid size on [0.04, 5]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fig2->add_option("--per-bucket", fig2_bucket, "Random states per energy bucket")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fig2->add_option("--max-support", fig2_support, "Largest Schmidt support of random states")
      ->check(CLI::Range(2, 4096))
      ->capture_default_str();
  add_sweep_options(fig2, fig2_args);
  add_format(fig2);

  // rerun
  std::string rerun_path;
  std::string rerun_out;
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its JSON sidecar");
  rerun->add_option("sidecar", rerun_path, "Sidecar written by a previous run")->required();
  rerun->add_option("--out", rerun_out, "Write sweep output here instead of the recorded path");
  add_format(rerun);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*state) {
      write_command_sidecar(sidecar, "state", args);
      return cmd_state(state_args, format, out);
    }
    if (*evolve_cmd) {
      write_command_sidecar(sidecar, "evolve", args);
      return cmd_evolve(evolve_state, evolve_channel, evolve_criteria, evolve_search, format, evolve_out, out);
    }
    if (*test_cmd) {
      write_command_sidecar(sidecar, "test", args);
      return cmd_test(test_state, test_channel, test_criteria, test_t, format, out);
    }
    if (*sweep) {
      SweepConfig cfg;
      apply_sweep_args(sweep_args, cfg);
      cfg.argv = args;
      std::vector<double> targets = sweep_targets;
      if (targets.empty() && sweep_params.empty()) targets = energy_grid(sweep_points);
      for (const auto& name : sweep_families) {
        const Family fam = parse_family(name);
        if (fam == Family::RANDOM) {
          if (sweep_seeds.empty()) throw UsageError("--families random needs --seeds");
          for (auto seed : sweep_seeds) {
            PointRequest p{fam, static_cast<double>(seed), std::nullopt, sweep_support};
            cfg.points.push_back(p);
          }
          continue;
        }
        for (double v : sweep_params) cfg.points.push_back(PointRequest{fam, v, std::nullopt, 0});
        if (sweep_params.empty()) {
          for (double n : targets) cfg.points.push_back(PointRequest{fam, std::nullopt, n, 0});
        }
      }
      return finish_sweep(cfg, format, out);
    }
    if (*fig1) {
      SweepConfig cfg = fig1_config(fig1_points);
      apply_sweep_args(fig1_args, cfg);
      cfg.argv = args;
      return finish_sweep(cfg, format, out);
    }
    if (*fig2) {
      SweepConfig cfg = fig2_config(fig2_points, fig2_bucket, fig2_support);
      apply_sweep_args(fig2_args, cfg);
      cfg.argv = args;
      return finish_sweep(cfg, format, out);
    }
    if (*rerun) {
      const std::string text = read_file(rerun_path);
      json j;
      try {
        j = json::parse(text);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed sidecar: ") + e.what());
      }
      if (j.contains("command")) {
        return run(j.at("argv").get<std::vector<std::string>>(), out, err);
      }
      SweepConfig cfg = config_from_sidecar(text);
      if (!rerun_out.empty()) cfg.out = rerun_out;
      return finish_sweep(cfg, format, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace pnes::cli
