#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pnes/error.hpp"
#include "pnes/records.hpp"
#include "pnes/scan.hpp"

using namespace pnes;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "pnes_tests";
  fs::create_directories(dir);
  auto p = dir / name;
  fs::remove(p);
  fs::remove(p.string() + ".json");
  return p;
}

// Small, fast sweep: short window, coarse grid.
SweepConfig quick_config() {
  SweepConfig c;
  c.search = {3.0, 0.05, 1e-3};
  c.n_baths = {0.1};
  c.witness_count = 500;
  return c;
}

ScanRecord sample_record() {
  ScanRecord r;
  r.family = "tmc";
  r.param = 1.25;
  r.n = 0.9;
  r.c = 1.1;
  r.eps0 = 1.2;
  r.delta0 = 0.3;
  r.n_bath = 1e-3;
  r.t_k[0] = TimeEstimate{2.5, false, false, false};
  r.t_k[1] = TimeEstimate{15.0, true, false, false};
  r.t_k[2] = TimeEstimate{0.0, false, true, false};
  r.t_k[3] = TimeEstimate{2.75, false, false, true};
  r.t_g = {TimeEstimate{0.5, false, false, false}, std::nullopt, TimeEstimate{15, true, false, false}};
  r.trace_deficit = 1e-13;
  r.status = {"nonmonotone:re", "t_g_censored:1e-3"};
  update_t_m(r);
  return r;
}

}  // namespace

TEST_SUITE("scan") {
  TEST_CASE("CSV schema") {
    CHECK(csv_header_line({0.1, 0.01, 0.001}) ==
          "family,param,N,C,eps0,delta0,n_bath,t_si,t_sh,t_sp,t_re,flags_si,flags_sh,flags_sp,flags_re,t_m,"
          "t_g_1e-1,t_g_1e-2,t_g_1e-3,trace_deficit,status");
    CHECK(threshold_label(0.1) == "1e-1");
    CHECK(threshold_label(0.001) == "1e-3");
    CHECK(threshold_label(0.05) == "5e-2");
    CHECK(threshold_label(2.0) == "2e0");
    CHECK_THROWS_AS(threshold_label(0.0), ConfigError);
  }

  TEST_CASE("number and flag formatting") {
    CHECK(format_number(1.0 / 3) == "0.333333333333");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(NAN) == "nan");
    CHECK(flags_token(std::nullopt) == "absent");
    CHECK(flags_token(TimeEstimate{}) == "ok");
    CHECK(flags_token(TimeEstimate{15, true, false, true}) == "censored|nonmonotone");
  }

  TEST_CASE("t_m is the max over present criteria") {
    auto r = sample_record();
    REQUIRE(r.t_m);
    CHECK(r.t_m->time == 15.0);
    CHECK(r.t_m->censored);
    r.t_k[1].reset();
    update_t_m(r);
    CHECK(r.t_m->time == 2.75);
    CHECK_FALSE(r.t_m->censored);
    for (auto& t : r.t_k) t.reset();
    update_t_m(r);
    CHECK_FALSE(r.t_m);
  }

  TEST_CASE("row round trip") {
    const auto r = sample_record();
    const std::string line = format_row(r);
    const auto back = parse_row(line, 3);
    CHECK(format_row(back) == line);
    CHECK(back.family == "tmc");
    CHECK(back.t_k[1]->censored);
    CHECK(back.t_k[2]->undetected_at_start);
    CHECK(back.t_k[3]->nonmonotone);
    CHECK_FALSE(back.t_g[1]);
    CHECK(back.status == r.status);

    ScanRecord absent;
    absent.family = "pasv";
    absent.param = NAN;
    absent.n = 0.5;
    absent.n_bath = 1e-3;
    absent.t_g.assign(3, std::nullopt);
    absent.status = {"absent"};
    const auto a = parse_row(format_row(absent), 3);
    CHECK(std::isnan(a.param));
    CHECK(record_key(a) == "pasv,N=0.5,0.001");
    CHECK(record_key(r) == "tmc,1.25,0.001");

    CHECK_THROWS_AS(parse_row("tmc,1,2", 3), ConfigError);
  }

  TEST_CASE("status text never breaks the CSV") {
    auto r = sample_record();
    r.status = {"error:bad, worse"};
    const auto line = format_row(r);
    CHECK(std::count(line.begin(), line.end(), ',') == 20);
  }

  TEST_CASE("read_csv tolerates a torn last line and checks the header") {
    auto path = scratch("torn.csv");
    const auto r = sample_record();
    write_csv(path.string(), {r, r}, {0.1, 0.01, 0.001});
    {
      std::ofstream f(path, std::ios::app);
      f << "tmc,1.5,0.9";
    }
    CHECK(read_csv(path.string(), {0.1, 0.01, 0.001}).size() == 2);
    CHECK_THROWS_AS(read_csv(path.string(), {0.1}), ConfigError);
  }

  TEST_CASE("configuration validation") {
    SweepConfig c = quick_config();
    CHECK_THROWS_AS(c.validate(), ConfigError);  // no points
    c.points = {PointRequest{Family::TWB, 0.5, std::nullopt, 0}};
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.search.resolution = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.n_baths.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.points = {PointRequest{Family::TWB, std::nullopt, 6.0, 0}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.criteria.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(run_sweep(SweepConfig{}), ConfigError);
  }

  TEST_CASE("energy grid") {
    auto g = energy_grid(25);
    CHECK(g.size() == 25);
    CHECK(g.front() == Approx(0.04));
    CHECK(g.back() == Approx(5.0));
    CHECK_THROWS_AS(energy_grid(0), ConfigError);
  }

  TEST_CASE("single TWB point") {
    SweepConfig c;
    c.points = {PointRequest{Family::TWB, 0.5, std::nullopt, 0}};
    c.n_baths = {0.1};
    c.criteria = {Criterion::SI};
    auto recs = run_sweep(c);
    REQUIRE(recs.size() == 1);
    const auto& r = recs[0];
    CHECK(std::abs(r.t_k[0]->time - std::log(13.0 / 3)) < 1e-3);
    CHECK(r.delta0 < 1e-6);
    for (const auto& tg : r.t_g) CHECK(tg->time == 0.0);
    CHECK(r.t_m->time == r.t_k[0]->time);
    CHECK(r.status.empty());
  }

  TEST_CASE("zero temperature censors every criterion") {
    SweepConfig c = quick_config();
    c.n_baths = {0.0};
    c.gaussification = false;
    c.points = {PointRequest{Family::TMC, std::nullopt, 1.0, 0}};
    auto recs = run_sweep(c);
    REQUIRE(recs.size() == 1);
    for (const auto& t : recs[0].t_k) {
      REQUIRE(t);
      CHECK(t->censored);
      CHECK(t->time == 3.0);
    }
    CHECK(std::find(recs[0].status.begin(), recs[0].status.end(), "t_m_censored") != recs[0].status.end());
  }

  TEST_CASE("absent and failing points do not abort the sweep") {
    SweepConfig c = quick_config();
    c.criteria = {Criterion::SI};
    c.points = {PointRequest{Family::PASV, std::nullopt, 0.5, 0}, PointRequest{Family::TMC, 50.0, std::nullopt, 0},
                PointRequest{Family::TWB, 0.3, std::nullopt, 0}};
    auto recs = run_sweep(c);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].status == std::vector<std::string>{"absent"});
    CHECK(recs[1].status.at(0).rfind("error:", 0) == 0);
    CHECK(recs[2].status.empty());
  }

  TEST_CASE("deterministic, parallel and resumable") {
    SweepConfig c = quick_config();
    c.criteria = {Criterion::SI, Criterion::RE, Criterion::SP};
    c.thresholds = {0.1};
    c.n_baths = {0.1, 0.01};
    c.points = {PointRequest{Family::TMC, std::nullopt, 0.5, 0}, PointRequest{Family::RANDOM, 3.0, std::nullopt, 5},
                PointRequest{Family::PSSV, 0.4, std::nullopt, 0}};

    auto full = scratch("full.csv");
    c.out = full.string();
    run_sweep(c);
    const std::string want = slurp(full);
    CHECK(std::count(want.begin(), want.end(), '\n') == 7);

    auto again = scratch("again.csv");
    c.out = again.string();
    c.jobs = 3;
    run_sweep(c);
    CHECK(slurp(again) == want);

    // interrupted run: header, two rows and a torn third line
    auto part = scratch("part.csv");
    {
      std::istringstream in(want);
      std::ofstream out(part);
      std::string line;
      for (int i = 0; i < 3 && std::getline(in, line); ++i) out << line << "\n";
      std::getline(in, line);
      out << line.substr(0, line.size() / 2);
    }
    c.out = part.string();
    c.jobs = 1;
    auto resumed = run_sweep(c);
    CHECK(resumed.size() == 6);
    CHECK(slurp(part) == want);

    // sidecar next to the CSV replays the run
    const auto side = slurp(part.string() + ".json");
    auto cfg = config_from_sidecar(side);
    CHECK(cfg.points.size() == 3);
    CHECK(cfg.n_baths == c.n_baths);
    CHECK(cfg.criteria == c.criteria);
    CHECK(cfg.search.t_max == 3.0);
    CHECK(cfg.witness_count == 500);
    auto j = nlohmann::json::parse(side);
    CHECK(j["records"].size() == 6);
    CHECK(j["engine"]["name"] == "ancilla");
    auto replay = scratch("replay.csv");
    cfg.out = replay.string();
    run_sweep(cfg);
    CHECK(slurp(replay) == want);
  }

  TEST_CASE("figure configurations") {
    auto f1 = fig1_config();
    CHECK(f1.points.size() == 25);
    CHECK(f1.n_baths == std::vector<double>{1e-5, 1e-1});
    CHECK_FALSE(f1.dim_policy.automatic);
    CHECK(f1.dim_policy.fixed == 20);
    for (const auto& p : f1.points) CHECK(p.family == Family::TMC);

    auto f2 = fig2_config(5, 2, 10);
    CHECK(f2.n_baths == std::vector<double>{1e-3});
    CHECK(f2.dim_policy.automatic);
    std::map<Family, int> count;
    for (const auto& p : f2.points) ++count[p.family];
    for (auto f : {Family::PASV, Family::PSSV, Family::TMC, Family::TWB}) CHECK(count[f] == 5);
    CHECK(count[Family::RANDOM] <= 10);
    CHECK(count[Family::RANDOM] > 0);
  }

  TEST_CASE("random cohort buckets") {
    const auto grid = energy_grid(5);
    auto cohort = random_cohort(grid, 3, 12, true);
    CHECK(cohort == random_cohort(grid, 3, 12, true));
    CHECK(cohort.size() <= 15);
    std::map<int, int> per;
    for (const auto& p : cohort) {
      CHECK(p.family == Family::RANDOM);
      CHECK(p.support >= 2);
      CHECK(p.support <= 12);
      CHECK(p.support == cohort_support(static_cast<std::uint64_t>(*p.param), 12));
      const double n = mean_photon(random_pnes(std::max(20, p.support + 8), static_cast<std::uint64_t>(*p.param),
                                               true, p.support));
      int best = 0;
      for (int i = 1; i < 5; ++i)
        if (std::abs(n - grid[i]) < std::abs(n - grid[best])) best = i;
      ++per[best];
    }
    for (auto [k, v] : per) CHECK(v <= 3);
  }
}
