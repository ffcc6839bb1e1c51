#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "pnes/error.hpp"
#include "pnes/families.hpp"
#include "pnes/spectral.hpp"

using namespace pnes;
using doctest::Approx;

TEST_SUITE("families") {
  TEST_CASE("names") {
    for (auto f : {Family::TWB, Family::PSSV, Family::PASV, Family::TMC, Family::RANDOM}) {
      CHECK(parse_family(to_string(f)) == f);
    }
    try {
      parse_family("squeezed");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("twb") != std::string::npos);
      CHECK(msg.find("random") != std::string::npos);
    }
  }

  TEST_CASE("single surviving terms") {
    auto twb0 = build({Family::TWB, 0.0, 20});
    CHECK(twb0[0] == 1.0);
    auto tmc0 = build({Family::TMC, 0.0, 20});
    CHECK(tmc0[0] == 1.0);
    auto pasv0 = build({Family::PASV, 0.0, 20});
    CHECK(pasv0[0] == 0.0);
    CHECK(pasv0[1] == 1.0);
    CHECK(mean_photon(pasv0) == 1.0);
    auto pasv_small = build({Family::PASV, 1e-6, 20});
    CHECK(pasv_small[1] == Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("TMC lambda = 1 against Bessel functions") {
    const double want = std::cyl_bessel_i(1.0, 2.0) / std::cyl_bessel_i(0.0, 2.0);
    double num = 0, den = 0, f = 1;
    for (int n = 0; n <= 50; ++n) {
      if (n > 0) f *= n;
      num += n / (f * f);
      den += 1 / (f * f);
    }
    CHECK(num / den == Approx(want).epsilon(1e-14));
    CHECK(mean_photon(build({Family::TMC, 1.0, 20})) == Approx(want).epsilon(1e-12));
    CHECK(want == Approx(0.698).epsilon(1e-3));
  }

  TEST_CASE("parameter domain") {
    CHECK_THROWS_AS(build({Family::TWB, 1.0, 20}), DomainError);
    CHECK_THROWS_AS(build({Family::PSSV, -0.1, 20}), DomainError);
    CHECK_THROWS_AS(build({Family::TMC, -1.0, 20}), DomainError);
    CHECK_THROWS_AS(build({Family::TMC, 12.0, 20}), TruncationError);
    CHECK_NOTHROW(build({Family::TMC, 12.0, 60}));
  }

  TEST_CASE("TWB identity C = sqrt(N(N+1))") {
    for (int k = 1; k <= 9; ++k) {
      const double x = 0.1 * k;
      const int dim = minimal_dim(Family::TWB, x, 1e-14);
      auto s = build({Family::TWB, x, dim});
      const double n = mean_photon(s);
      CHECK(n == Approx(x * x / (1 - x * x)).epsilon(1e-9));
      CHECK(std::abs(correlation(s) - std::sqrt(n * (n + 1))) < 1e-8);
    }
  }

  TEST_CASE("photon subtraction and addition maps") {
    const int p = 10;
    const double x = 0.6;
    auto twb = build({Family::TWB, x, p});
    std::vector<double> psi(twb.coeffs().begin(), twb.coeffs().end());

    // work in p + 1 levels so a^+ never leaves the space
    const int d = p + 1;
    const Eigen::MatrixXcd rho = oracle::ket_density(psi, d);
    const Eigen::MatrixXd a = oracle::annihilation(d);
    const Eigen::MatrixXcd ab = Eigen::MatrixXd(Eigen::kroneckerProduct(a, a)).cast<cplx>();

    Eigen::MatrixXcd sub = ab * rho * ab.adjoint();
    sub /= sub.trace().real();
    Eigen::MatrixXcd add = ab.adjoint() * rho * ab;
    add /= add.trace().real();

    auto pssv = build({Family::PSSV, x, p - 1});
    auto pasv = build({Family::PASV, x, p + 1});
    std::vector<double> ps(pssv.coeffs().begin(), pssv.coeffs().end());
    std::vector<double> pa(pasv.coeffs().begin(), pasv.coeffs().end());
    CHECK((oracle::ket_density(ps, d) - sub).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((oracle::ket_density(pa, d) - add).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("energy is increasing in the parameter") {
    for (auto f : {Family::TWB, Family::PSSV, Family::PASV}) {
      double last = -1;
      for (int k = 0; k <= 18; ++k) {
        const double n = mean_photon(build({f, 0.05 * k, 60}));
        CHECK(n > last);
        last = n;
      }
    }
    double last = -1;
    for (int k = 0; k <= 30; ++k) {
      const double n = mean_photon(build({Family::TMC, 0.1 * k, 30}));
      CHECK(n > last);
      last = n;
    }
  }

  TEST_CASE("solve_param_for_energy") {
    CHECK(solve_param_for_energy(Family::TWB, 0.0, 20) == 0.0);
    const double x = solve_param_for_energy(Family::TWB, 1.0 / 3, 20);
    CHECK(x == Approx(0.5).epsilon(1e-8));
    CHECK(std::abs(mean_photon(build({Family::TWB, x, 20})) - 1.0 / 3) < 1e-8);

    const double lam = solve_param_for_energy(Family::TMC, 0.698, 20);
    CHECK(std::abs(lam - 1.0) < 1e-3);

    for (auto f : {Family::TWB, Family::PSSV, Family::PASV, Family::TMC}) {
      for (double n : {1.0, 2.5, 4.0}) {
        const double param = solve_param_for_energy(f, n, 40);
        CHECK(std::abs(mean_photon(build({f, param, 40})) - n) < 1e-8);
      }
    }
    CHECK_THROWS_AS(solve_param_for_energy(Family::PASV, 0.5, 20), RangeError);
    CHECK_THROWS_AS(solve_param_for_energy(Family::TWB, -1.0, 20), RangeError);
    CHECK_THROWS_AS(solve_param_for_energy(Family::TWB, 50.0, 20), RangeError);
    CHECK_THROWS_AS(solve_param_for_energy(Family::RANDOM, 1.0, 20), ConfigError);
  }

  TEST_CASE("dimension policy") {
    CHECK(tail_mass(Family::TWB, 0.5, 20) == Approx(std::pow(0.5, 40)));
    const int d = minimal_dim(Family::TWB, 0.9, 1e-10);
    CHECK(tail_mass(Family::TWB, 0.9, d) < 1e-10);
    CHECK(tail_mass(Family::TWB, 0.9, d - 1) >= 1e-10);

    DimPolicy fixed;
    CHECK(choose_dim(Family::TWB, 0.9, fixed) == 20);
    DimPolicy autop;
    autop.automatic = true;
    CHECK(choose_dim(Family::TWB, 0.9, autop) == d + autop.padding);
    CHECK(choose_dim(Family::TWB, 0.1, autop) == autop.floor);

    auto r = resolve_for_energy(Family::TWB, 5.0, autop);
    CHECK(tail_mass(Family::TWB, r.param, r.dim) < 1e-10);
    CHECK(mean_photon(build({Family::TWB, r.param, r.dim})) == Approx(5.0).epsilon(1e-8));
    CHECK(family_min_energy(Family::PASV) == 1.0);
    CHECK(family_min_energy(Family::TMC) == 0.0);
  }

  TEST_CASE("random PNES") {
    auto a = random_pnes(20, 42);
    auto b = random_pnes(20, 42);
    CHECK(std::equal(a.coeffs().begin(), a.coeffs().end(), b.coeffs().begin()));
    auto c = random_pnes(20, 43);
    CHECK_FALSE(std::equal(a.coeffs().begin(), a.coeffs().end(), c.coeffs().begin()));

    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto s = random_pnes(20, seed, true);
      for (int n = 0; n + 1 < 20; ++n) CHECK(s[n] >= s[n + 1]);
      CHECK(s[0] == *std::max_element(s.coeffs().begin(), s.coeffs().end()));
    }
    auto small = random_pnes(20, 5, true, 4);
    for (int n = 4; n < 20; ++n) CHECK(small[n] == 0.0);
    CHECK(small[3] > 0.0);
    CHECK_THROWS_AS(random_pnes(20, 5, true, 21), DomainError);
    CHECK(build({Family::RANDOM, 42, 20})[0] == a[0]);
  }

  TEST_CASE("random PNES second simplex moment") {
    const int d = 20, samples = 10000;
    const double want = 2.0 / (d + 1);

    auto mean_se = [&](auto&& draw) {
      double s = 0, s2 = 0;
      for (int k = 0; k < samples; ++k) {
        const double v = draw(k);
        s += v;
        s2 += v * v;
      }
      const double mean = s / samples;
      const double var = (s2 / samples - mean * mean) * samples / (samples - 1);
      return std::pair{mean, std::sqrt(var / samples)};
    };

    auto [m, se] = mean_se([&](int k) {
      auto s = random_pnes(d, 1000 + static_cast<std::uint64_t>(k), false);
      double acc = 0;
      for (double psi : s.coeffs()) acc += std::pow(psi, 4);
      return acc;
    });
    CHECK(std::abs(m - want) < 3 * se);

    // independent sampler: spacings of sorted uniforms
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto [m2, se2] = mean_se([&](int) {
      std::vector<double> cuts(d - 1);
      for (double& c : cuts) c = u(rng);
      std::sort(cuts.begin(), cuts.end());
      double acc = 0, prev = 0;
      for (double c : cuts) {
        acc += (c - prev) * (c - prev);
        prev = c;
      }
      return acc + (1 - prev) * (1 - prev);
    });
    CHECK(std::abs(m - m2) < 3 * std::hypot(se, se2));
  }
}
