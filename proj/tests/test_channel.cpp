#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "oracles.hpp"
#include "pnes/channel.hpp"
#include "pnes/error.hpp"
#include "pnes/families.hpp"
#include "pnes/spectral.hpp"

using namespace pnes;
using doctest::Approx;

namespace {

// One mode of the channel by brute force: embed rho (d levels) and the
// truncated thermal ancilla (a levels) in p = d + a levels each, apply the
// beam splitter exp(zeta (a^+ c - a c^+)) and trace out the ancilla.
Eigen::MatrixXcd channel_oracle(const Eigen::MatrixXcd& rho, double t, const ChannelParams& params, int a) {
  const int d = static_cast<int>(rho.rows());
  const int p = d + a;
  const Eigen::MatrixXd low = oracle::annihilation(p);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p, p);
  const Eigen::MatrixXd am = Eigen::kroneckerProduct(low, id);
  const Eigen::MatrixXd cm = Eigen::kroneckerProduct(id, low);
  const double zeta = std::atan(std::sqrt(std::expm1(params.gamma * t)));
  const Eigen::MatrixXd gen = zeta * (am.transpose() * cm - am * cm.transpose());
  const Eigen::MatrixXd u = gen.exp();

  Eigen::MatrixXcd sys = Eigen::MatrixXcd::Zero(p, p);
  sys.topLeftCorner(d, d) = rho;
  Eigen::MatrixXcd anc = Eigen::MatrixXcd::Zero(p, p);
  anc.topLeftCorner(a, a) = thermal_state(a, params.n_bath);
  const Eigen::MatrixXcd joint = Eigen::kroneckerProduct(sys, anc);
  const Eigen::MatrixXcd out = u.cast<cplx>() * joint * u.transpose().cast<cplx>();

  Eigen::MatrixXcd red = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < p; ++k) red(i, j) += out(i * p + k, j * p + k);
  return red;
}

Eigen::MatrixXcd random_single_mode(int d, unsigned seed) {
  std::srand(seed);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Random(d, d);
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace().real();
}

DensityMatrix pnes_density(Family f, double param, int dim = 20) { return to_density(build({f, param, dim})); }

EvolutionSpec rk4() {
  EvolutionSpec s;
  s.engine = Engine::LindbladRk4;
  return s;
}

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("covariance matrix of a PNES") {
    CHECK((cm_of_pnes(build({Family::TWB, 0.0, 20})).matrix() - 0.5 * Eigen::Matrix4d::Identity()).norm() == 0.0);
    auto sigma = cm_of_pnes(build({Family::TWB, 0.5, 30}));
    CHECK(sigma.is_standard_form());
    CHECK(sigma(0, 0) == Approx(5.0 / 6).epsilon(1e-12));
    CHECK(sigma(0, 2) == Approx(2.0 / 3).epsilon(1e-12));
    CHECK(sigma(1, 3) == Approx(-2.0 / 3).epsilon(1e-12));

    for (auto f : {Family::TMC, Family::PSSV, Family::PASV}) {
      auto s = build({f, f == Family::TMC ? 1.4 : 0.5, 20});
      CHECK((cm_from_density(to_density(s)).matrix() - cm_of_pnes(s).matrix()).cwiseAbs().maxCoeff() < 1e-8);
      auto rho = to_density(s);
      CHECK(cm_of_pnes(s)(0, 0) == Approx(moment(rho, 1, 1, 0, 0).real() + 0.5).epsilon(1e-10));
      CHECK(cm_of_pnes(s)(0, 2) == Approx(moment(rho, 0, 1, 0, 1).real()).epsilon(1e-10));
    }
  }

  TEST_CASE("cm_evolve") {
    auto sigma0 = cm_of_pnes(build({Family::TWB, 0.5, 30}));
    const ChannelParams p{1.0, 0.1};
    CHECK((cm_evolve(sigma0, 0.0, p).matrix() - sigma0.matrix()).norm() == 0.0);
    auto inf = cm_evolve(sigma0, INFINITY, p);
    CHECK((inf.matrix() - 0.6 * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    auto s1 = cm_evolve(sigma0, 1.0, p);
    CHECK(s1(0, 0) == Approx(5.0 / 6 * std::exp(-1.0) + 0.6 * (1 - std::exp(-1.0))).epsilon(1e-12));
    CHECK(s1(0, 0) == Approx(0.6858).epsilon(1e-4));
    CHECK(s1(0, 2) == Approx(2.0 / 3 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(s1(0, 2) == Approx(0.2453).epsilon(1e-3));
    CHECK_THROWS_AS(cm_evolve(sigma0, -1.0, p), DomainError);
  }

  TEST_CASE("single-mode map against the beam-splitter unitary") {
    const int d = 6;
    for (double nt : {0.0, 0.3}) {
      for (double t : {0.2, 1.0, 2.5}) {
        const ChannelParams p{1.0, nt};
        const Eigen::MatrixXcd ra = random_single_mode(d, 11);
        const Eigen::MatrixXcd rb = random_single_mode(d, 12);
        EvolutionSpec spec;
        spec.ancilla_dim = ancilla_dim_for(nt, 1e-10);
        auto out = evolve_ancilla(product_state(ra, rb), t, p, spec);
        const Eigen::MatrixXcd want = Eigen::kroneckerProduct(channel_oracle(ra, t, p, spec.ancilla_dim),
                                                              channel_oracle(rb, t, p, spec.ancilla_dim));
        CHECK((out.to_dense() - want).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }

  TEST_CASE("identity at t = 0") {
    auto rho = pnes_density(Family::TMC, 1.2);
    const ChannelParams p{1.0, 0.1};
    CHECK(trace_distance(evolve_ancilla(rho, 0.0, p), rho) < 1e-12);
    CHECK(trace_distance(evolve_lindblad(rho, 0.0, p), rho) == 0.0);
  }

  TEST_CASE("vacuum is dark at zero temperature") {
    auto vac = pnes_density(Family::TWB, 0.0, 8);
    for (double t : {0.5, 2.0}) {
      CHECK(trace_distance(evolve_lindblad(vac, t, {1.0, 0.0}), vac) < 1e-14);
      CHECK(trace_distance(evolve_ancilla(vac, t, {1.0, 0.0}), vac) < 1e-14);
    }
  }

  TEST_CASE("complete thermalization") {
    const ChannelParams p{1.0, 0.1};
    auto rho = evolve_ancilla(pnes_density(Family::PSSV, 0.6), 60.0, p);
    const auto th = thermal_state(20, 0.1);
    CHECK(trace_distance(rho, product_state(th, th)) < 1e-8);
  }

  TEST_CASE("thermal state is a fixed point") {
    const ChannelParams p{1.0, 0.05};
    const auto th = thermal_state(20, 0.05);
    auto rho = product_state(th, th);
    CHECK(trace_distance(evolve_ancilla(rho, 1.0, p), rho) < 1e-8);
    CHECK(trace_distance(evolve_lindblad(rho, 1.0, p), rho) < 1e-8);
  }

  TEST_CASE("Gaussian CM law on both engines") {
    const ChannelParams p{1.0, 0.1};
    for (auto [f, param] : std::vector<std::pair<Family, double>>{{Family::TWB, 0.5}, {Family::TMC, 1.0}}) {
      auto s = build({f, param, 20});
      auto want = cm_evolve(cm_of_pnes(s), 1.0, p);
      for (const auto& spec : {EvolutionSpec{}, rk4()}) {
        auto rho = evolve(to_density(s), 1.0, p, spec);
        CHECK(1.0 - rho.trace().real() < 1e-4);
        CHECK((cm_from_density(rho).matrix() - want.matrix()).cwiseAbs().maxCoeff() < 1e-5);
      }
    }
  }

  TEST_CASE("engines agree") {
    auto rho = pnes_density(Family::TMC, 1.0);
    const ChannelParams p{1.0, 0.1};
    CHECK(trace_distance(evolve_ancilla(rho, 0.5, p), evolve_lindblad(rho, 0.5, p)) < 1e-6);
  }

  TEST_CASE("semigroup") {
    auto rho = pnes_density(Family::PSSV, 0.5);
    const ChannelParams p{1.0, 0.01};
    auto direct = evolve_ancilla(rho, 1.3, p);
    auto split = evolve_ancilla(evolve_ancilla(rho, 0.5, p), 0.8, p);
    CHECK(trace_distance(direct, split) < 1e-7);
  }

  TEST_CASE("locality") {
    const int d = 12;
    Eigen::MatrixXcd ra = random_single_mode(d, 3);
    Eigen::MatrixXcd rb = thermal_state(d, 0.4);
    rb(0, 1) = rb(1, 0) = 0.1;
    auto out = evolve_ancilla(product_state(ra, rb), 0.7, {1.0, 0.2});
    const double tr = out.trace().real();
    auto marg = product_state(reduced_state(out, 0) / tr, reduced_state(out, 1));
    CHECK(trace_distance(out, marg) < 1e-7);
  }

  TEST_CASE("preserves trace, hermiticity and positivity") {
    auto rho = pnes_density(Family::TMC, 0.9);
    for (const auto& spec : {EvolutionSpec{}, rk4()}) {
      auto out = evolve(rho, 0.8, {1.0, 0.1}, spec);
      CHECK(std::abs(out.trace().real() - 1) < 1e-8);
      CHECK(out.hermiticity_defect() < 1e-12);
      CHECK(hermitian_spectrum(out).front() > -1e-10);
    }
  }

  TEST_CASE("RK4 step halving") {
    auto rho = pnes_density(Family::TWB, 0.4, 10);
    const ChannelParams p{1.0, 0.1};
    auto a = evolve_lindblad(rho, 0.5, p, 1e-3);
    auto b = evolve_lindblad(rho, 0.5, p, 5e-4);
    CHECK(trace_distance(a, b) < 1e-8);
    CHECK_THROWS_AS(evolve_lindblad(rho, 0.5, p, 0.05), DomainError);
  }

  TEST_CASE("trajectory restarts from checkpoints") {
    auto rho = pnes_density(Family::TMC, 1.0, 12);
    const ChannelParams p{1.0, 0.1};
    Trajectory traj(rho, p, rk4());
    auto r1 = traj.at(0.5);
    auto r2 = traj.at(1.0);
    CHECK(trace_distance(r1, evolve_lindblad(rho, 0.5, p)) < 1e-12);
    CHECK(trace_distance(r2, evolve_lindblad(rho, 1.0, p)) < 1e-9);
    Trajectory anc(rho, p, {});
    CHECK(anc.ancilla_dim() == ancilla_dim_for(0.1));
    CHECK(trace_distance(anc.at(1.0), r2) < 1e-6);
  }

  TEST_CASE("ancilla sizing") {
    CHECK(ancilla_dim_for(0.0) == 2);
    CHECK(ancilla_dim_for(1e-5) == 4);
    CHECK(ancilla_dim_for(0.1) == 16);
    CHECK(std::pow(0.1 / 1.1, ancilla_dim_for(0.1)) < kAncillaTailTol);
    EvolutionSpec spec;
    spec.ancilla_dim = 3;
    CHECK_THROWS_AS(evolve_ancilla(pnes_density(Family::TWB, 0.3), 1.0, {1.0, 0.1}, spec), TruncationError);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((ChannelParams{0.0, 0.1}.validate()), DomainError);
    CHECK_THROWS_AS((ChannelParams{1.0, -0.1}.validate()), DomainError);
    CHECK(parse_engine("rk4") == Engine::LindbladRk4);
    CHECK_THROWS_AS(parse_engine("euler"), ConfigError);
    CHECK(mixing_angle(1.0, {}) == Approx(std::acos(std::exp(-0.5))));
  }
}
