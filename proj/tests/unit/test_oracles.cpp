#include <doctest.h>

#include "helpers.hpp"
#include "pseudomode/dynamics.hpp"
#include "pseudomode/errors.hpp"
#include "pseudomode/oracles.hpp"
#include "pseudomode/quadrature.hpp"

using namespace pseudomode;
using testing::benchmark_bath;

namespace {

Matrix2c plus_state() {
  Matrix2c r;
  r << 0.5, 0.5, 0.5, 0.5;
  return r;
}

}  // namespace

TEST_CASE("pure dephasing oracle") {
  const auto sd = benchmark_bath();
  const auto times = uniform_grid(10.0, 41);
  const auto traj = pure_dephasing_exact(sd, 0.5, plus_state(), times);
  CHECK(traj.reduced_states[0] == plus_state());
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(traj.reduced_states[k](0, 0) == Complex(0.5));
    CHECK(traj.reduced_states[k](1, 1) == Complex(0.5));
  }
  CHECK(traj.max_hermiticity_defect() == 0.0);

  SUBCASE("coherence decays monotonically for a broad resonance") {
    const SpectralDensityModel broad{0.25, 1.0, 1.5, 1.0};
    const auto t = pure_dephasing_exact(broad, 0.5, plus_state(), times);
    for (std::size_t k = 1; k < times.size(); ++k)
      CHECK(std::abs(t.reduced_states[k](0, 1)) <= std::abs(t.reduced_states[k - 1](0, 1)) + 1e-14);
  }
  SUBCASE("narrow resonance shows coherence revivals") {
    // Gamma_d(t) oscillates at the resonance frequency, so |rho_eg| is not monotone here.
    bool revival = false;
    for (std::size_t k = 1; k < times.size(); ++k)
      revival |= std::abs(traj.reduced_states[k](0, 1)) > std::abs(traj.reduced_states[k - 1](0, 1));
    CHECK(revival);
  }

  SUBCASE("zero coupling keeps the coherence magnitude") {
    auto free = sd;
    free.alpha = 0.0;
    const auto t = pure_dephasing_exact(free, 0.5, plus_state(), times);
    for (const auto& r : t.reduced_states) CHECK(std::abs(r(0, 1)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::arg(t.reduced_states[4](0, 1)) == doctest::Approx(std::remainder(-0.5 * times[4], 2 * std::numbers::pi)));
  }
}

TEST_CASE("dephasing exponent at short times") {
  const auto sd = benchmark_bath();
  const double t = 1e-3;
  const double c0 = correlation_quadrature(sd, 0.0).real();
  CHECK(dephasing_exponent(sd, t) == doctest::Approx(2.0 * c0 * t * t).epsilon(1e-4));
  CHECK(dephasing_exponent(sd, 0.0) == 0.0);
  CHECK_THROWS_AS(dephasing_exponent(sd, -1.0), InputError);
}

TEST_CASE("dephasing exponent equals the second-order cumulant") {
  // Gamma_d(t) = 4 int_0^t (t - s) Re C(s) ds
  const auto sd = benchmark_bath();
  CorrelationQuadratureOptions copt;
  copt.tol = 1e-11;
  for (double t : {0.5, 2.0}) {
    quadrature::Options opt;
    opt.abs_tol = 1e-9;
    const auto r = quadrature::integrate<double>(
        [&](double s) { return (t - s) * correlation_quadrature(sd, s, copt).real(); }, 0.0, t, opt);
    CHECK(dephasing_exponent(sd, t) == doctest::Approx(4.0 * r.value).epsilon(1e-7));
  }
}

TEST_CASE("HEOM configuration") {
  const auto cfg = heom_config_from_sd(benchmark_bath(), 12);
  CHECK(cfg.exponents.size() == 3);
  CHECK(cfg.use_terminator);
  CHECK(cfg.terminator_delta == doctest::Approx(-3.2925396120506179731e-7).epsilon(1e-9));
  for (const auto& e : cfg.exponents) CHECK(e.nu.real() > 0.0);
  CHECK(heom_ado_count(3, 12) == 455);
  CHECK(heom_ado_count(0, 5) == 1);

  HeomConfig bad;
  bad.depth = 0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.depth = 2;
  bad.exponents.push_back({1.0, Complex(-1.0, 0.0)});
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("HEOM without exponents is bare evolution") {
  HeomConfig cfg;
  cfg.depth = 1;
  const auto times = uniform_grid(10.0, 51);
  const auto traj = heom_solve(SystemSpec{0.5, 1.0}, cfg, excited_state(), times);
  const double w = std::sqrt(1.25);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double s = std::sin(0.5 * w * times[k]);
    CHECK(traj.sz[k] == doctest::Approx(1.0 - 2.0 * s * s / (w * w)).epsilon(1e-8));
  }
}

TEST_CASE("HEOM matches an exact Lorentzian embedding") {
  // C(tau) = a exp(-lambda tau) is reproduced exactly by one damped mode.
  const double a = 0.1, lambda = 1.0;
  HeomConfig cfg;
  cfg.exponents.push_back({a, lambda});
  cfg.depth = 10;
  PseudomodeSet pm;
  pm.modes.push_back({0.0, lambda, std::sqrt(a), 10});
  const auto times = uniform_grid(8.0, 41);
  const auto h = heom_solve(SystemSpec{0.5, 1.0}, cfg, excited_state(), times);
  const auto p = simulate(SystemSpec{0.5, 1.0}, pm, excited_state(), times);
  for (std::size_t k = 0; k < times.size(); ++k)
    CHECK((h.reduced_states[k] - p.trajectory.reduced_states[k]).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("HEOM invariants and options") {
  const auto times = uniform_grid(4.0, 21);
  auto cfg = heom_config_from_sd(benchmark_bath(), 4);
  HeomStats stats;
  const auto scaled = heom_solve(SystemSpec{0.5, 1.0}, cfg, excited_state(), times, &stats);
  CHECK(stats.ados == heom_ado_count(3, 4));
  CHECK(stats.depth_difference < 0.0);
  CHECK(scaled.max_trace_defect() < 1e-8);
  CHECK(scaled.max_hermiticity_defect() < 1e-8);

  cfg.scaled_ados = false;
  const auto plain = heom_solve(SystemSpec{0.5, 1.0}, cfg, excited_state(), times);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK(std::abs(plain.sz[k] - scaled.sz[k]) < 1e-7);

  SUBCASE("depth check flags a shallow hierarchy") {
    auto shallow = heom_config_from_sd(benchmark_bath(), 2);
    shallow.depth_tolerance = 1e-6;
    HeomStats s;
    const auto t = heom_solve(SystemSpec{0.5, 1.0}, shallow, excited_state(), times, &s);
    CHECK(s.depth_difference > 1e-6);
    CHECK_FALSE(t.warnings.empty());
  }
}
