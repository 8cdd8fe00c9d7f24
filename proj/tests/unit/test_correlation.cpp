#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "pseudomode/correlation.hpp"
#include "pseudomode/errors.hpp"
#include "pseudomode/quadrature.hpp"

using namespace pseudomode;
using testing::benchmark_bath;
using testing::rel;

// Frozen from tests/oracles/golden_values.py (mpmath, 40 digits).
namespace golden {
const Complex c0_0{0.25518697351619849572, 0.0};
const Complex c0_1{0.2242181284831378713, -0.029227376261395049943};
const Complex c0_5{-0.17349539577960144831, -0.033188887476445381418};
const double c1 = -0.000024881955492872978577;
const double gamma_d_1500 = -3.2925396120506179731e-7;
const double m0_1500 = -0.000029961378485331352585;
}  // namespace golden

TEST_CASE("analytic C0 matches high-precision values") {
  const auto sd = benchmark_bath();
  CHECK(rel(analytic_c0(sd, 0.0), golden::c0_0) < 1e-14);
  CHECK(rel(analytic_c0(sd, 1.0), golden::c0_1) < 1e-14);
  CHECK(rel(analytic_c0(sd, 5.0), golden::c0_5) < 1e-13);
}

TEST_CASE("zero coupling gives zero correlation") {
  auto sd = benchmark_bath();
  sd.alpha = 0.0;
  for (double t : {0.0, 0.7, 12.0}) {
    CHECK(std::abs(analytic_c0(sd, t)) == 0.0);
    CHECK(std::abs(correlation_quadrature(sd, t)) < 1e-14);
  }
  const auto m = matsubara_coefficients(sd, 50);
  for (double c : m.coefficients) CHECK(c == 0.0);
}

TEST_CASE("narrow-width limit of C0(0)") {
  auto sd = benchmark_bath();
  sd.gamma_width = 1e-8;
  const Complex a = analytic_c0(sd, 0.0);
  sd.gamma_width = 1e-6;
  const Complex b = analytic_c0(sd, 0.0);
  CHECK(rel(a, b) < 1e-6);
  const double limit = 0.5 * sd.alpha * sd.omega0 / std::tanh(0.5 * sd.beta * sd.omega0);
  CHECK(std::abs(a.real() - limit) / limit < 1e-6);
}

TEST_CASE("overdamped bath is rejected") {
  SpectralDensityModel sd{0.25, 0.01, 0.05, 1.0};
  CHECK_THROWS_AS(analytic_c0(sd, 0.0), DomainError);
  CHECK_THROWS_AS(c0_to_poles(sd), DomainError);
}

TEST_CASE("Matsubara coefficients") {
  const auto sd = benchmark_bath();
  const auto m = matsubara_coefficients(sd, 1500);
  REQUIRE(m.size() == 1500);
  CHECK(m.frequencies[0] == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(m.frequencies[1] == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(std::abs(m.coefficients[0] - golden::c1) < 1e-15 * std::abs(golden::c1) * 10);
  for (std::size_t n = 0; n < m.size(); ++n) {
    CHECK(m.coefficients[n] < 0.0);
    if (n > 0) CHECK(m.frequencies[n] > m.frequencies[n - 1]);
  }
  CHECK(std::abs(matsubara_sum(m, 0.0) - golden::m0_1500) < 1e-12 * std::abs(golden::m0_1500));
}

TEST_CASE("Matsubara sum edge cases") {
  CHECK(matsubara_sum(MatsubaraSpec{}, 1.0) == 0.0);
  MatsubaraSpec one{{-1.0}, {2.0}};
  CHECK(matsubara_sum(one, 0.5) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("quadrature agrees with the closed form plus Matsubara sum") {
  const auto sd = benchmark_bath();
  const auto m = matsubara_coefficients(sd, 1500);
  const double c0 = std::abs(correlation_quadrature(sd, 0.0));
  for (double t : {0.0, 1.0, 5.0}) {
    const Complex q = correlation_quadrature(sd, t);
    const Complex a = analytic_c0(sd, t) + matsubara_sum(m, t);
    CHECK(std::abs(q - a) / c0 < 1e-6);
  }
}

TEST_CASE("imaginary part of C is temperature independent") {
  auto hot = benchmark_bath();
  auto cold = hot;
  cold.beta = 1e6;
  for (double t : {0.5, 3.0}) {
    const double a = correlation_quadrature(hot, t).imag();
    const double b = correlation_quadrature(cold, t).imag();
    CHECK(std::abs(a - b) < 1e-9);
  }
}

TEST_CASE("pole expansion evaluation") {
  CHECK(std::abs(pole_expansion_eval(ExponentialSeries{}, 0.3)) == 0.0);
  ExponentialSeries s;
  s.terms.push_back({1.0, Complex(0.0, -2.0)});
  CHECK(std::abs(pole_expansion_eval(s, 0.5) - std::exp(-1.0)) < 1e-15);
}

TEST_CASE("resonant poles reproduce C0") {
  const auto sd = benchmark_bath();
  const auto s = c0_to_poles(sd);
  REQUIRE(s.size() == 2);
  const double om = sd.omega();
  CHECK(s.terms[0].z == Complex(-om, -0.025));
  CHECK(s.terms[1].z == Complex(om, -0.025));
  for (const auto& t : s.terms) CHECK(t.lambda() == doctest::Approx(sd.gamma_width / 2));
  CHECK(std::abs((s.terms[0].amplitude + s.terms[1].amplitude).imag()) < 1e-15);
  CHECK(std::abs(s.residue_real_sum()) < 1e-12 * s.residue_abs_sum());
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double t = 20.0 * k / 199;
    worst = std::max(worst, std::abs(pole_expansion_eval(s, t) - analytic_c0(sd, t)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("effective spectral density") {
  ExponentialSeries lorentz;
  lorentz.terms.push_back({1.0, Complex(0.0, -1.0)});  // r = i
  CHECK(effective_sd(lorentz, 0.0) == doctest::Approx(2.0));
  for (double w : {-3.0, 0.4, 2.0}) CHECK(effective_sd(lorentz, w) == doctest::Approx(2.0 / (w * w + 1.0)));

  SUBCASE("positive imaginary residues give a positive spectrum") {
    ExponentialSeries s;
    s.terms.push_back({0.3, Complex(0.0, -0.5)});
    s.terms.push_back({1.2, Complex(0.0, -4.0)});
    for (double w = -10; w <= 10; w += 0.25) CHECK(effective_sd(s, w) > 0.0);
  }

  SUBCASE("closed form plus Matsubara poles reproduce the thermal spectrum") {
    const auto sd = benchmark_bath();
    ExponentialSeries s = c0_to_poles(sd);
    const auto m = matsubara_coefficients(sd, 1500);
    for (std::size_t n = 0; n < m.size(); ++n) s.terms.push_back({m.coefficients[n], Complex(0.0, -m.frequencies[n])});
    for (double w : {-1.0, -0.3, 0.0, 0.2, 0.5, 1.3}) CHECK(std::abs(effective_sd(s, w) - sd.thermal_spectrum(w)) < 1e-6);
  }

  SUBCASE("inverse transform at tau = 0") {
    const auto s = c0_to_poles(benchmark_bath());
    quadrature::Options opt;
    opt.abs_tol = 1e-9;
    auto f = [&](double w) { return effective_sd(s, w); };
    const double edges[] = {-1e5, -100.0, -2.0, -0.6, -0.4, 0.4, 0.6, 2.0, 100.0, 1e5};
    double total = 0.0;
    for (int k = 0; k + 1 < 10; ++k) total += quadrature::integrate<double>(f, edges[k], edges[k + 1], opt).value;
    CHECK(std::abs(total / (2 * std::numbers::pi) - pole_expansion_eval(s, 0.0).real()) < 1e-4);
  }
}

TEST_CASE("pole series tail bound") {
  const auto s = c0_to_poles(benchmark_bath());
  const double bound0 = s.amplitude_abs_sum();
  for (double t = 0; t < 40; t += 0.5) CHECK(std::abs(pole_expansion_eval(s, t)) <= bound0 * std::exp(-s.min_lambda() * t) + 1e-15);
}

TEST_CASE("representation equivalence over several baths") {
  for (double w0 : {0.25, 0.5, 1.0}) {
    const auto sd = benchmark_bath(w0);
    const auto m = matsubara_coefficients(sd, 1500);
    std::vector<Complex> q, a;
    double cmax = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double t = 20.0 * k / 40;
      q.push_back(correlation_quadrature(sd, t));
      a.push_back(analytic_c0(sd, t) + matsubara_sum(m, t));
      cmax = std::max(cmax, std::abs(q.back()));
    }
    for (std::size_t k = 0; k < q.size(); ++k) CHECK(std::abs(q[k] - a[k]) / cmax < 1e-6);
  }
}
