#include <doctest.h>

#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "pseudomode/errors.hpp"
#include "pseudomode/pseudomodes.hpp"

using namespace pseudomode;
using testing::benchmark_bath;

TEST_CASE("series to pseudomodes") {
  SUBCASE("positive real amplitude") {
    ExponentialSeries s;
    s.terms.push_back({4.0, Complex(0.0, -1.0)});
    const auto pm = series_to_pseudomodes(s, {3});
    REQUIRE(pm.modes.size() == 1);
    CHECK(pm.modes[0].xi == 0.0);
    CHECK(pm.modes[0].lambda == 1.0);
    CHECK(pm.modes[0].g == Complex(2.0, 0.0));
    CHECK(pm.is_hermitian());
  }
  SUBCASE("negative amplitude gives an imaginary coupling") {
    ExponentialSeries s;
    s.terms.push_back({-1.0, Complex(0.0, -1.0)});
    const auto pm = series_to_pseudomodes(s, {2});
    CHECK(std::abs(pm.modes[0].g - Complex(0.0, 1.0)) < 1e-15);
    CHECK_FALSE(pm.is_hermitian());
  }
  SUBCASE("resonant poles round trip") {
    const auto s = c0_to_poles(benchmark_bath());
    const auto pm = series_to_pseudomodes(s, {4, 4});
    const double om = benchmark_bath().omega();
    CHECK(pm.modes[0].xi == doctest::Approx(-om));
    CHECK(pm.modes[1].xi == doctest::Approx(om));
    for (const auto& m : pm.modes) CHECK(m.lambda == doctest::Approx(0.025));
    for (double t = 0; t <= 20; t += 0.1) CHECK(std::abs(pm.reconstructed_correlation(t) - pole_expansion_eval(s, t)) < 1e-12);
  }
  SUBCASE("errors") {
    ExponentialSeries growing;
    growing.terms.push_back({1.0, Complex(0.0, 0.5)});
    CHECK_THROWS_AS(series_to_pseudomodes(growing, {2}), DomainError);
    ExponentialSeries s;
    s.terms.push_back({1.0, Complex(0.0, -1.0)});
    CHECK_THROWS_AS(series_to_pseudomodes(s, {2, 2}), InputError);
    CHECK_THROWS_AS(series_to_pseudomodes(s, {1}), InputError);
  }
}

TEST_CASE("terminator split") {
  SUBCASE("golden dephasing rate") {
    const auto split = terminator_split(benchmark_bath(), 1500);
    CHECK(std::abs(split.gamma_d - (-3.2925396120506179731e-7)) < 1e-13 * 3.3e-7 * 100);
    REQUIRE(split.kept.size() == 1);
    CHECK(split.kept.terms[0].amplitude.real() == doctest::Approx(-0.000024881955492872978577).epsilon(1e-14));
    CHECK(split.kept.terms[0].z == Complex(0.0, -2.0 * std::numbers::pi));
  }
  SUBCASE("converged in the number of terms") {
    const double a = terminator_split(benchmark_bath(), 1500).gamma_d;
    const double b = terminator_split(benchmark_bath(), 3000).gamma_d;
    CHECK(std::abs(a - b) < 1e-8 * std::abs(a));
  }
  SUBCASE("zero coupling") {
    auto sd = benchmark_bath();
    sd.alpha = 0.0;
    const auto split = terminator_split(sd, 100);
    CHECK(split.gamma_d == 0.0);
    CHECK(split.kept.terms[0].amplitude == Complex(0.0, 0.0));
  }
}

TEST_CASE("spin-boson pipeline") {
  const auto sd = benchmark_bath();
  SUBCASE("full fit") {
    const auto r = spin_boson_pipeline(sd);
    CHECK(r.modes.modes.size() == 4);
    CHECK(r.series.size() == 4);
    CHECK(r.modes.dephasing_rate == 0.0);
    CHECK(r.fit.has_value());
    CHECK_FALSE(r.modes.is_hermitian());
    CHECK(std::abs(r.series.residue_real_sum()) < 1e-12 * r.series.residue_abs_sum());
    const double c0 = std::abs(correlation_quadrature(sd, 0.0));
    for (int k = 0; k <= 50; ++k) {
      const double t = 10.0 * k / 50;
      CHECK(std::abs(r.modes.reconstructed_correlation(t) - correlation_quadrature(sd, t)) < 1e-3 * c0);
    }
    CHECK(r.modes.modes[0].fock_dim == 8);
    CHECK(r.modes.modes[2].fock_dim == default_aux_dim(8));
  }
  SUBCASE("terminator") {
    PipelineOptions opt;
    opt.mode = PipelineMode::terminator;
    const auto r = spin_boson_pipeline(sd, opt);
    CHECK(r.modes.modes.size() == 3);
    CHECK(r.modes.dephasing_rate != 0.0);
    CHECK(r.modes.dephasing_rate < 0.0);
    CHECK(std::abs(r.series.residue_real_sum()) < 1e-12 * r.series.residue_abs_sum());
  }
  SUBCASE("explicit dims") {
    PipelineOptions opt;
    opt.resonant_dim = 5;
    opt.aux_dim = 2;
    const auto r = spin_boson_pipeline(sd, opt);
    CHECK(r.modes.fock_dims() == std::vector<int>{5, 5, 2, 2});
  }
}

TEST_CASE("auxiliary dimension default") {
  CHECK(default_aux_dim(2) == 2);
  CHECK(default_aux_dim(4) == 2);
  CHECK(default_aux_dim(5) == 3);
  CHECK(default_aux_dim(12) == 3);
}

TEST_CASE("pipeline mode names") {
  CHECK(pipeline_mode_from_string("full_fit") == PipelineMode::full_fit);
  CHECK(pipeline_mode_from_string(to_string(PipelineMode::terminator)) == PipelineMode::terminator);
  CHECK_THROWS_AS(pipeline_mode_from_string("exact"), InputError);
}

TEST_CASE("series and pseudomode files round trip") {
  const auto r = spin_boson_pipeline(benchmark_bath());
  std::stringstream ss;
  write_series(ss, r.series);
  const auto s = read_series(ss);
  REQUIRE(s.size() == r.series.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(s.terms[k].amplitude == r.series.terms[k].amplitude);
    CHECK(s.terms[k].z == r.series.terms[k].z);
  }
  PipelineOptions opt;
  opt.mode = PipelineMode::terminator;
  const auto t = spin_boson_pipeline(benchmark_bath(), opt);
  std::stringstream ps;
  write_pseudomode_set(ps, t.modes);
  const auto pm = read_pseudomode_set(ps);
  REQUIRE(pm.modes.size() == 3);
  CHECK(pm.dephasing_rate == t.modes.dephasing_rate);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(pm.modes[k].g == t.modes.modes[k].g);
    CHECK(pm.modes[k].xi == t.modes.modes[k].xi);
    CHECK(pm.modes[k].lambda == t.modes.modes[k].lambda);
    CHECK(pm.modes[k].fock_dim == t.modes.modes[k].fock_dim);
  }
  std::stringstream bad("not a series");
  CHECK_THROWS_AS(read_series(bad), InputError);
}
