#include <doctest.h>

#include <sstream>

#include "pseudomode/errors.hpp"
#include "pseudomode/trajectory.hpp"

using namespace pseudomode;

namespace {

Trajectory rabi(int n, double t_max, double freq) {
  Trajectory t;
  for (double time : uniform_grid(t_max, n)) {
    const double c = std::cos(freq * time), s = std::sin(freq * time);
    Matrix2c r;
    r << c * c, Complex(0, c * s), Complex(0, -c * s), s * s;
    t.push(time, r);
  }
  return t;
}

}  // namespace

TEST_CASE("Pauli expectations") {
  Trajectory t;
  Matrix2c r;
  r << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  t.push(0.0, r);
  CHECK(t.sz[0] == doctest::Approx(0.4));
  CHECK(t.sx[0] == doctest::Approx(0.2));
  // Tr(sy rho) with sy = [[0, -i], [i, 0]] in (|e>, |g>)
  CHECK(t.sy[0] == doctest::Approx(-0.4));
  CHECK(t.max_trace_defect() < 1e-15);
  CHECK(t.max_hermiticity_defect() == 0.0);
  CHECK(t.min_eigenvalue() > 0.0);
}

TEST_CASE("invariant detectors") {
  Trajectory t;
  Matrix2c r;
  r << 1.1, 0.3, 0.1, -0.05;
  t.push(0.0, r);
  CHECK(t.max_trace_defect() == doctest::Approx(0.05));
  CHECK(t.max_hermiticity_defect() == doctest::Approx(0.2));
  CHECK(t.min_eigenvalue() < 0.0);
}

TEST_CASE("CSV round trip keeps full precision") {
  Trajectory t = rabi(17, 3.0, 0.7);
  t.top_fock = {std::vector<double>(17, 1e-5), std::vector<double>(17, 3e-9)};
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  CHECK(header.find("rho_ee") != std::string::npos);
  CHECK(header.find("top_fock_1") != std::string::npos);
  const Trajectory u = read_trajectory_csv(ss);
  REQUIRE(u.size() == t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(u.times[k] == t.times[k]);
    CHECK(u.reduced_states[k] == t.reduced_states[k]);
    CHECK(u.sz[k] == t.sz[k]);
  }
  CHECK(u.top_fock == t.top_fock);
  std::stringstream bad("t,x\n1,2\n");
  CHECK_THROWS_AS(read_trajectory_csv(bad), InputError);
}

TEST_CASE("trajectory comparison") {
  const Trajectory a = rabi(101, 10.0, 0.5);
  SUBCASE("self comparison") {
    const auto rep = compare_trajectories(a, a);
    CHECK(rep.pass);
    for (const auto& d : rep.diffs) CHECK(d.max_abs == 0.0);
  }
  SUBCASE("mismatch fails with its magnitude") {
    const Trajectory b = rabi(101, 10.0, 0.55);
    const auto rep = compare_trajectories(a, b);
    CHECK_FALSE(rep.pass);
    CHECK(rep.find("sz").max_abs > 0.02);
    CHECK(rep.find("sz").mean_abs <= rep.find("sz").max_abs);
  }
  SUBCASE("different grids") {
    const Trajectory b = rabi(51, 10.0, 0.5);
    CHECK_THROWS_AS(compare_trajectories(a, b), InputError);
    CompareOptions opt;
    opt.interpolate = true;
    const auto rep = compare_trajectories(a, b, opt);
    CHECK(rep.interpolated);
    CHECK(rep.points == 51);
    CHECK(rep.pass);
  }
  SUBCASE("gate selection") {
    CompareOptions opt;
    opt.gate = "nope";
    CHECK_THROWS_AS(compare_trajectories(a, a, opt), InputError);
  }
}

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(25.0, 400);
  CHECK(g.size() == 400);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 25.0);
  CHECK_THROWS_AS(uniform_grid(1.0, 1), InputError);
  CHECK_THROWS_AS(uniform_grid(-1.0, 10), InputError);
}
