#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "pseudomode/dynamics.hpp"
#include "pseudomode/errors.hpp"
#include "pseudomode/propagate.hpp"

using namespace pseudomode;

namespace {

/// Generator that is identically zero.
class ZeroGenerator final : public LinearGenerator {
 public:
  explicit ZeroGenerator(std::size_t n) : n_(n) {}
  std::size_t hilbert_dim() const override { return n_; }
  void apply(const Complex*, Complex* out) const override { std::fill(out, out + size(), Complex(0)); }

 private:
  std::size_t n_;
};

PseudomodeSet lorentz_mode(int d) {
  PseudomodeSet pm;
  pm.modes.push_back({0.4, 0.3, Complex(0.5, 0.0), d});
  return pm;
}

}  // namespace

TEST_CASE("zero generator leaves the state unchanged") {
  const std::vector<int> dims{2, 30};
  ZeroGenerator gen(60);
  const CMatrix rho0 = vacuum_product_state(excited_state(), dims);
  const auto traj = propagate(gen, rho0, dims, uniform_grid(5.0, 11));
  for (const auto& r : traj.reduced_states) CHECK((r - excited_state()).norm() == 0.0);
}

TEST_CASE("initial state is returned exactly") {
  const auto pm = lorentz_mode(4);
  const auto gen = make_generator(make_generator_model(SystemSpec{0.5, 1.0}, pm));
  Matrix2c rho_s;
  rho_s << 0.3, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.7;
  const auto traj = propagate(*gen, vacuum_product_state(rho_s, {2, 4}), {2, 4}, {0.0, 1.0});
  CHECK(traj.reduced_states[0] == rho_s);
}

TEST_CASE("Krylov propagation matches the dense exponential") {
  const auto pm = lorentz_mode(10);  // Liouville dimension 400: both paths available
  const auto model = make_generator_model(SystemSpec{0.5, 1.0}, pm);
  const auto gen = make_generator(model);
  const std::vector<int> dims{2, 10};
  const CMatrix rho0 = vacuum_product_state(excited_state(), dims);
  const auto times = uniform_grid(8.0, 41);

  PropagationOptions krylov;
  krylov.dense_limit = 0;
  PropagationStats ks;
  const auto a = propagate(*gen, rho0, dims, times, krylov, &ks);
  CHECK_FALSE(ks.dense);
  CHECK(ks.steps > 0);

  PropagationStats ds;
  const auto b = propagate(*gen, rho0, dims, times, {}, &ds);
  CHECK(ds.dense);

  const CMatrix l = dense_generator(*gen);
  const CVector v0 = Eigen::Map<const CVector>(rho0.data(), rho0.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const CVector v = (l * times[k]).exp() * v0;
    const CMatrix rho = Eigen::Map<const CMatrix>(v.data(), 20, 20);
    const CMatrix rs = partial_trace_modes(rho, dims);
    CHECK((a.reduced_states[k] - rs).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((b.reduced_states[k] - rs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("top Fock population warning") {
  PseudomodeSet pm;
  pm.modes.push_back({0.2, 0.05, Complex(0.8, 0.0), 2});
  const auto gen = make_generator(make_generator_model(SystemSpec{0.5, 1.0}, pm));
  const auto traj = propagate(*gen, vacuum_product_state(excited_state(), {2, 2}), {2, 2}, uniform_grid(5.0, 21));
  CHECK(traj.max_top_fock() > 1e-3);
  CHECK_FALSE(traj.warnings.empty());
}

TEST_CASE("propagation input checks") {
  const auto pm = lorentz_mode(3);
  const auto gen = make_generator(make_generator_model(SystemSpec{0.5, 1.0}, pm));
  const CMatrix rho0 = vacuum_product_state(excited_state(), {2, 3});
  CHECK_THROWS_AS(propagate(*gen, rho0, {2, 3}, {1.0, 0.5}), InputError);
  CHECK_THROWS_AS(propagate(*gen, rho0, {3, 2}, {0.0, 1.0}), InputError);
}

TEST_CASE("top Fock populations read the diagonal") {
  const std::vector<int> dims{2, 3, 2};
  CMatrix rho = CMatrix::Zero(12, 12);
  rho(4, 4) = 0.25;  // s=0, n1=2, n2=0
  rho(6 + 1, 6 + 1) = 0.5;  // s=1, n1=0, n2=1
  const auto p = top_fock_populations(rho.data(), dims);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(p[1] == doctest::Approx(0.5));
}
