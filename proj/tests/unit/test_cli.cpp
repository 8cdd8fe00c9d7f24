#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "pseudomode/cli.hpp"
#include "pseudomode/errors.hpp"

using namespace pseudomode;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const std::filesystem::path& p) { return json::parse(slurp(p)); }

RunConfig small_config(const std::filesystem::path& dir) {
  RunConfig c;
  c.resonant_dim = 3;
  c.aux_dim = 2;
  c.t_max = 3.0;
  c.n_points = 16;
  c.output_dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("exit codes follow the error category") {
  CHECK(cli::exit_code_for(InputError("x")) == cli::kInputError);
  CHECK(cli::exit_code_for(DomainError("x")) == cli::kInputError);
  CHECK(cli::exit_code_for(NumericalError("x")) == cli::kNumericalError);
  CHECK(cli::exit_code_for(ConvergenceError("x")) == cli::kConvergenceError);
  CHECK(cli::exit_code_for(DimensionError("x")) == cli::kDimensionError);
}

TEST_CASE("fit writes a deterministic series and a spectrum table") {
  const auto dir = testing::scratch_dir("cli_fit");
  RunConfig c = small_config(dir);
  CHECK(cli::cmd_fit(c) == cli::kOk);
  const std::string first = slurp(dir / "run_series.txt");
  const json rep = load(dir / "run_fit_report.json");
  CHECK(rep["series"]["terms"].size() == 4);
  CHECK(rep["config"]["pipeline"]["seed"] == c.seed);
  CHECK(rep.contains("version"));
  CHECK(rep["spectrum_max_abs_diff"].get<double>() < 1e-3);
  CHECK(std::filesystem::exists(dir / "run_spectrum.csv"));
  CHECK(cli::cmd_fit(c) == cli::kOk);
  CHECK(slurp(dir / "run_series.txt") == first);

  SUBCASE("zero coupling gives an empty fit") {
    c.bath.alpha = 0.0;
    c.prefix = "zero";
    CHECK(cli::cmd_fit(c) == cli::kOk);
    const json z = load(dir / "zero_fit_report.json");
    CHECK(z["empty"] == true);
    CHECK(z["series"]["terms"].empty());
  }
}

TEST_CASE("build then simulate from the pseudomode file") {
  const auto dir = testing::scratch_dir("cli_sim");
  RunConfig c = small_config(dir);
  c.mode = PipelineMode::terminator;
  CHECK(cli::cmd_build(c) == cli::kOk);
  CHECK(cli::cmd_simulate(c, (dir / "run_modes.txt").string()) == cli::kOk);
  const json rep = load(dir / "run_simulate_report.json");
  CHECK(rep["non_hermitian_h0"] == true);
  CHECK(rep["negative_dephasing_rate"] == true);
  CHECK(rep["dims"] == json({2, 3, 3, 2}));
  CHECK(rep["invariants"]["max_trace_defect"].get<double>() < 1e-10);
  CHECK(rep["propagation"]["tolerance"] == 1e-10);
  CHECK(std::filesystem::exists(dir / "run_trajectory.csv"));
}

TEST_CASE("simulate refuses oversize generators with an actionable error") {
  const auto dir = testing::scratch_dir("cli_cap");
  RunConfig c = small_config(dir);
  c.max_superoperator_dim = 10;
  c.max_state_dim = 10;
  try {
    cli::cmd_simulate(c);
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    CHECK(cli::exit_code_for(e) == cli::kDimensionError);
    CHECK(std::string(e.what()).find("resonant_dim") != std::string::npos);
  }
}

TEST_CASE("dephasing oracle requires zero tunnelling") {
  const auto dir = testing::scratch_dir("cli_deph");
  RunConfig c = small_config(dir);
  CHECK_THROWS_AS(cli::cmd_dephasing_oracle(c), InputError);
  c.system.delta_x = 0.0;
  c.initial_state = "plus";
  CHECK(cli::cmd_dephasing_oracle(c) == cli::kOk);
  CHECK(std::filesystem::exists(dir / "run_dephasing.csv"));
}

TEST_CASE("compare: self, mismatch, grids") {
  const auto dir = testing::scratch_dir("cli_cmp");
  RunConfig a = small_config(dir);
  a.system.delta_x = 0.0;
  a.initial_state = "plus";
  a.prefix = "a";
  cli::cmd_dephasing_oracle(a);
  RunConfig b = a;
  b.prefix = "b";
  b.bath.alpha = 2.0;
  cli::cmd_dephasing_oracle(b);
  RunConfig coarse = a;
  coarse.prefix = "c";
  coarse.n_points = 7;
  cli::cmd_dephasing_oracle(coarse);

  cli::CompareArgs same;
  same.a = same.b = (dir / "a_dephasing.csv").string();
  same.report = (dir / "same.json").string();
  CHECK(cli::cmd_compare(same) == cli::kOk);
  const json r = load(dir / "same.json");
  CHECK(r["result"] == "PASS");
  CHECK(r["diffs"]["abs_rho_eg"]["max_abs"] == 0.0);

  cli::CompareArgs diff;
  diff.a = (dir / "a_dephasing.csv").string();
  diff.b = (dir / "b_dephasing.csv").string();
  diff.gate = "abs_rho_eg";
  diff.report = (dir / "diff.json").string();
  CHECK(cli::cmd_compare(diff) == cli::kCheckFailed);
  CHECK(load(dir / "diff.json")["diffs"]["abs_rho_eg"]["max_abs"].get<double>() > 0.02);

  cli::CompareArgs grids;
  grids.a = (dir / "a_dephasing.csv").string();
  grids.b = (dir / "c_dephasing.csv").string();
  CHECK_THROWS_AS(cli::cmd_compare(grids), InputError);
  grids.interpolate = true;
  CHECK(cli::cmd_compare(grids) != cli::kInputError);
}

TEST_CASE("qrt-check passes with three Fock levels") {
  const auto dir = testing::scratch_dir("cli_qrt");
  RunConfig c = small_config(dir);
  c.t_max = 20.0;
  c.n_points = 50;
  CHECK(cli::cmd_qrt_check(c) == cli::kOk);
  CHECK(load(dir / "run_qrt_report.json")["max_abs_error"].get<double>() < 1e-8);
}

TEST_CASE("heom subcommand flags depth non-convergence") {
  const auto dir = testing::scratch_dir("cli_heom");
  RunConfig c = small_config(dir);
  c.heom_depth = 2;
  c.heom_depth_tolerance = 1e-8;
  CHECK(cli::cmd_heom(c) == cli::kConvergenceError);
  const json rep = load(dir / "run_heom_report.json");
  CHECK(rep["depth_converged"] == false);
  CHECK(std::filesystem::exists(dir / "run_heom.csv"));
}

TEST_CASE("sweep fans out configs and reports convergence") {
  const auto dir = testing::scratch_dir("cli_sweep");
  RunConfig weak = small_config(dir);
  weak.bath.alpha = 0.0;
  weak.prefix = "zero";
  RunConfig strong = small_config(dir);
  strong.prefix = "strong";
  strong.fock_schedule = {2, 3};
  strong.convergence_threshold = 1e-12;
  CHECK(cli::cmd_sweep({weak, strong}) == cli::kConvergenceError);
  CHECK(load(dir / "zero_sweep_report.json")["converged"] == true);
  const json s = load(dir / "strong_sweep_report.json");
  CHECK(s["sweep"]["converged"] == false);
  CHECK(s["sweep"]["differences"].size() == 1);
  CHECK(std::filesystem::exists(dir / "strong_sweep_d3.csv"));
}

TEST_CASE("automatic Fock selection") {
  const auto dir = testing::scratch_dir("cli_auto");
  RunConfig c = small_config(dir);
  c.bath.alpha = 0.01;
  c.fock_auto = true;
  c.fock_schedule = {2, 3, 4, 5};
  c.convergence_threshold = 1e-3;
  CHECK(cli::cmd_simulate(c) == cli::kOk);
  const json rep = load(dir / "run_simulate_report.json");
  CHECK(rep["fock_sweep"]["converged"] == true);
  CHECK(rep["dims"][1] == rep["fock_sweep"]["converged_dims"][0]);
}
