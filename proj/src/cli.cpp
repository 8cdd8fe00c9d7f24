#include "pseudomode/cli.hpp"

#include <omp.h>

#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pseudomode/errors.hpp"

#ifndef PSEUDOMODE_VERSION
#define PSEUDOMODE_VERSION "0.0.0"
#endif

namespace pseudomode::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path output_path(const RunConfig& cfg, const std::string& name) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
  return dir / (cfg.prefix + "_" + name);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw InputError("cannot write '" + p.string() + "'");
  return os;
}

void write_json(const fs::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json series_json(const ExponentialSeries& s) {
  json terms = json::array();
  for (const auto& t : s.terms)
    terms.push_back({{"amplitude", complex_json(t.amplitude)}, {"z", complex_json(t.z)}, {"residue", complex_json(t.residue())}});
  return {{"terms", terms},
          {"residue_real_sum", s.residue_real_sum()},
          {"residue_abs_sum", s.residue_abs_sum()}};
}

json modes_json(const PseudomodeSet& pm) {
  json modes = json::array();
  for (const auto& m : pm.modes)
    modes.push_back({{"xi", m.xi}, {"lambda", m.lambda}, {"g", complex_json(m.g)}, {"fock_dim", m.fock_dim}});
  return {{"modes", modes}, {"dephasing_rate", pm.dephasing_rate}, {"hermitian", pm.is_hermitian()}};
}

json fit_json(const std::optional<ExponentialFit>& fit) {
  if (!fit) return nullptr;
  return {{"weights", fit->weights},
          {"rates", fit->rates},
          {"residual_linf", fit->residual_norm},
          {"residual_l2", fit->residual_l2},
          {"grid_points", fit->grid.size()},
          {"fit_grid_points", fit->fit_grid.size()},
          {"converged", fit->converged},
          {"iterations", fit->iterations}};
}

json invariants_json(const Trajectory& t) {
  return {{"max_trace_defect", t.max_trace_defect()},
          {"max_hermiticity_defect", t.max_hermiticity_defect()},
          {"min_eigenvalue", t.min_eigenvalue()},
          {"max_top_fock_population", t.max_top_fock()},
          {"warnings", t.warnings}};
}

void write_csv(const fs::path& p, const Trajectory& t) {
  auto os = open_out(p);
  write_trajectory_csv(os, t);
}

/// Resonant modes get d0, the rest the auxiliary dimension.
std::vector<int> dims_for(const RunConfig& cfg, const PseudomodeSet& pm, int d0) {
  const int aux = cfg.aux_dim > 0 ? cfg.aux_dim : default_aux_dim(d0);
  std::vector<int> dims(pm.modes.size(), aux);
  for (std::size_t l = 0; l < std::min<std::size_t>(2, dims.size()); ++l) dims[l] = d0;
  return dims;
}

struct Built {
  PipelineResult pipeline;
  bool empty = false;
};

Built build_pipeline(const RunConfig& cfg) {
  Built b;
  if (cfg.bath.alpha == 0.0) {
    b.empty = true;
    return b;
  }
  b.pipeline = spin_boson_pipeline(cfg.bath, cfg.pipeline_options());
  return b;
}

json sweep_json(const ConvergenceReport& rep) {
  json runs = json::array();
  for (std::size_t k = 0; k < rep.schedule.size(); ++k)
    runs.push_back({{"dims", rep.schedule[k]}, {"max_top_fock_population", rep.runs[k].max_top_fock()}});
  return {{"runs", runs},
          {"differences", rep.differences},
          {"threshold", rep.threshold},
          {"converged", rep.converged},
          {"converged_dims", rep.converged ? json(rep.schedule[rep.converged_at]) : json(nullptr)}};
}

ConvergenceReport run_sweep(const RunConfig& cfg, const PseudomodeSet& pm) {
  std::vector<std::vector<int>> schedule;
  for (int d0 : cfg.fock_schedule) schedule.push_back(dims_for(cfg, pm, d0));
  return convergence_sweep(cfg.system, pm, cfg.initial_rho(), cfg.time_grid(), schedule, cfg.convergence_threshold,
                           cfg.simulation_options());
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DimensionError*>(&e)) return kDimensionError;
  if (dynamic_cast<const ConvergenceError*>(&e)) return kConvergenceError;
  if (dynamic_cast<const NumericalError*>(&e)) return kNumericalError;
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kInputError;
  return kNumericalError;
}

json provenance(const std::string& command, const RunConfig* cfg) {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json j = {{"command", command},
            {"version", PSEUDOMODE_VERSION},
            {"compiler", __VERSION__},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"openmp_max_threads", omp_get_max_threads()},
            {"utc", stamp}};
  if (cfg) j["config"] = config_to_json(*cfg);
  return j;
}

int cmd_fit(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Built b = build_pipeline(cfg);
  const ExponentialSeries& series = b.pipeline.series;
  {
    auto os = open_out(output_path(cfg, "series.txt"));
    write_series(os, series);
  }

  json report = provenance("fit", &cfg);
  report["empty"] = b.empty;
  report["series"] = series_json(series);
  report["fit"] = fit_json(b.pipeline.fit);
  report["dephasing_rate"] = b.pipeline.modes.dephasing_rate;

  if (!b.empty) {
    // gamma(w) against the effective spectrum of the series
    auto os = open_out(output_path(cfg, "spectrum.csv"));
    os << "omega,gamma,gamma_prime,abs_diff\n";
    const double w_max = 4.0 * std::max(cfg.bath.omega0, 1.0);
    double worst = 0.0;
    char line[160];
    for (int k = 0; k <= 800; ++k) {
      const double w = -w_max + 2.0 * w_max * k / 800.0;
      const double g = cfg.bath.thermal_spectrum(w);
      const double gp = effective_sd(series, w);
      worst = std::max(worst, std::abs(g - gp));
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", w, g, gp, std::abs(g - gp));
      os << line;
    }
    report["spectrum_max_abs_diff"] = worst;
  }
  report["runtime_s"] = seconds_since(t0);
  write_json(output_path(cfg, "fit_report.json"), report);
  std::cout << "fit: " << series.size() << " terms";
  if (b.pipeline.fit) std::cout << ", residual " << b.pipeline.fit->residual_norm;
  std::cout << "\n";
  return kOk;
}

int cmd_build(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Built b = build_pipeline(cfg);
  PseudomodeSet pm = b.pipeline.modes;
  {
    auto os = open_out(output_path(cfg, "series.txt"));
    write_series(os, b.pipeline.series);
  }
  {
    auto os = open_out(output_path(cfg, "modes.txt"));
    write_pseudomode_set(os, pm);
  }
  json report = provenance("build", &cfg);
  report["empty"] = b.empty;
  report["series"] = series_json(b.pipeline.series);
  report["pseudomodes"] = modes_json(pm);
  report["fit"] = fit_json(b.pipeline.fit);
  report["runtime_s"] = seconds_since(t0);
  write_json(output_path(cfg, "build_report.json"), report);
  std::cout << "build: " << pm.modes.size() << " pseudomodes, dephasing rate " << pm.dephasing_rate << "\n";
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& modes_file) {
  const auto t0 = Clock::now();
  json report = provenance("simulate", &cfg);
  PseudomodeSet pm;
  if (!modes_file.empty()) {
    std::ifstream in(modes_file);
    if (!in) throw InputError("cannot open pseudomode file '" + modes_file + "'");
    pm = read_pseudomode_set(in);
    report["modes_file"] = modes_file;
  } else {
    const Built b = build_pipeline(cfg);
    pm = b.pipeline.modes;
    report["series"] = series_json(b.pipeline.series);
    report["fit"] = fit_json(b.pipeline.fit);
    int d0 = cfg.resonant_dim;
    if (cfg.fock_auto && !pm.modes.empty()) {
      const ConvergenceReport sweep = run_sweep(cfg, pm);
      report["fock_sweep"] = sweep_json(sweep);
      if (!sweep.converged) {
        write_json(output_path(cfg, "simulate_report.json"), report);
        throw ConvergenceError("Fock sweep did not converge over the schedule; extend fock.schedule");
      }
      d0 = cfg.fock_schedule[sweep.converged_at];
    }
    pm = with_fock_dims(pm, dims_for(cfg, pm, d0));
  }

  SimulationResult res;
  try {
    res = simulate(cfg.system, pm, cfg.initial_rho(), cfg.time_grid(), cfg.simulation_options());
  } catch (const DimensionError& e) {
    throw DimensionError(std::string(e.what()) +
                         " (config: fock.resonant_dim, fock.aux_dim, tolerances.max_superoperator_dim, "
                         "tolerances.max_state_dim)");
  }
  write_csv(output_path(cfg, "trajectory.csv"), res.trajectory);

  report["pseudomodes"] = modes_json(pm);
  report["dims"] = res.dims;
  report["generator"] = res.generator;
  report["non_hermitian_h0"] = !res.hermitian;
  report["antihermitian_norm"] = res.antihermitian_norm;
  report["dephasing_rate"] = res.dephasing_rate;
  report["negative_dephasing_rate"] = res.dephasing_rate < 0.0;
  report["propagation"] = {{"dense", res.stats.dense},
                           {"steps", res.stats.steps},
                           {"rejected", res.stats.rejected},
                           {"matvecs", res.stats.matvecs},
                           {"krylov_dim", res.stats.krylov_dim},
                           {"tolerance", cfg.propagation_tol}};
  report["invariants"] = invariants_json(res.trajectory);
  report["runtime_s"] = seconds_since(t0);
  write_json(output_path(cfg, "simulate_report.json"), report);
  for (const auto& w : res.trajectory.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "simulate: " << res.trajectory.size() << " points, dims";
  for (int d : res.dims) std::cout << ' ' << d;
  std::cout << ", hermiticity defect " << res.trajectory.max_hermiticity_defect() << "\n";
  return kOk;
}

int cmd_heom(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  HeomStats stats;
  const HeomConfig hc = cfg.heom_config();
  const Trajectory traj = heom_solve(cfg.system, hc, cfg.initial_rho(), cfg.time_grid(), &stats);
  write_csv(output_path(cfg, "heom.csv"), traj);
  json exps = json::array();
  for (const auto& e : hc.exponents) exps.push_back({{"c", complex_json(e.c)}, {"nu", complex_json(e.nu)}});
  json report = provenance("heom", &cfg);
  report["exponents"] = exps;
  report["terminator_delta"] = hc.use_terminator ? hc.terminator_delta : 0.0;
  report["depth"] = hc.depth;
  report["ados"] = stats.ados;
  report["steps"] = stats.steps;
  report["rejected"] = stats.rejected;
  report["depth_difference"] = stats.depth_difference < 0.0 ? json(nullptr) : json(stats.depth_difference);
  const bool converged = traj.warnings.empty();
  report["depth_converged"] = converged;
  report["invariants"] = invariants_json(traj);
  report["runtime_s"] = seconds_since(t0);
  write_json(output_path(cfg, "heom_report.json"), report);
  for (const auto& w : traj.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "heom: " << stats.ados << " auxiliaries, " << stats.steps << " steps\n";
  return converged ? kOk : kConvergenceError;
}

int cmd_dephasing_oracle(const RunConfig& cfg) {
  if (cfg.system.delta_x != 0.0) throw InputError("dephasing-oracle requires system.delta_x = 0");
  const auto t0 = Clock::now();
  const Trajectory traj = pure_dephasing_exact(cfg.bath, cfg.system.epsilon, cfg.initial_rho(), cfg.time_grid());
  write_csv(output_path(cfg, "dephasing.csv"), traj);
  json report = provenance("dephasing-oracle", &cfg);
  report["invariants"] = invariants_json(traj);
  report["runtime_s"] = seconds_since(t0);
  write_json(output_path(cfg, "dephasing_report.json"), report);
  std::cout << "dephasing-oracle: " << traj.size() << " points\n";
  return kOk;
}

int cmd_compare(const CompareArgs& args) {
  auto load = [](const std::string& p) {
    std::ifstream in(p);
    if (!in) throw InputError("cannot open trajectory '" + p + "'");
    return read_trajectory_csv(in);
  };
  const Trajectory a = load(args.a);
  const Trajectory b = load(args.b);
  CompareOptions opt;
  opt.threshold = args.threshold;
  opt.gate = args.gate;
  opt.interpolate = args.interpolate;
  const CompareReport rep = compare_trajectories(a, b, opt);

  json diffs = json::object();
  for (const auto& d : rep.diffs) diffs[d.name] = {{"max_abs", d.max_abs}, {"mean_abs", d.mean_abs}, {"t_at_max", d.t_at_max}};
  json report = provenance("compare", nullptr);
  report["a"] = args.a;
  report["b"] = args.b;
  report["points"] = rep.points;
  report["interpolated"] = rep.interpolated;
  report["gate"] = rep.gate;
  report["threshold"] = rep.threshold;
  report["diffs"] = diffs;
  report["result"] = rep.pass ? "PASS" : "FAIL";
  if (!args.report.empty()) {
    auto os = open_out(args.report);
    os << report.dump(2) << '\n';
  }
  std::cout << report.dump(2) << '\n';
  return rep.pass ? kOk : kCheckFailed;
}

int cmd_sweep(const std::vector<RunConfig>& cfgs) {
  if (cfgs.empty()) throw InputError("sweep: no configurations");
  std::vector<json> reports(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  std::vector<int> codes(cfgs.size(), kOk);
  const auto count = static_cast<std::ptrdiff_t>(cfgs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const auto t0 = Clock::now();
      const RunConfig& cfg = cfgs[k];
      const Built b = build_pipeline(cfg);
      json report = provenance("sweep", &cfg);
      if (b.empty) {
        report["converged"] = true;
        report["note"] = "zero coupling: no pseudomodes";
      } else {
        const ConvergenceReport rep = run_sweep(cfg, b.pipeline.modes);
        report["sweep"] = sweep_json(rep);
        for (std::size_t s = 0; s < rep.runs.size(); ++s)
          write_csv(output_path(cfg, "sweep_d" + std::to_string(cfg.fock_schedule[s]) + ".csv"), rep.runs[s]);
        if (!rep.converged) codes[k] = kConvergenceError;
      }
      report["runtime_s"] = seconds_since(t0);
      write_json(output_path(cfg, "sweep_report.json"), report);
      reports[k] = report;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  int code = kOk;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    std::cout << "sweep[" << k << "]: " << (codes[k] == kOk ? "converged" : "NOT converged") << "\n";
    code = std::max(code, codes[k]);
  }
  return code;
}

int cmd_qrt_check(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Built b = build_pipeline(cfg);
  json report = provenance("qrt-check", &cfg);
  double worst = 0.0;
  if (!b.empty) {
    const PseudomodeSet pm3 = with_fock_dims(b.pipeline.modes, std::vector<int>(b.pipeline.modes.modes.size(), 3));
    const std::vector<double> taus = cfg.time_grid();
    const std::vector<Complex> c = qrt_correlation(pm3, taus, cfg.simulation_options());
    auto os = open_out(output_path(cfg, "qrt.csv"));
    os << "tau,re_qrt,im_qrt,re_series,im_series\n";
    char line[200];
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const Complex ref = pole_expansion_eval(b.pipeline.series, taus[k]);
      worst = std::max(worst, std::abs(c[k] - ref));
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", taus[k], c[k].real(), c[k].imag(), ref.real(),
                    ref.imag());
      os << line;
    }
  }
  const bool pass = worst < cfg.qrt_tolerance;
  report["max_abs_error"] = worst;
  report["threshold"] = cfg.qrt_tolerance;
  report["result"] = pass ? "PASS" : "FAIL";
  report["runtime_s"] = seconds_since(t0);
  write_json(output_path(cfg, "qrt_report.json"), report);
  std::cout << "qrt-check: max |C' - C| = " << worst << (pass ? " PASS" : " FAIL") << "\n";
  return pass ? kOk : kCheckFailed;
}

}  // namespace pseudomode::cli
