#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pseudomode/cli.hpp"
#include "pseudomode/config.hpp"
#include "pseudomode/errors.hpp"

namespace {

using nlohmann::json;
using namespace pseudomode;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "JSON config file (comments allowed)");
  app->add_option("-s,--set", c.sets, "Override, e.g. bath.omega0=0.25 (repeatable)");
  app->add_option("-o,--out", c.out, "Output directory (overrides output.directory)");
}

json read_doc(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InputError("config file '" + path + "': " + e.what());
  }
}

RunConfig resolve(const std::string& path, const Common& c) {
  json doc = read_doc(path);
  for (const auto& s : c.sets) apply_override(doc, s);
  RunConfig cfg = config_from_json(doc);
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudomode simulator for non-Markovian open-system dynamics"};
  app.footer(config_reference() +
             "\nExit codes: 0 ok, 1 check failed, 2 input error, 3 numerical error,\n"
             "4 convergence failure, 5 dimension limit exceeded.");
  app.require_subcommand(1);

  Common common;
  std::string modes_file;
  std::vector<std::string> sweep_configs;
  cli::CompareArgs cmp;

  auto* fit = app.add_subcommand("fit", "Fit the correlation function and write the exponential series");
  auto* build = app.add_subcommand("build", "Build the pseudomode set from the fitted series");
  auto* sim = app.add_subcommand("simulate", "Propagate the enlarged system and write the reduced trajectory");
  auto* heom = app.add_subcommand("heom", "Hierarchical equations of motion reference trajectory");
  auto* deph = app.add_subcommand("dephasing-oracle", "Exact pure-dephasing trajectory (requires system.delta_x = 0)");
  auto* qrt = app.add_subcommand("qrt-check", "Regression-theorem check of the pseudomode correlation");
  for (auto* sc : {fit, build, sim, heom, deph, qrt}) add_common(sc, common);
  sim->add_option("--modes", modes_file, "Pseudomode file from `build`; skips the fit");

  auto* sweep = app.add_subcommand("sweep", "Fock convergence sweep for one or more configs, run concurrently");
  sweep->add_option("configs", sweep_configs, "Config files")->required()->check(CLI::ExistingFile);
  sweep->add_option("-s,--set", common.sets, "Override applied to every config (repeatable)");
  sweep->add_option("-o,--out", common.out, "Output directory");

  auto* compare = app.add_subcommand("compare", "Compare two trajectory CSVs");
  compare->add_option("a", cmp.a, "First trajectory")->required()->check(CLI::ExistingFile);
  compare->add_option("b", cmp.b, "Second trajectory")->required()->check(CLI::ExistingFile);
  compare->add_option("--threshold", cmp.threshold, "Pass threshold on the gated observable")->capture_default_str();
  compare->add_option("--gate", cmp.gate, "Gated observable: sz, sx, sy, rho_S, abs_rho_eg")->capture_default_str();
  compare->add_flag("--interpolate", cmp.interpolate, "Resample onto the coarser grid when grids differ");
  compare->add_option("--report", cmp.report, "Also write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kInputError;
  }

  try {
    if (*compare) return cli::cmd_compare(cmp);
    if (*sweep) {
      std::vector<RunConfig> cfgs;
      for (const auto& p : sweep_configs) cfgs.push_back(resolve(p, common));
      return cli::cmd_sweep(cfgs);
    }
    const RunConfig cfg = resolve(common.config, common);
    if (*fit) return cli::cmd_fit(cfg);
    if (*build) return cli::cmd_build(cfg);
    if (*sim) return cli::cmd_simulate(cfg, modes_file);
    if (*heom) return cli::cmd_heom(cfg);
    if (*deph) return cli::cmd_dephasing_oracle(cfg);
    if (*qrt) return cli::cmd_qrt_check(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
  return cli::kInputError;
}
