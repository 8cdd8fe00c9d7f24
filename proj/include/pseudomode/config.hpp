#pragma once

// Run configuration: one JSON document per run, sectioned as
//   bath, system, pipeline, fock, time, tolerances, heom, output.
// Every key is optional; missing keys take the defaults below.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudomode/correlation.hpp"
#include "pseudomode/dynamics.hpp"
#include "pseudomode/oracles.hpp"
#include "pseudomode/pseudomodes.hpp"

namespace pseudomode {

struct RunConfig {
  // bath
  SpectralDensityModel bath{0.25, 0.5, 0.05, 1.0};
  // system
  SystemSpec system{0.5, 1.0};
  std::string initial_state = "excited";  // excited | ground | plus
  // pipeline
  PipelineMode mode = PipelineMode::full_fit;
  int k_fit = 2;
  int matsubara_terms = 1500;
  std::uint64_t seed = 20240917;
  int multistart = 8;
  double fit_tau_max = 10.0;
  int fit_points = 500;
  // fock
  int resonant_dim = 8;
  int aux_dim = 0;  // 0: derived from resonant_dim
  bool fock_auto = false;
  std::vector<int> fock_schedule{4, 6, 8, 10};
  // time
  double t_max = 25.0;
  int n_points = 400;
  // tolerances
  double propagation_tol = 1e-10;
  int krylov_dim = 20;
  double top_fock_threshold = 1e-3;
  double convergence_threshold = 1e-4;
  double compare_threshold = 0.02;
  std::size_t max_superoperator_dim = 1000000;
  std::size_t max_state_dim = 20000000;
  double qrt_tolerance = 1e-8;
  // heom
  int heom_depth = 12;
  int heom_explicit_matsubara = 1;
  bool heom_terminator = true;
  bool heom_scaled = true;
  double heom_depth_tolerance = 1e-4;
  // output
  std::string output_dir = "out";
  std::string prefix = "run";

  /// Throws InputError or DomainError.
  void validate() const;

  PipelineOptions pipeline_options() const;
  SimulationOptions simulation_options() const;
  HeomConfig heom_config() const;
  Matrix2c initial_rho() const;
  std::vector<double> time_grid() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

/// Applies "section.key=value"; the value is parsed as JSON, falling back to a
/// plain string. Unknown keys throw InputError.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Human-readable list of every key with its default, for --help.
std::string config_reference();

}  // namespace pseudomode
