#pragma once

// Pseudomode simulations of the spin-boson model: reduced dynamics, the
// regression-theorem correlation of the bare mode set, and Fock-dimension sweeps.

#include <string>
#include <vector>

#include "pseudomode/liouvillian.hpp"
#include "pseudomode/propagate.hpp"

namespace pseudomode {

struct SimulationOptions {
  PropagationOptions propagation;
  AssemblyOptions assembly;
};

struct SimulationResult {
  Trajectory trajectory;
  PropagationStats stats;
  std::vector<int> dims;
  bool hermitian = true;
  double antihermitian_norm = 0.0;
  double dephasing_rate = 0.0;
  std::string generator;  // "sparse" or "matrix-free"
};

/// rho_S(0) (x) vacuum propagated under the full generator.
SimulationResult simulate(const SystemSpec& sys, const PseudomodeSet& pm, const Matrix2c& rho_s0,
                          const std::vector<double>& times, const SimulationOptions& opt = {});

/// |e><e|
Matrix2c excited_state();

/// C'(tau) = Tr[B' exp(L_M tau)(B' rho_vac)] with B' = sum g_l (b_l + b_l^dag).
/// L_M contains the mode Hamiltonian and dissipators only.
std::vector<Complex> qrt_correlation(const PseudomodeSet& pm, const std::vector<double>& taus,
                                     const SimulationOptions& opt = {});

/// Copy of pm with new Fock dimensions.
PseudomodeSet with_fock_dims(const PseudomodeSet& pm, const std::vector<int>& dims);
/// Copy of pm with g_l -> -g_l.
PseudomodeSet flip_coupling_sign(const PseudomodeSet& pm, std::size_t l);

struct ConvergenceReport {
  std::vector<std::vector<int>> schedule;
  std::vector<Trajectory> runs;
  /// differences[k] = max_t |sz_{k+1}(t) - sz_k(t)|
  std::vector<double> differences;
  double threshold = 1e-4;
  bool converged = false;
  /// Smallest setting k whose successor differs from it by less than threshold.
  std::size_t converged_at = 0;
};

/// Runs every setting (concurrently) and compares consecutive sz curves.
ConvergenceReport convergence_sweep(const SystemSpec& sys, const PseudomodeSet& pm, const Matrix2c& rho_s0,
                                    const std::vector<double>& times,
                                    const std::vector<std::vector<int>>& schedule, double threshold = 1e-4,
                                    const SimulationOptions& opt = {});

}  // namespace pseudomode
