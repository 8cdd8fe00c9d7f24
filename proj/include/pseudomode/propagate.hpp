#pragma once

// Time propagation of vectorized states under a LinearGenerator.
// Small problems use a dense matrix exponential; larger ones an adaptive
// Krylov (Arnoldi) approximation of exp(tL) v with local error control.

#include <cstddef>
#include <functional>
#include <vector>

#include "pseudomode/liouvillian.hpp"
#include "pseudomode/trajectory.hpp"

namespace pseudomode {

struct PropagationOptions {
  /// Local error tolerance per unit time, relative to the state norm.
  double tolerance = 1e-10;
  int krylov_dim = 20;
  /// Liouville dimensions up to this size use the dense exponential.
  std::size_t dense_limit = 400;
  /// Top-Fock population above which a truncation warning is raised.
  double top_fock_threshold = 1e-3;
  std::size_t max_steps = 1000000;
  /// Memory allowed for the Krylov basis; the dimension shrinks to fit.
  std::size_t krylov_memory_bytes = std::size_t{1536} << 20;
};

struct PropagationStats {
  bool dense = false;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t matvecs = 0;
  int krylov_dim = 0;
};

using StateObserver = std::function<void(std::size_t index, const CVector& state)>;

/// Advances `state` (taken at t = 0) through the increasing `times` and calls
/// observer(k, state(times[k])) once per output time. Throws NumericalError on
/// step-size underflow or when max_steps is exhausted.
void evolve(const LinearGenerator& gen, CVector state, const std::vector<double>& times,
            const StateObserver& observer, const PropagationOptions& opt = {}, PropagationStats* stats = nullptr);

/// Dense matrix of the generator; intended for small dimensions.
CMatrix dense_generator(const LinearGenerator& gen);

/// Reduced-state trajectory from the enlarged initial state rho0 with slot 0
/// the two-level system. The t = 0 entry is the partial trace of rho0 itself.
Trajectory propagate(const LinearGenerator& gen, const CMatrix& rho0, const std::vector<int>& dims,
                     const std::vector<double>& times, const PropagationOptions& opt = {},
                     PropagationStats* stats = nullptr);

/// Populations of the highest Fock level of every slot >= 1, from diag(rho).
std::vector<double> top_fock_populations(const Complex* rho, const std::vector<int>& dims);

}  // namespace pseudomode
