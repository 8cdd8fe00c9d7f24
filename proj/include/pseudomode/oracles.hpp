#pragma once

// Reference solutions independent of the pseudomode propagator: the exact
// independent-boson (pure dephasing) solution and a bosonic hierarchy solver
// with its own state layout and Runge-Kutta integrator.

#include <vector>

#include "pseudomode/correlation.hpp"
#include "pseudomode/liouvillian.hpp"
#include "pseudomode/trajectory.hpp"

namespace pseudomode {

struct DephasingOptions {
  double tol = 1e-10;
};

/// Gamma_d(t) = (4/pi) int_0^inf J(w) coth(beta w/2) 2 sin^2(w t/2) / w^2 dw.
double dephasing_exponent(const SpectralDensityModel& sd, double t, const DephasingOptions& opt = {});

/// Delta = 0 dynamics with coupling sz: populations fixed,
/// rho_eg(t) = rho_eg(0) exp(-i eps t - Gamma_d(t)).
Trajectory pure_dephasing_exact(const SpectralDensityModel& sd, double epsilon, const Matrix2c& rho0,
                                const std::vector<double>& times, const DephasingOptions& opt = {});

struct HeomExponent {
  Complex c{};   // C(tau) = sum c_k exp(-nu_k tau)
  Complex nu{};
};

struct HeomConfig {
  std::vector<HeomExponent> exponents;
  int depth = 12;
  bool use_terminator = false;
  /// Coefficient of -delta [A, [A, rho]] applied to every auxiliary.
  double terminator_delta = 0.0;
  bool scaled_ados = true;

  double rtol = 1e-10;
  double atol = 1e-12;
  /// When > 0 the run is repeated at depth - 1 and a warning is attached if
  /// max |sz difference| exceeds this value.
  double depth_tolerance = 0.0;

  void validate() const;
};

/// Physical C(tau) of the spectral density: both resonant exponentials,
/// `explicit_matsubara` Matsubara terms, and the remaining terms up to n_total
/// folded into the terminator.
HeomConfig heom_config_from_sd(const SpectralDensityModel& sd, int depth, int explicit_matsubara = 1,
                               int n_total = 1500, bool terminator = true);

struct HeomStats {
  std::size_t ados = 0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double depth_difference = -1.0;  // < 0 when not checked
};

/// Hierarchy for H = H_S + sz (x) B. The conjugate coefficients are taken by
/// pairing each nu_k with its complex conjugate among the exponents.
Trajectory heom_solve(const SystemSpec& sys, const HeomConfig& cfg, const Matrix2c& rho0,
                      const std::vector<double>& times, HeomStats* stats = nullptr);

/// Number of auxiliaries for n exponents at the given depth (triangular truncation).
std::size_t heom_ado_count(std::size_t n_exponents, int depth);

}  // namespace pseudomode
