#pragma once

// Bath correlation functions of the underdamped Brownian spectral density:
// closed-form resonant part, Matsubara series, direct quadrature, and the
// generic sum-of-exponentials (pole) representation.

#include <cstddef>
#include <span>
#include <vector>

#include "pseudomode/types.hpp"

namespace pseudomode {

/// Underdamped Brownian oscillator bath,
/// J(w) = alpha * omega0^2 * Gamma * w / ((omega0^2 - w^2)^2 + Gamma^2 w^2),
/// at inverse temperature beta. Energies in units of the TLS tunnelling.
struct SpectralDensityModel {
  double alpha = 0.0;
  double omega0 = 1.0;
  double gamma_width = 0.1;
  double beta = 1.0;

  /// Throws InputError for non-positive/non-finite parameters (alpha may be 0)
  /// and DomainError when omega0 <= Gamma / 2.
  void validate() const;
  /// Damped resonance frequency sqrt(omega0^2 - Gamma^2 / 4).
  double omega() const;
  double j(double w) const;
  /// J(w) * coth(beta w / 2), finite at w = 0.
  double j_coth(double w) const;
  /// Two-sided thermal spectrum J(w) (coth(beta w / 2) + 1), the Fourier
  /// transform of C(tau).
  double thermal_spectrum(double w) const;
};

/// One term a * exp(-i z tau) of a correlation function, Im z < 0.
/// The pole residue is r = i a; xi = Re z and lambda = -Im z.
struct PoleTerm {
  Complex amplitude{};
  Complex z{};

  Complex residue() const { return kI * amplitude; }
  double xi() const { return z.real(); }
  double lambda() const { return -z.imag(); }
  Complex eval(double tau) const { return amplitude * std::exp(-kI * z * tau); }
};

struct ExponentialSeries {
  std::vector<PoleTerm> terms;

  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }
  /// Sum of Re(r_l); zero for a full physical correlation function.
  double residue_real_sum() const;
  double residue_abs_sum() const;
  double amplitude_abs_sum() const;
  double min_lambda() const;
};

struct MatsubaraSpec {
  std::vector<double> coefficients;  // c_n, real
  std::vector<double> frequencies;   // nu_n = 2 pi n / beta

  std::size_t size() const { return coefficients.size(); }
};

Complex analytic_c0(const SpectralDensityModel& sd, double tau);

MatsubaraSpec matsubara_coefficients(const SpectralDensityModel& sd, int n_terms);

double matsubara_sum(const MatsubaraSpec& spec, double tau);

struct CorrelationQuadratureOptions {
  /// Upper frequency cutoff; zero extends it adaptively until the tail bound
  /// is below tol.
  double omega_max = 0.0;
  double tol = 1e-10;
};

/// C(tau) = (1/pi) int_0^inf J(w) [coth(beta w/2) cos(w tau) - i sin(w tau)] dw
/// by adaptive quadrature. Throws NumericalError when a panel does not converge.
Complex correlation_quadrature(const SpectralDensityModel& sd, double tau,
                               const CorrelationQuadratureOptions& opt = {});

/// sum_l a_l exp(-i z_l tau).
Complex pole_expansion_eval(const ExponentialSeries& series, double tau);

/// The resonant part C0 rewritten as two pole terms, [z+, z-] with
/// z+- = -+Omega - i Gamma/2.
ExponentialSeries c0_to_poles(const SpectralDensityModel& sd);

/// Effective spectral density of a pole series,
/// 2 sum_l [r^R_l (w - xi_l) + r^I_l lambda_l] / [(w - xi_l)^2 + lambda_l^2].
double effective_sd(const ExponentialSeries& series, double omega);

/// Breakpoints separating the resonance from the smooth background; shared by
/// every quadrature over J(w).
std::vector<double> spectral_breakpoints(const SpectralDensityModel& sd);

/// Upper bound on int_W^inf J(w) coth(beta w / 2) dw, valid for W > omega0.
double spectral_tail_bound(const SpectralDensityModel& sd, double cutoff);

}  // namespace pseudomode
