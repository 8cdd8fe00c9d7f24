#pragma once

// Mapping of an exponential series onto damped pseudomodes with couplings
// g_l = sqrt(a_l) (principal branch), optional terminator dephasing, and the
// spin-boson assembly pipelines.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pseudomode/correlation.hpp"
#include "pseudomode/expfit.hpp"

namespace pseudomode {

struct Pseudomode {
  double xi = 0.0;      // frequency
  double lambda = 1.0;  // damping; the mode decays at rate 2 lambda
  Complex g{};          // coupling g' = sqrt(-i r) = sqrt(a)
  int fock_dim = 2;
};

struct PseudomodeSet {
  std::vector<Pseudomode> modes;
  /// Rate of the local sigma_z dephasing term 2 gamma_D (sz rho sz - rho);
  /// applied with its computed sign.
  double dephasing_rate = 0.0;

  /// True iff every coupling is real, i.e. the enlarged Hamiltonian is Hermitian.
  bool is_hermitian(double tol = 1e-14) const;
  /// sum_l g_l^2 exp(-i xi_l tau - lambda_l tau).
  Complex reconstructed_correlation(double tau) const;
  std::vector<int> fock_dims() const;
  void validate() const;
};

/// One mode per term: xi = Re z, lambda = -Im z, g = principal sqrt(a).
/// Throws DomainError for a non-decaying term and InputError for a dims mismatch.
PseudomodeSet series_to_pseudomodes(const ExponentialSeries& series, const std::vector<int>& fock_dims);

struct TerminatorSplit {
  ExponentialSeries kept;  // single term c_1 exp(-nu_1 tau)
  double gamma_d = 0.0;    // sum_{n=2}^{n_total} c_n / nu_n
};

TerminatorSplit terminator_split(const SpectralDensityModel& sd, int n_total);

enum class PipelineMode { full_fit, terminator };

std::string to_string(PipelineMode mode);
PipelineMode pipeline_mode_from_string(const std::string& name);

struct PipelineOptions {
  PipelineMode mode = PipelineMode::full_fit;
  int k_fit = 2;
  int matsubara_terms = 1500;
  /// Fock dimension of the two resonant C0 modes.
  int resonant_dim = 8;
  /// Fock dimension of Matsubara/fit modes; nullopt -> default_aux_dim(resonant_dim).
  std::optional<int> aux_dim;
  FitGridOptions fit;
};

/// Auxiliary (Matsubara or fit) modes default to d0 - 2, capped at 3 and never below 2.
int default_aux_dim(int resonant_dim);

struct PipelineResult {
  ExponentialSeries series;  // resonant poles first, then fit / Matsubara terms
  PseudomodeSet modes;
  std::optional<ExponentialFit> fit;
  MatsubaraSpec matsubara;
};

/// full_fit: two C0 poles + k_fit real exponentials fitted to M(tau), no dephasing.
/// terminator: two C0 poles + the n = 1 Matsubara term + gamma_D dephasing.
PipelineResult spin_boson_pipeline(const SpectralDensityModel& sd, const PipelineOptions& opt = {});

// Plain-text file formats (full double precision).
void write_series(std::ostream& os, const ExponentialSeries& series);
ExponentialSeries read_series(std::istream& is);
void write_pseudomode_set(std::ostream& os, const PseudomodeSet& set);
PseudomodeSet read_pseudomode_set(std::istream& is);

}  // namespace pseudomode
