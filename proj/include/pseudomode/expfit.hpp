#pragma once

// Real exponential-sum fitting: Prony initialisation, variable-projection
// Levenberg-Marquardt refinement with multi-start, and conversion of the fit
// into pole terms.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pseudomode/correlation.hpp"

namespace pseudomode {

struct Samples {
  std::vector<double> tau;
  std::vector<double> value;

  std::size_t size() const { return tau.size(); }
};

/// sum_k W_k exp(-gamma_k tau) fitted on `grid`.
struct ExponentialFit {
  std::vector<double> weights;
  std::vector<double> rates;
  /// max over the grid of |target - model|.
  double residual_norm = 0.0;
  /// Root of the summed squared residual, the optimised objective.
  double residual_l2 = 0.0;
  /// Nodes where residual_norm is measured.
  std::vector<double> grid;
  /// Nodes the weights were solved on; equals grid unless a retry grid won.
  std::vector<double> fit_grid;
  bool converged = true;
  int iterations = 0;

  double eval(double tau) const;
};

struct PronyResult {
  std::vector<double> rates;
  bool used_fallback = false;
  std::string note;
};

/// k decay rates from linear prediction on uniformly spaced samples.
/// Unstable roots are replaced by log-spaced defaults; a rank-deficient
/// prediction system falls back to defaults entirely (reported, not thrown).
PronyResult prony_initial_guess(const Samples& samples, int k);

struct FitOptions {
  std::optional<std::vector<double>> initial_rates;
  int multistart = 8;
  std::uint64_t seed = 20240917;
  int max_iterations = 400;
};

/// Least-squares fit with k real exponentials. Weights are solved linearly
/// for fixed rates; log-rates are refined by Levenberg-Marquardt. Throws
/// InputError for non-finite samples or k < 1.
ExponentialFit fit_real_exponentials(const Samples& samples, int k, const FitOptions& opt = {});

struct FitGridOptions {
  double tau_max = 10.0;
  int n_points = 500;
  /// Smallest positive node of the log-spaced retry grid, relative to tau_max.
  double log_grid_min_fraction = 1e-5;
  bool log_grid_retry = true;
  FitOptions fit;
};

/// Fits a target function on a uniform grid, then retries on a log-spaced
/// grid and keeps whichever fit has the smaller max residual on the uniform grid.
ExponentialFit fit_function(const std::function<double(double)>& target, int k,
                            const FitGridOptions& opt = {});

/// Each W exp(-gamma tau) becomes the pole term (a = W, z = -i gamma).
ExponentialSeries fit_to_series(const ExponentialFit& fit);

/// |Phi^T (Phi W - y)| / (|Phi| |y|) for the returned rates; near zero when the
/// weights are the exact linear least-squares solution.
double weight_optimality_residual(const ExponentialFit& fit, const Samples& samples);

}  // namespace pseudomode
