#pragma once

// Time series of reduced two-level states plus derived observables, shared by
// the pseudomode propagator and the reference solvers.

#include <iosfwd>
#include <string>
#include <vector>

#include "pseudomode/types.hpp"

namespace pseudomode {

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix2c> reduced_states;
  // Re Tr(sigma rho_S)
  std::vector<double> sz, sx, sy;
  /// top_fock[l][k]: population of the highest Fock level of mode l at times[k].
  std::vector<std::vector<double>> top_fock;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  /// Appends a state and its Pauli expectations.
  void push(double t, const Matrix2c& rho);

  double max_trace_defect() const;
  double max_hermiticity_defect() const;
  /// Smallest eigenvalue of the Hermitian part of rho_S over all times.
  double min_eigenvalue() const;
  double max_top_fock() const;
};

/// Columns: t, re/im of rho_ee, rho_eg, rho_ge, rho_gg, sz, sx, sy, top_fock_<l>.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

struct CompareOptions {
  double threshold = 0.02;
  /// Observable that decides pass/fail.
  std::string gate = "sz";
  /// Resample both onto the coarser grid when the grids differ.
  bool interpolate = false;
};

struct ObservableDiff {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double t_at_max = 0.0;
};

struct CompareReport {
  std::vector<ObservableDiff> diffs;
  std::size_t points = 0;
  bool interpolated = false;
  double threshold = 0.0;
  std::string gate;
  bool pass = false;

  const ObservableDiff& find(const std::string& name) const;
};

/// Throws InputError for incompatible grids unless interpolation is enabled.
CompareReport compare_trajectories(const Trajectory& a, const Trajectory& b, const CompareOptions& opt = {});

/// Linear interpolation of every stored quantity onto `times`.
Trajectory resample(const Trajectory& traj, const std::vector<double>& times);

std::vector<double> uniform_grid(double t_max, int n_points);

}  // namespace pseudomode
