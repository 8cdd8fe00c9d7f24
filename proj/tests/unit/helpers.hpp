#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "pseudomode/correlation.hpp"

namespace testing {

/// Benchmark bath (beta = 1, alpha = 0.25, Gamma = 0.05) with the given resonance.
inline pseudomode::SpectralDensityModel benchmark_bath(double omega0 = 0.5) { return {0.25, omega0, 0.05, 1.0}; }

inline double rel(pseudomode::Complex a, pseudomode::Complex b) { return std::abs(a - b) / std::abs(b); }

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pseudomode_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
