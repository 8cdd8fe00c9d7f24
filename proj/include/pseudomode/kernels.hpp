#pragma once

// Hot loops of the propagator. Each OpenMP kernel has a serial reference
// with the same signature (suffix _serial) used by the tests and benchmark.

#include <cstddef>
#include <vector>

#include "pseudomode/types.hpp"

namespace pseudomode::kernels {

/// y = A x for a row-major CSR matrix.
void csr_matvec(const SparseMatrix& a, const Complex* x, Complex* y);
void csr_matvec_serial(const SparseMatrix& a, const Complex* x, Complex* y);

/// Operators of  L rho = -i (H rho - rho H) + sum_l r_l b_l rho b_l^dag
///                      - (s_i + s_j) rho_ij + 2 gD (z_i z_j - 1) rho_ij
/// with s_i = (1/2) sum_l r_l <i|b_l^dag b_l|i>. H is not assumed Hermitian.
struct LindbladTerms {
  std::size_t n = 0;
  SparseMatrix h;                    // row-major, for H rho
  SparseMatrixCol h_col;             // column-major, for rho H
  std::vector<SparseMatrix> jumps;   // b_l, row-major
  std::vector<SparseMatrixCol> jumps_col;
  std::vector<double> jump_rates;    // r_l = 2 lambda_l
  std::vector<double> anticomm_shift;  // s_i
  std::vector<double> sz;            // +-1 on slot 0 when dephasing is present
  double dephasing = 0.0;            // gD

  void finalize();  // fills h_col, jumps_col, anticomm_shift from h, jumps, rates
};

/// out = L rho for a column-major n x n rho. Fused loop over columns.
void lindblad_apply(const LindbladTerms& t, const Complex* rho, Complex* out);
/// Same map written as whole-matrix Eigen expressions, no shortcuts.
void lindblad_apply_serial(const LindbladTerms& t, const Complex* rho, Complex* out);

// Level-1 helpers on length-n vectors.
Complex dot(std::size_t n, const Complex* x, const Complex* y);  // sum conj(x) y
double norm2(std::size_t n, const Complex* x);
void axpy(std::size_t n, Complex a, const Complex* x, Complex* y);
void scale(std::size_t n, Complex a, Complex* x);

}  // namespace pseudomode::kernels
