#pragma once

// Enlarged-system generator
//   L rho = -i (H0 rho - rho H0) + sum_l 2 lambda_l (b_l rho b_l^dag - {b_l^dag b_l, rho}/2)
//           + 2 gD (sz rho sz - rho)
// H0 may be non-Hermitian; it multiplies rho on both sides without a dagger.
// States are column-stacked: vec(A X B) = (B^T (x) A) vec(X).

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "pseudomode/kernels.hpp"
#include "pseudomode/operators.hpp"
#include "pseudomode/pseudomodes.hpp"

namespace pseudomode {

struct SystemSpec {
  double epsilon = 0.0;  // bias
  double delta_x = 1.0;  // tunnelling
  /// (eps/2) sz + (Delta/2) sx in the basis (|e>, |g>).
  Matrix2c hamiltonian() const;
};

struct EnlargedHamiltonian {
  EnlargedOperator h0;
  bool hermitian = true;
  double antihermitian_norm = 0.0;  // max |(H0 - H0^dag)_ij| / 2
};

/// H_S + sum xi_l n_l + sz (x) sum g_l (b_l + b_l^dag).
EnlargedHamiltonian assemble_h0(const SystemSpec& sys, const PseudomodeSet& pm);

/// All operators needed to apply L. Without a system the slots are modes only.
struct GeneratorModel {
  std::vector<int> dims;
  bool has_system = true;
  bool hermitian = true;
  kernels::LindbladTerms terms;

  std::size_t hilbert_dim() const { return terms.n; }
  std::size_t liouville_dim() const { return terms.n * terms.n; }
};

GeneratorModel make_generator_model(const std::optional<SystemSpec>& sys, const PseudomodeSet& pm);

/// Linear map on column-stacked n x n matrices.
class LinearGenerator {
 public:
  virtual ~LinearGenerator() = default;
  virtual std::size_t hilbert_dim() const = 0;
  std::size_t size() const { return hilbert_dim() * hilbert_dim(); }
  virtual void apply(const Complex* in, Complex* out) const = 0;
};

/// Assembled CSR superoperator.
class SparseSuperoperator final : public LinearGenerator {
 public:
  SparseSuperoperator(SparseMatrix matrix, std::size_t hilbert_dim);
  std::size_t hilbert_dim() const override { return n_; }
  void apply(const Complex* in, Complex* out) const override;
  void apply_serial(const Complex* in, Complex* out) const;
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  SparseMatrix matrix_;
  std::size_t n_;
};

/// Applies L column by column without forming the superoperator.
class MatrixFreeLiouvillian final : public LinearGenerator {
 public:
  explicit MatrixFreeLiouvillian(GeneratorModel model);
  std::size_t hilbert_dim() const override { return model_.hilbert_dim(); }
  void apply(const Complex* in, Complex* out) const override;
  void apply_reference(const Complex* in, Complex* out) const;
  const GeneratorModel& model() const { return model_; }

 private:
  GeneratorModel model_;
};

struct AssemblyOptions {
  /// Largest Liouville-space dimension (n^2) accepted for explicit assembly.
  std::size_t max_superoperator_dim = 1000000;
  /// Largest Liouville-space dimension accepted by the matrix-free path.
  std::size_t max_state_dim = 20000000;
};

/// Throws DimensionError above opt.max_superoperator_dim.
SparseSuperoperator assemble_liouvillian(const GeneratorModel& model, const AssemblyOptions& opt = {});
SparseSuperoperator assemble_liouvillian(const SystemSpec& sys, const PseudomodeSet& pm,
                                         const AssemblyOptions& opt = {});

/// Throws DimensionError above opt.max_state_dim.
MatrixFreeLiouvillian make_liouvillian_action(const GeneratorModel& model, const AssemblyOptions& opt = {});

/// Sparse when it fits under the assembly cap, matrix-free otherwise.
std::unique_ptr<LinearGenerator> make_generator(const GeneratorModel& model, const AssemblyOptions& opt = {});

/// Textbook GKSL generator from a Hermitian H and jump operators sqrt(rate) L_k,
/// assembled as a dense superoperator. Small systems only.
CMatrix gksl_superoperator(const CMatrix& h, const std::vector<CMatrix>& jumps, const std::vector<double>& rates);

}  // namespace pseudomode
