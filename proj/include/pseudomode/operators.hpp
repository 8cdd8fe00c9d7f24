#pragma once

// Tensor-structured operators on H_S (x) Fock_{d_1} (x) ... (x) Fock_{d_M}.
// Slot 0 is the most significant index (Kronecker order), matching
// Eigen::kroneckerProduct(A, B) with A outermost.

#include <cstddef>
#include <vector>

#include "pseudomode/types.hpp"

namespace pseudomode {

struct EnlargedOperator {
  SparseMatrix matrix;
  std::vector<int> dims;

  std::size_t dimension() const;
};

std::size_t product_dim(const std::vector<int>& dims);
/// Stride of slot `slot` in a flattened index.
std::size_t slot_stride(const std::vector<int>& dims, std::size_t slot);

SparseMatrix identity_op(int d);
/// Truncated bosonic annihilation operator, b|n> = sqrt(n)|n-1>.
SparseMatrix annihilation_op(int d);
SparseMatrix number_op(int d);
SparseMatrix pauli_x();
SparseMatrix pauli_y();
/// diag(+1, -1) in the ordered basis (|e>, |g>).
SparseMatrix pauli_z();

/// Identity on every slot except `slot`, which carries `local`.
/// Throws InputError when slot is out of range or the dimensions disagree.
EnlargedOperator kron_embed(const SparseMatrix& local, std::size_t slot, const std::vector<int>& dims);

/// Traces out every slot except slot 0.
CMatrix partial_trace_modes(const CMatrix& rho, const std::vector<int>& dims);

/// rho_S (x) |0><0| on all remaining slots.
CMatrix vacuum_product_state(const CMatrix& rho_s, const std::vector<int>& dims);

}  // namespace pseudomode
