#include "pseudomode/operators.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "pseudomode/errors.hpp"

namespace pseudomode {

std::size_t EnlargedOperator::dimension() const { return product_dim(dims); }

std::size_t product_dim(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d < 1) throw InputError("dimension entries must be >= 1");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::size_t slot_stride(const std::vector<int>& dims, std::size_t slot) {
  std::size_t s = 1;
  for (std::size_t t = slot + 1; t < dims.size(); ++t) s *= static_cast<std::size_t>(dims[t]);
  return s;
}

SparseMatrix identity_op(int d) {
  SparseMatrix m(d, d);
  m.setIdentity();
  return m;
}

SparseMatrix annihilation_op(int d) {
  std::vector<Triplet> t;
  for (int n = 1; n < d; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  SparseMatrix m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix number_op(int d) {
  std::vector<Triplet> t;
  for (int n = 1; n < d; ++n) t.emplace_back(n, n, static_cast<double>(n));
  SparseMatrix m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix pauli_x() {
  std::vector<Triplet> t = {{0, 1, 1.0}, {1, 0, 1.0}};
  SparseMatrix m(2, 2);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix pauli_y() {
  std::vector<Triplet> t = {{0, 1, -kI}, {1, 0, kI}};
  SparseMatrix m(2, 2);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix pauli_z() {
  std::vector<Triplet> t = {{0, 0, 1.0}, {1, 1, -1.0}};
  SparseMatrix m(2, 2);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

EnlargedOperator kron_embed(const SparseMatrix& local, std::size_t slot, const std::vector<int>& dims) {
  if (slot >= dims.size()) {
    std::ostringstream msg;
    msg << "kron_embed: slot " << slot << " out of range for " << dims.size() << " slots";
    throw InputError(msg.str());
  }
  const int d = dims[slot];
  if (local.rows() != d || local.cols() != d) {
    std::ostringstream msg;
    msg << "kron_embed: local operator is " << local.rows() << "x" << local.cols() << " but slot " << slot
        << " has dimension " << d;
    throw InputError(msg.str());
  }
  const std::size_t inner = slot_stride(dims, slot);
  const std::size_t outer = product_dim(dims) / (inner * static_cast<std::size_t>(d));
  const std::size_t block = inner * static_cast<std::size_t>(d);

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(local.nonZeros()) * inner * outer);
  for (std::size_t o = 0; o < outer; ++o) {
    for (int r = 0; r < local.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(local, r); it; ++it) {
        const std::size_t row0 = o * block + static_cast<std::size_t>(it.row()) * inner;
        const std::size_t col0 = o * block + static_cast<std::size_t>(it.col()) * inner;
        for (std::size_t q = 0; q < inner; ++q)
          trips.emplace_back(static_cast<int>(row0 + q), static_cast<int>(col0 + q), it.value());
      }
    }
  }
  EnlargedOperator out;
  out.dims = dims;
  const auto n = static_cast<Eigen::Index>(product_dim(dims));
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  return out;
}

CMatrix partial_trace_modes(const CMatrix& rho, const std::vector<int>& dims) {
  if (dims.empty()) throw InputError("partial_trace_modes: empty dims");
  const std::size_t n = product_dim(dims);
  if (static_cast<std::size_t>(rho.rows()) != n || static_cast<std::size_t>(rho.cols()) != n)
    throw InputError("partial_trace_modes: matrix size does not match dims");
  const int ds = dims[0];
  const Eigen::Index env = static_cast<Eigen::Index>(n / static_cast<std::size_t>(ds));
  CMatrix out = CMatrix::Zero(ds, ds);
  for (int b = 0; b < ds; ++b)
    for (int a = 0; a < ds; ++a) out(a, b) = rho.block(a * env, b * env, env, env).trace();
  return out;
}

CMatrix vacuum_product_state(const CMatrix& rho_s, const std::vector<int>& dims) {
  if (dims.empty() || rho_s.rows() != dims[0] || rho_s.cols() != dims[0])
    throw InputError("vacuum_product_state: system state does not match slot 0");
  const std::size_t n = product_dim(dims);
  const Eigen::Index env = static_cast<Eigen::Index>(n / static_cast<std::size_t>(dims[0]));
  CMatrix rho = CMatrix::Zero(n, n);
  for (int b = 0; b < dims[0]; ++b)
    for (int a = 0; a < dims[0]; ++a) rho(a * env, b * env) = rho_s(a, b);
  return rho;
}

}  // namespace pseudomode
