#include "pseudomode/liouvillian.hpp"

#include <sstream>

#include "pseudomode/errors.hpp"

namespace pseudomode {

namespace {

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator ia(a, r); ia; ++ia)
      for (Eigen::Index s = 0; s < b.outerSize(); ++s)
        for (SparseMatrix::InnerIterator ib(b, s); ib; ++ib)
          t.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                         static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix to_sparse(const Matrix2c& m) {
  std::vector<Triplet> t;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i)
      if (m(i, j) != Complex{}) t.emplace_back(i, j, m(i, j));
  SparseMatrix s(2, 2);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

CMatrix dense_kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::string dimension_message(std::size_t need, std::size_t cap, const std::vector<int>& dims) {
  std::ostringstream msg;
  msg << "Liouville dimension " << need << " exceeds the cap " << cap << " (dims";
  for (int d : dims) msg << ' ' << d;
  msg << "); reduce the Fock dimensions or raise the cap";
  return msg.str();
}

}  // namespace

Matrix2c SystemSpec::hamiltonian() const {
  Matrix2c h;
  h << 0.5 * epsilon, 0.5 * delta_x, 0.5 * delta_x, -0.5 * epsilon;
  return h;
}

GeneratorModel make_generator_model(const std::optional<SystemSpec>& sys, const PseudomodeSet& pm) {
  pm.validate();
  GeneratorModel g;
  g.has_system = sys.has_value();
  g.hermitian = pm.is_hermitian();
  if (g.has_system) g.dims.push_back(2);
  const std::size_t offset = g.dims.size();
  for (const auto& m : pm.modes) g.dims.push_back(m.fock_dim);
  if (g.dims.empty()) throw InputError("generator: no system and no modes");

  const std::size_t n = product_dim(g.dims);
  auto& t = g.terms;
  t.n = n;
  t.h.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  SparseMatrix coupling(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < pm.modes.size(); ++l) {
    const auto& m = pm.modes[l];
    const SparseMatrix b = kron_embed(annihilation_op(m.fock_dim), offset + l, g.dims).matrix;
    const SparseMatrix nl = kron_embed(number_op(m.fock_dim), offset + l, g.dims).matrix;
    t.h += Complex(m.xi, 0.0) * nl;
    const SparseMatrix bdag = b.transpose();  // real entries
    coupling += m.g * SparseMatrix(b + bdag);
    t.jumps.push_back(b);
    t.jump_rates.push_back(2.0 * m.lambda);
  }
  if (g.has_system) {
    t.h += kron_embed(to_sparse(sys->hamiltonian()), 0, g.dims).matrix;
    const SparseMatrix z = kron_embed(pauli_z(), 0, g.dims).matrix;
    t.h += SparseMatrix(z * coupling);
    t.dephasing = pm.dephasing_rate;
    if (t.dephasing != 0.0) {
      t.sz.resize(n);
      for (std::size_t i = 0; i < n; ++i) t.sz[i] = z.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }
  }
  t.h.prune(Complex{});
  t.finalize();
  return g;
}

EnlargedHamiltonian assemble_h0(const SystemSpec& sys, const PseudomodeSet& pm) {
  const GeneratorModel g = make_generator_model(sys, pm);
  EnlargedHamiltonian out;
  out.h0.matrix = g.terms.h;
  out.h0.dims = g.dims;
  const SparseMatrix ah = 0.5 * (g.terms.h - SparseMatrix(g.terms.h.adjoint()));
  double mx = 0.0;
  for (Eigen::Index r = 0; r < ah.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(ah, r); it; ++it) mx = std::max(mx, std::abs(it.value()));
  out.antihermitian_norm = mx;
  out.hermitian = g.hermitian;
  return out;
}

SparseSuperoperator::SparseSuperoperator(SparseMatrix matrix, std::size_t hilbert_dim)
    : matrix_(std::move(matrix)), n_(hilbert_dim) {
  matrix_.makeCompressed();
  if (static_cast<std::size_t>(matrix_.rows()) != n_ * n_ || matrix_.rows() != matrix_.cols())
    throw DimensionError("superoperator size does not match the Hilbert dimension");
}

void SparseSuperoperator::apply(const Complex* in, Complex* out) const { kernels::csr_matvec(matrix_, in, out); }

void SparseSuperoperator::apply_serial(const Complex* in, Complex* out) const {
  kernels::csr_matvec_serial(matrix_, in, out);
}

MatrixFreeLiouvillian::MatrixFreeLiouvillian(GeneratorModel model) : model_(std::move(model)) {}

void MatrixFreeLiouvillian::apply(const Complex* in, Complex* out) const {
  kernels::lindblad_apply(model_.terms, in, out);
}

void MatrixFreeLiouvillian::apply_reference(const Complex* in, Complex* out) const {
  kernels::lindblad_apply_serial(model_.terms, in, out);
}

SparseSuperoperator assemble_liouvillian(const GeneratorModel& model, const AssemblyOptions& opt) {
  const std::size_t n = model.hilbert_dim();
  if (model.liouville_dim() > opt.max_superoperator_dim)
    throw DimensionError(dimension_message(model.liouville_dim(), opt.max_superoperator_dim, model.dims));
  const auto& t = model.terms;
  const SparseMatrix id = identity_op(static_cast<int>(n));
  const SparseMatrix ht = t.h.transpose();

  SparseMatrix l = -kI * (kron(id, t.h) - kron(ht, id));
  for (std::size_t k = 0; k < t.jumps.size(); ++k) {
    const SparseMatrix& b = t.jumps[k];
    const SparseMatrix bconj = b.conjugate();
    const SparseMatrix nb = SparseMatrix(b.adjoint()) * b;
    const SparseMatrix nbt = nb.transpose();
    l += Complex(t.jump_rates[k], 0.0) * (kron(bconj, b) - 0.5 * kron(id, nb) - 0.5 * kron(nbt, id));
  }
  if (t.dephasing != 0.0) {
    std::vector<Triplet> zt;
    for (std::size_t i = 0; i < n; ++i) zt.emplace_back(static_cast<int>(i), static_cast<int>(i), t.sz[i]);
    SparseMatrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    z.setFromTriplets(zt.begin(), zt.end());
    l += Complex(2.0 * t.dephasing, 0.0) * (kron(z, z) - kron(id, id));
  }
  l.prune(Complex{});
  return SparseSuperoperator(std::move(l), n);
}

SparseSuperoperator assemble_liouvillian(const SystemSpec& sys, const PseudomodeSet& pm,
                                         const AssemblyOptions& opt) {
  return assemble_liouvillian(make_generator_model(sys, pm), opt);
}

MatrixFreeLiouvillian make_liouvillian_action(const GeneratorModel& model, const AssemblyOptions& opt) {
  if (model.liouville_dim() > opt.max_state_dim)
    throw DimensionError(dimension_message(model.liouville_dim(), opt.max_state_dim, model.dims));
  return MatrixFreeLiouvillian(model);
}

std::unique_ptr<LinearGenerator> make_generator(const GeneratorModel& model, const AssemblyOptions& opt) {
  if (model.liouville_dim() <= opt.max_superoperator_dim)
    return std::make_unique<SparseSuperoperator>(assemble_liouvillian(model, opt));
  return std::make_unique<MatrixFreeLiouvillian>(make_liouvillian_action(model, opt));
}

CMatrix gksl_superoperator(const CMatrix& h, const std::vector<CMatrix>& jumps, const std::vector<double>& rates) {
  if (jumps.size() != rates.size()) throw InputError("gksl_superoperator: one rate per jump operator");
  const Eigen::Index n = h.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix l = -kI * (dense_kron(id, h) - dense_kron(h.transpose(), id));
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const CMatrix& c = jumps[k];
    const CMatrix cdc = c.adjoint() * c;
    l += rates[k] * (dense_kron(c.conjugate(), c) - 0.5 * dense_kron(id, cdc) - 0.5 * dense_kron(cdc.transpose(), id));
  }
  return l;
}

}  // namespace pseudomode
