#include "pseudomode/dynamics.hpp"

#include <exception>
#include <sstream>

#include "pseudomode/errors.hpp"

namespace pseudomode {

SimulationResult simulate(const SystemSpec& sys, const PseudomodeSet& pm, const Matrix2c& rho_s0,
                          const std::vector<double>& times, const SimulationOptions& opt) {
  const GeneratorModel model = make_generator_model(sys, pm);
  const std::unique_ptr<LinearGenerator> gen = make_generator(model, opt.assembly);

  SimulationResult out;
  out.dims = model.dims;
  out.hermitian = model.hermitian;
  out.dephasing_rate = pm.dephasing_rate;
  out.generator = dynamic_cast<const SparseSuperoperator*>(gen.get()) ? "sparse" : "matrix-free";
  const EnlargedHamiltonian h0 = assemble_h0(sys, pm);
  out.antihermitian_norm = h0.antihermitian_norm;

  const CMatrix rho0 = vacuum_product_state(rho_s0, model.dims);
  out.trajectory = propagate(*gen, rho0, model.dims, times, opt.propagation, &out.stats);
  return out;
}

Matrix2c excited_state() {
  Matrix2c r = Matrix2c::Zero();
  r(0, 0) = 1.0;
  return r;
}

std::vector<Complex> qrt_correlation(const PseudomodeSet& pm, const std::vector<double>& taus,
                                     const SimulationOptions& opt) {
  if (pm.modes.empty()) return std::vector<Complex>(taus.size(), Complex{});
  const GeneratorModel model = make_generator_model(std::nullopt, pm);
  const std::unique_ptr<LinearGenerator> gen = make_generator(model, opt.assembly);
  const std::size_t n = model.hilbert_dim();

  SparseMatrix bprime(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < pm.modes.size(); ++l) {
    const SparseMatrix b = kron_embed(annihilation_op(pm.modes[l].fock_dim), l, model.dims).matrix;
    bprime += pm.modes[l].g * SparseMatrix(b + SparseMatrix(b.transpose()));
  }
  CMatrix vac = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  vac(0, 0) = 1.0;
  const CMatrix x0 = bprime * vac;
  const CVector v0 = Eigen::Map<const CVector>(x0.data(), static_cast<Eigen::Index>(n * n));

  std::vector<Complex> out(taus.size());
  evolve(
      *gen, v0, taus,
      [&](std::size_t k, const CVector& state) {
        Eigen::Map<const CMatrix> x(state.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        Complex s{0.0, 0.0};
        for (Eigen::Index r = 0; r < bprime.outerSize(); ++r)
          for (SparseMatrix::InnerIterator it(bprime, r); it; ++it) s += it.value() * x(it.col(), it.row());
        out[k] = s;
      },
      opt.propagation);
  return out;
}

PseudomodeSet with_fock_dims(const PseudomodeSet& pm, const std::vector<int>& dims) {
  if (dims.size() != pm.modes.size()) throw InputError("with_fock_dims: need one dimension per mode");
  PseudomodeSet out = pm;
  for (std::size_t l = 0; l < dims.size(); ++l) out.modes[l].fock_dim = dims[l];
  out.validate();
  return out;
}

PseudomodeSet flip_coupling_sign(const PseudomodeSet& pm, std::size_t l) {
  if (l >= pm.modes.size()) throw InputError("flip_coupling_sign: mode index out of range");
  PseudomodeSet out = pm;
  out.modes[l].g = -out.modes[l].g;
  return out;
}

ConvergenceReport convergence_sweep(const SystemSpec& sys, const PseudomodeSet& pm, const Matrix2c& rho_s0,
                                    const std::vector<double>& times,
                                    const std::vector<std::vector<int>>& schedule, double threshold,
                                    const SimulationOptions& opt) {
  if (schedule.empty()) throw InputError("convergence_sweep: empty schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k].size() != schedule[k - 1].size()) throw InputError("convergence_sweep: inconsistent settings");
    for (std::size_t l = 0; l < schedule[k].size(); ++l)
      if (schedule[k][l] < schedule[k - 1][l]) throw InputError("convergence_sweep: schedule must be increasing");
  }

  ConvergenceReport rep;
  rep.schedule = schedule;
  rep.threshold = threshold;
  rep.runs.resize(schedule.size());
  std::vector<std::exception_ptr> errors(schedule.size());
  const auto count = static_cast<std::ptrdiff_t>(schedule.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      const auto idx = static_cast<std::size_t>(k);
      rep.runs[idx] = simulate(sys, with_fock_dims(pm, schedule[idx]), rho_s0, times, opt).trajectory;
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t k = 1; k < rep.runs.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
      d = std::max(d, std::abs(rep.runs[k].sz[i] - rep.runs[k - 1].sz[i]));
    rep.differences.push_back(d);
    if (!rep.converged && d < threshold) {
      rep.converged = true;
      rep.converged_at = k - 1;
    }
  }
  return rep;
}

}  // namespace pseudomode
