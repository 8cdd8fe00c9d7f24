#include "pseudomode/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "pseudomode/errors.hpp"
#include "pseudomode/kernels.hpp"

namespace pseudomode {

namespace {

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw InputError("propagate: empty time grid");
  if (times.front() < 0.0) throw InputError("propagate: times must start at or after 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InputError("propagate: times must be strictly increasing");
}

// Expokit-style rounding of a proposed step to two significant digits.
double round_step(double tau) {
  const double s = std::pow(10.0, std::floor(std::log10(tau)) - 1.0);
  return std::ceil(tau / s) * s;
}

void evolve_dense(const LinearGenerator& gen, CVector v, const std::vector<double>& times,
                  const StateObserver& observer, PropagationStats* stats) {
  const CMatrix l = dense_generator(gen);
  CMatrix step;
  double cached_dt = -1.0;
  double t = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dt = times[k] - t;
    if (dt > 0.0) {
      if (std::abs(dt - cached_dt) > 1e-13 * dt) {
        step = (dt * l).exp();
        cached_dt = dt;
      }
      v = step * v;
      t = times[k];
      if (stats) ++stats->steps;
    }
    observer(k, v);
  }
  if (stats) stats->dense = true;
}

void evolve_krylov(const LinearGenerator& gen, CVector v, const std::vector<double>& times,
                   const StateObserver& observer, const PropagationOptions& opt, PropagationStats* stats) {
  const auto n = static_cast<Eigen::Index>(v.size());
  const std::size_t un = static_cast<std::size_t>(n);
  const std::size_t fit = opt.krylov_memory_bytes / (sizeof(Complex) * un);
  int m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opt.krylov_dim), fit > 3 ? fit - 3 : 0));
  m = std::min<int>(m, static_cast<int>(n));
  if (m < 2) {
    std::ostringstream msg;
    msg << "Krylov basis for state dimension " << n << " does not fit in " << opt.krylov_memory_bytes
        << " bytes; reduce the Fock dimensions";
    throw DimensionError(msg.str());
  }
  if (stats) stats->krylov_dim = m;

  const double gamma = 0.9;
  const double delta = 1.2;
  const double t_end = times.back();
  const double t_eps = 1e-12 * std::max(1.0, t_end);

  CMatrix basis(n, m + 1);
  CVector p(n);
  CMatrix h(m + 2, m + 2);

  std::size_t next = 0;
  while (next < times.size() && times[next] <= 0.0) observer(next++, v);

  double t = 0.0;
  double tau = t_end;
  std::size_t steps = 0;
  while (next < times.size()) {
    if (++steps > opt.max_steps) throw NumericalError("propagate: step limit exhausted before t_end");
    const double remaining = t_end - t;
    const double beta = kernels::norm2(un, v.data());
    if (beta == 0.0) {
      while (next < times.size()) observer(next++, v);
      break;
    }

    basis.col(0) = v / beta;
    h.setZero();
    int k = m;
    bool happy = false;
    double avnorm = 0.0;
    for (int j = 0; j < m; ++j) {
      gen.apply(basis.col(j).data(), p.data());
      if (stats) ++stats->matvecs;
      const double p0 = kernels::norm2(un, p.data());
      // classical Gram-Schmidt; a second pass only after heavy cancellation
      const auto vj = basis.leftCols(j + 1);
      double s = p0;
      for (int pass = 0; pass < 2; ++pass) {
        const CVector c = vj.adjoint() * p;
        h.col(j).head(j + 1) += c;
        p.noalias() -= vj * c;
        const double before = s;
        s = kernels::norm2(un, p.data());
        if (s > 0.7 * before) break;
      }
      if (s <= 1e-12 * p0 || p0 == 0.0) {
        k = j + 1;
        happy = true;
        break;
      }
      h(j + 1, j) = s;
      basis.col(j + 1) = p / s;
    }
    if (!happy) {
      h(m + 1, m) = 1.0;
      gen.apply(basis.col(m).data(), p.data());
      if (stats) ++stats->matvecs;
      avnorm = kernels::norm2(un, p.data());
    }
    const int mx = happy ? k : m + 2;
    const int used = happy ? k : m + 1;
    const CMatrix hk = h.topLeftCorner(mx, mx);

    if (happy) tau = remaining;
    tau = std::min(tau, remaining);
    CMatrix f;
    double err = 0.0;
    double xm = 1.0 / m;
    int rejections = 0;
    for (;;) {
      f = (tau * hk).exp();
      if (happy) break;
      const double phi1 = std::abs(beta * f(m, 0));
      const double phi2 = std::abs(beta * f(m + 1, 0) * avnorm);
      if (phi1 > 10.0 * phi2) {
        err = phi2;
        xm = 1.0 / m;
      } else if (phi1 > phi2) {
        err = phi1 * phi2 / (phi1 - phi2);
        xm = 1.0 / m;
      } else {
        err = phi1;
        xm = 1.0 / (m - 1);
      }
      const double allowed = delta * tau * opt.tolerance * beta;
      if (std::isfinite(err) && f.allFinite() && err <= allowed) break;
      if (stats) ++stats->rejected;
      if (++rejections > 200) throw NumericalError("propagate: Krylov step rejected too many times");
      tau = std::isfinite(err) ? round_step(gamma * tau * std::pow(tau * opt.tolerance * beta / err, xm)) : 0.2 * tau;
      if (tau < 1e-13 * std::max(1.0, t_end)) {
        std::ostringstream msg;
        msg << "propagate: step-size underflow at t=" << t << " (tau=" << tau << ", local error " << err << ")";
        throw NumericalError(msg.str());
      }
    }

    const double t_new = remaining - tau <= t_eps ? t_end : t + tau;
    while (next < times.size() && times[next] <= t_new + t_eps) {
      const double s = times[next] - t;
      const CVector coeff = std::abs(s - tau) <= t_eps ? CVector(f.col(0).head(used)) : CVector((s * hk).exp().col(0).head(used));
      const CVector out = basis.leftCols(used) * (beta * coeff);
      observer(next++, out);
    }
    v = basis.leftCols(used) * (beta * f.col(0).head(used));
    t = t_new;
    if (stats) ++stats->steps;

    if (!happy) {
      const double grow = err > 0.0 ? gamma * std::pow(tau * opt.tolerance * beta / err, xm) : 5.0;
      tau = round_step(tau * std::min(grow, 5.0));
    }
  }
}

std::size_t digit(std::size_t index, std::size_t stride, int d) { return (index / stride) % static_cast<std::size_t>(d); }

Matrix2c reduced_from_vec(const Complex* rho, std::size_t n) {
  const std::size_t env = n / 2;
  Matrix2c r = Matrix2c::Zero();
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t a = 0; a < 2; ++a) {
      Complex s{0.0, 0.0};
      for (std::size_t q = 0; q < env; ++q) s += rho[(a * env + q) + n * (b * env + q)];
      r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
    }
  return r;
}

}  // namespace

CMatrix dense_generator(const LinearGenerator& gen) {
  const auto dim = static_cast<Eigen::Index>(gen.size());
  CMatrix l(dim, dim);
  CVector e = CVector::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    e(c) = 1.0;
    gen.apply(e.data(), l.col(c).data());
    e(c) = 0.0;
  }
  return l;
}

void evolve(const LinearGenerator& gen, CVector state, const std::vector<double>& times,
            const StateObserver& observer, const PropagationOptions& opt, PropagationStats* stats) {
  check_times(times);
  if (static_cast<std::size_t>(state.size()) != gen.size())
    throw DimensionError("propagate: state size does not match the generator");
  if (!(opt.tolerance > 0.0)) throw InputError("propagate: tolerance must be > 0");
  if (gen.size() <= opt.dense_limit)
    evolve_dense(gen, std::move(state), times, observer, stats);
  else
    evolve_krylov(gen, std::move(state), times, observer, opt, stats);
}

std::vector<double> top_fock_populations(const Complex* rho, const std::vector<int>& dims) {
  const std::size_t n = product_dim(dims);
  std::vector<double> pop(dims.size() > 1 ? dims.size() - 1 : 0, 0.0);
  for (std::size_t slot = 1; slot < dims.size(); ++slot) {
    const std::size_t stride = slot_stride(dims, slot);
    const auto top = static_cast<std::size_t>(dims[slot] - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (digit(i, stride, dims[slot]) == top) s += rho[i + n * i].real();
    pop[slot - 1] = s;
  }
  return pop;
}

Trajectory propagate(const LinearGenerator& gen, const CMatrix& rho0, const std::vector<int>& dims,
                     const std::vector<double>& times, const PropagationOptions& opt, PropagationStats* stats) {
  const std::size_t n = product_dim(dims);
  if (dims.empty() || dims[0] != 2) throw InputError("propagate: slot 0 must be the two-level system");
  if (static_cast<std::size_t>(rho0.rows()) != n || static_cast<std::size_t>(rho0.cols()) != n)
    throw DimensionError("propagate: initial state does not match dims");
  if (gen.hilbert_dim() != n) throw DimensionError("propagate: generator does not match dims");

  Trajectory traj;
  traj.top_fock.assign(dims.size() - 1, {});
  traj.times.reserve(times.size());
  const CVector v0 = Eigen::Map<const CVector>(rho0.data(), static_cast<Eigen::Index>(n * n));
  evolve(
      gen, v0, times,
      [&](std::size_t k, const CVector& state) {
        traj.push(times[k], reduced_from_vec(state.data(), n));
        const auto pops = top_fock_populations(state.data(), dims);
        for (std::size_t l = 0; l < pops.size(); ++l) traj.top_fock[l].push_back(pops[l]);
      },
      opt, stats);

  for (std::size_t l = 0; l < traj.top_fock.size(); ++l) {
    const double mx = *std::max_element(traj.top_fock[l].begin(), traj.top_fock[l].end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (std::abs(mx) > opt.top_fock_threshold) {
      std::ostringstream msg;
      msg << "mode " << l << ": top Fock level population " << mx << " exceeds " << opt.top_fock_threshold
          << "; increase its dimension";
      traj.warnings.push_back(msg.str());
    }
  }
  return traj;
}

}  // namespace pseudomode
