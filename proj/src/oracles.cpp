#include "pseudomode/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "pseudomode/errors.hpp"
#include "pseudomode/quadrature.hpp"

namespace pseudomode {

// ---------------------------------------------------------------- dephasing

double dephasing_exponent(const SpectralDensityModel& sd, double t, const DephasingOptions& opt) {
  sd.validate();
  if (!(t >= 0.0)) throw InputError("dephasing_exponent: t must be >= 0");
  if (sd.alpha == 0.0 || t == 0.0) return 0.0;
  // 2 sin^2(w t / 2) / w^2 = (t^2 / 2) sinc^2(w t / 2)
  auto kernel = [t](double w) {
    const double x = 0.5 * w * t;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return 0.5 * t * t * sinc * sinc;
  };
  auto integrand = [&](double w) { return sd.j_coth(w) * kernel(w); };
  auto tail = [&](double w) { return 2.0 / (w * w) * spectral_tail_bound(sd, w); };

  std::vector<double> bp = spectral_breakpoints(sd);
  // Resolve the first few oscillations of the kernel separately.
  const double period = 2.0 * std::numbers::pi / t;
  for (int k = 1; k <= 8; ++k) bp.push_back(k * period);

  quadrature::HalfLineOptions hl;
  hl.abs_tol = opt.tol * std::numbers::pi / 4.0;
  const auto r = quadrature::integrate_half_line<double>(integrand, bp, tail, hl);
  return 4.0 / std::numbers::pi * r.value;
}

Trajectory pure_dephasing_exact(const SpectralDensityModel& sd, double epsilon, const Matrix2c& rho0,
                                const std::vector<double>& times, const DephasingOptions& opt) {
  Trajectory traj;
  for (double t : times) {
    Matrix2c r = rho0;
    if (t != 0.0) {
      const double g = dephasing_exponent(sd, t, opt);
      const Complex f = std::exp(Complex(-g, -epsilon * t));
      r(0, 1) = rho0(0, 1) * f;
      r(1, 0) = rho0(1, 0) * std::conj(f);
    }
    traj.push(t, r);
  }
  return traj;
}

// --------------------------------------------------------------------- HEOM

void HeomConfig::validate() const {
  if (depth < 1) throw InputError("HEOM: depth must be >= 1");
  for (std::size_t k = 0; k < exponents.size(); ++k)
    if (!(exponents[k].nu.real() > 0.0))
      throw DomainError("HEOM: exponent " + std::to_string(k) + " has Re(nu) <= 0");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InputError("HEOM: tolerances must be > 0");
}

HeomConfig heom_config_from_sd(const SpectralDensityModel& sd, int depth, int explicit_matsubara, int n_total,
                               bool terminator) {
  sd.validate();
  if (explicit_matsubara < 0 || explicit_matsubara > n_total)
    throw InputError("HEOM: explicit Matsubara count out of range");
  HeomConfig cfg;
  cfg.depth = depth;
  for (const auto& p : c0_to_poles(sd).terms) cfg.exponents.push_back({p.amplitude, kI * p.z});
  if (n_total > 0) {
    const MatsubaraSpec m = matsubara_coefficients(sd, n_total);
    for (int n = 0; n < explicit_matsubara; ++n)
      cfg.exponents.push_back({Complex(m.coefficients[n], 0.0), Complex(m.frequencies[n], 0.0)});
    if (terminator) {
      double delta = 0.0;
      for (int n = n_total - 1; n >= explicit_matsubara; --n) delta += m.coefficients[n] / m.frequencies[n];
      cfg.use_terminator = true;
      cfg.terminator_delta = delta;
    }
  }
  return cfg;
}

std::size_t heom_ado_count(std::size_t n_exponents, int depth) {
  // binomial(depth + n, n)
  double c = 1.0;
  for (std::size_t i = 1; i <= n_exponents; ++i) c = c * static_cast<double>(depth + static_cast<int>(i)) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(c));
}

namespace {

struct Hierarchy {
  std::size_t count = 0;
  std::size_t kexp = 0;
  std::vector<Complex> damping;       // sum_k n_k nu_k
  std::vector<std::ptrdiff_t> up;     // [ado * kexp + k]
  std::vector<std::ptrdiff_t> down;
  std::vector<double> up_coeff;
  std::vector<double> down_coeff;
};

Hierarchy build_hierarchy(const HeomConfig& cfg) {
  const std::size_t kexp = cfg.exponents.size();
  std::vector<std::vector<int>> labels{std::vector<int>(kexp, 0)};
  std::map<std::vector<int>, std::size_t> index{{labels[0], 0}};
  // breadth-first by level
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int level = 0;
    for (int v : labels[i]) level += v;
    if (level >= cfg.depth) continue;
    for (std::size_t k = 0; k < kexp; ++k) {
      std::vector<int> next = labels[i];
      ++next[k];
      if (index.emplace(next, labels.size()).second) labels.push_back(next);
    }
  }

  Hierarchy h;
  h.count = labels.size();
  h.kexp = kexp;
  h.damping.assign(h.count, Complex{});
  h.up.assign(h.count * kexp, -1);
  h.down.assign(h.count * kexp, -1);
  h.up_coeff.assign(h.count * kexp, 0.0);
  h.down_coeff.assign(h.count * kexp, 0.0);
  for (std::size_t i = 0; i < h.count; ++i) {
    for (std::size_t k = 0; k < kexp; ++k) {
      const int nk = labels[i][k];
      const double ck = std::abs(cfg.exponents[k].c) > 0.0 ? std::abs(cfg.exponents[k].c) : 1.0;
      h.damping[i] += static_cast<double>(nk) * cfg.exponents[k].nu;
      std::vector<int> l = labels[i];
      ++l[k];
      if (auto it = index.find(l); it != index.end()) {
        h.up[i * kexp + k] = static_cast<std::ptrdiff_t>(it->second);
        h.up_coeff[i * kexp + k] = cfg.scaled_ados ? std::sqrt((nk + 1) * ck) : 1.0;
      }
      if (nk > 0) {
        l[k] -= 2;
        h.down[i * kexp + k] = static_cast<std::ptrdiff_t>(index.at(l));
        h.down_coeff[i * kexp + k] = cfg.scaled_ados ? std::sqrt(nk / ck) : static_cast<double>(nk);
      }
    }
  }
  return h;
}

std::vector<Complex> conjugate_coefficients(const HeomConfig& cfg) {
  std::vector<Complex> cbar(cfg.exponents.size());
  for (std::size_t k = 0; k < cfg.exponents.size(); ++k) {
    const Complex target = std::conj(cfg.exponents[k].nu);
    bool found = false;
    for (std::size_t q = 0; q < cfg.exponents.size() && !found; ++q) {
      if (std::abs(cfg.exponents[q].nu - target) <= 1e-12 * std::max(1.0, std::abs(target))) {
        cbar[k] = std::conj(cfg.exponents[q].c);
        found = true;
      }
    }
    if (!found) {
      std::ostringstream msg;
      msg << "HEOM: exponent nu = " << cfg.exponents[k].nu << " has no conjugate partner";
      throw InputError(msg.str());
    }
  }
  return cbar;
}

class HeomRhs {
 public:
  HeomRhs(const SystemSpec& sys, const HeomConfig& cfg)
      : h_(sys.hamiltonian()), hier_(build_hierarchy(cfg)), cfg_(cfg), cbar_(conjugate_coefficients(cfg)) {
    a_ << 1.0, 0.0, 0.0, -1.0;
  }

  std::size_t size() const { return 4 * hier_.count; }
  std::size_t ados() const { return hier_.count; }

  void operator()(const CVector& y, CVector& dy) const {
    const auto count = static_cast<std::ptrdiff_t>(hier_.count);
    const std::size_t kexp = hier_.kexp;
    const double delta = cfg_.use_terminator ? cfg_.terminator_delta : 0.0;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const Eigen::Map<const Matrix2c> r(y.data() + 4 * i);
      Matrix2c out = -kI * (h_ * r - r * h_) - hier_.damping[static_cast<std::size_t>(i)] * r;
      if (delta != 0.0) out -= delta * (a_ * a_ * r - 2.0 * a_ * r * a_ + r * a_ * a_);
      for (std::size_t k = 0; k < kexp; ++k) {
        const std::size_t slot = static_cast<std::size_t>(i) * kexp + k;
        if (const auto u = hier_.up[slot]; u >= 0) {
          const Eigen::Map<const Matrix2c> ru(y.data() + 4 * u);
          out -= kI * hier_.up_coeff[slot] * (a_ * ru - ru * a_);
        }
        if (const auto d = hier_.down[slot]; d >= 0) {
          const Eigen::Map<const Matrix2c> rd(y.data() + 4 * d);
          out -= kI * hier_.down_coeff[slot] * (cfg_.exponents[k].c * (a_ * rd) - cbar_[k] * (rd * a_));
        }
      }
      Eigen::Map<Matrix2c>(dy.data() + 4 * i) = out;
    }
  }

 private:
  Matrix2c h_;
  Matrix2c a_;
  Hierarchy hier_;
  HeomConfig cfg_;
  std::vector<Complex> cbar_;
};

// Dormand-Prince 5(4) with FSAL and standard step-size control.
class DormandPrince {
 public:
  DormandPrince(const HeomRhs& f, double rtol, double atol) : f_(f), rtol_(rtol), atol_(atol) {}

  void integrate(CVector& y, double t0, double t1, double& h, HeomStats* stats) {
    const auto n = y.size();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_}) v->resize(n);
    f_(y, k1_);
    double t = t0;
    while (t < t1) {
      const bool last = t + h >= t1 - 1e-14 * std::max(1.0, std::abs(t1));
      const double step = last ? t1 - t : h;
      tmp_ = y + step * (1.0 / 5.0) * k1_;
      f_(tmp_, k2_);
      tmp_ = y + step * ((3.0 / 40.0) * k1_ + (9.0 / 40.0) * k2_);
      f_(tmp_, k3_);
      tmp_ = y + step * ((44.0 / 45.0) * k1_ - (56.0 / 15.0) * k2_ + (32.0 / 9.0) * k3_);
      f_(tmp_, k4_);
      tmp_ = y + step * ((19372.0 / 6561.0) * k1_ - (25360.0 / 2187.0) * k2_ + (64448.0 / 6561.0) * k3_ -
                         (212.0 / 729.0) * k4_);
      f_(tmp_, k5_);
      tmp_ = y + step * ((9017.0 / 3168.0) * k1_ - (355.0 / 33.0) * k2_ + (46732.0 / 5247.0) * k3_ +
                         (49.0 / 176.0) * k4_ - (5103.0 / 18656.0) * k5_);
      f_(tmp_, k6_);
      ynew_ = y + step * ((35.0 / 384.0) * k1_ + (500.0 / 1113.0) * k3_ + (125.0 / 192.0) * k4_ -
                          (2187.0 / 6784.0) * k5_ + (11.0 / 84.0) * k6_);
      f_(ynew_, k7_);
      tmp_ = step * ((71.0 / 57600.0) * k1_ - (71.0 / 16695.0) * k3_ + (71.0 / 1920.0) * k4_ -
                     (17253.0 / 339200.0) * k5_ + (22.0 / 525.0) * k6_ - (1.0 / 40.0) * k7_);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = atol_ + rtol_ * std::max(std::abs(y(i)), std::abs(ynew_(i)));
        const double e = std::abs(tmp_(i)) / sc;
        acc += e * e;
      }
      const double err = std::sqrt(acc / static_cast<double>(n));
      if (!std::isfinite(err)) throw NumericalError("HEOM: non-finite state during integration");
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        y.swap(ynew_);
        k1_.swap(k7_);
        t = last ? t1 : t + step;
        if (stats) ++stats->steps;
        if (!last) h = step * fac;
      } else {
        h = step * std::min(1.0, fac);
        if (stats) ++stats->rejected;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t1))) {
        std::ostringstream msg;
        msg << "HEOM: step-size underflow at t=" << t;
        throw NumericalError(msg.str());
      }
    }
  }

 private:
  const HeomRhs& f_;
  double rtol_, atol_;
  CVector k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_;
};

Trajectory heom_run(const SystemSpec& sys, const HeomConfig& cfg, const Matrix2c& rho0,
                    const std::vector<double>& times, HeomStats* stats) {
  cfg.validate();
  if (times.empty()) throw InputError("HEOM: empty time grid");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InputError("HEOM: times must be strictly increasing");
  if (times.front() < 0.0) throw InputError("HEOM: times must start at or after 0");

  const HeomRhs rhs(sys, cfg);
  if (stats) stats->ados = rhs.ados();
  CVector y = CVector::Zero(static_cast<Eigen::Index>(rhs.size()));
  Eigen::Map<Matrix2c>(y.data()) = rho0;

  double max_rate = 1.0;
  for (const auto& e : cfg.exponents) max_rate = std::max(max_rate, std::abs(e.nu));
  double h = 0.01 / (max_rate * cfg.depth);
  DormandPrince dp(rhs, cfg.rtol, cfg.atol);

  Trajectory traj;
  double t = 0.0;
  for (double tk : times) {
    if (tk > t) {
      dp.integrate(y, t, tk, h, stats);
      t = tk;
    }
    traj.push(tk, Eigen::Map<const Matrix2c>(y.data()));
  }
  return traj;
}

}  // namespace

Trajectory heom_solve(const SystemSpec& sys, const HeomConfig& cfg, const Matrix2c& rho0,
                      const std::vector<double>& times, HeomStats* stats) {
  Trajectory traj = heom_run(sys, cfg, rho0, times, stats);
  if (cfg.depth_tolerance > 0.0 && cfg.depth > 1) {
    HeomConfig lower = cfg;
    lower.depth = cfg.depth - 1;
    const Trajectory ref = heom_run(sys, lower, rho0, times, nullptr);
    double d = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) d = std::max(d, std::abs(traj.sz[k] - ref.sz[k]));
    if (stats) stats->depth_difference = d;
    if (d > cfg.depth_tolerance) {
      std::ostringstream msg;
      msg << "HEOM not converged in depth: max |sz(depth " << cfg.depth << ") - sz(depth " << lower.depth
          << ")| = " << d << " > " << cfg.depth_tolerance;
      traj.warnings.push_back(msg.str());
    }
  }
  return traj;
}

}  // namespace pseudomode
