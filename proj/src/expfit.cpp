#include "pseudomode/expfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pseudomode/errors.hpp"

namespace pseudomode {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Rates are optimised as log(rate) and kept inside this window.
constexpr double kMinLogRate = -18.0;
constexpr double kMaxLogRate = 18.0;

void require_finite(const Samples& s) {
  if (s.tau.size() != s.value.size()) throw InputError("samples: tau and value sizes differ");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.tau[i]) || !std::isfinite(s.value[i])) {
      std::ostringstream msg;
      msg << "samples: non-finite entry at index " << i;
      throw InputError(msg.str());
    }
    if (s.tau[i] < 0.0) throw InputError("samples: tau must be >= 0");
  }
}

std::vector<double> default_rates(double tau_span, double dt, int k) {
  const double lo = std::log(1.0 / std::max(tau_span, 1e-12));
  const double hi = std::log(1.0 / std::max(dt, 1e-12));
  std::vector<double> out;
  for (int j = 0; j < k; ++j) out.push_back(std::exp(lo + (j + 0.5) / k * (hi - lo)));
  return out;
}

MatrixXd design(const std::vector<double>& tau, const VectorXd& rates) {
  MatrixXd phi(tau.size(), rates.size());
  for (Eigen::Index j = 0; j < rates.size(); ++j)
    for (std::size_t i = 0; i < tau.size(); ++i) phi(i, j) = std::exp(-rates(j) * tau[i]);
  return phi;
}

VectorXd solve_weights(const MatrixXd& phi, const VectorXd& y) {
  return Eigen::CompleteOrthogonalDecomposition<MatrixXd>(phi).solve(y);
}

struct Projected {
  VectorXd residual;
  VectorXd weights;
};

// Variable projection: residual of the optimal linear weights at fixed rates.
Projected project(const std::vector<double>& tau, const VectorXd& y, const VectorXd& log_rates) {
  const VectorXd rates = log_rates.array().exp();
  const MatrixXd phi = design(tau, rates);
  Projected p;
  p.weights = solve_weights(phi, y);
  p.residual = phi * p.weights - y;
  return p;
}

struct LmOutcome {
  VectorXd log_rates;
  double cost;
  bool converged;
  int iterations;
};

LmOutcome levenberg_marquardt(const std::vector<double>& tau, const VectorXd& y, VectorXd theta,
                              int max_iterations) {
  const Eigen::Index k = theta.size();
  auto clamp = [](VectorXd& v) { v = v.cwiseMax(kMinLogRate).cwiseMin(kMaxLogRate); };
  clamp(theta);
  VectorXd r = project(tau, y, theta).residual;
  double cost = r.squaredNorm();
  double mu = -1.0;
  const double y_scale = std::max(y.squaredNorm(), std::numeric_limits<double>::min());

  for (int it = 0; it < max_iterations; ++it) {
    MatrixXd jac(r.size(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
      constexpr double h = 1e-6;
      VectorXd tp = theta, tm = theta;
      tp(j) += h;
      tm(j) -= h;
      jac.col(j) = (project(tau, y, tp).residual - project(tau, y, tm).residual) / (2.0 * h);
    }
    const MatrixXd a = jac.transpose() * jac;
    const VectorXd g = jac.transpose() * r;
    if (mu < 0.0) mu = 1e-3 * std::max(a.diagonal().maxCoeff(), 1e-300);
    if (cost <= 1e-32 * y_scale || g.lpNorm<Eigen::Infinity>() <= 1e-300) return {theta, cost, true, it};

    bool accepted = false;
    while (mu < 1e300) {
      MatrixXd damped = a;
      for (Eigen::Index j = 0; j < k; ++j) damped(j, j) += mu * std::max(a(j, j), 1e-300);
      VectorXd step = damped.ldlt().solve(-g);
      VectorXd trial = theta + step;
      clamp(trial);
      const VectorXd rt = project(tau, y, trial).residual;
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        const double gain = (cost - ct) / cost;
        const double step_norm = (trial - theta).norm();
        theta = trial;
        r = rt;
        cost = ct;
        mu = std::max(mu * 0.3, 1e-300);
        accepted = true;
        if (gain < 1e-15 || step_norm < 1e-13) return {theta, cost, true, it + 1};
        break;
      }
      mu *= 10.0;
    }
    // No descent direction left: a (local) minimum to working precision.
    if (!accepted) return {theta, cost, true, it + 1};
  }
  return {theta, cost, false, max_iterations};
}

ExponentialFit finish(const Samples& s, const VectorXd& log_rates, bool converged, int iterations) {
  const VectorXd y = Eigen::Map<const VectorXd>(s.value.data(), s.value.size());
  Projected p = project(s.tau, y, log_rates);
  std::vector<std::size_t> order(log_rates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return log_rates(a) < log_rates(b); });
  ExponentialFit fit;
  for (auto j : order) {
    fit.rates.push_back(std::exp(log_rates(j)));
    fit.weights.push_back(p.weights(j));
  }
  fit.residual_norm = p.residual.lpNorm<Eigen::Infinity>();
  fit.residual_l2 = p.residual.norm();
  fit.grid = s.tau;
  fit.fit_grid = s.tau;
  fit.converged = converged;
  fit.iterations = iterations;
  return fit;
}

}  // namespace

double ExponentialFit::eval(double tau) const {
  double s = 0.0;
  for (std::size_t k = 0; k < rates.size(); ++k) s += weights[k] * std::exp(-rates[k] * tau);
  return s;
}

PronyResult prony_initial_guess(const Samples& samples, int k) {
  require_finite(samples);
  if (k < 1) throw InputError("prony_initial_guess: k must be >= 1");
  const std::size_t n = samples.size();
  if (n < static_cast<std::size_t>(2 * k)) throw InputError("prony_initial_guess: need at least 2k samples");
  const double dt = samples.tau[1] - samples.tau[0];
  if (!(dt > 0.0)) throw InputError("prony_initial_guess: samples must be increasing");
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs(samples.tau[i + 1] - samples.tau[i] - dt) > 1e-6 * dt)
      throw InputError("prony_initial_guess: samples must be uniformly spaced");
  }
  const double span = samples.tau.back() - samples.tau.front();
  const std::vector<double> defaults = default_rates(span, dt, k);

  PronyResult out;
  const Eigen::Index rows = static_cast<Eigen::Index>(n) - k;
  MatrixXd lp(rows, k);
  VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int j = 0; j < k; ++j) lp(i, j) = samples.value[i + j];
    rhs(i) = -samples.value[i + k];
  }
  Eigen::JacobiSVD<MatrixXd> svd(lp, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) < 1e-13 * sv(0)) {
    out.rates = defaults;
    out.used_fallback = true;
    out.note = "rank-deficient linear-prediction matrix; using log-spaced default rates";
    return out;
  }
  const VectorXd p = svd.solve(rhs);

  // Companion matrix of mu^k + p_{k-1} mu^{k-1} + ... + p_0.
  MatrixXd comp = MatrixXd::Zero(k, k);
  for (int j = 0; j < k; ++j) comp(0, j) = -p(k - 1 - j);
  for (int j = 1; j < k; ++j) comp(j, j - 1) = 1.0;
  Eigen::EigenSolver<MatrixXd> es(comp);
  std::vector<double> rates;
  int discarded = 0;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
    const Complex mu = es.eigenvalues()(j);
    const double rate = std::abs(mu) > 0.0 ? -std::log(std::abs(mu)) / dt : 0.0;
    const bool duplicate = std::any_of(rates.begin(), rates.end(), [&](double r) {
      return std::abs(r - rate) <= 1e-8 * std::max(r, rate);
    });
    if (rate > 0.0 && std::isfinite(rate) && !duplicate) {
      rates.push_back(rate);
    } else {
      ++discarded;
    }
  }
  for (double d : defaults) {
    if (static_cast<int>(rates.size()) == k) break;
    const bool close = std::any_of(rates.begin(), rates.end(),
                                   [&](double r) { return std::abs(std::log(r / d)) < 0.1; });
    if (!close) rates.push_back(d);
  }
  for (int extra = 1; static_cast<int>(rates.size()) < k; ++extra) rates.push_back(defaults.back() * (1 + extra));
  std::sort(rates.begin(), rates.end());
  out.rates = rates;
  if (discarded > 0) {
    std::ostringstream msg;
    msg << discarded << " unstable or duplicate root(s) replaced by default rates";
    out.note = msg.str();
  }
  return out;
}

ExponentialFit fit_real_exponentials(const Samples& samples, int k, const FitOptions& opt) {
  require_finite(samples);
  if (k < 1) throw InputError("fit_real_exponentials: k must be >= 1");
  if (samples.size() < static_cast<std::size_t>(k + 1))
    throw InputError("fit_real_exponentials: need more samples than exponentials");

  std::vector<double> init;
  if (opt.initial_rates) {
    init = *opt.initial_rates;
    if (static_cast<int>(init.size()) != k) throw InputError("fit_real_exponentials: initial_rates size != k");
    for (double r : init)
      if (!(r > 0.0) || !std::isfinite(r)) throw InputError("fit_real_exponentials: initial rates must be > 0");
  } else {
    bool uniform = samples.size() >= static_cast<std::size_t>(2 * k);
    const double dt = samples.size() > 1 ? samples.tau[1] - samples.tau[0] : 0.0;
    for (std::size_t i = 1; uniform && i + 1 < samples.size(); ++i)
      uniform = std::abs(samples.tau[i + 1] - samples.tau[i] - dt) <= 1e-6 * dt;
    if (uniform && dt > 0.0) {
      init = prony_initial_guess(samples, k).rates;
    } else {
      const double span = samples.tau.back() - samples.tau.front();
      init = default_rates(span, span / samples.size(), k);
    }
  }

  const VectorXd y = Eigen::Map<const VectorXd>(samples.value.data(), samples.value.size());
  if (y.lpNorm<Eigen::Infinity>() == 0.0) {
    VectorXd lr(k);
    for (int j = 0; j < k; ++j) lr(j) = std::log(init[j]);
    return finish(samples, lr, true, 0);
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<VectorXd> starts;
  VectorXd base(k);
  for (int j = 0; j < k; ++j) base(j) = std::log(init[j]);
  starts.push_back(base);
  for (int s = 1; s < std::max(opt.multistart, 1); ++s) {
    VectorXd v = base;
    for (int j = 0; j < k; ++j) v(j) += unit(rng) * std::log(4.0);
    starts.push_back(v);
  }

  std::vector<LmOutcome> outcomes(starts.size());
#pragma omp parallel for schedule(dynamic) if (starts.size() > 1)
  for (std::size_t s = 0; s < starts.size(); ++s)
    outcomes[s] = levenberg_marquardt(samples.tau, y, starts[s], opt.max_iterations);

  std::size_t best = 0;
  for (std::size_t s = 1; s < outcomes.size(); ++s)
    if (outcomes[s].cost < outcomes[best].cost) best = s;
  return finish(samples, outcomes[best].log_rates, outcomes[best].converged, outcomes[best].iterations);
}

ExponentialFit fit_function(const std::function<double(double)>& target, int k, const FitGridOptions& opt) {
  if (opt.n_points < 2 || !(opt.tau_max > 0.0)) throw InputError("fit_function: need n_points >= 2, tau_max > 0");
  Samples uniform;
  for (int i = 0; i < opt.n_points; ++i) {
    const double t = opt.tau_max * i / (opt.n_points - 1);
    uniform.tau.push_back(t);
    uniform.value.push_back(target(t));
  }
  ExponentialFit best = fit_real_exponentials(uniform, k, opt.fit);
  if (!opt.log_grid_retry) return best;

  Samples logs;
  logs.tau.push_back(0.0);
  const double lo = std::log(opt.tau_max * opt.log_grid_min_fraction);
  const double hi = std::log(opt.tau_max);
  for (int i = 0; i < opt.n_points - 1; ++i) logs.tau.push_back(std::exp(lo + (hi - lo) * i / (opt.n_points - 2)));
  for (double t : logs.tau) logs.value.push_back(target(t));
  FitOptions retry_opt = opt.fit;
  retry_opt.initial_rates = best.rates;
  ExponentialFit retry = fit_real_exponentials(logs, k, retry_opt);

  double retry_norm = 0.0, retry_l2 = 0.0;
  for (std::size_t i = 0; i < uniform.size(); ++i) {
    const double d = retry.eval(uniform.tau[i]) - uniform.value[i];
    retry_norm = std::max(retry_norm, std::abs(d));
    retry_l2 += d * d;
  }
  if (retry_norm < best.residual_norm) {
    retry.fit_grid = logs.tau;
    retry.grid = uniform.tau;
    retry.residual_norm = retry_norm;
    retry.residual_l2 = std::sqrt(retry_l2);
    return retry;
  }
  return best;
}

ExponentialSeries fit_to_series(const ExponentialFit& fit) {
  ExponentialSeries s;
  for (std::size_t k = 0; k < fit.rates.size(); ++k) s.terms.push_back({Complex(fit.weights[k], 0.0), Complex(0.0, -fit.rates[k])});
  return s;
}

double weight_optimality_residual(const ExponentialFit& fit, const Samples& samples) {
  const VectorXd rates = Eigen::Map<const VectorXd>(fit.rates.data(), fit.rates.size());
  const VectorXd w = Eigen::Map<const VectorXd>(fit.weights.data(), fit.weights.size());
  const VectorXd y = Eigen::Map<const VectorXd>(samples.value.data(), samples.value.size());
  const MatrixXd phi = design(samples.tau, rates);
  const double scale = phi.norm() * std::max(y.norm(), std::numeric_limits<double>::min());
  return (phi.transpose() * (phi * w - y)).norm() / scale;
}

}  // namespace pseudomode
