#include "pseudomode/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pseudomode/errors.hpp"
#include "pseudomode/quadrature.hpp"

namespace pseudomode {

namespace {

// x * coth(x), with the removable singularity at zero.
double x_coth_x(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) return 1.0 + x * x / 3.0;
  if (ax > 20.0) return ax;
  return x / std::tanh(x);
}

// coth for complex arguments with Re z > 0, written in exp(-2z) to avoid
// overflow at large beta.
Complex coth(Complex z) {
  const Complex e = std::exp(-2.0 * z);
  return (1.0 + e) / (1.0 - e);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void SpectralDensityModel::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw InputError("spectral density: alpha must be >= 0");
  if (!positive_finite(omega0)) throw InputError("spectral density: omega0 must be > 0");
  if (!positive_finite(gamma_width)) throw InputError("spectral density: Gamma must be > 0");
  if (!positive_finite(beta)) throw InputError("spectral density: beta must be > 0");
  if (omega0 <= 0.5 * gamma_width) {
    std::ostringstream msg;
    msg << "spectral density is overdamped (omega0 = " << omega0 << " <= Gamma/2 = " << 0.5 * gamma_width
        << "); only the underdamped regime is supported";
    throw DomainError(msg.str());
  }
}

double SpectralDensityModel::omega() const {
  return std::sqrt(omega0 * omega0 - 0.25 * gamma_width * gamma_width);
}

double SpectralDensityModel::j(double w) const {
  const double d = omega0 * omega0 - w * w;
  return alpha * omega0 * omega0 * gamma_width * w / (d * d + gamma_width * gamma_width * w * w);
}

double SpectralDensityModel::j_coth(double w) const {
  const double d = omega0 * omega0 - w * w;
  const double lorentz = alpha * omega0 * omega0 * gamma_width / (d * d + gamma_width * gamma_width * w * w);
  return lorentz * (2.0 / beta) * x_coth_x(0.5 * beta * w);
}

double SpectralDensityModel::thermal_spectrum(double w) const { return j_coth(w) + j(w); }

double ExponentialSeries::residue_real_sum() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.residue().real();
  return s;
}

double ExponentialSeries::residue_abs_sum() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.residue());
  return s;
}

double ExponentialSeries::amplitude_abs_sum() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.amplitude);
  return s;
}

double ExponentialSeries::min_lambda() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) m = std::min(m, t.lambda());
  return m;
}

Complex analytic_c0(const SpectralDensityModel& sd, double tau) {
  sd.validate();
  const double om = sd.omega();
  const double k = sd.alpha * sd.omega0 * sd.omega0 / (4.0 * om);
  const Complex w = coth(0.5 * sd.beta * Complex(om, -0.5 * sd.gamma_width));
  const double env = std::exp(-0.5 * sd.gamma_width * tau);
  const Complex up = std::exp(kI * om * tau);
  const Complex down = std::conj(up);
  // coth at Om - iG/2 belongs with the pole exp(-i Om tau); pairing it with
  // exp(+i Om tau) breaks agreement with the defining integral
  const Complex thermal = w * down + std::conj(w * down);
  return k * env * (thermal + down - up);
}

MatsubaraSpec matsubara_coefficients(const SpectralDensityModel& sd, int n_terms) {
  sd.validate();
  if (n_terms < 0) throw InputError("matsubara_coefficients: n_terms must be >= 0");
  const double om = sd.omega();
  const double g = sd.gamma_width;
  MatsubaraSpec spec;
  spec.coefficients.reserve(n_terms);
  spec.frequencies.reserve(n_terms);
  for (int n = 1; n <= n_terms; ++n) {
    const double nu = 2.0 * std::numbers::pi * n / sd.beta;
    // [nu^2 + (Om + iG/2)^2][nu^2 + (Om - iG/2)^2] = p^2 + q^2
    const double p = nu * nu + om * om - 0.25 * g * g;
    const double q = om * g;
    const double c = -2.0 * sd.alpha * g * sd.omega0 * sd.omega0 * nu / (sd.beta * (p * p + q * q));
    spec.coefficients.push_back(c);
    spec.frequencies.push_back(nu);
  }
  return spec;
}

double matsubara_sum(const MatsubaraSpec& spec, double tau) {
  double s = 0.0;
  // Smallest terms first.
  for (std::size_t i = spec.size(); i-- > 0;) s += spec.coefficients[i] * std::exp(-spec.frequencies[i] * tau);
  return s;
}

std::vector<double> spectral_breakpoints(const SpectralDensityModel& sd) {
  const double w0 = sd.omega0;
  const double g = sd.gamma_width;
  std::vector<double> pts = {0.0, 0.5 * w0, w0, 2.0 * w0, 4.0 * w0, std::max(8.0 * w0, 20.0)};
  for (double k : {1.0, 4.0, 16.0}) {
    if (w0 - k * g > 0.0) pts.push_back(w0 - k * g);
    pts.push_back(w0 + k * g);
  }
  if (sd.beta > 0.0) pts.push_back(std::min(40.0 / sd.beta, 64.0 * w0));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double spectral_tail_bound(const SpectralDensityModel& sd, double cutoff) {
  const double w0sq = sd.omega0 * sd.omega0;
  const double wsq = cutoff * cutoff;
  if (wsq <= 2.0 * w0sq) return std::numeric_limits<double>::infinity();
  // J(w) <= alpha w0^2 Gamma w / (w^2 - w0^2)^2 and coth is decreasing.
  const double coth_w = x_coth_x(0.5 * sd.beta * cutoff) / (0.5 * sd.beta * cutoff);
  return coth_w * sd.alpha * w0sq * sd.gamma_width / (2.0 * (wsq - w0sq));
}

Complex correlation_quadrature(const SpectralDensityModel& sd, double tau,
                               const CorrelationQuadratureOptions& opt) {
  sd.validate();
  if (!(tau >= 0.0)) throw InputError("correlation_quadrature: tau must be >= 0");
  if (sd.alpha == 0.0) return {0.0, 0.0};
  auto integrand = [&](double w) -> Complex {
    return {sd.j_coth(w) * std::cos(w * tau), -sd.j(w) * std::sin(w * tau)};
  };
  quadrature::HalfLineOptions hl;
  hl.abs_tol = opt.tol * std::numbers::pi;
  hl.cutoff = opt.omega_max;
  auto tail = [&](double w) { return spectral_tail_bound(sd, w); };
  const auto r = quadrature::integrate_half_line<Complex>(integrand, spectral_breakpoints(sd), tail, hl);
  return r.value / std::numbers::pi;
}

Complex pole_expansion_eval(const ExponentialSeries& series, double tau) {
  Complex s{0.0, 0.0};
  for (const auto& t : series.terms) s += t.eval(tau);
  return s;
}

ExponentialSeries c0_to_poles(const SpectralDensityModel& sd) {
  sd.validate();
  const double om = sd.omega();
  const double half_g = 0.5 * sd.gamma_width;
  const double k = sd.alpha * sd.omega0 * sd.omega0 / (4.0 * om);
  const Complex w = coth(0.5 * sd.beta * Complex(om, -half_g));
  ExponentialSeries s;
  // exp(+i Om tau) carries conj(coth) - 1, exp(-i Om tau) carries coth + 1.
  s.terms.push_back({k * (std::conj(w) - 1.0), Complex(-om, -half_g)});
  s.terms.push_back({k * (w + 1.0), Complex(om, -half_g)});
  return s;
}

double effective_sd(const ExponentialSeries& series, double omega) {
  double s = 0.0;
  for (const auto& t : series.terms) {
    const Complex r = t.residue();
    const double dw = omega - t.xi();
    const double lam = t.lambda();
    s += (r.real() * dw + r.imag() * lam) / (dw * dw + lam * lam);
  }
  return 2.0 * s;
}

}  // namespace pseudomode
