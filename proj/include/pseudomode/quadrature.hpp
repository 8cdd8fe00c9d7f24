#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature on finite panels plus a
// half-line driver that extends the upper cutoff until an analytic tail
// bound drops below tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <sstream>
#include <vector>

#include "pseudomode/errors.hpp"

namespace pseudomode::quadrature {

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = true;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 200000;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive integration of f over [a, b]; bisects the panel with the
/// largest local error until the summed error estimate meets tolerance.
template <class T, class F>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {}) {
  using Seg = detail::Segment<T>;
  std::priority_queue<Seg> queue;
  Result<T> out;
  if (a == b) return out;

  Seg first = detail::gk15<T>(f, a, b);
  out.evaluations = 15;
  T total = first.value;
  double total_err = first.error;
  queue.push(first);

  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (total_err <= target) break;
    if (queue.size() >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    Seg worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    queue.pop();
    Seg left = detail::gk15<T>(f, worst.a, mid);
    Seg right = detail::gk15<T>(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  // Re-sum from the panels to drop accumulated rounding in the running totals.
  out.intervals = queue.size();
  out.value = T{};
  out.error = 0.0;
  while (!queue.empty()) {
    out.value += queue.top().value;
    out.error += queue.top().error;
    queue.pop();
  }
  return out;
}

struct HalfLineOptions {
  double abs_tol = 1e-10;
  /// Fixed upper cutoff; zero means extend until tail_bound(cutoff) < abs_tol / 2.
  double cutoff = 0.0;
  double max_cutoff = 1e8;
  std::size_t max_intervals_per_panel = 200000;
};

/// Integrates f over [0, inf) as a sum of adaptive panels between the given
/// breakpoints, then doubles the upper limit until `tail_bound(W)` (an upper
/// bound on |integral from W to inf|) is below half the tolerance. The tail
/// bound is added to the reported error.
template <class T, class F, class Tail>
Result<T> integrate_half_line(F&& f, std::vector<double> breakpoints, Tail&& tail_bound,
                              const HalfLineOptions& opt = {}) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  if (breakpoints.empty() || breakpoints.front() != 0.0) breakpoints.insert(breakpoints.begin(), 0.0);
  if (opt.cutoff > 0.0) {
    std::erase_if(breakpoints, [&](double x) { return x >= opt.cutoff; });
    breakpoints.push_back(opt.cutoff);
  }
  if (breakpoints.size() < 2) throw InputError("integrate_half_line: need a positive breakpoint");

  Options panel_opt;
  panel_opt.abs_tol = opt.abs_tol / 20.0;
  panel_opt.max_intervals = opt.max_intervals_per_panel;

  Result<T> out;
  auto add_panel = [&](double lo, double hi) {
    Result<T> r = integrate<T>(f, lo, hi, panel_opt);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << lo << ", " << hi << "]: error estimate "
          << r.error << " after " << r.intervals << " intervals";
      throw NumericalError(msg.str());
    }
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.intervals += r.intervals;
  };

  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) add_panel(breakpoints[i], breakpoints[i + 1]);

  double upper = breakpoints.back();
  if (opt.cutoff <= 0.0) {
    while (tail_bound(upper) > 0.5 * opt.abs_tol) {
      if (upper > opt.max_cutoff) {
        std::ostringstream msg;
        msg << "quadrature tail bound " << tail_bound(upper) << " still above tolerance at cutoff "
            << upper;
        throw NumericalError(msg.str());
      }
      add_panel(upper, 2.0 * upper);
      upper *= 2.0;
    }
  }
  out.error += tail_bound(upper);
  return out;
}

}  // namespace pseudomode::quadrature
