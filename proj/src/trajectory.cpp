#include "pseudomode/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pseudomode/errors.hpp"

namespace pseudomode {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (s.find_first_not_of(" \t\r", pos) != std::string::npos) throw InputError("bad number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw InputError("bad number '" + s + "'");
  } catch (const std::out_of_range&) {
    throw InputError("number out of range '" + s + "'");
  }
}

double lerp_at(const std::vector<double>& t, const std::vector<double>& y, double x) {
  if (x <= t.front()) return y.front();
  if (x >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
  return (1.0 - w) * y[k - 1] + w * y[k];
}

constexpr const char* kStateCols[] = {"re_rho_ee", "im_rho_ee", "re_rho_eg", "im_rho_eg",
                                      "re_rho_ge", "im_rho_ge", "re_rho_gg", "im_rho_gg"};

}  // namespace

void Trajectory::push(double t, const Matrix2c& rho) {
  times.push_back(t);
  reduced_states.push_back(rho);
  sz.push_back((rho(0, 0) - rho(1, 1)).real());
  sx.push_back((rho(0, 1) + rho(1, 0)).real());
  // Tr(sy rho) = i (rho_eg - rho_ge)
  sy.push_back((kI * (rho(0, 1) - rho(1, 0))).real());
}

double Trajectory::max_trace_defect() const {
  double m = 0.0;
  for (const auto& r : reduced_states) m = std::max(m, std::abs(r.trace() - 1.0));
  return m;
}

double Trajectory::max_hermiticity_defect() const {
  double m = 0.0;
  for (const auto& r : reduced_states) m = std::max(m, (r - r.adjoint()).cwiseAbs().maxCoeff());
  return m;
}

double Trajectory::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : reduced_states) {
    const Matrix2c herm = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(herm, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

double Trajectory::max_top_fock() const {
  double m = 0.0;
  for (const auto& series : top_fock)
    for (double p : series) m = std::max(m, std::abs(p));
  return m;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (const char* c : kStateCols) os << ',' << c;
  os << ",sz,sx,sy";
  for (std::size_t l = 0; l < traj.top_fock.size(); ++l) os << ",top_fock_" << l;
  os << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Matrix2c& r = traj.reduced_states[k];
    os << g17(traj.times[k]);
    const Complex entries[4] = {r(0, 0), r(0, 1), r(1, 0), r(1, 1)};
    for (const Complex& e : entries) os << ',' << g17(e.real()) << ',' << g17(e.imag());
    os << ',' << g17(traj.sz[k]) << ',' << g17(traj.sx[k]) << ',' << g17(traj.sy[k]);
    for (const auto& series : traj.top_fock) os << ',' << g17(series[k]);
    os << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("trajectory CSV: empty input");
  const auto header = split_csv(line);
  if (header.size() < 12 || header[0] != "t") throw InputError("trajectory CSV: unexpected header: " + line);
  for (std::size_t c = 0; c < 8; ++c)
    if (header[c + 1] != kStateCols[c]) throw InputError("trajectory CSV: unexpected column '" + header[c + 1] + "'");
  const std::size_t modes = header.size() - 12;

  Trajectory traj;
  traj.top_fock.assign(modes, {});
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw InputError("trajectory CSV: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(header.size()));
    std::vector<double> v(cells.size());
    std::transform(cells.begin(), cells.end(), v.begin(), parse_double);
    Matrix2c r;
    r << Complex(v[1], v[2]), Complex(v[3], v[4]), Complex(v[5], v[6]), Complex(v[7], v[8]);
    traj.times.push_back(v[0]);
    traj.reduced_states.push_back(r);
    traj.sz.push_back(v[9]);
    traj.sx.push_back(v[10]);
    traj.sy.push_back(v[11]);
    for (std::size_t l = 0; l < modes; ++l) traj.top_fock[l].push_back(v[12 + l]);
  }
  return traj;
}

Trajectory resample(const Trajectory& traj, const std::vector<double>& times) {
  if (traj.size() < 2) throw InputError("resample: need at least two samples");
  std::vector<double> comp[8];
  for (const auto& r : traj.reduced_states) {
    const Complex e[4] = {r(0, 0), r(0, 1), r(1, 0), r(1, 1)};
    for (int k = 0; k < 4; ++k) {
      comp[2 * k].push_back(e[k].real());
      comp[2 * k + 1].push_back(e[k].imag());
    }
  }
  Trajectory out;
  out.warnings = traj.warnings;
  out.top_fock.assign(traj.top_fock.size(), {});
  for (double t : times) {
    double v[8];
    for (int k = 0; k < 8; ++k) v[k] = lerp_at(traj.times, comp[k], t);
    Matrix2c r;
    r << Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5]), Complex(v[6], v[7]);
    out.times.push_back(t);
    out.reduced_states.push_back(r);
    out.sz.push_back(lerp_at(traj.times, traj.sz, t));
    out.sx.push_back(lerp_at(traj.times, traj.sx, t));
    out.sy.push_back(lerp_at(traj.times, traj.sy, t));
    for (std::size_t l = 0; l < traj.top_fock.size(); ++l)
      out.top_fock[l].push_back(lerp_at(traj.times, traj.top_fock[l], t));
  }
  return out;
}

const ObservableDiff& CompareReport::find(const std::string& name) const {
  for (const auto& d : diffs)
    if (d.name == name) return d;
  throw InputError("compare report: no observable '" + name + "'");
}

CompareReport compare_trajectories(const Trajectory& a, const Trajectory& b, const CompareOptions& opt) {
  if (a.size() == 0 || b.size() == 0) throw InputError("compare: empty trajectory");
  bool same = a.size() == b.size();
  for (std::size_t k = 0; same && k < a.size(); ++k)
    same = std::abs(a.times[k] - b.times[k]) <= 1e-9 * std::max(1.0, std::abs(a.times[k]));

  CompareReport rep;
  rep.threshold = opt.threshold;
  rep.gate = opt.gate;
  const Trajectory* pa = &a;
  const Trajectory* pb = &b;
  Trajectory ra, rb;
  if (!same) {
    if (!opt.interpolate) throw InputError("compare: time grids differ; enable interpolation to resample");
    // Coarser grid over the common window.
    const Trajectory& coarse = a.size() <= b.size() ? a : b;
    const double lo = std::max(a.times.front(), b.times.front());
    const double hi = std::min(a.times.back(), b.times.back());
    std::vector<double> grid;
    for (double t : coarse.times)
      if (t >= lo - 1e-12 && t <= hi + 1e-12) grid.push_back(t);
    if (grid.size() < 2) throw InputError("compare: time windows do not overlap");
    ra = resample(a, grid);
    rb = resample(b, grid);
    pa = &ra;
    pb = &rb;
    rep.interpolated = true;
  }
  rep.points = pa->size();

  auto add = [&](const std::string& name, auto&& value) {
    ObservableDiff d;
    d.name = name;
    double sum = 0.0;
    for (std::size_t k = 0; k < pa->size(); ++k) {
      const double e = value(k);
      sum += e;
      if (e > d.max_abs) {
        d.max_abs = e;
        d.t_at_max = pa->times[k];
      }
    }
    d.mean_abs = sum / static_cast<double>(pa->size());
    rep.diffs.push_back(d);
  };
  add("sz", [&](std::size_t k) { return std::abs(pa->sz[k] - pb->sz[k]); });
  add("sx", [&](std::size_t k) { return std::abs(pa->sx[k] - pb->sx[k]); });
  add("sy", [&](std::size_t k) { return std::abs(pa->sy[k] - pb->sy[k]); });
  add("rho_S", [&](std::size_t k) {
    return (pa->reduced_states[k] - pb->reduced_states[k]).cwiseAbs().maxCoeff();
  });
  add("abs_rho_eg", [&](std::size_t k) {
    return std::abs(std::abs(pa->reduced_states[k](0, 1)) - std::abs(pb->reduced_states[k](0, 1)));
  });
  rep.pass = rep.find(opt.gate).max_abs < opt.threshold;
  return rep;
}

std::vector<double> uniform_grid(double t_max, int n_points) {
  if (!(t_max > 0.0)) throw InputError("time grid: t_max must be > 0");
  if (n_points < 2) throw InputError("time grid: n_points must be >= 2");
  std::vector<double> t(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) t[static_cast<std::size_t>(k)] = t_max * k / (n_points - 1);
  return t;
}

}  // namespace pseudomode
