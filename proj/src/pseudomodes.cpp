#include "pseudomode/pseudomodes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
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

// Next non-comment, non-blank line.
bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

template <class T>
T read_keyword(std::istream& is, const std::string& key) {
  std::string line;
  if (!next_line(is, line)) throw InputError("unexpected end of file, expected '" + key + "'");
  std::istringstream ls(line);
  std::string word;
  T value{};
  if (!(ls >> word >> value) || word != key) throw InputError("expected '" + key + " <value>', got: " + line);
  return value;
}

}  // namespace

bool PseudomodeSet::is_hermitian(double tol) const {
  return std::all_of(modes.begin(), modes.end(),
                     [&](const Pseudomode& m) { return std::abs(m.g.imag()) <= tol * std::max(1.0, std::abs(m.g)); });
}

Complex PseudomodeSet::reconstructed_correlation(double tau) const {
  Complex s{0.0, 0.0};
  for (const auto& m : modes) s += m.g * m.g * std::exp(Complex(-m.lambda * tau, -m.xi * tau));
  return s;
}

std::vector<int> PseudomodeSet::fock_dims() const {
  std::vector<int> d;
  for (const auto& m : modes) d.push_back(m.fock_dim);
  return d;
}

void PseudomodeSet::validate() const {
  for (std::size_t l = 0; l < modes.size(); ++l) {
    const auto& m = modes[l];
    if (!(m.lambda > 0.0)) throw DomainError("pseudomode " + std::to_string(l) + ": lambda must be > 0");
    if (m.fock_dim < 2) throw InputError("pseudomode " + std::to_string(l) + ": fock_dim must be >= 2");
    if (!std::isfinite(m.xi) || !std::isfinite(m.g.real()) || !std::isfinite(m.g.imag()))
      throw InputError("pseudomode " + std::to_string(l) + ": non-finite parameter");
  }
  if (!std::isfinite(dephasing_rate)) throw InputError("pseudomode set: non-finite dephasing rate");
}

PseudomodeSet series_to_pseudomodes(const ExponentialSeries& series, const std::vector<int>& fock_dims) {
  if (fock_dims.size() != series.size())
    throw InputError("series_to_pseudomodes: need one Fock dimension per term");
  PseudomodeSet set;
  for (std::size_t l = 0; l < series.size(); ++l) {
    const PoleTerm& t = series.terms[l];
    if (!(t.lambda() > 0.0)) {
      std::ostringstream msg;
      msg << "series_to_pseudomodes: term " << l << " does not decay (Im z = " << t.z.imag() << ")";
      throw DomainError(msg.str());
    }
    if (fock_dims[l] < 2) throw InputError("series_to_pseudomodes: Fock dimensions must be >= 2");
    // Drop a signed zero so sqrt(-1 - 0i) lands on +i rather than -i.
    const Complex a(t.amplitude.real(), t.amplitude.imag() == 0.0 ? 0.0 : t.amplitude.imag());
    set.modes.push_back({t.xi(), t.lambda(), std::sqrt(a), fock_dims[l]});
  }
  return set;
}

TerminatorSplit terminator_split(const SpectralDensityModel& sd, int n_total) {
  if (n_total < 2) throw InputError("terminator_split: n_total must be >= 2");
  const MatsubaraSpec spec = matsubara_coefficients(sd, n_total);
  TerminatorSplit out;
  out.kept.terms.push_back({Complex(spec.coefficients[0], 0.0), Complex(0.0, -spec.frequencies[0])});
  for (int n = n_total - 1; n >= 1; --n) out.gamma_d += spec.coefficients[n] / spec.frequencies[n];
  return out;
}

std::string to_string(PipelineMode mode) { return mode == PipelineMode::full_fit ? "full_fit" : "terminator"; }

PipelineMode pipeline_mode_from_string(const std::string& name) {
  if (name == "full_fit" || name == "full-fit") return PipelineMode::full_fit;
  if (name == "terminator") return PipelineMode::terminator;
  throw InputError("unknown pipeline mode '" + name + "' (expected full_fit or terminator)");
}

int default_aux_dim(int resonant_dim) { return std::clamp(resonant_dim - 2, 2, 3); }

PipelineResult spin_boson_pipeline(const SpectralDensityModel& sd, const PipelineOptions& opt) {
  sd.validate();
  if (opt.resonant_dim < 2) throw InputError("spin_boson_pipeline: resonant_dim must be >= 2");
  const int aux = opt.aux_dim.value_or(default_aux_dim(opt.resonant_dim));
  if (aux < 2) throw InputError("spin_boson_pipeline: aux_dim must be >= 2");

  PipelineResult out;
  out.series = c0_to_poles(sd);
  std::vector<int> dims(out.series.size(), opt.resonant_dim);
  double gamma_d = 0.0;

  if (opt.mode == PipelineMode::full_fit) {
    if (opt.k_fit < 1) throw InputError("spin_boson_pipeline: k_fit must be >= 1");
    out.matsubara = matsubara_coefficients(sd, opt.matsubara_terms);
    const MatsubaraSpec& spec = out.matsubara;
    out.fit = fit_function([&](double t) { return matsubara_sum(spec, t); }, opt.k_fit, opt.fit);
    for (const auto& term : fit_to_series(*out.fit).terms) {
      out.series.terms.push_back(term);
      dims.push_back(aux);
    }
  } else {
    const TerminatorSplit split = terminator_split(sd, opt.matsubara_terms);
    out.matsubara = matsubara_coefficients(sd, opt.matsubara_terms);
    out.series.terms.push_back(split.kept.terms.front());
    dims.push_back(aux);
    gamma_d = split.gamma_d;
  }
  out.modes = series_to_pseudomodes(out.series, dims);
  out.modes.dephasing_rate = gamma_d;
  return out;
}

void write_series(std::ostream& os, const ExponentialSeries& series) {
  os << "# pseudomode exponential-series v1\n"
     << "# C(tau) = sum_l a_l exp(-i z_l tau); residue r_l = i a_l\n"
     << "# columns: re_a im_a re_z im_z\n"
     << "terms " << series.size() << "\n";
  for (const auto& t : series.terms)
    os << g17(t.amplitude.real()) << ' ' << g17(t.amplitude.imag()) << ' ' << g17(t.z.real()) << ' '
       << g17(t.z.imag()) << '\n';
}

ExponentialSeries read_series(std::istream& is) {
  const auto n = read_keyword<std::size_t>(is, "terms");
  ExponentialSeries s;
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line(is, line)) throw InputError("series file: expected " + std::to_string(n) + " terms");
    std::istringstream ls(line);
    double ar, ai, zr, zi;
    if (!(ls >> ar >> ai >> zr >> zi)) throw InputError("series file: malformed term line: " + line);
    s.terms.push_back({Complex(ar, ai), Complex(zr, zi)});
  }
  return s;
}

void write_pseudomode_set(std::ostream& os, const PseudomodeSet& set) {
  os << "# pseudomode set v1\n"
     << "# B' = sum_l g_l (b_l + b_l^dag); dissipation 2 lambda_l per mode\n"
     << "dephasing_rate " << g17(set.dephasing_rate) << "\n"
     << "modes " << set.modes.size() << "\n"
     << "# columns: xi lambda re_g im_g fock_dim\n";
  for (const auto& m : set.modes)
    os << g17(m.xi) << ' ' << g17(m.lambda) << ' ' << g17(m.g.real()) << ' ' << g17(m.g.imag()) << ' '
       << m.fock_dim << '\n';
}

PseudomodeSet read_pseudomode_set(std::istream& is) {
  PseudomodeSet set;
  set.dephasing_rate = read_keyword<double>(is, "dephasing_rate");
  const auto n = read_keyword<std::size_t>(is, "modes");
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line(is, line)) throw InputError("pseudomode file: expected " + std::to_string(n) + " modes");
    std::istringstream ls(line);
    Pseudomode m;
    double gr, gi;
    if (!(ls >> m.xi >> m.lambda >> gr >> gi >> m.fock_dim))
      throw InputError("pseudomode file: malformed mode line: " + line);
    m.g = Complex(gr, gi);
    set.modes.push_back(m);
  }
  set.validate();
  return set;
}

}  // namespace pseudomode
