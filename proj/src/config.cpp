#include "pseudomode/config.hpp"

#include <fstream>
#include <sstream>

#include "pseudomode/errors.hpp"

namespace pseudomode {

using nlohmann::json;

namespace {

struct KeyDoc {
  const char* path;
  const char* text;
};

constexpr KeyDoc kDocs[] = {
    {"bath.alpha", "coupling strength alpha (>= 0)"},
    {"bath.omega0", "resonance frequency omega0 (> gamma_width / 2)"},
    {"bath.gamma_width", "resonance width Gamma"},
    {"bath.beta", "inverse temperature"},
    {"system.epsilon", "bias epsilon"},
    {"system.delta_x", "tunnelling Delta"},
    {"system.initial_state", "excited | ground | plus"},
    {"pipeline.mode", "full_fit | terminator"},
    {"pipeline.k_fit", "exponentials fitted to the Matsubara sum"},
    {"pipeline.matsubara_terms", "Matsubara terms N"},
    {"pipeline.seed", "multistart RNG seed"},
    {"pipeline.multistart", "fit restarts"},
    {"pipeline.fit_tau_max", "fit window [0, tau_max]"},
    {"pipeline.fit_points", "uniform fit samples"},
    {"fock.resonant_dim", "Fock dimension of the two resonant modes"},
    {"fock.aux_dim", "Fock dimension of fit/Matsubara modes (0: derived)"},
    {"fock.auto", "choose resonant_dim by a convergence sweep over fock.schedule"},
    {"fock.schedule", "increasing resonant dimensions for sweeps"},
    {"time.t_max", "final time"},
    {"time.n_points", "uniform output points on [0, t_max]"},
    {"tolerances.propagation", "local propagation tolerance per unit time"},
    {"tolerances.krylov_dim", "Krylov subspace dimension"},
    {"tolerances.top_fock", "top Fock population warning threshold"},
    {"tolerances.convergence", "sweep threshold on max |d sz|"},
    {"tolerances.compare", "compare pass threshold on max |d sz|"},
    {"tolerances.max_superoperator_dim", "largest assembled Liouville dimension"},
    {"tolerances.max_state_dim", "largest Liouville dimension overall"},
    {"tolerances.qrt", "qrt-check pass threshold"},
    {"heom.depth", "hierarchy depth"},
    {"heom.explicit_matsubara", "Matsubara terms kept as exponentials"},
    {"heom.terminator", "fold the remaining terms into a Markovian closure"},
    {"heom.scaled", "scaled auxiliaries"},
    {"heom.depth_tolerance", "warn when depth d and d - 1 differ by more (0: off)"},
    {"output.directory", "output directory"},
    {"output.prefix", "file name prefix"},
};

template <class T>
T get(const json& doc, const char* section, const char* key) {
  try {
    return doc.at(section).at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config ") + section + "." + key + ": " + e.what());
  }
}

void check_known_keys(const json& doc, const json& schema) {
  if (!doc.is_object()) throw InputError("config: top level must be an object");
  for (const auto& [section, body] : doc.items()) {
    if (!schema.contains(section)) throw InputError("config: unknown section '" + section + "'");
    if (!body.is_object()) throw InputError("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items())
      if (!schema.at(section).contains(key)) throw InputError("config: unknown key '" + section + "." + key + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  bath.validate();
  if (!std::isfinite(system.epsilon) || !std::isfinite(system.delta_x)) throw InputError("config: system must be finite");
  if (initial_state != "excited" && initial_state != "ground" && initial_state != "plus")
    throw InputError("config: system.initial_state must be excited, ground or plus");
  if (k_fit < 1) throw InputError("config: pipeline.k_fit must be >= 1");
  if (matsubara_terms < 2) throw InputError("config: pipeline.matsubara_terms must be >= 2");
  if (multistart < 1) throw InputError("config: pipeline.multistart must be >= 1");
  if (!(fit_tau_max > 0.0) || fit_points < 4) throw InputError("config: fit window must be positive with >= 4 points");
  if (resonant_dim < 2) throw InputError("config: fock.resonant_dim must be >= 2");
  if (aux_dim != 0 && aux_dim < 2) throw InputError("config: fock.aux_dim must be 0 or >= 2");
  for (std::size_t k = 0; k < fock_schedule.size(); ++k) {
    if (fock_schedule[k] < 2) throw InputError("config: fock.schedule entries must be >= 2");
    if (k > 0 && fock_schedule[k] <= fock_schedule[k - 1]) throw InputError("config: fock.schedule must increase");
  }
  if (fock_auto && fock_schedule.size() < 2) throw InputError("config: fock.auto needs at least two schedule entries");
  if (!(t_max > 0.0)) throw InputError("config: time.t_max must be > 0");
  if (n_points < 2) throw InputError("config: time.n_points must be >= 2");
  if (!(propagation_tol > 0.0) || krylov_dim < 2) throw InputError("config: bad propagation tolerances");
  if (heom_depth < 1) throw InputError("config: heom.depth must be >= 1");
  if (heom_explicit_matsubara < 0 || heom_explicit_matsubara > matsubara_terms)
    throw InputError("config: heom.explicit_matsubara out of range");
}

PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions p;
  p.mode = mode;
  p.k_fit = k_fit;
  p.matsubara_terms = matsubara_terms;
  p.resonant_dim = resonant_dim;
  if (aux_dim > 0) p.aux_dim = aux_dim;
  p.fit.tau_max = fit_tau_max;
  p.fit.n_points = fit_points;
  p.fit.fit.seed = seed;
  p.fit.fit.multistart = multistart;
  return p;
}

SimulationOptions RunConfig::simulation_options() const {
  SimulationOptions s;
  s.propagation.tolerance = propagation_tol;
  s.propagation.krylov_dim = krylov_dim;
  s.propagation.top_fock_threshold = top_fock_threshold;
  s.assembly.max_superoperator_dim = max_superoperator_dim;
  s.assembly.max_state_dim = max_state_dim;
  return s;
}

HeomConfig RunConfig::heom_config() const {
  HeomConfig h = heom_config_from_sd(bath, heom_depth, heom_explicit_matsubara, matsubara_terms, heom_terminator);
  h.scaled_ados = heom_scaled;
  h.depth_tolerance = heom_depth_tolerance;
  return h;
}

Matrix2c RunConfig::initial_rho() const {
  Matrix2c r = Matrix2c::Zero();
  if (initial_state == "excited") {
    r(0, 0) = 1.0;
  } else if (initial_state == "ground") {
    r(1, 1) = 1.0;
  } else {
    r.setConstant(0.5);
  }
  return r;
}

std::vector<double> RunConfig::time_grid() const { return uniform_grid(t_max, n_points); }

json config_to_json(const RunConfig& c) {
  return json{
      {"bath", {{"alpha", c.bath.alpha}, {"omega0", c.bath.omega0}, {"gamma_width", c.bath.gamma_width}, {"beta", c.bath.beta}}},
      {"system", {{"epsilon", c.system.epsilon}, {"delta_x", c.system.delta_x}, {"initial_state", c.initial_state}}},
      {"pipeline",
       {{"mode", to_string(c.mode)},
        {"k_fit", c.k_fit},
        {"matsubara_terms", c.matsubara_terms},
        {"seed", c.seed},
        {"multistart", c.multistart},
        {"fit_tau_max", c.fit_tau_max},
        {"fit_points", c.fit_points}}},
      {"fock", {{"resonant_dim", c.resonant_dim}, {"aux_dim", c.aux_dim}, {"auto", c.fock_auto}, {"schedule", c.fock_schedule}}},
      {"time", {{"t_max", c.t_max}, {"n_points", c.n_points}}},
      {"tolerances",
       {{"propagation", c.propagation_tol},
        {"krylov_dim", c.krylov_dim},
        {"top_fock", c.top_fock_threshold},
        {"convergence", c.convergence_threshold},
        {"compare", c.compare_threshold},
        {"max_superoperator_dim", c.max_superoperator_dim},
        {"max_state_dim", c.max_state_dim},
        {"qrt", c.qrt_tolerance}}},
      {"heom",
       {{"depth", c.heom_depth},
        {"explicit_matsubara", c.heom_explicit_matsubara},
        {"terminator", c.heom_terminator},
        {"scaled", c.heom_scaled},
        {"depth_tolerance", c.heom_depth_tolerance}}},
      {"output", {{"directory", c.output_dir}, {"prefix", c.prefix}}},
  };
}

RunConfig config_from_json(const json& j) {
  const json schema = config_to_json(RunConfig{});
  check_known_keys(j, schema);
  json d = schema;
  d.merge_patch(j);

  RunConfig c;
  c.bath.alpha = get<double>(d, "bath", "alpha");
  c.bath.omega0 = get<double>(d, "bath", "omega0");
  c.bath.gamma_width = get<double>(d, "bath", "gamma_width");
  c.bath.beta = get<double>(d, "bath", "beta");
  c.system.epsilon = get<double>(d, "system", "epsilon");
  c.system.delta_x = get<double>(d, "system", "delta_x");
  c.initial_state = get<std::string>(d, "system", "initial_state");
  c.mode = pipeline_mode_from_string(get<std::string>(d, "pipeline", "mode"));
  c.k_fit = get<int>(d, "pipeline", "k_fit");
  c.matsubara_terms = get<int>(d, "pipeline", "matsubara_terms");
  c.seed = get<std::uint64_t>(d, "pipeline", "seed");
  c.multistart = get<int>(d, "pipeline", "multistart");
  c.fit_tau_max = get<double>(d, "pipeline", "fit_tau_max");
  c.fit_points = get<int>(d, "pipeline", "fit_points");
  c.resonant_dim = get<int>(d, "fock", "resonant_dim");
  c.aux_dim = get<int>(d, "fock", "aux_dim");
  c.fock_auto = get<bool>(d, "fock", "auto");
  c.fock_schedule = get<std::vector<int>>(d, "fock", "schedule");
  c.t_max = get<double>(d, "time", "t_max");
  c.n_points = get<int>(d, "time", "n_points");
  c.propagation_tol = get<double>(d, "tolerances", "propagation");
  c.krylov_dim = get<int>(d, "tolerances", "krylov_dim");
  c.top_fock_threshold = get<double>(d, "tolerances", "top_fock");
  c.convergence_threshold = get<double>(d, "tolerances", "convergence");
  c.compare_threshold = get<double>(d, "tolerances", "compare");
  c.max_superoperator_dim = get<std::size_t>(d, "tolerances", "max_superoperator_dim");
  c.max_state_dim = get<std::size_t>(d, "tolerances", "max_state_dim");
  c.qrt_tolerance = get<double>(d, "tolerances", "qrt");
  c.heom_depth = get<int>(d, "heom", "depth");
  c.heom_explicit_matsubara = get<int>(d, "heom", "explicit_matsubara");
  c.heom_terminator = get<bool>(d, "heom", "terminator");
  c.heom_scaled = get<bool>(d, "heom", "scaled");
  c.heom_depth_tolerance = get<double>(d, "heom", "depth_tolerance");
  c.output_dir = get<std::string>(d, "output", "directory");
  c.prefix = get<std::string>(d, "output", "prefix");
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  try {
    return config_from_json(json::parse(in, nullptr, true, true));
  } catch (const json::parse_error& e) {
    throw InputError("config file '" + path + "': " + e.what());
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw InputError("override '" + assignment + "' is not of the form section.key=value");
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const std::string raw = assignment.substr(eq + 1);
  const json schema = config_to_json(RunConfig{});
  if (!schema.contains(section) || !schema.at(section).contains(key))
    throw InputError("override: unknown key '" + section + "." + key + "'");
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  doc[section][key] = value;
}

std::string config_reference() {
  const json defaults = config_to_json(RunConfig{});
  std::ostringstream os;
  os << "Config keys (JSON sections; override with --set section.key=value):\n";
  for (const auto& d : kDocs) {
    const std::string path = d.path;
    const auto dot = path.find('.');
    const json& v = defaults.at(path.substr(0, dot)).at(path.substr(dot + 1));
    os << "  " << path << " = " << v.dump() << "\n      " << d.text << "\n";
  }
  return os.str();
}

}  // namespace pseudomode
