#include "mixsep/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "mixsep/error.hpp"
#include "mixsep/io_util.hpp"

namespace mixsep {

namespace {

struct Location {
  const std::string& origin;
  std::size_t line;
  std::size_t column;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError,
                origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
  }
};

double to_double(const std::string& v, const Location& at) {
  try {
    return parse_double(v, "value");
  } catch (const Error&) {
    at.fail("expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& v, const Location& at) {
  const double d = to_double(v, at);
  if (d != std::floor(d) || std::abs(d) > 9e15) at.fail("expected an integer, got '" + v + "'");
  return static_cast<long>(d);
}

bool to_bool(const std::string& v, const Location& at) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  at.fail("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const Location& at) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(trim(item), at));
  return out;
}

std::string print_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += format_double(v[k]);
  }
  return s;
}

const char* mode_name(ModeSelection m) {
  switch (m) {
    case ModeSelection::Full: return "full";
    case ModeSelection::ThomasFermi: return "tf";
    default: return "both";
  }
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(ScenarioConfig&, const std::string&, const Location&)> parse;
  std::function<std::optional<std::string>(const ScenarioConfig&)> print;
};

template <typename T>
Key number(const char* section, const char* name, T ScenarioConfig::*field) {
  return {section, name,
          [field](ScenarioConfig& c, const std::string& v, const Location& at) {
            if constexpr (std::is_same_v<T, double>) {
              c.*field = to_double(v, at);
            } else {
              c.*field = static_cast<T>(to_long(v, at));
            }
          },
          [field](const ScenarioConfig& c) -> std::optional<std::string> {
            if constexpr (std::is_same_v<T, double>) {
              return format_double(c.*field);
            } else {
              return std::to_string(c.*field);
            }
          }};
}

Key optional_number(const char* section, const char* name, std::optional<double> ScenarioConfig::*field) {
  return {section, name,
          [field](ScenarioConfig& c, const std::string& v, const Location& at) { c.*field = to_double(v, at); },
          [field](const ScenarioConfig& c) -> std::optional<std::string> {
            if (!(c.*field)) return std::nullopt;
            return format_double(*(c.*field));
          }};
}

Key list(const char* section, const char* name, std::vector<double> ScenarioConfig::*field) {
  return {section, name,
          [field](ScenarioConfig& c, const std::string& v, const Location& at) { c.*field = to_list(v, at); },
          [field](const ScenarioConfig& c) -> std::optional<std::string> {
            if ((c.*field).empty()) return std::nullopt;
            return print_list(c.*field);
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(number("lithium", "mass_u", &ScenarioConfig::li_mass_u));
    k.push_back(number("lithium", "nu_radial_hz", &ScenarioConfig::li_nu_radial_hz));
    k.push_back(number("lithium", "nu_axial_hz", &ScenarioConfig::li_nu_axial_hz));
    k.push_back(number("potassium", "mass_u", &ScenarioConfig::k_mass_u));
    k.push_back(number("potassium", "a_bb_a0", &ScenarioConfig::k_a_bb_a0));
    k.push_back(number("potassium", "polarizability_factor", &ScenarioConfig::k_polarizability));
    k.push_back(optional_number("potassium", "nu_radial_hz", &ScenarioConfig::k_nu_radial_hz));
    k.push_back(optional_number("potassium", "nu_axial_hz", &ScenarioConfig::k_nu_axial_hz));
    k.push_back(number("mixture", "n_bosons", &ScenarioConfig::n_bosons));
    k.push_back(number("mixture", "n_fermions", &ScenarioConfig::n_fermions));
    k.push_back(number("mixture", "beta", &ScenarioConfig::beta));
    k.push_back(number("mixture", "alpha", &ScenarioConfig::alpha));
    k.push_back(number("mixture", "l3_cm6_per_s", &ScenarioConfig::l3_cm6_per_s));
    k.push_back({"mixture", "thermal_model",
                 [](ScenarioConfig& c, const std::string& v, const Location& at) {
                   try {
                     c.thermal_model = parse_thermal_model(v);
                   } catch (const Error& e) {
                     at.fail(e.what());
                   }
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return to_string(c.thermal_model); }});
    k.push_back(number("resonance", "b0_gauss", &ScenarioConfig::b0_gauss));
    k.push_back(number("resonance", "delta_gauss", &ScenarioConfig::delta_gauss));
    k.push_back(number("resonance", "a_bg_a0", &ScenarioConfig::a_bg_a0));
    k.push_back(number("resonance", "pole_epsilon_gauss", &ScenarioConfig::pole_epsilon_gauss));
    k.push_back(number("grid", "n_rho", &ScenarioConfig::n_rho));
    k.push_back(number("grid", "n_z", &ScenarioConfig::n_z));
    k.push_back(number("grid", "stretch_rho", &ScenarioConfig::stretch_rho));
    k.push_back(number("grid", "stretch_z", &ScenarioConfig::stretch_z));
    k.push_back(number("grid", "box_factor", &ScenarioConfig::box_factor));
    k.push_back({"solver", "mode",
                 [](ScenarioConfig& c, const std::string& v, const Location& at) {
                   if (v == "both") c.mode = ModeSelection::Both;
                   else if (v == "full") c.mode = ModeSelection::Full;
                   else if (v == "tf") c.mode = ModeSelection::ThomasFermi;
                   else at.fail("mode must be both, full or tf, got '" + v + "'");
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return mode_name(c.mode); }});
    k.push_back(number("solver", "lambda_w", &ScenarioConfig::lambda_w));
    k.push_back(number("solver", "tol_energy", &ScenarioConfig::tol_energy));
    k.push_back(number("solver", "patience", &ScenarioConfig::patience));
    k.push_back(number("solver", "max_iter", &ScenarioConfig::max_iter));
    k.push_back(number("solver", "initial_step", &ScenarioConfig::initial_step));
    k.push_back(number("solver", "max_step", &ScenarioConfig::max_step));
    k.push_back(number("solver", "momentum", &ScenarioConfig::momentum));
    k.push_back(number("solver", "max_rejections", &ScenarioConfig::max_rejections));
    k.push_back(number("solver", "warm_noise", &ScenarioConfig::warm_noise));
    k.push_back({"solver", "cold_start",
                 [](ScenarioConfig& c, const std::string& v, const Location& at) { c.cold_start = to_bool(v, at); },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   return std::string(c.cold_start ? "true" : "false");
                 }});
    k.push_back(list("sweep", "a_bf_a0", &ScenarioConfig::a_bf_a0));
    k.push_back(list("sweep", "b_gauss", &ScenarioConfig::b_gauss));
    k.push_back({"abel", "method",
                 [](ScenarioConfig& c, const std::string& v, const Location& at) {
                   try {
                     c.abel_method = parse_abel_method(v);
                   } catch (const Error& e) {
                     at.fail(e.what());
                   }
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return to_string(c.abel_method); }});
    k.push_back(number("abel", "noise", &ScenarioConfig::abel_noise));
    k.push_back(number("abel", "prefilter_um", &ScenarioConfig::abel_prefilter_um));
    k.push_back(number("abel", "a_bf_a0", &ScenarioConfig::abel_a_bf_a0));
    k.push_back(number("fitting", "span", &ScenarioConfig::span));
    k.push_back(number("fitting", "n_boot", &ScenarioConfig::n_boot));
    k.push_back(number("fitting", "gamma_threshold", &ScenarioConfig::gamma_threshold));
    k.push_back(number("run", "seed", &ScenarioConfig::seed));
    return k;
  }();
  return table;
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::ValidationError, key + ": " + what);
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(key, "must be positive");
}

}  // namespace

std::vector<double> default_sweep_a0() {
  std::vector<double> out(12);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = 100.0 * std::pow(20.0, static_cast<double>(k) / 11.0);
  }
  out.back() = 2000.0;
  return out;
}

void ScenarioConfig::validate() const {
  require_positive(li_mass_u, "lithium.mass_u");
  require_positive(li_nu_radial_hz, "lithium.nu_radial_hz");
  require_positive(li_nu_axial_hz, "lithium.nu_axial_hz");
  require_positive(k_mass_u, "potassium.mass_u");
  require_positive(k_a_bb_a0, "potassium.a_bb_a0");
  require_positive(k_polarizability, "potassium.polarizability_factor");
  if (k_nu_radial_hz) require_positive(*k_nu_radial_hz, "potassium.nu_radial_hz");
  if (k_nu_axial_hz) require_positive(*k_nu_axial_hz, "potassium.nu_axial_hz");
  if (!(n_bosons >= 0.0) || !std::isfinite(n_bosons)) invalid("mixture.n_bosons", "must be nonnegative");
  require_positive(n_fermions, "mixture.n_fermions");
  if (!(beta >= 0.0 && beta <= 1.0)) invalid("mixture.beta", "beta must lie in [0, 1]");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) invalid("mixture.alpha", "alpha must be >= 1");
  require_positive(l3_cm6_per_s, "mixture.l3_cm6_per_s");
  require_positive(b0_gauss, "resonance.b0_gauss");
  require_positive(delta_gauss, "resonance.delta_gauss");
  require_positive(a_bg_a0, "resonance.a_bg_a0");
  require_positive(pole_epsilon_gauss, "resonance.pole_epsilon_gauss");
  if (n_rho < 8) invalid("grid.n_rho", "must be at least 8");
  if (n_z < 8) invalid("grid.n_z", "must be at least 8");
  if (!(stretch_rho >= 0.0)) invalid("grid.stretch_rho", "must be nonnegative");
  if (!(stretch_z >= 0.0)) invalid("grid.stretch_z", "must be nonnegative");
  if (!(box_factor > 1.0)) invalid("grid.box_factor", "must exceed 1");
  if (!(lambda_w >= 0.0 && lambda_w <= 1.0)) invalid("solver.lambda_w", "must lie in [0, 1]");
  require_positive(tol_energy, "solver.tol_energy");
  if (patience < 1) invalid("solver.patience", "must be at least 1");
  if (max_iter < 1) invalid("solver.max_iter", "must be at least 1");
  require_positive(initial_step, "solver.initial_step");
  require_positive(max_step, "solver.max_step");
  if (!(momentum >= 0.0 && momentum < 1.0)) invalid("solver.momentum", "must lie in [0, 1)");
  if (max_rejections < 1) invalid("solver.max_rejections", "must be at least 1");
  if (!(warm_noise >= 0.0 && warm_noise < 1.0)) invalid("solver.warm_noise", "must lie in [0, 1)");
  if (!a_bf_a0.empty() && !b_gauss.empty()) invalid("sweep", "give either a_bf_a0 or b_gauss, not both");
  for (double a : a_bf_a0) {
    if (!(a >= 0.0) || !std::isfinite(a)) invalid("sweep.a_bf_a0", "values must be nonnegative");
  }
  for (double b : b_gauss) require_positive(b, "sweep.b_gauss");
  if (!(abel_noise >= 0.0)) invalid("abel.noise", "must be nonnegative");
  if (!(abel_prefilter_um >= 0.0)) invalid("abel.prefilter_um", "must be nonnegative");
  if (!(abel_a_bf_a0 >= 0.0)) invalid("abel.a_bf_a0", "must be nonnegative");
  require_positive(span, "fitting.span");
  if (n_boot < 0) invalid("fitting.n_boot", "must be nonnegative");
  if (!(gamma_threshold > 0.0 && gamma_threshold < 1.0)) invalid("fitting.gamma_threshold", "must lie in (0, 1)");
}

MixtureScenario ScenarioConfig::scenario() const {
  MixtureScenario s;
  s.fermion.mass = li_mass_u * units::u;
  s.fermion.omega_radial = units::hz_to_rad(li_nu_radial_hz);
  s.fermion.omega_axial = units::hz_to_rad(li_nu_axial_hz);
  s.boson.mass = k_mass_u * units::u;
  s.boson.a_intra = k_a_bb_a0 * units::a0;
  const double scale = std::sqrt(s.fermion.mass / s.boson.mass) * k_polarizability;
  s.boson.omega_radial = k_nu_radial_hz ? units::hz_to_rad(*k_nu_radial_hz) : s.fermion.omega_radial * scale;
  s.boson.omega_axial = k_nu_axial_hz ? units::hz_to_rad(*k_nu_axial_hz) : s.fermion.omega_axial * scale;
  s.n_bosons = n_bosons;
  s.n_fermions = n_fermions;
  s.condensate_fraction = beta;
  s.a_bf = 0.0;
  return s;
}

FeshbachResonance ScenarioConfig::resonance() const {
  FeshbachResonance r;
  r.b0 = MagneticField::from_gauss(static_cast<long double>(b0_gauss));
  r.delta = MagneticField::from_gauss(static_cast<long double>(delta_gauss));
  r.a_bg = a_bg_a0 * units::a0;
  r.pole_epsilon = MagneticField::from_gauss(static_cast<long double>(pole_epsilon_gauss));
  return r;
}

GridSpec ScenarioConfig::grid_spec() const {
  GridSpec g;
  g.n_rho = static_cast<std::size_t>(n_rho);
  g.n_z = static_cast<std::size_t>(n_z);
  g.stretch_rho = stretch_rho;
  g.stretch_z = stretch_z;
  return g;
}

SolverOptions ScenarioConfig::solver_options() const {
  SolverOptions o;
  o.tol_energy = tol_energy;
  o.patience = static_cast<int>(patience);
  o.max_iter = max_iter;
  o.initial_step = initial_step;
  o.max_step = max_step;
  o.momentum = momentum;
  o.max_rejections = static_cast<int>(max_rejections);
  o.warm_noise = warm_noise;
  o.seed = seed;
  return o;
}

SmoothOptions ScenarioConfig::smooth_options() const {
  SmoothOptions o;
  o.span = span;
  o.n_boot = static_cast<int>(n_boot);
  o.seed = seed;
  return o;
}

double ScenarioConfig::l3() const { return l3_cm6_per_s * units::cm6_per_s; }

std::vector<double> ScenarioConfig::sweep_a_bf() const {
  std::vector<double> out;
  if (!b_gauss.empty()) {
    const FeshbachResonance res = resonance();
    for (double b : b_gauss) {
      out.push_back(scattering_length(res, MagneticField::from_gauss(static_cast<long double>(b))));
    }
  } else {
    for (double a : (a_bf_a0.empty() ? default_sweep_a0() : a_bf_a0)) out.push_back(a * units::a0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SolverMode> ScenarioConfig::modes() const {
  switch (mode) {
    case ModeSelection::Full: return {SolverMode::Full};
    case ModeSelection::ThomasFermi: return {SolverMode::ThomasFermi};
    default: return {SolverMode::Full, SolverMode::ThomasFermi};
  }
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  ScenarioConfig config;
  for (const auto& key : keys()) {
    config.provenance.keys[std::string(key.section) + "." + key.name] = ValueSource::Default;
  }
  std::set<std::string> sections;
  for (const auto& key : keys()) sections.insert(key.section);

  std::string section;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::size_t first = raw.find_first_not_of(" \t");
    if (first == std::string::npos || raw[first] == '#' || raw[first] == ';') continue;
    const Location at{origin, line_no, first + 1};
    if (raw[first] == '[') {
      const std::size_t close = raw.find(']', first);
      if (close == std::string::npos) at.fail("unterminated section header");
      if (!trim(raw.substr(close + 1)).empty()) {
        Location{origin, line_no, close + 2}.fail("unexpected text after section header");
      }
      section = trim(raw.substr(first + 1, close - first - 1));
      if (!sections.count(section)) {
        throw Error(ErrorCode::ValidationError, origin + ":" + std::to_string(line_no) + ": unknown section [" +
                                                    section + "]");
      }
      continue;
    }
    const std::size_t eq = raw.find('=', first);
    if (eq == std::string::npos) at.fail("expected key = value");
    if (section.empty()) at.fail("key outside of any section");
    const std::string name = trim(raw.substr(first, eq - first));
    std::string value = raw.substr(eq + 1);
    if (const std::size_t hash = value.find('#'); hash != std::string::npos) value.resize(hash);
    value = trim(value);
    const std::string full = section + "." + name;
    const auto it = std::find_if(keys().begin(), keys().end(),
                                 [&](const Key& k) { return section == k.section && name == k.name; });
    if (it == keys().end()) {
      throw Error(ErrorCode::ValidationError,
                  origin + ":" + std::to_string(line_no) + ": unknown key '" + name + "' in [" + section + "]");
    }
    if (!seen.insert(full).second) at.fail("duplicate key '" + full + "'");
    const std::size_t value_col = raw.find_first_not_of(" \t", eq + 1);
    it->parse(config, value, Location{origin, line_no, value_col == std::string::npos ? eq + 2 : value_col + 1});
    config.provenance.keys[full] = ValueSource::User;
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

std::string serialize_config(const ScenarioConfig& config) {
  std::string out;
  std::string section;
  for (const auto& key : keys()) {
    const auto value = key.print(config);
    if (!value) continue;
    if (section != key.section) {
      if (!section.empty()) out += "\n";
      section = key.section;
      out += "[" + section + "]\n";
    }
    out += std::string(key.name) + " = " + *value + "\n";
  }
  return out;
}

}  // namespace mixsep
