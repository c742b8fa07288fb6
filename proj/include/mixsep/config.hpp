#ifndef MIXSEP_CONFIG_HPP
#define MIXSEP_CONFIG_HPP

// Scenario configuration in a sectioned key=value format:
//
//   # comment
//   [mixture]
//   n_bosons = 2.9e4
//
// Values are in experiment units (u, Hz, a0, G, cm^6/s, um) and converted to
// SI by the accessors. Unknown sections and keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixsep/grid.hpp"
#include "mixsep/meanfield.hpp"
#include "mixsep/overlap.hpp"
#include "mixsep/physics.hpp"
#include "mixsep/scenario.hpp"
#include "mixsep/abel.hpp"
#include "mixsep/loss_fitting.hpp"

namespace mixsep {

enum class ValueSource { Default, User };

// Where each "section.key" value came from. Not part of config equality.
struct ConfigProvenance {
  std::map<std::string, ValueSource> keys;
  bool operator==(const ConfigProvenance&) const { return true; }
};

enum class ModeSelection { Both, Full, ThomasFermi };

struct ScenarioConfig {
  // [lithium]
  double li_mass_u = 6.0;
  double li_nu_radial_hz = 291.0;
  double li_nu_axial_hz = 41.6;
  // [potassium]; frequencies follow lithium via the polarizability factor
  // unless given explicitly.
  double k_mass_u = 41.0;
  double k_a_bb_a0 = 60.9;
  double k_polarizability = 1.30;
  std::optional<double> k_nu_radial_hz;
  std::optional<double> k_nu_axial_hz;
  // [mixture]
  double n_bosons = 2.9e4;
  double n_fermions = 1.4e5;
  double beta = 0.5;
  double alpha = 1.5;
  double l3_cm6_per_s = 1e-25;
  ThermalModel thermal_model = ThermalModel::Gaussian;
  // [resonance]
  double b0_gauss = 335.057;
  double delta_gauss = 0.949;
  double a_bg_a0 = 60.9;
  double pole_epsilon_gauss = 1e-6;
  // [grid]
  long n_rho = 128;
  long n_z = 256;
  double stretch_rho = 3.0;
  double stretch_z = 3.0;
  double box_factor = 1.3;
  // [solver]
  ModeSelection mode = ModeSelection::Both;
  double lambda_w = 1.0 / 9.0;
  double tol_energy = 1e-10;
  long patience = 10;
  long max_iter = 200000;
  double initial_step = 0.1;
  double max_step = 0.9;
  double momentum = 0.9;
  long max_rejections = 20;
  double warm_noise = 0.01;
  bool cold_start = false;
  // [sweep]; at most one list. Neither gives the default log sweep.
  std::vector<double> a_bf_a0;
  std::vector<double> b_gauss;
  // [abel]
  AbelMethod abel_method = AbelMethod::ThreePoint;
  double abel_noise = 0.02;        // relative to the column-density peak
  double abel_prefilter_um = 0.0;  // 0 disables
  double abel_a_bf_a0 = 1480.0;
  // [fitting]
  double span = 0.5;
  long n_boot = 1000;
  double gamma_threshold = 0.7;
  // [run]
  std::uint64_t seed = 42;

  ConfigProvenance provenance;

  // Throws ValidationError naming the offending key.
  void validate() const;

  MixtureScenario scenario() const;  // a_bf = 0
  FeshbachResonance resonance() const;
  GridSpec grid_spec() const;
  SolverOptions solver_options() const;
  SmoothOptions smooth_options() const;
  double l3() const;  // m^6/s
  // Ascending a_bf values (m) of the sweep.
  std::vector<double> sweep_a_bf() const;
  std::vector<SolverMode> modes() const;

  bool operator==(const ScenarioConfig&) const = default;
};

// Default 12-point logarithmic sweep from 100 to 2000 a0, in a0.
std::vector<double> default_sweep_a0();

// Throws ParseError with line:column for malformed input.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ScenarioConfig load_config(const std::string& path);
// Every key, including defaults, in the same format.
std::string serialize_config(const ScenarioConfig& config);

}  // namespace mixsep

#endif  // MIXSEP_CONFIG_HPP
