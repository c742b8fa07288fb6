#ifndef MIXSEP_OVERLAP_HPP
#define MIXSEP_OVERLAP_HPP

// Overlap integrals, the overlap factor and its finite-temperature extension,
// and the three-body loss rate they predict.

#include <optional>
#include <string>

#include "mixsep/grid.hpp"
#include "mixsep/meanfield.hpp"
#include "mixsep/scenario.hpp"
#include "mixsep/trap_profiles.hpp"

namespace mixsep {

enum class ThermalModel { Gaussian, Semiclassical };

const char* to_string(ThermalModel model);
ThermalModel parse_thermal_model(const std::string& text);

struct OverlapReport {
  double i_bb = 0.0;  // int n_f n_b^2 dV, m^-6
  double i_bt = 0.0;  // int n_f n_b n_t dV
  double i_tt = 0.0;  // int n_f n_t^2 dV
  double omega = 0.0;  // zero-temperature overlap factor against the a_bf = 0 reference
  double omega_eff = 0.0;
  double gamma_pred = 0.0;  // s^-1
  PeakQuantities peaks;
  double alpha = 1.5;
  double beta = 0.0;
  double l3 = 0.0;  // m^6/s
  ThermalModel thermal_model = ThermalModel::Gaussian;
  std::optional<double> interface_thickness;  // m, only when separated
};

// int n_f n_b^2 dV.
double overlap_integral(const DensityField& n_f, const DensityField& n_b);
// int n_f n_b n_t dV.
double mixed_overlap_integral(const DensityField& n_f, const DensityField& n_b, const DensityField& n_t);

// Ratio of the interacting overlap integral to the noninteracting one.
// Throws ZeroReference when the reference integral vanishes.
double omega(const DensityField& n_f, const DensityField& n_b, const DensityField& ref_f,
             const DensityField& ref_b);

// 7 gamma / (2 n_f n_b L3).
double omega_from_measurement(double gamma, double l3, double n_f_peak, double n_b_peak);

// gamma = -dN/dt / N for dN/dt = -L3 int n_f (alpha/2 n_b^2 + alpha n_b n_t + n_t^2) dV,
// with N the total boson number of n_b + n_t.
double predicted_loss_rate(const DensityField& n_f, const DensityField& n_b, const DensityField& n_t, double l3,
                           double alpha);

// gamma / {L3 n_f [2/7 alpha n_b beta + alpha n_t beta + n_t (1 - beta)/sqrt(8)]}.
// At beta = 1, alpha = 1 and n_t = 0 it performs the same floating-point
// operations as omega_from_measurement.
double omega_eff(double gamma, double l3, double n_f_peak, double n_b_peak, double n_t_peak, double beta,
                 double alpha);

// Full report for one ground state. Peaks entering the denominator are those
// of the noninteracting analytic profiles. Omega is filled only when a
// reference state is given.
OverlapReport omega_eff_from_ground_state(const GroundState& gs, const DensityField& thermal,
                                          const MixtureScenario& scenario, double alpha, double l3,
                                          const GroundState* reference = nullptr,
                                          ThermalModel model = ThermalModel::Gaussian);

// Thermal cloud for the given model. The semiclassical cloud feels the trap
// plus the mean field 2 g_bb n_b + g_bf n_f of the supplied ground state.
DensityField thermal_cloud(const MixtureScenario& scenario, GridPtr grid, ThermalModel model,
                           const GroundState* gs = nullptr);

}  // namespace mixsep

#endif  // MIXSEP_OVERLAP_HPP
