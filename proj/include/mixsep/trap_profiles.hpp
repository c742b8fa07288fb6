#ifndef MIXSEP_TRAP_PROFILES_HPP
#define MIXSEP_TRAP_PROFILES_HPP

// Closed-form density profiles in a harmonic trap: zero-temperature Fermi
// gas and condensate in the Thomas-Fermi limit, and the thermal Bose cloud.
// They seed the solver, provide the a_bf = 0 normalisation of the overlap
// factor, and serve as analytic oracles.

#include <span>

#include "mixsep/grid.hpp"
#include "mixsep/physics.hpp"
#include "mixsep/scenario.hpp"

namespace mixsep {

struct HarmonicTrap {
  SpeciesParams species;

  // V = m/2 (w_r^2 rho^2 + w_z^2 z^2)
  double potential(double rho, double z) const;
  // Potential sampled at every cell centre of the grid.
  std::vector<double> sample(const Grid2D& grid) const;
  // Radius along each axis at which V reaches the given energy.
  double radius_radial(double energy) const;
  double radius_axial(double energy) const;
};

struct ThermalCloudParams {
  double n_total = 0.0;             // all bosons, condensed + thermal
  double condensate_fraction = 0.0; // beta
  HarmonicTrap trap;

  // Ideal-gas T_c = hbar w_bar (N / zeta(3))^(1/3) / k_B, no finite-size shift.
  double critical_temperature() const;
  // T = T_c (1 - beta)^(1/3).
  double temperature() const;
  // [m w_bar^2 / (2 pi k_B T)]^(3/2) (1 - beta) N.
  double peak_density() const;
};

struct TfProfile {
  DensityField density;
  double chemical_potential = 0.0;  // J, fixed by normalisation on the grid
};

// E_F = hbar w_bar (6 N)^(1/3).
double trap_fermi_energy(const SpeciesParams& fermion, double n_f);
// Peak of the zero-T profile, (1/6 pi^2)(2 m E_F / hbar^2)^(3/2).
double fermi_peak_density(const SpeciesParams& fermion, double n_f);
// mu = (hbar w_bar / 2)(15 N a / a_ho)^(2/5).
double bec_tf_chemical_potential(const SpeciesParams& boson, double n_b, double a_bb);
double bec_tf_peak_density(const SpeciesParams& boson, double n_b, double a_bb);

// Zero-T local-density profile of N_f fermions. The chemical potential is
// solved on the grid so the quadrature returns N_f.
TfProfile fermi_tf_profile(const HarmonicTrap& trap, double n_f, GridPtr grid);
// Thomas-Fermi condensate, n = max(0, (mu - V)/g_bb), normalised on the grid.
TfProfile bec_tf_profile(const HarmonicTrap& trap, double n_b, double a_bb, GridPtr grid);
// Ideal Gaussian thermal cloud with the analytic peak density.
DensityField thermal_bose_profile(const ThermalCloudParams& params, GridPtr grid);
// Semiclassical Bose-enhanced cloud n = g_{3/2}(exp((mu_t - V_eff)/kT)) / lambda_T^3
// with V_eff = V + extra_potential; mu_t is solved for (1 - beta) N atoms.
DensityField semiclassical_thermal_profile(const ThermalCloudParams& params, GridPtr grid,
                                           std::span<const double> extra_potential);

// Bose function g_{3/2}(x) for 0 <= x <= 1.
double bose_g32(double x);

// Scalar peak quantities of the noninteracting mixture, as used by the
// fermionic reservoir approximation.
struct PeakQuantities {
  double n_f = 0.0;  // m^-3
  double n_b = 0.0;  // condensate TF peak
  double n_t = 0.0;  // thermal peak
  double k_f = 0.0;  // m^-1
  double e_f = 0.0;  // J
};
PeakQuantities fra_peak_quantities(const MixtureScenario& scenario);

// Grid whose box is box_factor times the largest cloud size along each axis
// (Fermi radius, condensate radius, 5 thermal widths).
GridPtr default_grid(const MixtureScenario& scenario, GridSpec spec, double box_factor = 1.3);

}  // namespace mixsep

#endif  // MIXSEP_TRAP_PROFILES_HPP
