#include "mixsep/physics.hpp"

#include <cmath>
#include <string>

#include "mixsep/error.hpp"

namespace mixsep {

using constants::hbar;
using constants::pi;

double SpeciesParams::omega_bar() const {
  return std::cbrt(omega_radial * omega_radial * omega_axial);
}

void SpeciesParams::validate(const char* label) const {
  auto bad = [&](const char* field) {
    throw Error(ErrorCode::ValidationError, std::string(label) + "." + field + " must be positive");
  };
  if (!(mass > 0.0)) bad("mass");
  if (!(omega_radial > 0.0)) bad("omega_radial");
  if (!(omega_axial > 0.0)) bad("omega_axial");
  if (a_intra < 0.0) bad("a_intra");
}

void FeshbachResonance::validate() const {
  if (!(delta.tesla() > 0.0L)) throw Error(ErrorCode::ValidationError, "resonance width must be positive");
  if (!(a_bg > 0.0)) throw Error(ErrorCode::ValidationError, "background scattering length must be positive");
  if (!(pole_epsilon.tesla() > 0.0L)) throw Error(ErrorCode::ValidationError, "pole epsilon must be positive");
}

SpeciesParams default_lithium() {
  SpeciesParams li;
  li.mass = 6.0 * units::u;
  li.omega_radial = units::hz_to_rad(291.0);
  li.omega_axial = units::hz_to_rad(41.6);
  return li;
}

SpeciesParams potassium_from(const SpeciesParams& lithium, double polarizability_factor) {
  SpeciesParams k;
  k.mass = 41.0 * units::u;
  const double scale = std::sqrt(lithium.mass / k.mass) * polarizability_factor;
  k.omega_radial = lithium.omega_radial * scale;
  k.omega_axial = lithium.omega_axial * scale;
  k.a_intra = 60.9 * units::a0;
  return k;
}

SpeciesParams default_potassium(double polarizability_factor) {
  return potassium_from(default_lithium(), polarizability_factor);
}

double scattering_length(const FeshbachResonance& res, MagneticField b) {
  const long double detuning = b.tesla() - res.b0.tesla();
  if (std::fabs(detuning) < res.pole_epsilon.tesla()) {
    throw Error(ErrorCode::PoleAtResonance, "field within pole epsilon of B0");
  }
  const long double ratio = res.delta.tesla() / detuning;
  return static_cast<double>(static_cast<long double>(res.a_bg) * (1.0L - ratio));
}

MagneticField field_for_scattering_length(const FeshbachResonance& res, double a) {
  if (a == res.a_bg) {
    throw Error(ErrorCode::Unreachable, "a = a_bg is only reached at infinite detuning");
  }
  const long double abg = res.a_bg;
  const long double detuning = res.delta.tesla() * abg / (abg - static_cast<long double>(a));
  return MagneticField::from_tesla(res.b0.tesla() + detuning);
}

double fermi_wavenumber(double n_f_peak) {
  if (!(n_f_peak > 0.0)) throw Error(ErrorCode::NonPositiveDensity, "fermion density must be positive");
  return std::cbrt(6.0 * pi * pi * n_f_peak);
}

double fermi_energy(double n_f_peak, double fermion_mass) {
  if (!(fermion_mass > 0.0)) throw Error(ErrorCode::NonPositiveInput, "fermion mass must be positive");
  const double kf = fermi_wavenumber(n_f_peak);
  return hbar * hbar * kf * kf / (2.0 * fermion_mass);
}

double critical_scattering_length(double a_bb, double n_f_peak) {
  if (!(a_bb > 0.0) || !(n_f_peak > 0.0)) {
    throw Error(ErrorCode::NonPositiveInput, "a_bb and n_f must be positive");
  }
  return 1.15 * std::sqrt(a_bb / fermi_wavenumber(n_f_peak));
}

double healing_length(double n_b_peak, double a_bb) {
  if (!(n_b_peak > 0.0) || !(a_bb > 0.0)) {
    throw Error(ErrorCode::NonPositiveInput, "n_b and a_bb must be positive");
  }
  return 1.0 / std::sqrt(8.0 * pi * n_b_peak * a_bb);
}

double boson_coupling(double a_bb, double boson_mass) {
  return 4.0 * pi * hbar * hbar * a_bb / boson_mass;
}

double mixed_coupling(double a_bf, double boson_mass, double fermion_mass) {
  const double reduced = boson_mass * fermion_mass / (boson_mass + fermion_mass);
  return 2.0 * pi * hbar * hbar * a_bf / reduced;
}

double fermi_kinetic_coefficient(double fermion_mass) {
  return 0.6 * (hbar * hbar / (2.0 * fermion_mass)) * std::pow(6.0 * pi * pi, 2.0 / 3.0);
}

}  // namespace mixsep
