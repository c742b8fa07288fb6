#ifndef MIXSEP_PHYSICS_HPP
#define MIXSEP_PHYSICS_HPP

// Physical constants, unit conversions, Feshbach tuning and the closed-form
// scale relations of a degenerate Fermi gas and a condensate.
//
// Everything inside the library is SI. Experiment units (a0, G, nK, Hz,
// cm^-3) appear only at the configuration and file boundaries.

#include <compare>
#include <numbers>

namespace mixsep {

namespace constants {
// CODATA 2018.
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double boltzmann = 1.380649e-23;        // J / K
inline constexpr double bohr_radius = 5.29177210903e-11; // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double pi = std::numbers::pi;
inline constexpr double zeta3 = 1.2020569031595942;      // Riemann zeta(3)
}  // namespace constants

namespace units {
inline constexpr double a0 = constants::bohr_radius;
inline constexpr double gauss = 1e-4;            // T
inline constexpr double nanokelvin = 1e-9;       // K
inline constexpr double micrometer = 1e-6;       // m
inline constexpr double per_cm3 = 1e6;           // m^-3
inline constexpr double cm6_per_s = 1e-12;       // m^6 / s
inline constexpr double u = constants::atomic_mass_unit;

inline constexpr double hz_to_rad(double hz) { return 2.0 * constants::pi * hz; }
inline constexpr double rad_to_hz(double w) { return w / (2.0 * constants::pi); }
}  // namespace units

// Magnetic bias field. Detunings of a few 1e-6 T sit on top of a ~3e-2 T
// bias, so the value is held in extended precision.
class MagneticField {
 public:
  constexpr MagneticField() = default;
  static constexpr MagneticField from_tesla(long double t) { return MagneticField(t); }
  static constexpr MagneticField from_gauss(long double g) {
    return MagneticField(g * static_cast<long double>(units::gauss));
  }
  constexpr long double tesla() const { return tesla_; }
  constexpr double gauss() const {
    return static_cast<double>(tesla_ / static_cast<long double>(units::gauss));
  }
  constexpr auto operator<=>(const MagneticField&) const = default;

 private:
  constexpr explicit MagneticField(long double t) : tesla_(t) {}
  long double tesla_ = 0.0L;
};

struct SpeciesParams {
  double mass = 0.0;              // kg
  double omega_radial = 0.0;      // rad/s
  double omega_axial = 0.0;       // rad/s
  double a_intra = 0.0;           // m, bosons only

  // Geometric mean trap frequency.
  double omega_bar() const;
  // omega_axial / omega_radial, 1/7 for the default cigar-shaped trap.
  double aspect_ratio() const { return omega_axial / omega_radial; }
  // Throws ValidationError when mass or a trap frequency is not positive.
  void validate(const char* label) const;

  bool operator==(const SpeciesParams&) const = default;
};

struct FeshbachResonance {
  MagneticField b0 = MagneticField::from_gauss(335.057L);
  MagneticField delta = MagneticField::from_gauss(0.949L);
  double a_bg = 60.9 * units::a0;
  // Fields closer than this to b0 are rejected as divergent.
  MagneticField pole_epsilon = MagneticField::from_gauss(1e-6L);

  void validate() const;
};

// Li-6 in the default optical trap (291 Hz radial, 41.6 Hz axial).
SpeciesParams default_lithium();
// K-41 in the same trap. Frequencies scale as sqrt(m_Li/m_K) times the
// polarizability factor, which the default sets to 1.30.
SpeciesParams default_potassium(double polarizability_factor = 1.30);
SpeciesParams potassium_from(const SpeciesParams& lithium, double polarizability_factor);

// a(B) = a_bg (1 - delta / (B - B0)).
double scattering_length(const FeshbachResonance& res, MagneticField b);
// Inverse of scattering_length.
MagneticField field_for_scattering_length(const FeshbachResonance& res, double a);

// k_F = (6 pi^2 n)^(1/3).
double fermi_wavenumber(double n_f_peak);
// E_F = hbar^2 k_F^2 / (2 m_f).
double fermi_energy(double n_f_peak, double fermion_mass);
// Phase separation is predicted above 1.15 sqrt(a_bb / k_F).
double critical_scattering_length(double a_bb, double n_f_peak);
// xi = (8 pi n_b a_bb)^(-1/2).
double healing_length(double n_b_peak, double a_bb);

// Contact couplings.
double boson_coupling(double a_bb, double boson_mass);                     // 4 pi hbar^2 a / m
double mixed_coupling(double a_bf, double boson_mass, double fermion_mass); // 2 pi hbar^2 a / m_r
// (3/5)(hbar^2/2m)(6 pi^2)^(2/3): the Thomas-Fermi kinetic energy density is c n^(5/3).
double fermi_kinetic_coefficient(double fermion_mass);

}  // namespace mixsep

#endif  // MIXSEP_PHYSICS_HPP
