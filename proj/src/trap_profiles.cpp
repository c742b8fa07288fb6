#include "mixsep/trap_profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "mixsep/error.hpp"
#include "mixsep/log.hpp"

namespace mixsep {

using constants::boltzmann;
using constants::hbar;
using constants::pi;

double HarmonicTrap::potential(double rho, double z) const {
  const auto& s = species;
  return 0.5 * s.mass * (s.omega_radial * s.omega_radial * rho * rho + s.omega_axial * s.omega_axial * z * z);
}

std::vector<double> HarmonicTrap::sample(const Grid2D& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.n_rho(); ++i) {
    for (std::size_t j = 0; j < grid.n_z(); ++j) {
      v[grid.index(i, j)] = potential(grid.rho().center(i), grid.z().center(j));
    }
  }
  return v;
}

double HarmonicTrap::radius_radial(double energy) const {
  return std::sqrt(2.0 * std::max(energy, 0.0) / species.mass) / species.omega_radial;
}

double HarmonicTrap::radius_axial(double energy) const {
  return std::sqrt(2.0 * std::max(energy, 0.0) / species.mass) / species.omega_axial;
}

double ThermalCloudParams::critical_temperature() const {
  if (n_total <= 0.0) return 0.0;
  return hbar * trap.species.omega_bar() * std::cbrt(n_total / constants::zeta3) / boltzmann;
}

double ThermalCloudParams::temperature() const {
  return critical_temperature() * std::cbrt(std::max(0.0, 1.0 - condensate_fraction));
}

double ThermalCloudParams::peak_density() const {
  const double t = temperature();
  if (t <= 0.0 || condensate_fraction >= 1.0) return 0.0;
  const double wbar = trap.species.omega_bar();
  const double base = trap.species.mass * wbar * wbar / (2.0 * pi * boltzmann * t);
  return std::pow(base, 1.5) * (1.0 - condensate_fraction) * n_total;
}

double trap_fermi_energy(const SpeciesParams& fermion, double n_f) {
  return hbar * fermion.omega_bar() * std::cbrt(6.0 * n_f);
}

namespace {

double fermi_density_at(double mass, double excess) {
  if (excess <= 0.0) return 0.0;
  return std::pow(2.0 * mass * excess / (hbar * hbar), 1.5) / (6.0 * pi * pi);
}

// Finds mu such that the grid integral of profile(mu) equals target.
// The integral is monotone in mu, so bracketing plus bisection suffices.
double solve_chemical_potential(const std::function<double(double)>& integral_at, double target,
                                double guess) {
  double lo = 0.0;
  double hi = std::max(guess, 1e-40);
  for (int k = 0; k < 200 && integral_at(hi) < target; ++k) hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (integral_at(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_fits(const Grid2D& grid, double r_radial, double r_axial, const std::string& what) {
  if (r_radial > grid.rho().extent() || r_axial > grid.z().extent()) {
    throw Error(ErrorCode::GridTooSmall, what + " Thomas-Fermi radius exceeds the grid box");
  }
}

}  // namespace

double fermi_peak_density(const SpeciesParams& fermion, double n_f) {
  return fermi_density_at(fermion.mass, trap_fermi_energy(fermion, n_f));
}

double bec_tf_chemical_potential(const SpeciesParams& boson, double n_b, double a_bb) {
  if (n_b <= 0.0) return 0.0;
  const double wbar = boson.omega_bar();
  const double a_ho = std::sqrt(hbar / (boson.mass * wbar));
  return 0.5 * hbar * wbar * std::pow(15.0 * n_b * a_bb / a_ho, 0.4);
}

double bec_tf_peak_density(const SpeciesParams& boson, double n_b, double a_bb) {
  return bec_tf_chemical_potential(boson, n_b, a_bb) / boson_coupling(a_bb, boson.mass);
}

TfProfile fermi_tf_profile(const HarmonicTrap& trap, double n_f, GridPtr grid) {
  if (!(n_f >= 1.0)) throw Error(ErrorCode::NonPositiveInput, "fermion number must be >= 1");
  const double e_f = trap_fermi_energy(trap.species, n_f);
  check_fits(*grid, trap.radius_radial(e_f), trap.radius_axial(e_f), "Fermi");

  const auto v = trap.sample(*grid);
  const double mass = trap.species.mass;
  std::vector<double> n(grid->size());
  auto fill = [&](double mu) {
    for (std::size_t k = 0; k < n.size(); ++k) n[k] = fermi_density_at(mass, mu - v[k]);
    return integrate(*grid, n);
  };
  const double mu = solve_chemical_potential(fill, n_f, e_f);
  fill(mu);
  return {DensityField(grid, std::move(n), "fermion"), mu};
}

TfProfile bec_tf_profile(const HarmonicTrap& trap, double n_b, double a_bb, GridPtr grid) {
  if (n_b <= 0.0) return {DensityField(grid, "boson"), 0.0};
  if (!(a_bb > 0.0)) throw Error(ErrorCode::NonPositiveInput, "a_bb must be positive");
  const double mu0 = bec_tf_chemical_potential(trap.species, n_b, a_bb);
  const double r_rad = trap.radius_radial(mu0);
  const double r_ax = trap.radius_axial(mu0);
  check_fits(*grid, r_rad, r_ax, "condensate");
  // Cells spanned by the TF radius near the centre, where the axis is finest.
  const double cells = std::min(r_rad / grid->rho().width(0), r_ax / grid->z().width(0));
  if (cells < 8.0) log::warn("condensate spans fewer than 8 grid cells");

  const double g = boson_coupling(a_bb, trap.species.mass);
  const auto v = trap.sample(*grid);
  std::vector<double> n(grid->size());
  auto fill = [&](double mu) {
    for (std::size_t k = 0; k < n.size(); ++k) n[k] = std::max(0.0, (mu - v[k]) / g);
    return integrate(*grid, n);
  };
  const double mu = solve_chemical_potential(fill, n_b, mu0);
  fill(mu);
  return {DensityField(grid, std::move(n), "boson"), mu};
}

DensityField thermal_bose_profile(const ThermalCloudParams& params, GridPtr grid) {
  DensityField out(grid, "thermal");
  const double peak = params.peak_density();
  if (peak <= 0.0) return out;
  const double kt = boltzmann * params.temperature();
  const auto v = params.trap.sample(*grid);
  for (std::size_t k = 0; k < v.size(); ++k) out.values[k] = peak * std::exp(-v[k] / kt);
  return out;
}

double bose_g32(double x) {
  if (x <= 0.0) return 0.0;
  if (x > 1.0) throw Error(ErrorCode::OutOfDomain, "g_3/2 needs x <= 1");
  const double a = -std::log(x);
  if (a > 0.5) {
    double sum = 0.0;
    double xk = 1.0;
    for (int k = 1; k < 400; ++k) {
      xk *= x;
      const double term = xk / (k * std::sqrt(static_cast<double>(k)));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  // Robinson expansion about x = 1: -2 sqrt(pi a) + sum zeta(3/2 - k) (-a)^k / k!
  static constexpr std::array<double, 14> zeta = {
      2.6123753486854883,     -1.4603545088095868,   -0.20788622497735457,  -0.025485201889833036,
      0.0085169287778503305,  0.0044410113354794320, -0.0030916692472158338, -0.0026714580198992246,
      0.0027467679395368688,  0.0032690395726002200, -0.0044160328730048898, -0.0066721722964666408,
      0.011146122473942814,   0.020396978715942792};
  double sum = -2.0 * std::sqrt(pi * a);
  double term = 1.0;
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    if (k > 0) term *= -a / static_cast<double>(k);
    sum += zeta[k] * term;
  }
  return sum;
}

DensityField semiclassical_thermal_profile(const ThermalCloudParams& params, GridPtr grid,
                                           std::span<const double> extra_potential) {
  DensityField out(grid, "thermal");
  const double n_t = (1.0 - params.condensate_fraction) * params.n_total;
  const double t = params.temperature();
  if (n_t <= 0.0 || t <= 0.0) return out;
  if (!extra_potential.empty() && extra_potential.size() != grid->size()) {
    throw Error(ErrorCode::GridMismatch, "effective potential does not match grid");
  }
  const double kt = boltzmann * t;
  const double mass = params.trap.species.mass;
  const double lambda = std::sqrt(2.0 * pi * hbar * hbar / (mass * kt));
  const double inv_l3 = 1.0 / (lambda * lambda * lambda);

  auto v = params.trap.sample(*grid);
  for (std::size_t k = 0; k < v.size() && !extra_potential.empty(); ++k) v[k] += extra_potential[k];
  const double v_min = *std::min_element(v.begin(), v.end());

  auto fill = [&](double mu) {
    for (std::size_t k = 0; k < v.size(); ++k) out.values[k] = inv_l3 * bose_g32(std::exp((mu - v[k]) / kt));
    return out.integral();
  };
  // Shift so the bisection variable is nonnegative: mu = v_min - s.
  double lo = 0.0;
  double hi = kt;
  if (fill(v_min) <= n_t) {
    log::warn("semiclassical thermal cloud saturates; rescaling to the thermal atom number");
    const double scale = n_t / out.integral();
    for (auto& x : out.values) x *= scale;
    return out;
  }
  for (int k = 0; k < 200 && fill(v_min - hi) > n_t; ++k) hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (fill(v_min - mid) > n_t ? lo : hi) = mid;
  }
  fill(v_min - 0.5 * (lo + hi));
  return out;
}

PeakQuantities fra_peak_quantities(const MixtureScenario& s) {
  s.validate();
  PeakQuantities q;
  q.n_f = fermi_peak_density(s.fermion, s.n_fermions);
  q.k_f = fermi_wavenumber(q.n_f);
  q.e_f = fermi_energy(q.n_f, s.fermion.mass);
  q.n_b = bec_tf_peak_density(s.boson, s.condensed_bosons(), s.boson.a_intra);
  ThermalCloudParams thermal{s.n_bosons, s.condensate_fraction, HarmonicTrap{s.boson}};
  q.n_t = thermal.peak_density();
  return q;
}

GridPtr default_grid(const MixtureScenario& s, GridSpec spec, double box_factor) {
  const HarmonicTrap fermi{s.fermion};
  const HarmonicTrap bose{s.boson};
  const double e_f = trap_fermi_energy(s.fermion, s.n_fermions);
  const double mu_b = bec_tf_chemical_potential(s.boson, s.condensed_bosons(), s.boson.a_intra);
  ThermalCloudParams thermal{s.n_bosons, s.condensate_fraction, bose};
  const double kt = boltzmann * thermal.temperature();
  // 5 thermal widths: exp(-12.5) leaves ~4e-6 of the peak at the box edge.
  const double thermal_reach = 12.5 * kt;
  spec.rho_extent = box_factor * std::max({fermi.radius_radial(e_f), bose.radius_radial(mu_b),
                                          bose.radius_radial(thermal_reach)});
  spec.z_extent = box_factor * std::max({fermi.radius_axial(e_f), bose.radius_axial(mu_b),
                                        bose.radius_axial(thermal_reach)});
  return make_grid(spec);
}

}  // namespace mixsep
