#include "mixsep/overlap.hpp"

#include <cmath>

#include "mixsep/error.hpp"

namespace mixsep {

const char* to_string(ThermalModel model) {
  return model == ThermalModel::Gaussian ? "gaussian" : "semiclassical";
}

ThermalModel parse_thermal_model(const std::string& text) {
  if (text == "gaussian") return ThermalModel::Gaussian;
  if (text == "semiclassical") return ThermalModel::Semiclassical;
  throw Error(ErrorCode::ValidationError, "thermal model must be 'gaussian' or 'semiclassical', got '" + text + "'");
}

double overlap_integral(const DensityField& n_f, const DensityField& n_b) {
  require_same_grid(n_f, n_b);
  const auto& w = n_f.grid->volumes();
  CompensatedSum s;
  for (std::size_t k = 0; k < w.size(); ++k) s.add(w[k] * n_f.values[k] * n_b.values[k] * n_b.values[k]);
  return s.value();
}

double mixed_overlap_integral(const DensityField& n_f, const DensityField& n_b, const DensityField& n_t) {
  require_same_grid(n_f, n_b);
  require_same_grid(n_f, n_t);
  const auto& w = n_f.grid->volumes();
  CompensatedSum s;
  for (std::size_t k = 0; k < w.size(); ++k) s.add(w[k] * n_f.values[k] * n_b.values[k] * n_t.values[k]);
  return s.value();
}

double omega(const DensityField& n_f, const DensityField& n_b, const DensityField& ref_f, const DensityField& ref_b) {
  require_same_grid(n_f, ref_f);
  const double ref = overlap_integral(ref_f, ref_b);
  if (!(ref > 0.0) || !std::isnormal(ref)) throw Error(ErrorCode::ZeroReference, "reference overlap integral vanishes");
  return overlap_integral(n_f, n_b) / ref;
}

double omega_from_measurement(double gamma, double l3, double n_f_peak, double n_b_peak) {
  if (!(gamma > 0.0) || !(l3 > 0.0) || !(n_f_peak > 0.0) || !(n_b_peak > 0.0)) {
    throw Error(ErrorCode::NonPositiveInput, "gamma, L3 and peak densities must be positive");
  }
  return gamma / (l3 * n_f_peak * (2.0 / 7.0 * n_b_peak));
}

double predicted_loss_rate(const DensityField& n_f, const DensityField& n_b, const DensityField& n_t, double l3,
                           double alpha) {
  if (!(alpha >= 1.0)) throw Error(ErrorCode::ValidationError, "alpha must be >= 1");
  if (!(l3 >= 0.0)) throw Error(ErrorCode::ValidationError, "L3 must be nonnegative");
  const double n_total = n_b.integral() + n_t.integral();
  if (!(n_total > 0.0)) throw Error(ErrorCode::NonPositiveInput, "no bosons to lose");
  const double i_bb = overlap_integral(n_f, n_b);
  const double i_bt = mixed_overlap_integral(n_f, n_b, n_t);
  const double i_tt = overlap_integral(n_f, n_t);
  return l3 * (0.5 * alpha * i_bb + alpha * i_bt + i_tt) / n_total;
}

double omega_eff(double gamma, double l3, double n_f_peak, double n_b_peak, double n_t_peak, double beta,
                 double alpha) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::ValidationError, "beta must lie in [0, 1]");
  if (!(l3 > 0.0) || !(n_f_peak > 0.0)) throw Error(ErrorCode::NonPositiveInput, "L3 and n_f peak must be positive");
  if (n_b_peak < 0.0 || n_t_peak < 0.0 || gamma < 0.0) {
    throw Error(ErrorCode::NonPositiveInput, "gamma and peak densities must be nonnegative");
  }
  const double bracket =
      2.0 / 7.0 * alpha * n_b_peak * beta + alpha * n_t_peak * beta + n_t_peak * (1.0 - beta) / std::sqrt(8.0);
  const double denominator = l3 * n_f_peak * bracket;
  if (!(denominator > 0.0) || !std::isfinite(denominator)) {
    throw Error(ErrorCode::ZeroDenominator, "effective overlap denominator vanishes");
  }
  return gamma / denominator;
}

DensityField thermal_cloud(const MixtureScenario& scenario, GridPtr grid, ThermalModel model, const GroundState* gs) {
  const ThermalCloudParams params{scenario.n_bosons, scenario.condensate_fraction, HarmonicTrap{scenario.boson}};
  if (model == ThermalModel::Gaussian) return thermal_bose_profile(params, grid);
  std::vector<double> extra(grid->size(), 0.0);
  if (gs) {
    require_same_grid(gs->n_b, gs->n_f);
    if (!(*gs->n_b.grid == *grid)) throw Error(ErrorCode::GridMismatch, "ground state lives on a different grid");
    const double g_bb = boson_coupling(scenario.boson.a_intra, scenario.boson.mass);
    const double g_bf = mixed_coupling(scenario.a_bf, scenario.boson.mass, scenario.fermion.mass);
    for (std::size_t k = 0; k < extra.size(); ++k) {
      extra[k] = 2.0 * g_bb * gs->n_b.values[k] + g_bf * gs->n_f.values[k];
    }
  }
  return semiclassical_thermal_profile(params, grid, extra);
}

OverlapReport omega_eff_from_ground_state(const GroundState& gs, const DensityField& thermal,
                                          const MixtureScenario& scenario, double alpha, double l3,
                                          const GroundState* reference, ThermalModel model) {
  OverlapReport r;
  r.alpha = alpha;
  r.beta = scenario.condensate_fraction;
  r.l3 = l3;
  r.thermal_model = model;
  r.peaks = fra_peak_quantities(scenario);
  r.i_bb = overlap_integral(gs.n_f, gs.n_b);
  r.i_bt = mixed_overlap_integral(gs.n_f, gs.n_b, thermal);
  r.i_tt = overlap_integral(gs.n_f, thermal);
  r.gamma_pred = predicted_loss_rate(gs.n_f, gs.n_b, thermal, l3, alpha);
  r.omega_eff = omega_eff(r.gamma_pred, l3, r.peaks.n_f, r.peaks.n_b, r.peaks.n_t, r.beta, alpha);
  if (reference) r.omega = omega(gs.n_f, gs.n_b, reference->n_f, reference->n_b);
  try {
    r.interface_thickness = interface_thickness(gs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSeparated) throw;
  }
  return r;
}

}  // namespace mixsep
