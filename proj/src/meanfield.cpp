#include "mixsep/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mixsep/error.hpp"
#include "mixsep/log.hpp"

namespace mixsep {

using constants::hbar;
using constants::pi;

const char* to_string(SolverMode mode) { return mode == SolverMode::Full ? "full" : "tf"; }

SolverMode parse_solver_mode(const std::string& text) {
  if (text == "full") return SolverMode::Full;
  if (text == "tf") return SolverMode::ThomasFermi;
  throw Error(ErrorCode::ValidationError, "solver mode must be 'full' or 'tf', got '" + text + "'");
}

EnergyFunctionalParams EnergyFunctionalParams::from(const MixtureScenario& s, SolverMode mode, double lambda_w) {
  EnergyFunctionalParams p;
  p.boson_mass = s.boson.mass;
  p.fermion_mass = s.fermion.mass;
  p.g_bb = boson_coupling(s.boson.a_intra, s.boson.mass);
  p.g_bf = mixed_coupling(s.a_bf, s.boson.mass, s.fermion.mass);
  p.c_tf = fermi_kinetic_coefficient(s.fermion.mass);
  p.lambda_w = lambda_w;
  p.include_bec_kinetic = mode == SolverMode::Full;
  p.include_fermi_gradient = mode == SolverMode::Full;
  return p;
}

void EnergyFunctionalParams::validate() const {
  if (!(boson_mass > 0.0) || !(fermion_mass > 0.0)) throw Error(ErrorCode::ValidationError, "masses must be positive");
  if (!(g_bb >= 0.0)) throw Error(ErrorCode::ValidationError, "g_bb must be nonnegative");
  if (!(c_tf > 0.0)) throw Error(ErrorCode::ValidationError, "c_TF must be positive");
  if (!(lambda_w >= 0.0 && lambda_w <= 1.0)) throw Error(ErrorCode::ValidationError, "lambda_W must lie in [0, 1]");
}

double EnergyBreakdown::total() const {
  CompensatedSum s;
  for (double t : {kinetic_b, potential_b, interaction_bb, kinetic_f, gradient_f, potential_f, interaction_bf}) s.add(t);
  return s.value();
}

EnergyFunctional::EnergyFunctional(GridPtr grid, const EnergyFunctionalParams& params,
                                   const HarmonicTrap& boson_trap, const HarmonicTrap& fermion_trap)
    : grid_(std::move(grid)), params_(params) {
  params_.validate();
  const Grid2D& g = *grid_;
  v_b_ = boson_trap.sample(g);
  v_f_ = fermion_trap.sample(g);
  const std::size_t nr = g.n_rho();
  const std::size_t nz = g.n_z();
  face_r_.assign(g.size(), 0.0);
  face_z_.assign(g.size(), 0.0);
  inv_w_.assign(g.size(), 0.0);
  stencil_diag_.assign(g.size(), 0.0);
  const auto& R = g.rho();
  const auto& Z = g.z();
  // Areas carry the factor 2 of the mirrored z < 0 half, like the volumes.
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nz; ++j) {
      const std::size_t k = g.index(i, j);
      const double area_r = 2.0 * 2.0 * pi * R.face(i + 1) * Z.width(j);
      const double dist_r = i + 1 < nr ? R.center(i + 1) - R.center(i) : 0.5 * R.width(i);
      face_r_[k] = area_r / dist_r;
      const double area_z = 2.0 * 2.0 * pi * R.center(i) * R.width(i);
      const double dist_z = j + 1 < nz ? Z.center(j + 1) - Z.center(j) : 0.5 * Z.width(j);
      face_z_[k] = area_z / dist_z;
      inv_w_[k] = 1.0 / g.volume(k);
    }
  }
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nz; ++j) {
      const std::size_t k = g.index(i, j);
      double s = face_r_[k] + face_z_[k];
      if (i > 0) s += face_r_[k - nz];
      if (j > 0) s += face_z_[k - 1];
      stencil_diag_[k] = s * inv_w_[k];
    }
  }
  const double h2 = hbar * hbar;
  kin_b_ = params_.include_bec_kinetic ? h2 / (2.0 * params_.boson_mass) : 0.0;
  kin_f_ = params_.include_fermi_gradient ? params_.lambda_w * h2 / (2.0 * params_.fermion_mass) : 0.0;
}

namespace {

// Sum over faces of c (f_nb - f_c)^2, with the stencil action accumulated
// into out (unscaled): out_c += c (f_c - f_nb).
double face_sum(const Grid2D& g, std::span<const double> f, const std::vector<double>& face_r,
                const std::vector<double>& face_z, std::span<double> out) {
  const std::size_t nr = g.n_rho();
  const std::size_t nz = g.n_z();
  const bool want = !out.empty();
  CompensatedSum sum;
  for (std::size_t i = 0; i < nr; ++i) {
    const bool has_east = i + 1 < nr;
    for (std::size_t j = 0; j < nz; ++j) {
      const std::size_t k = i * nz + j;
      const double c = f[k];
      const double de = (has_east ? f[k + nz] : 0.0) - c;
      const double te = face_r[k] * de;
      const double dn = (j + 1 < nz ? f[k + 1] : 0.0) - c;
      const double tn = face_z[k] * dn;
      sum.add(te * de + tn * dn);
      if (want) {
        out[k] -= te + tn;
        if (has_east) out[k + nz] += te;
        if (j + 1 < nz) out[k + 1] += tn;
      }
    }
  }
  return sum.value();
}

void check_finite(const EnergyBreakdown& e) {
  if (std::isfinite(e.total())) return;
  const std::pair<const char*, double> terms[] = {
      {"kinetic_b", e.kinetic_b},   {"potential_b", e.potential_b}, {"interaction_bb", e.interaction_bb},
      {"kinetic_f", e.kinetic_f},   {"gradient_f", e.gradient_f},   {"potential_f", e.potential_f},
      {"interaction_bf", e.interaction_bf}};
  for (const auto& [name, value] : terms) {
    if (!std::isfinite(value)) throw Error(ErrorCode::NumericalNaN, std::string("non-finite energy term ") + name);
  }
  throw Error(ErrorCode::NumericalNaN, "non-finite total energy");
}

}  // namespace

EnergyBreakdown EnergyFunctional::evaluate(std::span<const double> psi, std::span<const double> phi,
                                           std::span<double> grad_b, std::span<double> grad_f) const {
  const Grid2D& g = *grid_;
  const std::size_t n = g.size();
  if (psi.size() != n || phi.size() != n) throw Error(ErrorCode::GridMismatch, "field size does not match grid");
  const bool want_b = !grad_b.empty();
  const bool want_f = !grad_f.empty();
  if (want_b) std::fill(grad_b.begin(), grad_b.end(), 0.0);
  if (want_f) std::fill(grad_f.begin(), grad_f.end(), 0.0);

  EnergyBreakdown e;
  if (kin_b_ > 0.0) e.kinetic_b = kin_b_ * face_sum(g, psi, face_r_, face_z_, grad_b);
  if (kin_f_ > 0.0) e.gradient_f = kin_f_ * face_sum(g, phi, face_r_, face_z_, grad_f);

  const double gbb = params_.g_bb;
  const double gbf = params_.g_bf;
  const double ctf = params_.c_tf;
  const auto& w = g.volumes();
  CompensatedSum pb, ibb, kf, pf, ibf;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = psi[k];
    const double f = phi[k];
    const double nb = p * p;
    const double nf = f * f;
    const double cr = std::cbrt(nf);
    const double nf23 = cr * cr;
    const double wk = w[k];
    pb.add(wk * v_b_[k] * nb);
    ibb.add(wk * 0.5 * gbb * nb * nb);
    kf.add(wk * ctf * nf * nf23);
    pf.add(wk * v_f_[k] * nf);
    ibf.add(wk * gbf * nb * nf);
    if (want_b) grad_b[k] = kin_b_ * inv_w_[k] * grad_b[k] + (v_b_[k] + gbb * nb + gbf * nf) * p;
    if (want_f) grad_f[k] = kin_f_ * inv_w_[k] * grad_f[k] + (5.0 / 3.0 * ctf * nf23 + v_f_[k] + gbf * nb) * f;
  }
  e.potential_b = pb.value();
  e.interaction_bb = ibb.value();
  e.kinetic_f = kf.value();
  e.potential_f = pf.value();
  e.interaction_bf = ibf.value();
  check_finite(e);
  return e;
}

EnergyBreakdown EnergyFunctional::energy(std::span<const double> psi, std::span<const double> phi) const {
  return evaluate(psi, phi, {}, {});
}

void EnergyFunctional::hessian_diagonal(std::span<const double> psi, std::span<const double> phi,
                                        std::span<double> diag_b, std::span<double> diag_f) const {
  const double gbb = params_.g_bb;
  const double gbf = params_.g_bf;
  const double ctf = params_.c_tf;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double nb = psi[k] * psi[k];
    const double nf = phi[k] * phi[k];
    const double cr = std::cbrt(nf);
    diag_b[k] = kin_b_ * stencil_diag_[k] + v_b_[k] + 3.0 * gbb * nb + gbf * nf;
    diag_f[k] = kin_f_ * stencil_diag_[k] + 35.0 / 9.0 * ctf * cr * cr + v_f_[k] + gbf * nb;
  }
}

EnergyBreakdown total_energy(const SolverState& state, const EnergyFunctional& functional) {
  return functional.energy(state.psi, state.phi);
}

namespace {

double weighted_norm2(const Grid2D& g, std::span<const double> f) {
  CompensatedSum s;
  const auto& w = g.volumes();
  for (std::size_t k = 0; k < f.size(); ++k) s.add(w[k] * f[k] * f[k]);
  return s.value();
}

double weighted_dot(const Grid2D& g, std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  const auto& w = g.volumes();
  for (std::size_t k = 0; k < a.size(); ++k) s.add(w[k] * a[k] * b[k]);
  return s.value();
}

void renormalize(const Grid2D& g, std::vector<double>& f, double target) {
  if (target <= 0.0) {
    std::fill(f.begin(), f.end(), 0.0);
    return;
  }
  const double norm = weighted_norm2(g, f);
  if (!(norm > 0.0)) throw Error(ErrorCode::NumericalNaN, "field collapsed to zero during renormalisation");
  const double scale = std::sqrt(target / norm);
  for (auto& x : f) x *= scale;
}

// Preconditioned, projected descent direction for one species. The diagonal
// preconditioner is the local curvature relative to the chemical potential,
// floored so it stays positive away from the minimum.
void descent_direction(std::span<const double> field, std::span<const double> grad, std::span<const double> diag,
                       double mu, std::span<double> out) {
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double curvature = std::max(diag[k] - mu, 0.1 * diag[k]);
    out[k] = curvature > 0.0 ? -(grad[k] - mu * field[k]) / curvature : 0.0;
  }
}

}  // namespace

GroundState minimize(const MixtureScenario& scenario, const EnergyFunctionalParams& params, GridPtr grid,
                     const SolverOptions& options, const GroundState* warm_start) {
  scenario.validate();
  const HarmonicTrap boson_trap{scenario.boson};
  const HarmonicTrap fermion_trap{scenario.fermion};
  const EnergyFunctional functional(grid, params, boson_trap, fermion_trap);
  const Grid2D& g = *grid;
  const std::size_t n = g.size();
  const double n_b = scenario.condensed_bosons();
  const double n_f = scenario.n_fermions;

  std::vector<double> dens_b;
  std::vector<double> dens_f;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  if (warm_start) {
    if (!(*warm_start->n_b.grid == g) || !(*warm_start->n_f.grid == g)) {
      throw Error(ErrorCode::GridMismatch, "warm start lives on a different grid");
    }
    dens_b = warm_start->n_b.values;
    dens_f = warm_start->n_f.values;
    // Small multiplicative noise lets the flow leave the previous topology.
    for (std::size_t k = 0; k < n; ++k) {
      dens_b[k] *= 1.0 + options.warm_noise * unit(rng);
      dens_f[k] *= 1.0 + options.warm_noise * unit(rng);
    }
  } else {
    dens_b = bec_tf_profile(boson_trap, n_b, scenario.boson.a_intra, grid).density.values;
    dens_f = fermi_tf_profile(fermion_trap, n_f, grid).density.values;
  }
  const double floor_b = options.seed_floor * *std::max_element(dens_b.begin(), dens_b.end());
  const double floor_f = options.seed_floor * *std::max_element(dens_f.begin(), dens_f.end());

  SolverState state;
  state.psi.resize(n);
  state.phi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    state.psi[k] = std::sqrt(std::max(0.0, dens_b[k]) + floor_b);
    state.phi[k] = std::sqrt(std::max(0.0, dens_f[k]) + floor_f);
  }
  renormalize(g, state.psi, n_b);
  renormalize(g, state.phi, n_f);

  const bool has_bosons = n_b > 0.0;
  std::vector<double> grad_b(n), grad_f(n), diag_b(n), diag_f(n), dir_b(n), dir_f(n);
  std::vector<double> prev_psi = state.psi, prev_phi = state.phi;
  std::vector<double> trial_psi(n), trial_phi(n), trial_gb(n), trial_gf(n);

  EnergyBreakdown current = functional.evaluate(state.psi, state.phi, grad_b, grad_f);
  double energy = current.total();
  if (options.record_history) state.energy_history.push_back(energy);
  state.tau_step = options.initial_step;

  double mu_b = has_bosons ? weighted_dot(g, state.psi, grad_b) / n_b : 0.0;
  double mu_f = weighted_dot(g, state.phi, grad_f) / n_f;
  bool momentum_active = false;
  int quiet_sweeps = 0;
  int rejections = 0;
  long iter = 0;
  bool converged = false;

  for (; iter < options.max_iter; ++iter) {
    functional.hessian_diagonal(state.psi, state.phi, diag_b, diag_f);
    descent_direction(state.phi, grad_f, diag_f, mu_f, dir_f);
    if (has_bosons) descent_direction(state.psi, grad_b, diag_b, mu_b, dir_b);

    const double beta = momentum_active ? options.momentum : 0.0;
    const double tau = state.tau_step;
    for (std::size_t k = 0; k < n; ++k) {
      trial_phi[k] = std::abs(state.phi[k] + tau * dir_f[k] + beta * (state.phi[k] - prev_phi[k]));
      trial_psi[k] =
          has_bosons ? std::abs(state.psi[k] + tau * dir_b[k] + beta * (state.psi[k] - prev_psi[k])) : 0.0;
    }
    renormalize(g, trial_psi, n_b);
    renormalize(g, trial_phi, n_f);
    const EnergyBreakdown trial = functional.evaluate(trial_psi, trial_phi, trial_gb, trial_gf);
    const double trial_energy = trial.total();

    if (trial_energy <= energy) {
      const double decrease = (energy - trial_energy) / std::abs(trial_energy);
      prev_psi.swap(state.psi);
      prev_phi.swap(state.phi);
      state.psi.swap(trial_psi);
      state.phi.swap(trial_phi);
      grad_b.swap(trial_gb);
      grad_f.swap(trial_gf);
      current = trial;
      energy = trial_energy;
      if (options.record_history) state.energy_history.push_back(energy);
      mu_b = has_bosons ? weighted_dot(g, state.psi, grad_b) / n_b : 0.0;
      mu_f = weighted_dot(g, state.phi, grad_f) / n_f;
      state.tau_step = std::min(options.max_step, state.tau_step * options.step_growth);
      momentum_active = options.momentum > 0.0;
      rejections = 0;
      quiet_sweeps = decrease < options.tol_energy ? quiet_sweeps + 1 : 0;
    } else {
      // Drop the momentum first; only a plain step that fails shrinks tau.
      if (!momentum_active) state.tau_step *= 0.5;
      momentum_active = false;
      prev_psi = state.psi;
      prev_phi = state.phi;
      if (++rejections > options.max_rejections) {
        throw Error(ErrorCode::StepUnstable,
                    "energy kept rising after " + std::to_string(options.max_rejections) + " step reductions");
      }
      ++quiet_sweeps;
    }
    if (quiet_sweeps >= options.patience) {
      converged = true;
      ++iter;
      break;
    }
  }

  GroundState gs;
  std::vector<double> nb(n), nf(n);
  for (std::size_t k = 0; k < n; ++k) {
    nb[k] = state.psi[k] * state.psi[k];
    nf[k] = state.phi[k] * state.phi[k];
  }
  gs.n_b = DensityField(grid, std::move(nb), "boson");
  gs.n_f = DensityField(grid, std::move(nf), "fermion");
  gs.energy = current;
  gs.mu_b = mu_b;
  gs.mu_f = mu_f;
  gs.converged = converged;
  gs.iterations = iter;
  gs.energy_history = std::move(state.energy_history);
  gs.mode = params.include_bec_kinetic ? SolverMode::Full : SolverMode::ThomasFermi;
  gs.a_bf = scenario.a_bf;
  if (!converged) log::warn("minimisation did not converge within max_iter");
  return gs;
}

void require_converged(const GroundState& gs) {
  if (!gs.converged) throw Error(ErrorCode::NotConverged, "ground state did not converge");
}

std::vector<GroundState> sweep_ground_states(const MixtureScenario& scenario, std::span<const double> a_bf_list,
                                             SolverMode mode, double lambda_w, GridPtr grid,
                                             const SolverOptions& options, bool cold_start) {
  if (!std::is_sorted(a_bf_list.begin(), a_bf_list.end())) {
    throw Error(ErrorCode::ValidationError, "a_bf list must be sorted ascending");
  }
  std::vector<GroundState> out;
  out.reserve(a_bf_list.size());
  for (double a : a_bf_list) {
    MixtureScenario s = scenario;
    s.a_bf = a;
    const auto params = EnergyFunctionalParams::from(s, mode, lambda_w);
    const GroundState* warm = (cold_start || out.empty()) ? nullptr : &out.back();
    out.push_back(minimize(s, params, grid, options, warm));
  }
  return out;
}

double interface_thickness(const GroundState& gs) {
  const Grid2D& g = *gs.n_f.grid;
  std::vector<double> line(g.n_rho());
  for (std::size_t i = 0; i < g.n_rho(); ++i) line[i] = gs.n_f.at(i, 0);
  const auto peak_it = std::max_element(line.begin(), line.end());
  const double peak = *peak_it;
  if (!(peak > 0.0) || line[0] > 0.5 * peak) {
    throw Error(ErrorCode::NotSeparated, "central fermion density is not depleted below half its maximum");
  }
  const auto crossing = [&](double level) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if (line[i] >= level && line[i - 1] < level) {
        const double r0 = g.rho().center(i - 1);
        const double r1 = g.rho().center(i);
        return r0 + (level - line[i - 1]) / (line[i] - line[i - 1]) * (r1 - r0);
      }
    }
    return g.rho().center(0);
  };
  return crossing(0.9 * peak) - crossing(0.1 * peak);
}

bool resolves_healing_length(const Grid2D& grid, double xi) {
  return grid.rho().min_width() <= 0.25 * xi;
}

}  // namespace mixsep
