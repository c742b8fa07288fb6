#ifndef MIXSEP_MEANFIELD_HPP
#define MIXSEP_MEANFIELD_HPP

// Zero-temperature mean-field ground state of the trapped Bose-Fermi mixture.
//
// The condensate enters through psi = sqrt(n_b) and the Fermi sea through
// phi = sqrt(n_f), the latter described by the Thomas-Fermi kinetic energy
// plus a von Weizsaecker gradient correction. The energy
//
//   E = int [ hbar^2/2m_b |grad psi|^2 + V_b n_b + g_bb/2 n_b^2
//           + c_TF n_f^(5/3) + lambda_W hbar^2/8m_f |grad n_f|^2 / n_f
//           + V_f n_f + g_bf n_b n_f ] dV
//
// is discretised on the (rho, z) grid and minimised by normalised
// imaginary-time gradient flow. With phi = sqrt(n_f) the gradient correction
// is exactly lambda_W hbar^2/2m_f |grad phi|^2, which has no singularity at
// the cloud edge.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixsep/grid.hpp"
#include "mixsep/scenario.hpp"
#include "mixsep/trap_profiles.hpp"

namespace mixsep {

enum class SolverMode { Full, ThomasFermi };

const char* to_string(SolverMode mode);
SolverMode parse_solver_mode(const std::string& text);

struct EnergyFunctionalParams {
  double boson_mass = 0.0;
  double fermion_mass = 0.0;
  double g_bb = 0.0;      // J m^3
  double g_bf = 0.0;      // J m^3
  double c_tf = 0.0;      // J m^2
  double lambda_w = 1.0 / 9.0;
  bool include_bec_kinetic = true;
  bool include_fermi_gradient = true;

  static EnergyFunctionalParams from(const MixtureScenario& scenario, SolverMode mode,
                                     double lambda_w = 1.0 / 9.0);
  void validate() const;
};

struct EnergyBreakdown {
  double kinetic_b = 0.0;
  double potential_b = 0.0;
  double interaction_bb = 0.0;
  double kinetic_f = 0.0;   // Thomas-Fermi c n^(5/3)
  double gradient_f = 0.0;  // von Weizsaecker
  double potential_f = 0.0;
  double interaction_bf = 0.0;

  double total() const;
};

// Discretised functional on a fixed grid. The gradient it returns is the
// exact derivative of the discrete energy, G_k = (1/2 w_k) dE/dpsi_k, i.e.
// the discrete analogue of H psi.
class EnergyFunctional {
 public:
  EnergyFunctional(GridPtr grid, const EnergyFunctionalParams& params, const HarmonicTrap& boson_trap,
                   const HarmonicTrap& fermion_trap);

  EnergyBreakdown energy(std::span<const double> psi, std::span<const double> phi) const;
  // Energy plus both gradients in one pass. Gradients may be empty spans.
  EnergyBreakdown evaluate(std::span<const double> psi, std::span<const double> phi, std::span<double> grad_b,
                           std::span<double> grad_f) const;
  // Diagonal of the Hessian of E/(2w) with respect to each field.
  void hessian_diagonal(std::span<const double> psi, std::span<const double> phi, std::span<double> diag_b,
                        std::span<double> diag_f) const;

  const Grid2D& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  const EnergyFunctionalParams& params() const { return params_; }
  const std::vector<double>& boson_potential() const { return v_b_; }
  const std::vector<double>& fermion_potential() const { return v_f_; }

 private:
  GridPtr grid_;
  EnergyFunctionalParams params_;
  std::vector<double> v_b_, v_f_;
  std::vector<double> face_r_;  // area/distance of the face towards rho + 1
  std::vector<double> face_z_;  // area/distance of the face towards z + 1
  std::vector<double> inv_w_;
  std::vector<double> stencil_diag_;  // sum of face coefficients / w
  double kin_b_ = 0.0;  // hbar^2 / 2 m_b, zero when disabled
  double kin_f_ = 0.0;  // lambda_W hbar^2 / 2 m_f, zero when disabled
};

struct SolverState {
  std::vector<double> psi;  // sqrt(n_b)
  std::vector<double> phi;  // sqrt(n_f)
  double tau_step = 0.0;    // current step multiplier
  std::vector<double> energy_history;
};

// Total energy of a state with per-term breakdown.
EnergyBreakdown total_energy(const SolverState& state, const EnergyFunctional& functional);

struct SolverOptions {
  double tol_energy = 1e-10;     // relative decrease per sweep
  int patience = 10;             // consecutive sweeps below tol_energy
  long max_iter = 200000;
  double initial_step = 0.1;
  double max_step = 0.9;
  double step_growth = 1.05;
  // Heavy-ball coefficient; 0 gives plain explicit Euler. Momentum is
  // dropped whenever a step would raise the energy.
  double momentum = 0.9;
  int max_rejections = 20;
  double seed_floor = 1e-8;      // relative density floor added at start
  double warm_noise = 0.01;      // relative multiplicative noise on warm starts
  std::uint64_t seed = 42;
  bool record_history = true;
};

struct GroundState {
  DensityField n_b;
  DensityField n_f;
  EnergyBreakdown energy;
  double mu_b = 0.0;  // J
  double mu_f = 0.0;  // J
  bool converged = false;
  long iterations = 0;
  std::vector<double> energy_history;
  SolverMode mode = SolverMode::Full;
  double a_bf = 0.0;
};

// Minimises the functional for the scenario, starting from the Thomas-Fermi
// profiles or from a supplied warm start. Returns converged = false when
// max_iter is exhausted; throws StepUnstable when step halving cannot
// restore an energy decrease.
GroundState minimize(const MixtureScenario& scenario, const EnergyFunctionalParams& params, GridPtr grid,
                     const SolverOptions& options, const GroundState* warm_start = nullptr);

// Throws NotConverged if the state did not converge.
void require_converged(const GroundState& gs);

// Sequential solves over ascending a_bf, each warm-started from the previous
// point unless cold_start is set. Non-converged points are kept and flagged.
std::vector<GroundState> sweep_ground_states(const MixtureScenario& scenario, std::span<const double> a_bf_list,
                                             SolverMode mode, double lambda_w, GridPtr grid,
                                             const SolverOptions& options, bool cold_start = false);

// Radial 10%-90% rise of n_f along z = 0, measured outward from the trap
// centre against the maximum along that line. Throws NotSeparated unless
// the central fermion density is depleted by more than half.
double interface_thickness(const GroundState& gs);

// Grid spacing check against the healing length at the condensate peak.
bool resolves_healing_length(const Grid2D& grid, double xi);

}  // namespace mixsep

#endif  // MIXSEP_MEANFIELD_HPP
