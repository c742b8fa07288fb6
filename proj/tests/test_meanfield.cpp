#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mixsep/error.hpp"
#include "mixsep/meanfield.hpp"
#include "mixsep/physics.hpp"
#include "mixsep/trap_profiles.hpp"

using namespace mixsep;

namespace {

// Frozen from tests/oracles/oracles.py: N = 1e4 K-41 atoms in a Gaussian of
// width 1.5 um in an isotropic 100 Hz trap.
constexpr double kGaussianEnergy = 9.98062088976094e-28;  // J

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

GridPtr grid_for(const MixtureScenario& s, std::size_t n_rho, std::size_t n_z) {
  GridSpec spec;
  spec.n_rho = n_rho;
  spec.n_z = n_z;
  return default_grid(s, spec);
}

std::vector<double> sqrt_of(const std::vector<double>& n) {
  std::vector<double> out(n.size());
  std::transform(n.begin(), n.end(), out.begin(), [](double x) { return std::sqrt(x); });
  return out;
}

MixtureScenario at(double a_bf_a0) {
  MixtureScenario s;
  s.a_bf = a_bf_a0 * units::a0;
  return s;
}

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("parameters") {
  const auto p = EnergyFunctionalParams::from(at(500.0), SolverMode::Full);
  CHECK(rel(p.g_bf, mixed_coupling(500.0 * units::a0, p.boson_mass, p.fermion_mass)) < 1e-15);
  CHECK(p.include_bec_kinetic);
  const auto tf = EnergyFunctionalParams::from(at(500.0), SolverMode::ThomasFermi);
  CHECK_FALSE(tf.include_bec_kinetic);
  CHECK_FALSE(tf.include_fermi_gradient);
  auto bad = p;
  bad.lambda_w = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK(parse_solver_mode("tf") == SolverMode::ThomasFermi);
  CHECK(parse_solver_mode("full") == SolverMode::Full);
  CHECK_THROWS_AS(parse_solver_mode("exact"), Error);
}

TEST_CASE("uniform fields without trap or gradients") {
  const auto grid = make_grid(GridSpec{8, 12, 4e-6, 6e-6, 0.0, 0.0});
  auto p = EnergyFunctionalParams::from(at(250.0), SolverMode::ThomasFermi);
  SpeciesParams free_b{p.boson_mass, 0.0, 0.0, 0.0};
  SpeciesParams free_f{p.fermion_mass, 0.0, 0.0, 0.0};
  const EnergyFunctional f(grid, p, HarmonicTrap{free_b}, HarmonicTrap{free_f});
  const double nb = 3e19, nf = 2e18;
  const std::vector<double> psi(grid->size(), std::sqrt(nb)), phi(grid->size(), std::sqrt(nf));
  const double expected =
      grid->total_volume() * (p.c_tf * std::pow(nf, 5.0 / 3.0) + p.g_bf * nb * nf + 0.5 * p.g_bb * nb * nb);
  CHECK(rel(f.energy(psi, phi).total(), expected) < 1e-12);
}

TEST_CASE("gaussian in an isotropic trap matches the oscillator energy") {
  const double mass = 41.0 * units::u;
  const double w = units::hz_to_rad(100.0);
  const double s = 1.5e-6, n_atoms = 1.0e4;
  const auto grid = make_grid(GridSpec{512, 512, 8 * s, 8 * s, 0.0, 0.0});
  EnergyFunctionalParams p;
  p.boson_mass = mass;
  p.fermion_mass = 6.0 * units::u;
  p.g_bb = 0.0;
  p.g_bf = 0.0;
  p.c_tf = fermi_kinetic_coefficient(p.fermion_mass);
  SpeciesParams sp{mass, w, w, 0.0};
  const EnergyFunctional f(grid, p, HarmonicTrap{sp}, HarmonicTrap{sp});
  std::vector<double> psi(grid->size()), phi(grid->size(), 0.0);
  const double amp = std::sqrt(n_atoms / (std::pow(constants::pi, 1.5) * s * s * s));
  for (std::size_t i = 0; i < grid->n_rho(); ++i) {
    for (std::size_t j = 0; j < grid->n_z(); ++j) {
      const double r2 = std::pow(grid->rho().center(i), 2) + std::pow(grid->z().center(j), 2);
      psi[grid->index(i, j)] = amp * std::exp(-r2 / (2 * s * s));
    }
  }
  const auto e = f.energy(psi, phi);
  CHECK(rel(e.total(), kGaussianEnergy) < 1e-4);
  CHECK(rel(e.kinetic_b, e.potential_b * std::pow(constants::hbar / (mass * w * s * s), 2)) < 1e-3);
}

TEST_CASE("breakdown sums to the total") {
  const MixtureScenario s = at(400.0);
  const auto grid = grid_for(s, 32, 64);
  const auto p = EnergyFunctionalParams::from(s, SolverMode::Full);
  const EnergyFunctional f(grid, p, HarmonicTrap{s.boson}, HarmonicTrap{s.fermion});
  const auto nb = bec_tf_profile(HarmonicTrap{s.boson}, s.condensed_bosons(), s.boson.a_intra, grid);
  const auto nf = fermi_tf_profile(HarmonicTrap{s.fermion}, s.n_fermions, grid);
  const auto e = f.energy(sqrt_of(nb.density.values), sqrt_of(nf.density.values));
  const double plain = e.kinetic_b + e.potential_b + e.interaction_bb + e.kinetic_f + e.gradient_f +
                       e.potential_f + e.interaction_bf;
  CHECK(rel(plain, e.total()) < 1e-10);
}

TEST_CASE("non-finite input names the offending term") {
  const MixtureScenario s;
  const auto grid = grid_for(s, 16, 32);
  const EnergyFunctional f(grid, EnergyFunctionalParams::from(s, SolverMode::Full), HarmonicTrap{s.boson},
                           HarmonicTrap{s.fermion});
  std::vector<double> psi(grid->size(), 1e9), phi(grid->size(), 1e9);
  psi[5] = std::nan("");
  try {
    f.energy(psi, phi);
    FAIL("expected NumericalNaN");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericalNaN);
    CHECK(std::string(e.what()).find("term") != std::string::npos);
  }
}

TEST_CASE("Thomas-Fermi condensate is the minimiser of the TF energy") {
  const MixtureScenario s;
  const auto grid = grid_for(s, 64, 128);
  const auto p = EnergyFunctionalParams::from(s, SolverMode::ThomasFermi);
  const EnergyFunctional f(grid, p, HarmonicTrap{s.boson}, HarmonicTrap{s.fermion});
  const auto tf = bec_tf_profile(HarmonicTrap{s.boson}, s.condensed_bosons(), s.boson.a_intra, grid);
  const std::vector<double> phi(grid->size(), 0.0);
  const auto psi0 = sqrt_of(tf.density.values);
  const double e0 = f.energy(psi0, phi).total();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> psi = psi0;
      for (double& x : psi) x *= 1.0 + eps * u(rng);
      std::vector<double> dens(psi.size());
      for (std::size_t k = 0; k < psi.size(); ++k) dens[k] = psi[k] * psi[k];
      const double scale = std::sqrt(s.condensed_bosons() / integrate(*grid, dens));
      for (double& x : psi) x *= scale;
      CHECK(f.energy(psi, phi).total() > e0);
    }
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  const MixtureScenario s = at(300.0);
  const auto grid = grid_for(s, 32, 64);
  const auto p = EnergyFunctionalParams::from(s, SolverMode::Full);
  const EnergyFunctional f(grid, p, HarmonicTrap{s.boson}, HarmonicTrap{s.fermion});
  const auto nb = bec_tf_profile(HarmonicTrap{s.boson}, s.condensed_bosons(), s.boson.a_intra, grid);
  const auto nf = fermi_tf_profile(HarmonicTrap{s.fermion}, s.n_fermions, grid);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.8, 1.2);
  auto psi = sqrt_of(nb.density.values);
  auto phi = sqrt_of(nf.density.values);
  for (double& x : psi) x *= u(rng);
  for (double& x : phi) x *= u(rng);
  std::vector<double> gb(grid->size()), gf(grid->size());
  f.evaluate(psi, phi, gb, gf);

  // Sample among cells where the field is appreciable.
  auto pick = [&](const std::vector<double>& field) {
    const double top = *std::max_element(field.begin(), field.end());
    std::vector<std::size_t> cells;
    for (std::size_t k = 0; k < field.size(); ++k) {
      if (field[k] > 0.05 * top) cells.push_back(k);
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    cells.resize(std::min<std::size_t>(cells.size(), 50));
    return cells;
  };
  auto check_field = [&](std::vector<double>& field, const std::vector<double>& grad, bool boson) {
    for (std::size_t k : pick(field)) {
      const double x = field[k];
      const double h = 1e-4 * x;
      field[k] = x + h;
      const double ep = f.energy(psi, phi).total();
      field[k] = x - h;
      const double em = f.energy(psi, phi).total();
      field[k] = x;
      const double fd = (ep - em) / (2.0 * h) / (2.0 * grid->volume(k));
      INFO("boson=" << boson << " cell=" << k);
      CHECK(rel(fd, grad[k]) < 1e-6);
    }
  };
  check_field(psi, gb, true);
  check_field(phi, gf, false);
}

TEST_CASE("minimise conserves atoms and never raises the energy") {
  const MixtureScenario s = at(300.0);
  const auto grid = grid_for(s, 48, 96);
  for (SolverMode mode : {SolverMode::Full, SolverMode::ThomasFermi}) {
    const auto gs = minimize(s, EnergyFunctionalParams::from(s, mode), grid, SolverOptions{});
    CHECK(gs.converged);
    CHECK(rel(gs.n_b.integral(), s.condensed_bosons()) < 1e-12);
    CHECK(rel(gs.n_f.integral(), s.n_fermions) < 1e-12);
    REQUIRE(gs.energy_history.size() > 2);
    for (std::size_t k = 1; k < gs.energy_history.size(); ++k) {
      REQUIRE(gs.energy_history[k] <= gs.energy_history[k - 1] + 1e-12 * std::abs(gs.energy_history[k - 1]));
    }
    for (double v : gs.n_b.values) REQUIRE(v >= 0.0);
    for (double v : gs.n_f.values) REQUIRE(v >= 0.0);
  }
}

TEST_CASE("Thomas-Fermi ground state satisfies the algebraic equations") {
  const MixtureScenario s = at(300.0);
  const auto grid = grid_for(s, 64, 128);
  const auto p = EnergyFunctionalParams::from(s, SolverMode::ThomasFermi);
  SolverOptions opt;
  opt.tol_energy = 1e-14;
  const auto gs = minimize(s, p, grid, opt);
  REQUIRE(gs.converged);
  const auto vb = HarmonicTrap{s.boson}.sample(*grid);
  const auto vf = HarmonicTrap{s.fermion}.sample(*grid);
  const double peak_b = gs.n_b.peak(), peak_f = gs.n_f.peak();
  double worst_b = 0.0, worst_f = 0.0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double nb = gs.n_b.values[k], nf = gs.n_f.values[k];
    if (nb > 1e-2 * peak_b) {
      worst_b = std::max(worst_b, rel(vb[k] + p.g_bb * nb + p.g_bf * nf, gs.mu_b));
    }
    if (nf > 1e-2 * peak_f) {
      const double local = 5.0 / 3.0 * p.c_tf * std::pow(nf, 2.0 / 3.0) + vf[k] + p.g_bf * nb;
      worst_f = std::max(worst_f, rel(local, gs.mu_f));
    }
  }
  CHECK(worst_b < 1e-3);
  CHECK(worst_f < 1e-3);
}

TEST_CASE("halving the spacing moves the total energy by less than 1%") {
  const MixtureScenario s = at(600.0);
  const auto p = EnergyFunctionalParams::from(s, SolverMode::Full);
  const auto coarse = minimize(s, p, grid_for(s, 128, 256), SolverOptions{});
  const auto fine = minimize(s, p, grid_for(s, 256, 512), SolverOptions{});
  REQUIRE(coarse.converged);
  REQUIRE(fine.converged);
  CHECK(rel(coarse.energy.total(), fine.energy.total()) < 1e-2);
}

TEST_CASE("iteration cap flags the state as unconverged") {
  const MixtureScenario s = at(300.0);
  const auto grid = grid_for(s, 32, 64);
  SolverOptions opt;
  opt.max_iter = 5;
  const auto gs = minimize(s, EnergyFunctionalParams::from(s, SolverMode::Full), grid, opt);
  CHECK_FALSE(gs.converged);
  try {
    require_converged(gs);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotConverged);
  }
}

TEST_CASE("sweep over a single point equals minimise") {
  const MixtureScenario s;
  const auto grid = grid_for(s, 32, 64);
  const SolverOptions opt;
  const std::vector<double> list{0.0};
  const auto sweep = sweep_ground_states(s, list, SolverMode::Full, 1.0 / 9.0, grid, opt);
  const auto gs = minimize(s, EnergyFunctionalParams::from(s, SolverMode::Full), grid, opt);
  REQUIRE(sweep.size() == 1);
  CHECK(sweep[0].n_b.values == gs.n_b.values);
  CHECK(sweep[0].n_f.values == gs.n_f.values);
  const std::vector<double> unsorted{2.0 * units::a0, 1.0 * units::a0};
  CHECK_THROWS_AS(sweep_ground_states(s, unsorted, SolverMode::Full, 1.0 / 9.0, grid, opt), Error);
}

TEST_CASE("default grid resolves the healing length") {
  const MixtureScenario s;
  const auto grid = grid_for(s, 128, 256);
  const auto q = fra_peak_quantities(s);
  CHECK(resolves_healing_length(*grid, healing_length(q.n_b, s.boson.a_intra)));
  CHECK_FALSE(resolves_healing_length(*grid_for(s, 8, 16), healing_length(q.n_b, s.boson.a_intra)));
}

TEST_CASE("interface thickness") {
  const MixtureScenario s = at(2000.0);
  const auto grid = grid_for(s, 128, 256);
  const auto q = fra_peak_quantities(s);
  const double xi = healing_length(q.n_b, s.boson.a_intra);

  const auto full = minimize(s, EnergyFunctionalParams::from(s, SolverMode::Full), grid, SolverOptions{});
  const double t_full = interface_thickness(full);
  CHECK(t_full > 0.5 * xi);
  CHECK(t_full < 2.0 * xi);

  const auto tf = minimize(s, EnergyFunctionalParams::from(s, SolverMode::ThomasFermi), grid, SolverOptions{});
  // Largest radial cell near the interface bounds two cells.
  double widest = 0.0;
  for (std::size_t i = 0; i < grid->n_rho(); ++i) {
    if (grid->rho().center(i) < 2.0 * t_full + 5e-6) widest = std::max(widest, grid->rho().width(i));
  }
  CHECK(interface_thickness(tf) <= 2.0 * widest);

  const MixtureScenario weak = at(100.0);
  const auto mixed = minimize(weak, EnergyFunctionalParams::from(weak, SolverMode::Full), grid, SolverOptions{});
  try {
    interface_thickness(mixed);
    FAIL("expected NotSeparated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSeparated);
  }
}

}  // TEST_SUITE
