#include <doctest.h>

#include <cmath>
#include <random>

#include "mixsep/error.hpp"
#include "mixsep/meanfield.hpp"
#include "mixsep/overlap.hpp"
#include "mixsep/trap_profiles.hpp"

using namespace mixsep;

namespace {

// Frozen from tests/oracles/oracles.py.
constexpr double kOmegaRepresentative = 0.9722222222222223;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

GridPtr grid_for(std::size_t n_rho, std::size_t n_z) {
  GridSpec spec;
  spec.n_rho = n_rho;
  spec.n_z = n_z;
  return default_grid(MixtureScenario{}, spec);
}

struct Analytic {
  DensityField n_f, n_b, n_t;
};

Analytic analytic(GridPtr g) {
  const MixtureScenario s;
  return {fermi_tf_profile(HarmonicTrap{s.fermion}, s.n_fermions, g).density,
          bec_tf_profile(HarmonicTrap{s.boson}, s.condensed_bosons(), s.boson.a_intra, g).density,
          thermal_bose_profile({s.n_bosons, s.condensate_fraction, HarmonicTrap{s.boson}}, g)};
}

constexpr double kL3 = 1e-25 * 1e-12;  // m^6/s

}  // namespace

TEST_SUITE("overlap") {

TEST_CASE("overlap integral basics") {
  const auto g = grid_for(32, 64);
  DensityField zero(g, "boson"), nf(g, "fermion"), nb(g, "boson");
  for (double& v : nf.values) v = 2e18;
  for (double& v : nb.values) v = 3e19;
  CHECK(overlap_integral(nf, zero) == 0.0);
  CHECK(rel(overlap_integral(nf, nb), 2e18 * 3e19 * 3e19 * g->total_volume()) < 1e-13);
  DensityField scaled = nb;
  for (double& v : scaled.values) v *= 1.7;
  CHECK(rel(overlap_integral(nf, scaled), 1.7 * 1.7 * overlap_integral(nf, nb)) < 1e-13);
  DensityField other(grid_for(16, 32), "boson");
  CHECK_THROWS_AS(overlap_integral(nf, other), Error);
}

TEST_CASE("reservoir approximation holds for the noninteracting profiles") {
  const MixtureScenario s;
  const auto a = analytic(grid_for(128, 256));
  const auto q = fra_peak_quantities(s);
  CHECK(rel(overlap_integral(a.n_f, a.n_b), q.n_f * 4.0 / 7.0 * s.condensed_bosons() * q.n_b) < 0.02);
}

TEST_CASE("integrals agree under grid refinement") {
  const auto c = analytic(grid_for(128, 256));
  const auto f = analytic(grid_for(256, 512));
  CHECK(rel(overlap_integral(c.n_f, c.n_b), overlap_integral(f.n_f, f.n_b)) < 1e-2);
  CHECK(rel(mixed_overlap_integral(c.n_f, c.n_b, c.n_t), mixed_overlap_integral(f.n_f, f.n_b, f.n_t)) < 1e-2);
  CHECK(rel(overlap_integral(c.n_f, c.n_t), overlap_integral(f.n_f, f.n_t)) < 1e-2);
}

TEST_CASE("overlap factor") {
  const auto g = grid_for(64, 128);
  const auto a = analytic(g);
  CHECK(omega(a.n_f, a.n_b, a.n_f, a.n_b) == 1.0);
  // Condensate moved entirely outside the Fermi cloud.
  DensityField outside(g, "boson");
  outside.values[g->index(g->n_rho() - 1, g->n_z() - 1)] = 1e20;
  DensityField inside_only = a.n_f;
  inside_only.values[g->index(g->n_rho() - 1, g->n_z() - 1)] = 0.0;
  CHECK(omega(inside_only, outside, a.n_f, a.n_b) == 0.0);
  DensityField zero(g, "boson");
  try {
    omega(a.n_f, a.n_b, a.n_f, zero);
    FAIL("expected ZeroReference");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroReference);
  }
}

TEST_CASE("overlap factor from a measured loss rate") {
  const double nf = 1.2e12 * 1e6, nb = 4.8e13 * 1e6;
  CHECK(omega_from_measurement(2.0 / 7.0 * kL3 * nf * nb, kL3, nf, nb) == doctest::Approx(1.0).epsilon(1e-15));
  const double w = omega_from_measurement(1.6, kL3, nf, nb);
  CHECK(rel(w, kOmegaRepresentative) < 1e-14);
  CHECK(omega_from_measurement(0.8, kL3, nf, nb) == doctest::Approx(0.5 * w).epsilon(1e-15));
  CHECK_THROWS_AS(omega_from_measurement(0.0, kL3, nf, nb), Error);
  CHECK_THROWS_AS(omega_from_measurement(1.0, -kL3, nf, nb), Error);
}

TEST_CASE("effective overlap factor") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double gamma = u(rng), l3 = kL3 * u(rng), nf = 1e18 * u(rng), nb = 1e19 * u(rng);
    REQUIRE(omega_eff(gamma, l3, nf, nb, 0.0, 1.0, 1.0) == omega_from_measurement(gamma, l3, nf, nb));
  }
  const double nf = 1.2e18, nt = 1.4e18;
  CHECK(rel(omega_eff(0.3, kL3, nf, 4e19, nt, 0.0, 1.5), std::sqrt(8.0) * 0.3 / (kL3 * nf * nt)) < 1e-14);
  try {
    omega_eff(0.3, kL3, nf, 0.0, 0.0, 1.0, 1.5);
    FAIL("expected ZeroDenominator");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroDenominator);
  }
}

TEST_CASE("predicted loss rate") {
  const MixtureScenario s;
  const auto g = grid_for(64, 128);
  const auto a = analytic(g);
  DensityField none(g, "thermal");
  const double alpha = 1.5;
  CHECK(rel(predicted_loss_rate(a.n_f, a.n_b, none, kL3, alpha),
            kL3 * 0.5 * alpha * overlap_integral(a.n_f, a.n_b) / a.n_b.integral()) < 1e-13);
  DensityField no_bec(g, "boson");
  CHECK(rel(predicted_loss_rate(a.n_f, no_bec, a.n_t, kL3, alpha),
            kL3 * overlap_integral(a.n_f, a.n_t) / a.n_t.integral()) < 1e-13);
  CHECK(rel(predicted_loss_rate(a.n_f, a.n_b, a.n_t, 3.0 * kL3, alpha),
            3.0 * predicted_loss_rate(a.n_f, a.n_b, a.n_t, kL3, alpha)) < 1e-14);
  CHECK_THROWS_AS(predicted_loss_rate(a.n_f, a.n_b, a.n_t, kL3, 0.5), Error);
}

TEST_CASE("report at a_bf = 0 closes the algebra") {
  const MixtureScenario s;
  const auto g = grid_for(128, 256);
  const auto gs = minimize(s, EnergyFunctionalParams::from(s, SolverMode::ThomasFermi), g, SolverOptions{});
  const auto nt = thermal_cloud(s, g, ThermalModel::Gaussian);
  const auto r = omega_eff_from_ground_state(gs, nt, s, 1.5, kL3, &gs);
  CHECK(r.omega == 1.0);
  CHECK(r.omega_eff == doctest::Approx(1.0).epsilon(0.03));
  const double b = s.condensate_fraction;
  const double bracket = 2.0 / 7.0 * 1.5 * r.peaks.n_b * b + 1.5 * r.peaks.n_t * b +
                         r.peaks.n_t * (1.0 - b) / std::sqrt(8.0);
  CHECK(rel(r.gamma_pred, r.omega_eff * kL3 * r.peaks.n_f * bracket) < 1e-6);
  CHECK(rel(r.gamma_pred, predicted_loss_rate(gs.n_f, gs.n_b, nt, kL3, 1.5)) < 1e-14);
  CHECK_FALSE(r.interface_thickness.has_value());
  CHECK(r.i_bb >= 0.0);
  CHECK(r.i_bt >= 0.0);
  CHECK(r.i_tt >= 0.0);
}

TEST_CASE("sweep: overlap falls with a_bf and warm starts agree with cold starts") {
  const MixtureScenario s;
  const auto g = grid_for(128, 256);
  const std::vector<double> a0{0.0, 150.0, 300.0, 500.0, 700.0, 1000.0, 1500.0};
  std::vector<double> a_bf;
  for (double a : a0) a_bf.push_back(a * units::a0);
  const SolverOptions opt;
  const auto warm = sweep_ground_states(s, a_bf, SolverMode::Full, 1.0 / 9.0, g, opt, false);
  const auto cold = sweep_ground_states(s, a_bf, SolverMode::Full, 1.0 / 9.0, g, opt, true);
  const auto nt = thermal_cloud(s, g, ThermalModel::Gaussian);
  double last_ibb = INFINITY, last_omega = INFINITY;
  for (std::size_t k = 0; k < a_bf.size(); ++k) {
    MixtureScenario sk = s;
    sk.a_bf = a_bf[k];
    REQUIRE(warm[k].converged);
    REQUIRE(cold[k].converged);
    const auto rw = omega_eff_from_ground_state(warm[k], nt, sk, 1.5, kL3, &warm[0]);
    const auto rc = omega_eff_from_ground_state(cold[k], nt, sk, 1.5, kL3, &cold[0]);
    INFO("a_bf = " << a0[k]);
    CHECK(rel(rw.omega_eff, rc.omega_eff) < 1e-2);
    CHECK(rw.i_bb <= last_ibb);
    CHECK(rw.omega <= last_omega);
    if (k > 0) {
      CHECK(rw.omega > 0.0);
      CHECK(rw.omega < 1.0);
    }
    last_ibb = rw.i_bb;
    last_omega = rw.omega;
  }
}

TEST_CASE("thermal cloud models") {
  const MixtureScenario s;
  const auto g = grid_for(64, 128);
  const auto gauss = thermal_cloud(s, g, ThermalModel::Gaussian);
  const auto semi = thermal_cloud(s, g, ThermalModel::Semiclassical);
  CHECK(rel(semi.integral(), s.thermal_bosons()) < 1e-6);
  CHECK(rel(gauss.integral(), s.thermal_bosons()) < 1e-3);
  CHECK(parse_thermal_model("semiclassical") == ThermalModel::Semiclassical);
  CHECK(std::string(to_string(ThermalModel::Gaussian)) == "gaussian");
  CHECK_THROWS_AS(parse_thermal_model("bogus"), Error);
}

}  // TEST_SUITE
