#include <doctest.h>

#include <cmath>
#include <random>

#include "mixsep/error.hpp"
#include "mixsep/physics.hpp"

using namespace mixsep;

namespace {

// Frozen from tests/oracles/oracles.py.
constexpr double kA_at_b0_minus_0p1 = 638.8409999998686;  // a0
constexpr double kKf_1p2e12 = 4142006.2251554145;        // m^-1
constexpr double kEf_1p2e12_nK = 693.5219163154671;
constexpr double kCritical_a0 = 606.1785249130901;
constexpr double kHealing_um = 0.5071661256255272;

constexpr double kNf = 1.2e12 * units::per_cm3;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("physics") {

TEST_CASE("feshbach examples") {
  FeshbachResonance res;
  const double b0 = res.b0.gauss();
  CHECK(field_for_scattering_length(res, 0.0).gauss() == doctest::Approx(b0 + 0.949).epsilon(1e-13));
  CHECK(scattering_length(res, MagneticField::from_gauss(335.057L - 0.1L)) / units::a0 ==
        doctest::Approx(kA_at_b0_minus_0p1).epsilon(1e-12));
  CHECK(field_for_scattering_length(res, 638.841 * units::a0).gauss() ==
        doctest::Approx(b0 - 0.1).epsilon(1e-12));
  CHECK(field_for_scattering_length(res, 2.0 * res.a_bg).gauss() == doctest::Approx(b0 - 0.949).epsilon(1e-13));
}

TEST_CASE("feshbach errors") {
  FeshbachResonance res;
  CHECK_THROWS_AS(scattering_length(res, res.b0), Error);
  try {
    field_for_scattering_length(res, res.a_bg);
    FAIL("expected Unreachable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unreachable);
  }
}

TEST_CASE("feshbach round trip over [-5000, 5000] a0") {
  FeshbachResonance res;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-5000.0, 5000.0);
  const double abg = res.a_bg / units::a0;
  int tested = 0;
  while (tested < 2000) {
    const double a = dist(rng);
    if (std::abs(a - abg) <= 1.0) continue;
    const double back = scattering_length(res, field_for_scattering_length(res, a * units::a0)) / units::a0;
    REQUIRE(std::abs(back - a) <= 1e-12 * std::max(std::abs(a), 1.0));
    ++tested;
  }
}

TEST_CASE("a(B) increases on each side of the pole") {
  FeshbachResonance res;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> off(1e-4, 20.0);
  for (int k = 0; k < 1000; ++k) {
    const int side = (k % 2 == 0) ? 1 : -1;
    double d1 = off(rng), d2 = off(rng);
    if (d1 == d2) continue;
    if (d1 > d2) std::swap(d1, d2);
    // On the low side the field d2 below b0 is the smaller field.
    const long double b0 = res.b0.gauss();
    const long double lo = side > 0 ? b0 + d1 : b0 - d2;
    const long double hi = side > 0 ? b0 + d2 : b0 - d1;
    REQUIRE(scattering_length(res, MagneticField::from_gauss(lo)) <
            scattering_length(res, MagneticField::from_gauss(hi)));
  }
}

TEST_CASE("fermi wavenumber and energy") {
  CHECK(rel(fermi_wavenumber(kNf), kKf_1p2e12) < 1e-12);
  CHECK(rel(fermi_energy(kNf, 6.0 * units::u) / constants::boltzmann / units::nanokelvin, kEf_1p2e12_nK) < 1e-12);
  CHECK(rel(fermi_wavenumber(8.0 * kNf), 2.0 * fermi_wavenumber(kNf)) < 1e-14);
  CHECK_THROWS_AS(fermi_wavenumber(0.0), Error);
  CHECK_THROWS_AS(fermi_wavenumber(-1.0), Error);
}

TEST_CASE("critical scattering length") {
  const double abb = 60.9 * units::a0;
  CHECK(rel(critical_scattering_length(abb, kNf) / units::a0, kCritical_a0) < 1e-12);
  CHECK(rel(critical_scattering_length(abb, 64.0 * kNf), 0.5 * critical_scattering_length(abb, kNf)) < 1e-14);
  CHECK(rel(critical_scattering_length(4.0 * abb, kNf), 2.0 * critical_scattering_length(abb, kNf)) < 1e-14);
  CHECK_THROWS_AS(critical_scattering_length(0.0, kNf), Error);
  CHECK_THROWS_AS(critical_scattering_length(abb, 0.0), Error);
}

TEST_CASE("critical a_bf times n^(1/6) is constant") {
  const double abb = 60.9 * units::a0;
  const double ref = critical_scattering_length(abb, kNf) * std::pow(kNf, 1.0 / 6.0);
  for (double f = 1e-3; f < 1e3; f *= 1.7) {
    const double n = f * kNf;
    const double c = critical_scattering_length(abb, n) * std::pow(n, 1.0 / 6.0);
    CHECK(rel(c, ref) < 1e-12);
    CHECK(std::isfinite(c));
  }
}

TEST_CASE("healing length") {
  const double abb = 60.9 * units::a0;
  const double nb = 40.0 * kNf;
  CHECK(rel(healing_length(nb, abb) / units::micrometer, kHealing_um) < 1e-12);
  CHECK(rel(healing_length(4.0 * nb, abb), 0.5 * healing_length(nb, abb)) < 1e-14);
  CHECK(rel(healing_length(nb, 4.0 * abb), 0.5 * healing_length(nb, abb)) < 1e-14);
  CHECK_THROWS_AS(healing_length(0.0, abb), Error);
}

TEST_CASE("default species") {
  const SpeciesParams li = default_lithium();
  const SpeciesParams k = default_potassium();
  CHECK(li.aspect_ratio() == doctest::Approx(41.6 / 291.0));
  CHECK(k.omega_bar() / li.omega_bar() == doctest::Approx(std::sqrt(6.0 / 41.0) * 1.30));
  CHECK(k.omega_bar() / li.omega_bar() == doctest::Approx(0.50).epsilon(0.01));
  SpeciesParams bad = li;
  bad.mass = 0.0;
  CHECK_THROWS_AS(bad.validate("lithium"), Error);
}

TEST_CASE("couplings") {
  const double m_b = 41.0 * units::u, m_f = 6.0 * units::u;
  const double a = 100.0 * units::a0;
  const double hb2 = constants::hbar * constants::hbar;
  CHECK(rel(boson_coupling(a, m_b), 4.0 * constants::pi * hb2 * a / m_b) < 1e-15);
  const double mr = m_b * m_f / (m_b + m_f);
  CHECK(rel(mixed_coupling(a, m_b, m_f), 2.0 * constants::pi * hb2 * a / mr) < 1e-14);
  CHECK(rel(fermi_kinetic_coefficient(m_f),
            0.6 * hb2 / (2.0 * m_f) * std::pow(6.0 * constants::pi * constants::pi, 2.0 / 3.0)) < 1e-14);
}

TEST_CASE("error categories map to exit codes") {
  CHECK(exit_code_for(category_of(ErrorCode::ValidationError)) == 2);
  CHECK(exit_code_for(category_of(ErrorCode::NotConverged)) == 3);
  CHECK(exit_code_for(category_of(ErrorCode::MissingInput)) == 4);
}

}  // TEST_SUITE
