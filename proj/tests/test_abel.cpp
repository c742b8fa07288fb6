#include <doctest.h>

#include <cmath>
#include <random>

#include "mixsep/abel.hpp"
#include "mixsep/error.hpp"

using namespace mixsep;

namespace {

constexpr double kPi = 3.14159265358979323846;

RadialProfile gaussian(std::size_t n, double h, double sigma) {
  RadialProfile p = RadialProfile::uniform(n, h);
  for (std::size_t k = 0; k < n; ++k) p.values[k] = std::exp(-p.rho[k] * p.rho[k] / (sigma * sigma));
  return p;
}

double l2_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += b[k] * b[k];
  }
  return std::sqrt(num / den);
}

// Odd number of samples centred on y = 0.
ColumnSlice two_sided(const std::vector<double>& f, double h) {
  ColumnSlice s = ColumnSlice::uniform(f.size(), h, -static_cast<double>(f.size() / 2) * h);
  s.values = f;
  return s;
}

}  // namespace

TEST_SUITE("abel") {

TEST_CASE("forward transform of a gaussian") {
  const double sigma = 1.0, h = 0.025;
  const auto p = gaussian(200, h, sigma);
  const auto f = forward_abel(p);
  REQUIRE(f.values.size() == p.values.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < f.y.size(); ++k) {
    const double exact = std::sqrt(kPi) * sigma * std::exp(-f.y[k] * f.y[k] / (sigma * sigma));
    worst = std::max(worst, std::abs(f.values[k] - exact));
  }
  CHECK(worst / (std::sqrt(kPi) * sigma) < 1e-4);
}

TEST_CASE("forward transform of zero and of a uniform disk") {
  RadialProfile zero = RadialProfile::uniform(50, 0.1);
  for (double v : forward_abel(zero).values) CHECK(v == 0.0);

  const double r_disk = 1.0, h = 0.0025;
  RadialProfile disk = RadialProfile::uniform(800, h);
  // The sample on the edge takes the mean of the two sides.
  for (std::size_t k = 0; k < disk.rho.size(); ++k) {
    disk.values[k] = k < 400 ? 3.0 : (k == 400 ? 1.5 : 0.0);
  }
  const auto f = forward_abel(disk);
  for (std::size_t k = 0; k < f.y.size(); ++k) {
    if (f.y[k] > 0.9 * r_disk) break;
    const double exact = 2.0 * 3.0 * std::sqrt(r_disk * r_disk - f.y[k] * f.y[k]);
    REQUIRE(std::abs(f.values[k] - exact) / exact < 1e-3);
  }
}

TEST_CASE("inverse of forward reproduces a gaussian") {
  const auto p = gaussian(200, 0.025, 1.0);
  const auto f = forward_abel(p);
  for (AbelMethod m : {AbelMethod::ThreePoint, AbelMethod::OnionPeeling}) {
    const auto back = inverse_abel(f, m);
    INFO(to_string(m));
    CHECK(l2_rel(back.values, p.values) < 1e-2);
  }
}

TEST_CASE("forward of inverse reproduces a column density") {
  const double h = 0.025;
  ColumnSlice s = ColumnSlice::uniform(200, h);
  for (std::size_t k = 0; k < s.y.size(); ++k) s.values[k] = std::sqrt(kPi) * std::exp(-s.y[k] * s.y[k]);
  const auto n = inverse_abel(s);
  CHECK(l2_rel(forward_abel(n).values, s.values) < 1e-2);
}

TEST_CASE("both transforms are linear") {
  const auto p1 = gaussian(120, 0.05, 1.0);
  auto p2 = gaussian(120, 0.05, 2.0);
  for (std::size_t k = 0; k < p2.values.size(); ++k) p2.values[k] *= std::cos(p2.rho[k]);
  const double a = 1.7, b = -0.4;
  RadialProfile mix = p1;
  for (std::size_t k = 0; k < mix.values.size(); ++k) mix.values[k] = a * p1.values[k] + b * p2.values[k];
  const auto f1 = forward_abel(p1), f2 = forward_abel(p2), fm = forward_abel(mix);
  for (std::size_t k = 0; k < fm.values.size(); ++k) {
    REQUIRE(std::abs(fm.values[k] - (a * f1.values[k] + b * f2.values[k])) < 1e-10 * std::abs(f1.values[0]));
  }
  ColumnSlice smix = f1;
  for (std::size_t k = 0; k < smix.values.size(); ++k) smix.values[k] = a * f1.values[k] + b * f2.values[k];
  for (AbelMethod m : {AbelMethod::ThreePoint, AbelMethod::OnionPeeling}) {
    const auto i1 = inverse_abel(f1, m, 1.0), i2 = inverse_abel(f2, m, 1.0), im = inverse_abel(smix, m, 1.0);
    for (std::size_t k = 0; k < im.values.size(); ++k) {
      REQUIRE(std::abs(im.values[k] - (a * i1.values[k] + b * i2.values[k])) < 1e-10 * std::abs(i1.values[0]));
    }
  }
}

TEST_CASE("mass is conserved by the inverse transform") {
  const auto p = gaussian(200, 0.025, 1.0);
  const auto f = forward_abel(p);
  for (AbelMethod m : {AbelMethod::ThreePoint, AbelMethod::OnionPeeling}) {
    CHECK(profile_mass(inverse_abel(f, m)) == doctest::Approx(slice_mass(f)).epsilon(1e-2));
  }
  CHECK(slice_mass(f) == doctest::Approx(kPi).epsilon(1e-3));
}

TEST_CASE("noise-dominated input is rejected") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 1.0);
  ColumnSlice s = ColumnSlice::uniform(100, 0.1);
  for (double& v : s.values) v = noise(rng);
  try {
    inverse_abel(s);
    FAIL("expected TooNoisy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooNoisy);
  }
}

TEST_CASE("centering") {
  const double h = 0.05;
  const std::size_t n = 80;
  std::vector<double> half(n);
  for (std::size_t k = 0; k < n; ++k) half[k] = std::exp(-std::pow(k * h, 2));
  std::vector<double> full;
  for (std::size_t k = n - 1; k > 0; --k) full.push_back(half[k]);
  for (std::size_t k = 0; k < n; ++k) full.push_back(half[k]);

  const auto sym = two_sided(full, h);
  for (CenterMethod m : {CenterMethod::Centroid, CenterMethod::Parabolic}) {
    const auto c = center_and_symmetrize(sym, m);
    REQUIRE(c.values.size() >= n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) CHECK(std::abs(c.values[k] - half[k]) < 1e-12);
    CHECK(c.y[0] == 0.0);
  }

  // The same profile with its centre moved 3 samples to the right.
  std::vector<double> shifted(full.size(), 0.0);
  for (std::size_t k = 0; k + 3 < full.size(); ++k) shifted[k + 3] = full[k];
  const auto moved = center_and_symmetrize(two_sided(shifted, h));
  const auto ref = center_and_symmetrize(sym);
  for (std::size_t k = 0; k < std::min(moved.values.size(), ref.values.size()); ++k) {
    CHECK(std::abs(moved.values[k] - ref.values[k]) < 1e-3);
  }

  ColumnSlice zero = ColumnSlice::uniform(21, h, -10 * h);
  try {
    center_and_symmetrize(zero);
    FAIL("expected CenterNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CenterNotFound);
  }
}

TEST_CASE("prefilter preserves mass") {
  ColumnSlice s = ColumnSlice::uniform(200, 0.025);
  for (std::size_t k = 0; k < s.y.size(); ++k) s.values[k] = std::exp(-s.y[k] * s.y[k]);
  const auto f = gaussian_prefilter(s, 0.1);
  CHECK(slice_mass(f) == doctest::Approx(slice_mass(s)).epsilon(1e-6));
  CHECK(f.values[0] < s.values[0]);
}

TEST_CASE("method names") {
  CHECK(parse_abel_method("dasch3") == AbelMethod::ThreePoint);
  CHECK(parse_abel_method("onion") == AbelMethod::OnionPeeling);
  CHECK(parse_center_method("centroid") == CenterMethod::Centroid);
  CHECK_THROWS_AS(parse_abel_method("basex"), Error);
  RadialProfile bad;
  bad.rho = {0.1, 0.2};
  bad.values = {1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

}  // TEST_SUITE
