#ifndef MIXSEP_ABEL_HPP
#define MIXSEP_ABEL_HPP

// Forward and inverse Abel transforms on uniform grids starting at the axis.

#include <string>
#include <vector>

namespace mixsep {

struct RadialProfile {
  std::vector<double> rho;  // rho[k] = k * spacing
  std::vector<double> values;

  static RadialProfile uniform(std::size_t n, double spacing);
  double spacing() const;
  void validate() const;
};

struct ColumnSlice {
  std::vector<double> y;  // uniform; starts at 0 once centred
  std::vector<double> values;

  static ColumnSlice uniform(std::size_t n, double spacing, double start = 0.0);
  double spacing() const;
  void validate() const;
};

enum class AbelMethod { ThreePoint, OnionPeeling };
enum class CenterMethod { Centroid, Parabolic };

const char* to_string(AbelMethod method);
AbelMethod parse_abel_method(const std::string& text);
CenterMethod parse_center_method(const std::string& text);

// F(y) = 2 int_y^inf n(rho) rho drho / sqrt(rho^2 - y^2), with n a cubic
// interpolant, even about the axis and zero beyond the last sample.
// Sampled at y = rho.
ColumnSlice forward_abel(const RadialProfile& profile);

// n(rho) = -(1/pi) int_rho^inf F'(y) dy / sqrt(y^2 - rho^2), sampled at
// rho = y. Throws TooNoisy when the negative part exceeds
// max_negative_fraction of the absolute mass.
RadialProfile inverse_abel(const ColumnSlice& slice, AbelMethod method = AbelMethod::ThreePoint,
                           double max_negative_fraction = 0.2);

// Locates the symmetry centre of a two-sided slice, resamples onto
// y = k dy (k >= 0) and averages the two sides. Throws CenterNotFound.
ColumnSlice center_and_symmetrize(const ColumnSlice& raw, CenterMethod method = CenterMethod::Parabolic);

// Explicit Gaussian smoothing with width sigma (same units as y).
ColumnSlice gaussian_prefilter(const ColumnSlice& slice, double sigma);

// int F dy over the full line of a one-sided slice, and 2 pi int n rho drho.
double slice_mass(const ColumnSlice& slice);
double profile_mass(const RadialProfile& profile);

}  // namespace mixsep

#endif  // MIXSEP_ABEL_HPP
