#ifndef MIXSEP_LOSS_FITTING_HPP
#define MIXSEP_LOSS_FITTING_HPP

// Fits to atom-number decay curves and the smoothed L3(a_bf) interpolation.

#include <cstdint>
#include <optional>
#include <vector>

#include "mixsep/grid.hpp"
#include "mixsep/scenario.hpp"

namespace mixsep {

struct DecaySeries {
  std::vector<double> t;      // s, strictly increasing
  std::vector<double> n;      // atoms, > 0
  std::vector<double> sigma;  // atoms, > 0

  void validate(std::size_t min_points) const;
};

struct GammaFit {
  double gamma = 0.0;   // s^-1
  double stderr_gamma = 0.0;
  double n0 = 0.0;
  std::size_t points_used = 0;
  bool non_decaying = false;
};

// Weighted straight line through the initial decay, N ~ N0 (1 - gamma t).
// Uses the first `window` points when given, otherwise every point with
// N > threshold * N(0).
GammaFit fit_gamma(const DecaySeries& series, std::optional<std::size_t> window = std::nullopt,
                   double threshold = 0.7);

// Geometry factor Q with int n_f n_t^2 dV = Q N^2 for a thermal cloud whose
// shape is frozen while its number decays, so dN/dt = -L3 Q N^2.
// Reservoir form: Q = n_f_peak (n_t_peak / N) / sqrt(8).
double l3_geometry_reservoir(const MixtureScenario& noncondensed);
// Full overlap integral of the supplied fields.
double l3_geometry_integral(const DensityField& n_f, const DensityField& n_t);

struct L3Fit {
  double l3 = 0.0;  // m^6/s
  double stderr_l3 = 0.0;
  double n0 = 0.0;
  double stderr_n0 = 0.0;
  double chi2 = 0.0;
  int iterations = 0;
};

// Levenberg-Marquardt fit of N(t) = N0 / (1 + L3 Q N0 t). Uncertainties come
// from the covariance with the supplied sigma taken as absolute.
L3Fit fit_l3(const DecaySeries& series, double geometry_q);

// Model curve used by fit_l3.
double l3_decay_model(double t, double n0, double l3, double geometry_q);

struct L3Point {
  double a_bf = 0.0;  // m
  double l3 = 0.0;    // m^6/s
  double stderr_l3 = 0.0;
};

struct SmoothOptions {
  double span = 0.5;
  int n_boot = 1000;
  std::uint64_t seed = 42;
  int robustness_iterations = 2;
  std::size_t n_eval = 200;
};

struct SmoothedCurve {
  std::vector<double> a_bf;  // m, log-spaced
  std::vector<double> l3;
  std::vector<double> band_low;
  std::vector<double> band_high;
  double span = 0.5;
};

// Local-linear regression with tricube weights in log(a_bf)-log(L3), points
// weighted by their relative error, bisquare robustness passes, and a 95%
// band from residual bootstrap.
SmoothedCurve smooth_l3(const std::vector<L3Point>& points, const SmoothOptions& options = {});

struct L3Lookup {
  double l3 = 0.0;
  double low = 0.0;
  double high = 0.0;
};

// Log-log interpolation on the evaluation grid. Throws OutOfDomain.
L3Lookup lookup_l3(const SmoothedCurve& curve, double a_bf);

}  // namespace mixsep

#endif  // MIXSEP_LOSS_FITTING_HPP
