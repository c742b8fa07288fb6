#include "mixsep/loss_fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "mixsep/error.hpp"
#include "mixsep/log.hpp"
#include "mixsep/physics.hpp"
#include "mixsep/trap_profiles.hpp"

namespace mixsep {

void DecaySeries::validate(std::size_t min_points) const {
  if (t.size() != n.size() || t.size() != sigma.size()) {
    throw Error(ErrorCode::ValidationError, "decay series columns differ in length");
  }
  if (t.size() < min_points) {
    throw Error(ErrorCode::InsufficientData,
                "need at least " + std::to_string(min_points) + " points, got " + std::to_string(t.size()));
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || (k > 0 && !(t[k] > t[k - 1]))) {
      throw Error(ErrorCode::ValidationError, "times must be finite and strictly increasing");
    }
    if (!(n[k] > 0.0) || !std::isfinite(n[k])) throw Error(ErrorCode::ValidationError, "atom numbers must be positive");
    if (!(sigma[k] > 0.0) || !std::isfinite(sigma[k])) {
      throw Error(ErrorCode::ValidationError, "uncertainties must be positive");
    }
  }
}

GammaFit fit_gamma(const DecaySeries& series, std::optional<std::size_t> window, double threshold) {
  series.validate(3);
  std::size_t used = 0;
  if (window) {
    used = std::min(*window, series.t.size());
  } else {
    const double cut = threshold * series.n.front();
    while (used < series.n.size() && series.n[used] > cut) ++used;
  }
  if (used < 3) throw Error(ErrorCode::InsufficientData, "fewer than 3 points in the initial-decay window");

  // Weighted least squares N = c0 + c1 t.
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < used; ++k) {
    const double w = 1.0 / (series.sigma[k] * series.sigma[k]);
    s += w;
    sx += w * series.t[k];
    sy += w * series.n[k];
    sxx += w * series.t[k] * series.t[k];
    sxy += w * series.t[k] * series.n[k];
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 0.0)) throw Error(ErrorCode::InsufficientData, "degenerate time axis");
  const double c0 = (sxx * sy - sx * sxy) / det;
  const double c1 = (s * sxy - sx * sy) / det;
  const double var0 = sxx / det;
  const double var1 = s / det;
  const double cov01 = -sx / det;

  GammaFit fit;
  fit.n0 = c0;
  fit.points_used = used;
  fit.gamma = -c1 / c0;
  // gamma = -c1/c0, first-order propagation.
  const double d0 = c1 / (c0 * c0);
  const double d1 = -1.0 / c0;
  fit.stderr_gamma = std::sqrt(std::max(0.0, d0 * d0 * var0 + d1 * d1 * var1 + 2.0 * d0 * d1 * cov01));
  fit.non_decaying = !(fit.gamma > 0.0);
  if (fit.non_decaying) log::warn("fit_gamma: series is not decaying");
  return fit;
}

double l3_geometry_reservoir(const MixtureScenario& scenario) {
  const PeakQuantities peaks = fra_peak_quantities(scenario);
  const double n_thermal = scenario.thermal_bosons();
  if (!(n_thermal > 0.0)) throw Error(ErrorCode::ValidationError, "L3 geometry needs a thermal cloud");
  return peaks.n_f * (peaks.n_t / n_thermal) / std::sqrt(8.0);
}

double l3_geometry_integral(const DensityField& n_f, const DensityField& n_t) {
  require_same_grid(n_f, n_t);
  const double n = n_t.integral();
  if (!(n > 0.0)) throw Error(ErrorCode::ValidationError, "L3 geometry needs a thermal cloud");
  const auto& w = n_f.grid->volumes();
  CompensatedSum s;
  for (std::size_t k = 0; k < w.size(); ++k) s.add(w[k] * n_f.values[k] * n_t.values[k] * n_t.values[k]);
  return s.value() / (n * n);
}

double l3_decay_model(double t, double n0, double l3, double geometry_q) {
  return n0 / (1.0 + l3 * geometry_q * n0 * t);
}

L3Fit fit_l3(const DecaySeries& series, double geometry_q) {
  series.validate(4);
  if (!(geometry_q > 0.0)) throw Error(ErrorCode::ValidationError, "geometry factor must be positive");
  const std::size_t m = series.t.size();
  const auto& t = series.t;
  const auto& y = series.n;
  const auto& sg = series.sigma;

  // Parameters (N0, k) with k = L3 Q. Start from 1/N = 1/N0 + k t.
  double p0 = y.front();
  double p1 = 0.0;
  {
    double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double inv = 1.0 / y[i];
      const double w = (y[i] * y[i] / sg[i]) * (y[i] * y[i] / sg[i]);
      s += w;
      sx += w * t[i];
      sy += w * inv;
      sxx += w * t[i] * t[i];
      sxy += w * t[i] * inv;
    }
    const double det = s * sxx - sx * sx;
    if (det > 0.0) {
      const double inter = (sxx * sy - sx * sxy) / det;
      p1 = (s * sxy - sx * sy) / det;
      if (inter > 0.0) p0 = 1.0 / inter;
    }
  }

  const auto chi2_of = [&](double a, double k, bool& valid) {
    valid = true;
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double den = 1.0 + k * a * t[i];
      if (!(den > 0.0)) {
        valid = false;
        return 0.0;
      }
      const double r = (y[i] - a / den) / sg[i];
      c += r * r;
    }
    return c;
  };
  // Normal matrix J^T J and gradient J^T r for the weighted residuals.
  const auto normal = [&](double a, double k, double jtj[3], double jtr[2]) {
    jtj[0] = jtj[1] = jtj[2] = jtr[0] = jtr[1] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double den = 1.0 + k * a * t[i];
      const double d_a = 1.0 / (den * den) / sg[i];
      const double d_k = -a * a * t[i] / (den * den) / sg[i];
      const double r = (y[i] - a / den) / sg[i];
      jtj[0] += d_a * d_a;
      jtj[1] += d_a * d_k;
      jtj[2] += d_k * d_k;
      jtr[0] += d_a * r;
      jtr[1] += d_k * r;
    }
  };

  bool valid = true;
  double chi2 = chi2_of(p0, p1, valid);
  if (!valid) throw Error(ErrorCode::FitDiverged, "initial guess is outside the model domain");
  double lambda = 1e-3;
  int iter = 0;
  bool done = false;
  for (; iter < 500 && !done; ++iter) {
    double jtj[3], jtr[2];
    normal(p0, p1, jtj, jtr);
    bool improved = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      const double a00 = jtj[0] * (1.0 + lambda);
      const double a11 = jtj[2] * (1.0 + lambda);
      const double det = a00 * a11 - jtj[1] * jtj[1];
      if (!(det > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double d0 = (a11 * jtr[0] - jtj[1] * jtr[1]) / det;
      const double d1 = (a00 * jtr[1] - jtj[1] * jtr[0]) / det;
      const double q0 = p0 + d0;
      const double q1 = p1 + d1;
      bool ok = true;
      const double c = chi2_of(q0, q1, ok);
      if (ok && std::isfinite(c) && c <= chi2) {
        const bool small = std::abs(d0) <= 1e-12 * std::abs(q0) + 1e-300 &&
                           std::abs(d1) <= 1e-10 * std::abs(q1) + 1e-300;
        const bool flat = chi2 - c <= 1e-14 * std::max(chi2, 1e-300);
        p0 = q0;
        p1 = q1;
        chi2 = c;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        done = small || flat;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) done = true;  // no downhill step left: at the minimum to roundoff
  }
  if (!std::isfinite(p0) || !std::isfinite(p1) || !(p0 > 0.0)) {
    throw Error(ErrorCode::FitDiverged, "decay fit left the physical domain");
  }
  if (!done) throw Error(ErrorCode::FitDiverged, "decay fit did not converge in 500 iterations");

  double jtj[3], jtr[2];
  normal(p0, p1, jtj, jtr);
  const double det = jtj[0] * jtj[2] - jtj[1] * jtj[1];
  if (!(det > 0.0)) throw Error(ErrorCode::FitDiverged, "singular covariance");
  L3Fit fit;
  fit.n0 = p0;
  fit.stderr_n0 = std::sqrt(jtj[2] / det);
  fit.l3 = p1 / geometry_q;
  fit.stderr_l3 = std::sqrt(jtj[0] / det) / geometry_q;
  fit.chi2 = chi2;
  fit.iterations = iter;
  return fit;
}

namespace {

// Weighted local-linear estimate at x0. Weights combine tricube distance,
// point precision and robustness.
double local_linear(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                    double x0, double span) {
  const std::size_t n = x.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(x[i] - x0);
  std::vector<double> sorted = dist;
  const auto q = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))), 3, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(q - 1), sorted.end());
  double h = sorted[q - 1];
  if (span > 1.0) h *= span;
  // Keep the q-th neighbour inside the kernel support.
  h *= 1.0 + 1e-10;
  if (!(h > 0.0)) h = 1.0;
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = dist[i] / h;
    if (u >= 1.0) continue;
    const double c = 1.0 - u * u * u;
    const double k = c * c * c * w[i];
    const double dx = x[i] - x0;
    s += k;
    sx += k * dx;
    sy += k * y[i];
    sxx += k * dx * dx;
    sxy += k * dx * y[i];
  }
  if (!(s > 0.0)) throw Error(ErrorCode::TooFewPoints, "no points inside the smoothing window");
  const double det = s * sxx - sx * sx;
  if (std::abs(det) <= 1e-14 * s * sxx) return sy / s;
  return (sxx * sy - sx * sxy) / det;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
  return m;
}

// Fits at the data abscissae and at xs, with bisquare robustness passes.
void loess(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& precision,
           const std::vector<double>& xs, const SmoothOptions& opt, std::vector<double>& fitted,
           std::vector<double>& curve) {
  const std::size_t n = x.size();
  std::vector<double> robust(n, 1.0), w(n);
  fitted.assign(n, 0.0);
  for (int pass = 0; pass <= opt.robustness_iterations; ++pass) {
    for (std::size_t i = 0; i < n; ++i) w[i] = precision[i] * robust[i];
    for (std::size_t i = 0; i < n; ++i) fitted[i] = local_linear(x, y, w, x[i], opt.span);
    if (pass == opt.robustness_iterations) break;
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = std::abs(y[i] - fitted[i]) * std::sqrt(precision[i]);
    const double scale = 6.0 * median(res);
    if (!(scale > 0.0)) break;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = res[i] / scale;
      robust[i] = u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
    }
  }
  curve.resize(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) curve[k] = local_linear(x, y, w, xs[k], opt.span);
}

double percentile(std::vector<double>& v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return (1.0 - t) * v[lo] + t * v[hi];
}

}  // namespace

SmoothedCurve smooth_l3(const std::vector<L3Point>& input, const SmoothOptions& opt) {
  if (input.size() < 6) throw Error(ErrorCode::TooFewPoints, "smoothing needs at least 6 points");
  if (!(opt.span > 0.0)) throw Error(ErrorCode::ValidationError, "span must be positive");
  if (opt.n_boot < 0 || opt.n_eval < 2) throw Error(ErrorCode::ValidationError, "bad bootstrap or grid size");
  std::vector<L3Point> pts = input;
  std::stable_sort(pts.begin(), pts.end(), [](const L3Point& a, const L3Point& b) { return a.a_bf < b.a_bf; });
  const std::size_t n = pts.size();
  std::vector<double> x(n), y(n), precision(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pts[i];
    if (!(p.l3 > 0.0)) throw Error(ErrorCode::NonPositiveL3, "L3 values must be positive");
    if (!(p.a_bf > 0.0)) throw Error(ErrorCode::ValidationError, "a_bf values must be positive");
    if (!(p.stderr_l3 > 0.0)) throw Error(ErrorCode::ValidationError, "L3 uncertainties must be positive");
    const double a0 = p.a_bf / units::a0;
    if (a0 < 80.0 * (1.0 - 1e-9) || a0 > 2100.0 * (1.0 + 1e-9)) {
      log::warn("smooth_l3: a_bf outside the 80-2100 a0 range of the measurements");
    }
    x[i] = std::log(p.a_bf);
    y[i] = std::log(p.l3);
    const double rel = p.stderr_l3 / p.l3;
    precision[i] = 1.0 / (rel * rel);
  }
  // Relative weights only; the scale of the uncertainties drops out.
  const double mean_prec = std::accumulate(precision.begin(), precision.end(), 0.0) / static_cast<double>(n);
  for (auto& p : precision) p /= mean_prec;

  SmoothedCurve out;
  out.span = opt.span;
  std::vector<double> xs(opt.n_eval);
  for (std::size_t k = 0; k < opt.n_eval; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(opt.n_eval - 1);
    xs[k] = k + 1 == opt.n_eval ? x.back() : x.front() + t * (x.back() - x.front());
  }
  std::vector<double> fitted, curve;
  loess(x, y, precision, xs, opt, fitted, curve);

  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = (y[i] - fitted[i]) * std::sqrt(precision[i]);

  std::vector<std::vector<double>> samples(opt.n_eval);
  for (auto& s : samples) s.reserve(static_cast<std::size_t>(opt.n_boot));
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> yb(n), fb, cb;
  for (int b = 0; b < opt.n_boot; ++b) {
    for (std::size_t i = 0; i < n; ++i) yb[i] = fitted[i] + resid[pick(rng)] / std::sqrt(precision[i]);
    loess(x, yb, precision, xs, opt, fb, cb);
    for (std::size_t k = 0; k < opt.n_eval; ++k) samples[k].push_back(cb[k]);
  }

  out.a_bf.resize(opt.n_eval);
  out.l3.resize(opt.n_eval);
  out.band_low.resize(opt.n_eval);
  out.band_high.resize(opt.n_eval);
  for (std::size_t k = 0; k < opt.n_eval; ++k) {
    out.a_bf[k] = std::exp(xs[k]);
    out.l3[k] = std::exp(curve[k]);
    if (opt.n_boot > 0) {
      out.band_low[k] = std::min(out.l3[k], std::exp(percentile(samples[k], 0.025)));
      out.band_high[k] = std::max(out.l3[k], std::exp(percentile(samples[k], 0.975)));
    } else {
      out.band_low[k] = out.band_high[k] = out.l3[k];
    }
  }
  out.a_bf.front() = pts.front().a_bf;
  out.a_bf.back() = pts.back().a_bf;
  return out;
}

L3Lookup lookup_l3(const SmoothedCurve& curve, double a_bf) {
  const auto& g = curve.a_bf;
  if (g.size() < 2) throw Error(ErrorCode::ValidationError, "curve has no evaluation grid");
  if (!(a_bf >= g.front() && a_bf <= g.back())) {
    throw Error(ErrorCode::OutOfDomain, "a_bf = " + std::to_string(a_bf / units::a0) + " a0 is outside [" +
                                            std::to_string(g.front() / units::a0) + ", " +
                                            std::to_string(g.back() / units::a0) + "] a0");
  }
  const auto it = std::lower_bound(g.begin(), g.end(), a_bf);
  const auto k = static_cast<std::size_t>(it - g.begin());
  if (*it == a_bf) return {curve.l3[k], curve.band_low[k], curve.band_high[k]};
  const std::size_t lo = k - 1;
  const double t = std::log(a_bf / g[lo]) / std::log(g[k] / g[lo]);
  const auto geo = [&](const std::vector<double>& v) {
    return std::exp((1.0 - t) * std::log(v[lo]) + t * std::log(v[k]));
  };
  return {geo(curve.l3), geo(curve.band_low), geo(curve.band_high)};
}

}  // namespace mixsep
