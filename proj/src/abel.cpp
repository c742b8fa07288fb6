#include "mixsep/abel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixsep/error.hpp"
#include "mixsep/log.hpp"

namespace mixsep {

namespace {

void check_uniform(const std::vector<double>& x, const std::vector<double>& v, const char* what) {
  if (x.size() != v.size()) throw Error(ErrorCode::ValidationError, std::string(what) + ": size mismatch");
  if (x.size() < 3) throw Error(ErrorCode::InsufficientData, std::string(what) + ": need at least 3 samples");
  const double h = x[1] - x[0];
  if (!(h > 0.0)) throw Error(ErrorCode::ValidationError, std::string(what) + ": coordinates must increase");
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (std::abs(x[k] - x[k - 1] - h) > 1e-6 * h) {
      throw Error(ErrorCode::ValidationError, std::string(what) + ": spacing must be uniform");
    }
  }
  for (double value : v) {
    if (!std::isfinite(value)) throw Error(ErrorCode::ValidationError, std::string(what) + ": non-finite value");
  }
}

double linear_at(const ColumnSlice& s, double y) {
  const double h = s.spacing();
  const double pos = (y - s.y.front()) / h;
  if (pos <= 0.0) return s.values.front();
  const auto last = static_cast<double>(s.y.size() - 1);
  if (pos >= last) return s.values.back();
  const auto k = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(k);
  return (1.0 - t) * s.values[k] + t * s.values[k + 1];
}

}  // namespace

RadialProfile RadialProfile::uniform(std::size_t n, double spacing) {
  RadialProfile p;
  p.rho.resize(n);
  p.values.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) p.rho[k] = static_cast<double>(k) * spacing;
  return p;
}

double RadialProfile::spacing() const { return rho.size() > 1 ? rho[1] - rho[0] : 0.0; }

void RadialProfile::validate() const {
  check_uniform(rho, values, "radial profile");
  if (std::abs(rho.front()) > 1e-9 * spacing()) throw Error(ErrorCode::ValidationError, "radial profile must start at 0");
}

ColumnSlice ColumnSlice::uniform(std::size_t n, double spacing, double start) {
  ColumnSlice s;
  s.y.resize(n);
  s.values.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) s.y[k] = start + static_cast<double>(k) * spacing;
  return s;
}

double ColumnSlice::spacing() const { return y.size() > 1 ? y[1] - y[0] : 0.0; }

void ColumnSlice::validate() const { check_uniform(y, values, "column slice"); }

const char* to_string(AbelMethod method) { return method == AbelMethod::ThreePoint ? "dasch3" : "onion"; }

AbelMethod parse_abel_method(const std::string& text) {
  if (text == "dasch3") return AbelMethod::ThreePoint;
  if (text == "onion") return AbelMethod::OnionPeeling;
  throw Error(ErrorCode::ValidationError, "abel method must be 'dasch3' or 'onion', got '" + text + "'");
}

CenterMethod parse_center_method(const std::string& text) {
  if (text == "centroid") return CenterMethod::Centroid;
  if (text == "parabolic") return CenterMethod::Parabolic;
  throw Error(ErrorCode::ValidationError, "center method must be 'centroid' or 'parabolic', got '" + text + "'");
}

ColumnSlice forward_abel(const RadialProfile& profile) {
  profile.validate();
  const std::size_t n = profile.values.size();
  const double h = profile.spacing();
  const auto& v = profile.values;
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (std::abs(v.back()) > 1e-3 * peak) log::warn("forward Abel: profile does not decay at the outer radius");

  // Cubic Lagrange interpolation of n in rho, even about the axis, zero
  // beyond the last sample.
  const auto node = [&](long k) -> double {
    if (k < 0) k = -k;
    return k < static_cast<long>(n) ? v[static_cast<std::size_t>(k)] : 0.0;
  };
  const auto interp = [&](double rho) {
    const double u = rho / h;
    const long k = static_cast<long>(std::floor(u));
    const double t = u - static_cast<double>(k);
    const double wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return wm * node(k - 1) + w0 * node(k) + w1 * node(k + 1) + w2 * node(k + 2);
  };
  // 5-point Gauss-Legendre on [-1, 1].
  static constexpr double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                   0.9061798459386640};
  static constexpr double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                   0.2369268850561891};

  ColumnSlice out;
  out.y = profile.rho;
  out.values.assign(n, 0.0);
  const double r_max = profile.rho.back();
  for (std::size_t i = 0; i < n; ++i) {
    const double y = profile.rho[i];
    const double y2 = y * y;
    // With s = sqrt(rho^2 - y^2), F(y) = 2 int n(sqrt(y^2 + s^2)) ds, free of
    // the endpoint singularity. Segments follow the rho samples.
    double acc = 0.0;
    for (std::size_t j = i; j + 1 < n; ++j) {
      const double r0 = std::max(profile.rho[j], y);
      const double r1 = std::min(profile.rho[j + 1], r_max);
      const double s0 = std::sqrt(std::max(0.0, r0 * r0 - y2));
      const double s1 = std::sqrt(std::max(0.0, r1 * r1 - y2));
      const double mid = 0.5 * (s0 + s1);
      const double half = 0.5 * (s1 - s0);
      double seg = 0.0;
      for (int q = 0; q < 5; ++q) {
        const double s = mid + half * gx[q];
        seg += gw[q] * interp(std::sqrt(y2 + s * s));
      }
      acc += half * seg;
    }
    out.values[i] = 2.0 * acc;
  }
  return out;
}

namespace {

RadialProfile inverse_three_point(const ColumnSlice& s) {
  const std::size_t n = s.values.size();
  const double h = s.spacing();
  const auto p = [&](long k) -> double {
    if (k < 0) return s.values[static_cast<std::size_t>(-k)];
    if (k >= static_cast<long>(n)) return 0.0;
    return s.values[static_cast<std::size_t>(k)];
  };
  RadialProfile out = RadialProfile::uniform(n, h);
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = static_cast<double>(i);
    const double i2 = fi * fi;
    const auto j0 = [&](double y) { return std::log(y + std::sqrt(std::max(0.0, y * y - i2))); };
    const auto j1 = [&](double y) { return std::sqrt(std::max(0.0, y * y - i2)); };
    double acc = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      const long jl = static_cast<long>(j);
      const double a = 0.5 * (p(jl + 1) - p(jl - 1));
      const double b = p(jl + 1) - 2.0 * p(jl) + p(jl - 1);
      const double fj = static_cast<double>(j);
      if (i == 0 && j == 0) {
        acc += b * 0.5;
        continue;
      }
      const double lo = std::max(fi, fj - 0.5);
      const double hi = fj + 0.5;
      const double k0 = j0(hi) - j0(lo);
      const double k1 = j1(hi) - j1(lo);
      acc += a * k0 + b * (k1 - fj * k0);
    }
    out.values[i] = -acc / (std::numbers::pi * h);
  }
  return out;
}

RadialProfile inverse_onion(const ColumnSlice& s) {
  const std::size_t n = s.values.size();
  const double h = s.spacing();
  // Shell j holds constant density on [(j - 1/2) h, (j + 1/2) h].
  const auto edge = [&](std::size_t j) { return j == 0 ? 0.0 : (static_cast<double>(j) - 0.5) * h; };
  RadialProfile out = RadialProfile::uniform(n, h);
  for (std::size_t ii = n; ii-- > 0;) {
    const double y = static_cast<double>(ii) * h;
    const double y2 = y * y;
    const auto chord = [&](std::size_t j) {
      const double inner = std::max(edge(j), y);
      const double outer = edge(j + 1);
      return 2.0 * (std::sqrt(std::max(0.0, outer * outer - y2)) - std::sqrt(std::max(0.0, inner * inner - y2)));
    };
    double rest = s.values[ii];
    for (std::size_t j = ii + 1; j < n; ++j) rest -= out.values[j] * chord(j);
    out.values[ii] = rest / chord(ii);
  }
  return out;
}

}  // namespace

RadialProfile inverse_abel(const ColumnSlice& slice, AbelMethod method, double max_negative_fraction) {
  slice.validate();
  if (std::abs(slice.y.front()) > 1e-9 * slice.spacing()) {
    throw Error(ErrorCode::ValidationError, "inverse Abel needs a centred slice starting at y = 0");
  }
  RadialProfile out = method == AbelMethod::ThreePoint ? inverse_three_point(slice) : inverse_onion(slice);
  double negative = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double weight = std::max(out.rho[k], 0.25 * out.spacing());
    total += std::abs(out.values[k]) * weight;
    if (out.values[k] < 0.0) negative -= out.values[k] * weight;
  }
  if (total > 0.0 && negative > max_negative_fraction * total) {
    throw Error(ErrorCode::TooNoisy, "reconstruction has " + std::to_string(100.0 * negative / total) +
                                         "% negative mass");
  }
  return out;
}

namespace {

double centroid(const ColumnSlice& s) {
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t k = 0; k < s.y.size(); ++k) {
    m0 += s.values[k];
    m1 += s.values[k] * s.y[k];
  }
  double scale = 0.0;
  for (double v : s.values) scale += std::abs(v);
  if (!(scale > 0.0) || std::abs(m0) < 1e-12 * scale) {
    throw Error(ErrorCode::CenterNotFound, "slice has no mass to locate a centre");
  }
  return m1 / m0;
}

// Least-squares parabola over a window around the centroid; the vertex is
// the centre, whether the extremum is a maximum or a central dip.
double parabolic_center(const ColumnSlice& s) {
  const double c0 = centroid(s);
  const double h = s.spacing();
  const long n = static_cast<long>(s.y.size());
  const long mid = std::clamp(static_cast<long>(std::lround((c0 - s.y.front()) / h)), 0L, n - 1);
  const long half = std::max(2L, n / 20);
  const long lo = std::max(0L, mid - half);
  const long hi = std::min(n - 1, mid + half);
  if (hi - lo < 2) throw Error(ErrorCode::CenterNotFound, "too few samples around the centre");
  double sx[5] = {0, 0, 0, 0, 0};
  double sy[3] = {0, 0, 0};
  for (long k = lo; k <= hi; ++k) {
    const double u = (s.y[static_cast<std::size_t>(k)] - c0) / h;
    const double v = s.values[static_cast<std::size_t>(k)];
    double p = 1.0;
    for (int e = 0; e < 5; ++e) {
      sx[e] += p;
      if (e < 3) sy[e] += p * v;
      p *= u;
    }
  }
  // Normal equations for v = c + b u + a u^2, solved by Cramer's rule.
  const double m[3][3] = {{sx[0], sx[1], sx[2]}, {sx[1], sx[2], sx[3]}, {sx[2], sx[3], sx[4]}};
  const auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det3(m);
  if (d == 0.0) throw Error(ErrorCode::CenterNotFound, "singular parabola fit");
  double mb[3][3], ma[3][3];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      mb[r][c] = c == 1 ? sy[r] : m[r][c];
      ma[r][c] = c == 2 ? sy[r] : m[r][c];
    }
  }
  const double b = det3(mb) / d;
  const double a = det3(ma) / d;
  double scale = 0.0;
  for (double v : s.values) scale = std::max(scale, std::abs(v));
  if (!(std::abs(a) > 1e-12 * scale)) throw Error(ErrorCode::CenterNotFound, "flat slice, no curvature at the centre");
  const double vertex = -b / (2.0 * a);
  if (!std::isfinite(vertex) || std::abs(vertex) > static_cast<double>(half)) {
    throw Error(ErrorCode::CenterNotFound, "parabola vertex lies outside the fit window");
  }
  return c0 + vertex * h;
}

}  // namespace

ColumnSlice center_and_symmetrize(const ColumnSlice& raw, CenterMethod method) {
  raw.validate();
  const double c = method == CenterMethod::Centroid ? centroid(raw) : parabolic_center(raw);
  const double h = raw.spacing();
  const double reach = std::min(c - raw.y.front(), raw.y.back() - c);
  if (!(reach >= 2.0 * h)) throw Error(ErrorCode::CenterNotFound, "centre too close to the slice edge");
  const auto m = static_cast<std::size_t>(std::floor(reach / h + 1e-9)) + 1;
  ColumnSlice out = ColumnSlice::uniform(m, h);
  for (std::size_t k = 0; k < m; ++k) {
    const double d = static_cast<double>(k) * h;
    out.values[k] = 0.5 * (linear_at(raw, c + d) + linear_at(raw, c - d));
  }
  return out;
}

ColumnSlice gaussian_prefilter(const ColumnSlice& slice, double sigma) {
  slice.validate();
  if (!(sigma > 0.0)) throw Error(ErrorCode::ValidationError, "prefilter width must be positive");
  const double h = slice.spacing();
  const long n = static_cast<long>(slice.values.size());
  const long half = static_cast<long>(std::ceil(4.0 * sigma / h));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  for (long k = -half; k <= half; ++k) {
    const double u = static_cast<double>(k) * h / sigma;
    kernel[static_cast<std::size_t>(k + half)] = std::exp(-0.5 * u * u);
  }
  double norm = 0.0;
  for (double w : kernel) norm += w;
  // A one-sided slice is even about the axis; anything past the ends is zero.
  const bool one_sided = slice.y.front() == 0.0;
  ColumnSlice out = slice;
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long k = -half; k <= half; ++k) {
      long j = i + k;
      if (j < 0 && one_sided) j = -j;
      if (j < 0 || j >= n) continue;
      acc += kernel[static_cast<std::size_t>(k + half)] * slice.values[static_cast<std::size_t>(j)];
    }
    out.values[static_cast<std::size_t>(i)] = acc / norm;
  }
  return out;
}

double slice_mass(const ColumnSlice& slice) {
  // Trapezoid on the one-sided slice, doubled for the mirror side.
  const double h = slice.spacing();
  double s = 0.0;
  for (std::size_t k = 0; k < slice.values.size(); ++k) {
    const double w = (k == 0 || k + 1 == slice.values.size()) ? 0.5 : 1.0;
    s += w * slice.values[k];
  }
  return 2.0 * h * s;
}

double profile_mass(const RadialProfile& profile) {
  const double h = profile.spacing();
  double s = 0.0;
  for (std::size_t k = 0; k < profile.values.size(); ++k) {
    const double w = (k + 1 == profile.values.size()) ? 0.5 : 1.0;
    s += w * profile.values[k] * profile.rho[k];
  }
  return 2.0 * std::numbers::pi * h * s;
}

}  // namespace mixsep
