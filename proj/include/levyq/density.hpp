// Tabulated densities on uniform grids: characteristic-function inversion,
// differential entropy by quadrature, L1 (total variation) distance, exact
// cell masses, and the compound-Poisson jump density p_{A_n}.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "levyq/noise_models.hpp"
#include "levyq/quantization.hpp"

namespace levyq {

class DensityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p(x0 + k dx), k = 0..N-1, plus the mass declared to lie outside the window.
/// Trapezoid mass + tail mass = 1 within 1e-8.
class DensityGrid {
 public:
  static constexpr double kMassTolerance = 1e-8;

  DensityGrid(double x0, double dx, std::vector<double> values, double tail_mass = 0.0)
      : x0_(x0), dx_(dx), values_(std::move(values)), tail_(tail_mass) {
    if (!(dx_ > 0.0) || !std::isfinite(x0_)) throw std::invalid_argument("DensityGrid: need finite x0 and dx > 0");
    if (values_.size() < 2) throw std::invalid_argument("DensityGrid: need at least two points");
    for (double v : values_) {
      if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("DensityGrid: values must be finite and >= 0");
    }
    if (!(tail_ >= 0.0 && tail_ <= 1.0)) throw std::invalid_argument("DensityGrid: tail mass must lie in [0, 1]");
    if (std::abs(trapezoid_mass() + tail_ - 1.0) > kMassTolerance) {
      throw std::invalid_argument("DensityGrid: trapezoid mass + tail mass must equal 1");
    }
  }

  /// Rescales `values` so the trapezoid mass equals 1 - tail_mass.
  static DensityGrid normalized(double x0, double dx, std::vector<double> values, double tail_mass = 0.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      s += (i == 0 || i + 1 == values.size()) ? 0.5 * values[i] : values[i];
    }
    s *= dx;
    if (!(s > 0.0)) throw std::invalid_argument("DensityGrid::normalized: zero mass");
    const double f = (1.0 - tail_mass) / s;
    for (double& v : values) v *= f;
    return DensityGrid(x0, dx, std::move(values), tail_mass);
  }

  /// Tabulates a pdf on [lo, hi] with `points` nodes.
  static DensityGrid tabulate(const std::function<double(double)>& pdf, double lo, double hi, std::size_t points,
                              double tail_mass = 0.0) {
    if (points < 2 || !(hi > lo)) throw std::invalid_argument("DensityGrid::tabulate: bad window");
    const double dx = (hi - lo) / static_cast<double>(points - 1);
    std::vector<double> v(points);
    for (std::size_t i = 0; i < points; ++i) v[i] = pdf(lo + dx * static_cast<double>(i));
    return normalized(lo, dx, std::move(v), tail_mass);
  }

  double x0() const noexcept { return x0_; }
  double dx() const noexcept { return dx_; }
  std::size_t size() const noexcept { return values_.size(); }
  double x(std::size_t i) const noexcept { return x0_ + dx_ * static_cast<double>(i); }
  double x_last() const noexcept { return x(values_.size() - 1); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double tail_mass() const noexcept { return tail_; }

  double trapezoid_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      s += (i == 0 || i + 1 == values_.size()) ? 0.5 * values_[i] : values_[i];
    }
    return s * dx_;
  }

  /// Linear interpolation, zero outside the window.
  double at(double x) const {
    const double u = (x - x0_) / dx_;
    if (u < 0.0 || u > static_cast<double>(values_.size() - 1)) return 0.0;
    const auto k = std::min(static_cast<std::size_t>(u), values_.size() - 2);
    const double t = u - static_cast<double>(k);
    return (1.0 - t) * values_[k] + t * values_[k + 1];
  }

 private:
  double x0_;
  double dx_;
  std::vector<double> values_;
  double tail_;
};

namespace detail {

// The FFTW planner is not re-entrant; plan creation and destruction are
// serialized, execution is not.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n) : n_(n), data_(fftw_alloc_complex(n)) {
    if (!data_) throw std::bad_alloc();
    std::fill(begin(), begin() + n_, std::complex<double>(0.0, 0.0));
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* raw() noexcept { return data_; }
  std::complex<double>* begin() noexcept { return reinterpret_cast<std::complex<double>*>(data_); }
  std::complex<double>& operator[](std::size_t i) noexcept { return begin()[i]; }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  fftw_complex* data_;
};

/// In-place DFT with the given FFTW sign.
inline void fft_inplace(FftwBuffer& buf, int sign) {
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(buf.size()), buf.raw(), buf.raw(), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct PowerTail {
  double mass = 0.0;
  double entropy = 0.0;  // -Int p log p over the tail
  bool valid = false;
};

// Fits p(x) ~ C |x - mode|^-gamma through the window edge and the point
// halfway to the mode, then integrates mass and -p log p beyond the edge:
//   mass = p_e r / (gamma - 1),  entropy = mass (log(1 / p_e) + gamma / (gamma - 1)),
// with r the edge distance from the mode.
inline PowerTail fit_power_tail(const DensityGrid& g, std::size_t mode, bool right) {
  PowerTail t;
  const std::size_t n = g.size();
  const std::size_t edge = right ? n - 1 : 0;
  const std::size_t span = right ? edge - mode : mode;
  if (span < 8) return t;
  const std::size_t mid = right ? mode + span / 2 : mode - span / 2;
  const double pe = g[edge];
  const double pm = g[mid];
  if (!(pe > 0.0) || !(pm > pe)) return t;
  const double re = std::abs(g.x(edge) - g.x(mode));
  const double rm = std::abs(g.x(mid) - g.x(mode));
  const double gamma = std::log(pm / pe) / std::log(re / rm);
  if (!(gamma > 1.05) || !std::isfinite(gamma)) return t;
  t.mass = pe * re / (gamma - 1.0);
  t.entropy = t.mass * (std::log(1.0 / pe) + gamma / (gamma - 1.0));
  t.valid = true;
  return t;
}

}  // namespace detail

struct InversionOptions {
  std::size_t padding = 4;          // FFT length >= padding * grid points
  double clamp_fail = 1e-6;         // clamped negative mass that fails the inversion
  double tail_fail = 1e-4;          // tail mass estimate that fails the inversion
};

struct InvertedDensity {
  DensityGrid grid;
  double clamped_mass;
};

/// Density on [lo, hi] from a characteristic function by DFT on a grid
/// `padding` times wider than the window (so aliased tails land outside it).
/// Negative Gibbs lobes are clamped to zero; the mass outside the window is
/// 1 - (trapezoid mass inside) and is recorded as the grid's tail mass.
inline InvertedDensity cf_to_density(const std::function<cplx(double)>& cf, double lo, double hi,
                                     std::size_t points, const InversionOptions& opt = {}) {
  if (points < 16 || !(hi > lo)) throw std::invalid_argument("cf_to_density: bad window");
  const double dx = (hi - lo) / static_cast<double>(points - 1);
  const std::size_t len = detail::next_pow2(std::max<std::size_t>(opt.padding, 1) * points);
  const std::size_t offset = (len - points) / 2;
  const double ext_lo = lo - dx * static_cast<double>(offset);
  const double dw = 2.0 * kPi / (static_cast<double>(len) * dx);

  detail::FftwBuffer buf(len);
  const auto half = static_cast<std::int64_t>(len / 2);
  // trapezoid over [-pi/dx, pi/dx]; both Nyquist ends fold onto bin len/2
  for (std::int64_t k = -half; k <= half; ++k) {
    const double w = dw * static_cast<double>(k);
    cplx g = cf(w) * std::polar(1.0, -w * ext_lo);
    if (k == -half || k == half) g *= 0.5;
    buf[static_cast<std::size_t>((k + static_cast<std::int64_t>(len)) % static_cast<std::int64_t>(len))] += g;
  }
  detail::fft_inplace(buf, FFTW_FORWARD);

  std::vector<double> values(points);
  double clamped = 0.0;
  const double norm = dw / (2.0 * kPi);
  for (std::size_t i = 0; i < points; ++i) {
    double v = buf[offset + i].real() * norm;
    if (v < 0.0) {
      clamped -= v * dx;
      v = 0.0;
    }
    values[i] = v;
  }
  if (clamped > opt.clamp_fail) {
    throw DensityError("cf_to_density: clamped negative mass " + std::to_string(clamped) + " exceeds tolerance");
  }
  double inside = 0.0;
  for (std::size_t i = 0; i < points; ++i) inside += (i == 0 || i + 1 == points) ? 0.5 * values[i] : values[i];
  inside *= dx;
  const double tail = std::max(0.0, 1.0 - inside);
  if (tail > opt.tail_fail) {
    throw DensityError("cf_to_density: window misses " + std::to_string(tail) + " of the mass");
  }
  return {DensityGrid::normalized(lo, dx, std::move(values), tail), clamped};
}

/// Trapezoid quadrature of -p log p (0 log 0 = 0). For grids declaring tail
/// mass, adds a power-law extrapolation of -p log p beyond each window edge
/// (fit through the edge value and the value halfway to the mode); sides
/// without a decaying power-law fit contribute nothing.
inline double differential_entropy(const DensityGrid& g) {
  const auto& v = g.values();
  const std::size_t n = v.size();
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = v[i];
    if (p <= 0.0) continue;
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    h -= w * p * std::log(p);
  }
  h *= g.dx();
  if (g.tail_mass() > 0.0) {
    const auto mode = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    for (bool right : {false, true}) {
      const auto t = detail::fit_power_tail(g, mode, right);
      if (t.valid) h += t.entropy;
    }
  }
  return h;
}

namespace detail {

// Extends both grids to a common window when they share dx and their origins
// differ by a whole number of steps; otherwise resamples onto the finer step.
inline std::pair<std::vector<double>, std::vector<double>> common_support(const DensityGrid& p, const DensityGrid& q,
                                                                          bool allow_resample, double& dx,
                                                                          double& x0) {
  const double lo = std::min(p.x0(), q.x0());
  const double hi = std::max(p.x_last(), q.x_last());
  const double shift = (p.x0() - q.x0()) / p.dx();
  const bool aligned = std::abs(p.dx() - q.dx()) <= 1e-12 * p.dx() && std::abs(shift - std::round(shift)) < 1e-6;
  if (aligned) {
    dx = p.dx();
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / dx)) + 1;
    x0 = lo;
    std::vector<double> a(n, 0.0), b(n, 0.0);
    const auto pa = static_cast<std::size_t>(std::llround((p.x0() - lo) / dx));
    const auto qa = static_cast<std::size_t>(std::llround((q.x0() - lo) / dx));
    for (std::size_t i = 0; i < p.size() && pa + i < n; ++i) a[pa + i] = p[i];
    for (std::size_t i = 0; i < q.size() && qa + i < n; ++i) b[qa + i] = q[i];
    return {std::move(a), std::move(b)};
  }
  if (!allow_resample) throw std::invalid_argument("tv_distance: grids are not aligned and resampling is disabled");
  dx = std::min(p.dx(), q.dx());
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / dx)) + 1;
  x0 = lo;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + dx * static_cast<double>(i);
    a[i] = p.at(x);
    b[i] = q.at(x);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace detail

/// Int |p - q| by the trapezoid rule over the union window, plus
/// |tail_p - tail_q|. Result lies in [0, 2] up to quadrature error.
inline double tv_distance(const DensityGrid& p, const DensityGrid& q, bool allow_resample = false) {
  double dx = 0.0, x0 = 0.0;
  auto [a, b] = detail::common_support(p, q, allow_resample, dx, x0);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
    s += w * std::abs(a[i] - b[i]);
  }
  return s * dx + std::abs(p.tail_mass() - q.tail_mass());
}

/// Cell masses P_{X;m}[i] of the piecewise-linear interpolant of `g`; the
/// grid's tail mass carries over as the step density's tail.
inline StepDensity cell_masses(const DensityGrid& g, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("cell_masses: m must be positive");
  const std::size_t n = g.size();
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * g.dx() * (g[i - 1] + g[i]);
  auto cdf = [&](double x) -> double {
    const double u = (x - g.x0()) / g.dx();
    if (u <= 0.0) return 0.0;
    if (u >= static_cast<double>(n - 1)) return cum[n - 1];
    const auto k = static_cast<std::size_t>(u);
    const double t = (u - static_cast<double>(k)) * g.dx();
    const double slope = (g[k + 1] - g[k]) / g.dx();
    return cum[k] + g[k] * t + 0.5 * slope * t * t;
  };
  const auto first = quantize_index(g.x0(), m);
  const auto last = quantize_index(g.x_last(), m);
  std::vector<double> probs(static_cast<std::size_t>(last - first + 1));
  double s = 0.0;
  for (auto i = first; i <= last; ++i) {
    const double a = (static_cast<double>(i) - 0.5) / m;
    const double b = (static_cast<double>(i) + 0.5) / m;
    const double p = std::max(0.0, cdf(b) - cdf(a));
    probs[static_cast<std::size_t>(i - first)] = p;
    s += p;
  }
  const double target = 1.0 - g.tail_mass();
  for (double& p : probs) p *= target / s;
  return StepDensity(m, first, std::move(probs), g.tail_mass());
}

/// Grid for an amplitude density on nodes k dx (so it can feed
/// compound_density_An). Each node takes the mean of the one-sided limits,
/// which gives jump points their trapezoid-exact half value.
inline DensityGrid tabulate_density(const AcDensity& d, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("tabulate_density: dx must be positive");
  const auto [lo, hi] = d.support_window();
  const auto i0 = static_cast<std::int64_t>(std::floor(lo / dx)) - 1;
  const auto i1 = static_cast<std::int64_t>(std::ceil(hi / dx)) + 1;
  const double eps = dx * 1e-7;
  std::vector<double> v(static_cast<std::size_t>(i1 - i0 + 1));
  for (std::int64_t i = i0; i <= i1; ++i) {
    const double x = static_cast<double>(i) * dx;
    v[static_cast<std::size_t>(i - i0)] = 0.5 * (d.pdf(x - eps) + d.pdf(x + eps));
  }
  return DensityGrid::normalized(static_cast<double>(i0) * dx, dx, std::move(v), 0.0);
}

struct CompoundDensity {
  DensityGrid grid;
  double truncation_mass;  // Poisson weight of k > k_max, relative to K >= 1
};

/// Smallest k_max whose conditional Poisson tail Pr{K > k_max | K >= 1} is below `tol`.
inline int poisson_k_max(double rate, double tol = 1e-10) {
  if (!(rate > 0.0)) throw std::invalid_argument("poisson_k_max: rate must be positive");
  const double denom = -std::expm1(-rate);
  double term = std::exp(-rate);
  double cum = term;
  for (int k = 1; k < 10000; ++k) {
    term *= rate / k;
    cum += term;
    if ((1.0 - cum) / denom < tol || term / denom < tol * 1e-3) return k;
  }
  throw std::invalid_argument("poisson_k_max: rate too large");
}

/// p_{A_n} = (e^{r} - 1)^{-1} Sum_{k=1}^{k_max} r^k / k! p_A^{*k} with r = lambda / n,
/// convolved in the spectral domain on a zero-padded grid. The grid of p_A
/// must be aligned with zero (x0 a whole number of steps).
inline CompoundDensity compound_density_An(const DensityGrid& pA, double lambda, std::int64_t n, int k_max) {
  if (!(lambda > 0.0) || n < 1 || k_max < 1) throw std::invalid_argument("compound_density_An: bad parameters");
  const double r = lambda / static_cast<double>(n);
  const double denom = std::expm1(r);
  std::vector<double> weight(static_cast<std::size_t>(k_max) + 1, 0.0);
  double term = 1.0, kept = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    term *= r / k;
    weight[static_cast<std::size_t>(k)] = term / denom;
    kept += term / denom;
  }
  const double truncated = std::max(0.0, 1.0 - kept);
  if (truncated > 1e-10) {
    throw std::invalid_argument("compound_density_An: k_max leaves Poisson tail " + std::to_string(truncated));
  }

  const double dx = pA.dx();
  const double start = pA.x0() / dx;
  if (std::abs(start - std::round(start)) > 1e-6) {
    throw std::invalid_argument("compound_density_An: p_A grid must start on a multiple of dx");
  }
  const auto i0 = static_cast<std::int64_t>(std::llround(start));
  const auto np = static_cast<std::int64_t>(pA.size());
  const std::int64_t i1 = i0 + np - 1;
  const std::int64_t g0 = std::min(i0, k_max * i0);
  const std::int64_t g1 = std::max(i1, k_max * i1);
  const auto out_len = static_cast<std::size_t>(g1 - g0 + 1);
  const std::size_t len = detail::next_pow2(out_len);

  detail::FftwBuffer base(len);
  for (std::int64_t i = 0; i < np; ++i) base[static_cast<std::size_t>(i)] = pA[static_cast<std::size_t>(i)];
  detail::fft_inplace(base, FFTW_FORWARD);

  detail::FftwBuffer mix(len);
  const double two_pi_over_len = 2.0 * kPi / static_cast<double>(len);
  for (std::size_t f = 0; f < len; ++f) {
    const cplx b = base[f];
    cplx power = 1.0;
    cplx acc = 0.0;
    double dx_pow = 1.0;  // dx^(k-1): each Riemann convolution step carries a dx
    for (int k = 1; k <= k_max; ++k) {
      power *= b;
      const auto shift = static_cast<std::uint64_t>(k * i0 - g0);
      const auto turns = static_cast<double>((shift * f) % len);
      acc += weight[static_cast<std::size_t>(k)] * dx_pow * power * std::polar(1.0, -two_pi_over_len * turns);
      dx_pow *= dx;
    }
    mix[f] = acc;
  }
  detail::fft_inplace(mix, FFTW_BACKWARD);

  std::vector<double> values(out_len);
  for (std::size_t i = 0; i < out_len; ++i) values[i] = std::max(0.0, mix[i].real() / static_cast<double>(len));
  return {DensityGrid::normalized(static_cast<double>(g0) * dx, dx, std::move(values), 0.0), truncated};
}

}  // namespace levyq
