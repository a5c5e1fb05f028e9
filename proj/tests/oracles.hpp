// Independent reference values for the test suites. Nothing here calls into
// the library: closed forms, adaptive quadrature, and exact pmf sums written
// from the defining formulas. Constants marked "mpmath" were evaluated at 30
// significant digits and frozen.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// mpmath: gamma(2/3) / (1.5 pi), the alpha = 1.5 symmetric stable density at 0
inline constexpr double kStable15AtZero = 0.2873527514521644;
// mpmath: entropy of Poisson(1) in nats
inline constexpr double kPoisson1Entropy = 1.3048422422562515;
inline constexpr double kLog4Pi = 2.5310242469692908;
inline constexpr double kHalfLog2PiE = 1.4189385332046727;
// mpmath: 0.1 / (e^0.1 - 1)
inline constexpr double kFirstWeightR01 = 0.9508331944775050;

/// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12, int depth = 48) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

/// (1/pi) Int_0^inf exp(-w^alpha) dw, the symmetric stable density at 0,
/// by quadrature after w = t / (1 - t).
inline double stable_density_at_zero(double alpha) {
  auto g = [alpha](double t) {
    if (t >= 1.0) return 0.0;
    const double w = t / (1.0 - t);
    return std::exp(-std::pow(w, alpha)) / ((1.0 - t) * (1.0 - t));
  };
  return simpson(g, 0.0, 1.0, 1e-14) / kPi;
}

/// Cauchy(sigma) differential entropy by quadrature of -p log p with
/// x = tan(theta) (exact change of variables, finite interval).
inline double cauchy_entropy_quadrature(double sigma) {
  auto g = [sigma](double th) {
    const double x = sigma * std::tan(th);
    const double p = sigma / (kPi * (sigma * sigma + x * x));
    const double dx = sigma / (std::cos(th) * std::cos(th));
    return -p * std::log(p) * dx;
  };
  const double e = 1e-9;
  return simpson(g, -kPi / 2 + e, kPi / 2 - e, 1e-13);
}

inline double poisson_pmf(int k, double mean) {
  return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

inline double poisson_entropy(double mean) {
  double h = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double p = poisson_pmf(k, mean);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

/// Irwin-Hall CDF: Pr{U_1 + ... + U_k <= x} for iid U(0, 1).
inline double irwin_hall_cdf(double x, int k) {
  if (x <= 0.0) return 0.0;
  if (x >= k) return 1.0;
  double s = 0.0, binom = 1.0, fact = 1.0;
  for (int i = 1; i <= k; ++i) fact *= i;
  for (int j = 0; j <= k && j < x; ++j) {
    s += ((j % 2) ? -1.0 : 1.0) * binom * std::pow(x - j, k);
    binom = binom * (k - j) / (j + 1);
  }
  return s / fact;
}

/// Exact cell pmf of [Y]_m for Y compound Poisson(rate) with U(0,1) jumps.
inline std::vector<double> compound_uniform_cells(double rate, double m, int k_max = 12) {
  const int cells = static_cast<int>(m * (k_max + 1)) + 2;
  std::vector<double> p(static_cast<std::size_t>(cells), 0.0);
  p[0] = std::exp(-rate);
  for (int k = 1; k <= k_max; ++k) {
    const double w = poisson_pmf(k, rate);
    for (int i = 0; i < cells; ++i) {
      const double a = (i - 0.5) / m, b = (i + 0.5) / m;
      p[static_cast<std::size_t>(i)] += w * (irwin_hall_cdf(b, k) - irwin_hall_cdf(a, k));
    }
  }
  return p;
}

inline double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

/// 2 (e^r - r - 1) / (e^r - 1).
inline double compound_tv_bound(double r) { return 2.0 * (std::exp(r) - r - 1.0) / (std::exp(r) - 1.0); }

/// Exact H([X]_m) for X ~ (1 - d) delta_0 + d U(0, 1), integer m.
inline double mixture_quantized_entropy(double d, int m) {
  std::vector<double> p;
  p.push_back((1.0 - d) + d * 0.5 / m);
  for (int i = 1; i < m; ++i) p.push_back(d / m);
  p.push_back(d * 0.5 / m);
  return entropy_of(p);
}

/// Continuity-bound constants written out from the formula.
inline double continuity_c1(double alpha, double ell, double v) {
  const double e = std::numbers::e;
  return std::abs(std::log(2.0 * alpha * v)) / alpha + std::abs(std::log(ell * e)) + std::log(e / 2.0) +
         std::log(2.0 * std::tgamma(1.0 + 1.0 / alpha)) + 1.0 / alpha + 1.0;
}

}  // namespace oracle
