// Closed-form normalizers kappa(n) and offsets zeta(n) for H_{m,n}, the
// admissible (n, m) schedules, and model-vs-model comparison series.
//
// Residual conventions (the quantities that should vanish as n grows along an
// admissible schedule):
//   continuous / discrete-continuous:  H_{m,n} / kappa(n) - log m - zeta(n)
//   discrete:                          H_{m,n} - zeta(n)
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "levyq/density.hpp"
#include "levyq/estimate.hpp"
#include "levyq/model_json.hpp"
#include "levyq/noise_models.hpp"

namespace levyq {

inline X0Classification require_classified(const ModelSpec& model) {
  const auto c = classify(model);
  if (c == X0Classification::Undetermined) {
    throw std::invalid_argument("model classification is undetermined; no kappa/zeta available");
  }
  return c;
}

/// n for continuous laws, n (1 - exp(-(lambda / n)(1 - alpha_d))) for
/// discrete-continuous Poisson noise, 1 for discrete laws.
inline double kappa(const ModelSpec& model, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("kappa: n must be >= 1");
  const double nn = static_cast<double>(n);
  switch (require_classified(model)) {
    case X0Classification::Continuous: return nn;
    case X0Classification::Discrete: return 1.0;
    default: break;
  }
  const auto& p = std::get<PoissonParams>(model);
  // lambda (1 - alpha_d) is the mass of V_ac
  const double ac_rate = p.lambda * p.amplitude.continuous_weight();
  return -nn * std::expm1(-ac_rate / nn);
}

struct StableEntropyOptions {
  double tail_epsilon = 5e-5;       // target window tail mass
  double points_per_sigma = 16.0;
  std::size_t max_points = std::size_t{1} << 22;
};

/// h(X0) for S(alpha, beta, sigma, mu). alpha = 2 is closed form
/// (1/2) log(4 pi e sigma^2); otherwise the density is obtained by cf
/// inversion on a window sized from the stable tail constant and integrated
/// with the power-law tail term. mu is irrelevant (translation invariance).
inline double stable_entropy_uncached(const StableParams& p, const StableEntropyOptions& opt = {}) {
  if (p.alpha == 2.0) return 0.5 * std::log(4.0 * kPi * std::numbers::e * p.sigma * p.sigma);
  const double a = p.alpha;
  const double tail_const = std::tgamma(a) * std::sin(0.5 * kPi * a) / kPi * (1.0 + std::abs(p.beta));
  const double half_width = p.sigma * std::pow(2.0 * tail_const / opt.tail_epsilon, 1.0 / a);
  const double want = 2.0 * half_width * opt.points_per_sigma / p.sigma;
  if (!(want < static_cast<double>(opt.max_points))) {
    throw DensityError("stable_entropy: alpha = " + std::to_string(a) + " needs a window beyond the grid budget");
  }
  auto points = static_cast<std::size_t>(want) | 1u;
  const StableParams centred(p.alpha, p.beta, p.sigma, 0.0);
  // alpha = 1, beta != 0 carries a (2/pi) beta sigma log sigma location term; the window is wide enough for it
  auto cf = [&](double w) { return std::exp(stable_exponent(centred, w)); };
  const auto inv = cf_to_density(cf, -half_width, half_width, points);
  return differential_entropy(inv.grid);
}

inline double stable_entropy(const StableParams& p) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double>, double> cache;
  const auto key = std::make_tuple(p.alpha, p.beta, p.sigma);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double h = stable_entropy_uncached(p);
  std::lock_guard lock(mutex);
  cache.emplace(key, h);
  return h;
}

/// h(X0) - (1/alpha) log n = h(X_1^(n)).
inline double zeta_stable(const StableParams& p, std::int64_t n) {
  return stable_entropy(p) - std::log(static_cast<double>(n)) / p.alpha;
}

inline double gaussian_entropy(const GaussianParams& g) {
  return 0.5 * std::log(2.0 * kPi * std::numbers::e * g.sigma * g.sigma);
}

inline double zeta_gaussian(const GaussianParams& g, std::int64_t n) {
  return gaussian_entropy(g) - 0.5 * std::log(static_cast<double>(n));
}

/// log n + h(A) - log lambda + 1, for a purely absolutely continuous amplitude.
inline double zeta_poisson(const PoissonParams& p, std::int64_t n) {
  const auto& d = p.amplitude.density();
  if (!d || !p.amplitude.atoms().empty() || p.amplitude.has_custom_sampler()) {
    throw std::invalid_argument("zeta_poisson: amplitude law must be absolutely continuous");
  }
  return std::log(static_cast<double>(n)) + d->entropy() - std::log(p.lambda) + 1.0;
}

/// zeta(n) for any model with a closed form. Sums use the stable part.
/// Degenerate models have zeta = 0; other discrete and mixed-amplitude laws
/// have no closed form and return NaN (their offset is measured instead).
inline double zeta(const ModelSpec& model, std::int64_t n) {
  if (is_degenerate(model)) return 0.0;
  require_classified(model);
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, StableParams>) {
          return zeta_stable(p, n);
        } else if constexpr (std::is_same_v<P, GaussianParams>) {
          return zeta_gaussian(p, n);
        } else if constexpr (std::is_same_v<P, SumParams>) {
          return zeta_stable(p.stable, n);
        } else {
          if (p.amplitude.density() && p.amplitude.atoms().empty() && !p.amplitude.has_custom_sampler()) {
            return zeta_poisson(p, n);
          }
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      model);
}

/// kappa(n) (log m + zeta(n)); 0 for the degenerate model.
inline double predicted_Hmn(const ModelSpec& model, double m, std::int64_t n) {
  if (!(m > 0.0)) throw std::invalid_argument("predicted_Hmn: m must be positive");
  if (is_degenerate(model)) return 0.0;
  const auto cls = require_classified(model);
  const double z = zeta(model, n);
  if (std::isnan(z)) throw std::invalid_argument("predicted_Hmn: no closed-form zeta for this model");
  if (cls == X0Classification::Discrete) return z;
  return kappa(model, n) * (std::log(m) + z);
}

inline double residual(const ModelSpec& model, double H, double m, std::int64_t n) {
  const auto cls = require_classified(model);
  const double z = zeta(model, n);
  if (cls == X0Classification::Discrete) return H - z;
  return H / kappa(model, n) - std::log(m) - z;
}

/// h(X0) - (1/2) log n, the entropy power inequality bound on h(X_1^(n)).
inline double epi_upper_bound(double h_x0, std::int64_t n) {
  if (!std::isfinite(h_x0)) throw std::invalid_argument("epi_upper_bound: h(X0) must be finite");
  return h_x0 - 0.5 * std::log(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

struct SchedulePoint {
  std::int64_t n;
  double m;
};

using Schedule = std::vector<SchedulePoint>;

inline double next_pow2(double x) { return std::exp2(std::ceil(std::log2(x))); }

/// Stability index governing the growth condition, or 0 for Poisson-type models.
inline double growth_alpha(const ModelSpec& model) {
  return std::visit(
      [](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, StableParams>) return p.alpha;
        else if constexpr (std::is_same_v<P, GaussianParams>) return 2.0;
        else if constexpr (std::is_same_v<P, SumParams>) return p.stable.alpha;
        else return 0.0;
      },
      model);
}

/// Lower bound on m at resolution n before power-of-two rounding.
inline double m_floor(const ModelSpec& model, std::int64_t n, double granularity = 1.0) {
  const double nn = static_cast<double>(n);
  const double a = growth_alpha(model);
  const double lg = std::log(nn + 1.0);
  if (a > 0.0) return std::ceil(std::pow(nn, 1.0 / a) * lg) * granularity;
  return std::ceil(lg * lg) * granularity;
}

/// stable: m = ceil(n^(1/alpha) log(n+1)) g; Poisson: m = ceil(log(n+1)^2) g;
/// rounded up to powers of two. For stable-type models m is raised further
/// (by doublings) where needed so that m / n^(1/alpha) strictly increases
/// along the emitted schedule.
inline Schedule m_schedule(const ModelSpec& model, const std::vector<std::int64_t>& ns, double granularity = 1.0) {
  if (!(granularity > 0.0)) throw std::invalid_argument("m_schedule: granularity must be positive");
  Schedule out;
  const double a = growth_alpha(model);
  double last_ratio = 0.0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 1) throw std::invalid_argument("m_schedule: n must be >= 1");
    if (k > 0 && ns[k] < ns[k - 1]) throw std::invalid_argument("m_schedule: n list must be nondecreasing");
    double m = next_pow2(m_floor(model, ns[k], granularity));
    if (a > 0.0) {
      const double root = std::pow(static_cast<double>(ns[k]), 1.0 / a);
      while (m / root <= last_ratio) m *= 2.0;
      last_ratio = m / root;
    }
    out.push_back({ns[k], m});
  }
  return out;
}

inline bool admissible(const ModelSpec& model, std::int64_t n, double m) { return m >= m_floor(model, n); }

// ---------------------------------------------------------------------------
// Reports and comparisons
// ---------------------------------------------------------------------------

struct AsymptoticReport {
  double m;
  std::int64_t n;
  EntropyEstimate empirical_H;  // n-scaled H_{m,n}
  double kappa;
  double zeta;
  double log_m_term;
  double predicted;
  double residual;
  X0Classification classification;
};

inline AsymptoticReport make_report(const ModelSpec& model, double m, std::int64_t n, const EntropyEstimate& H) {
  AsymptoticReport r{};
  r.m = m;
  r.n = n;
  r.empirical_H = H;
  r.classification = require_classified(model);
  r.kappa = kappa(model, n);
  r.zeta = zeta(model, n);
  r.log_m_term = std::log(m);
  const bool discrete = r.classification == X0Classification::Discrete;
  if (std::isnan(r.zeta)) {
    r.predicted = r.residual = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.predicted = discrete ? r.zeta : r.kappa * (r.log_m_term + r.zeta);
    r.residual = discrete ? H.value - r.zeta : H.value / r.kappa - r.log_m_term - r.zeta;
  }
  return r;
}

/// Per-model Monte Carlo key: identical models draw identical streams, and
/// distinct models draw independent ones.
inline std::uint64_t model_stream_seed(std::uint64_t seed, const ModelSpec& model) {
  return detail::mix64(seed ^ fnv1a64(to_json(model).dump()));
}

inline constexpr std::uint64_t kStreamsPerPoint = kMaxShards;

struct ComparisonPoint {
  std::int64_t n;
  double m;
  HmnEstimate x;
  HmnEstimate y;
  double ratio;       // H(X) / H(Y)
  double difference;  // H(X) - H(Y)
  double seconds = 0.0;
};

struct TrendSummary {
  std::size_t tail_begin = 0;              // first index of the evaluated tail
  bool ratio_strictly_decreasing = false;
  bool difference_strictly_decreasing = false;
  bool difference_negative = false;
  double final_ratio = 0.0;
  double final_difference = 0.0;
};

struct ComparisonSeries {
  std::vector<ComparisonPoint> points;
  TrendSummary trend;
};

/// Tail = the last half of the points (at least two).
inline TrendSummary summarize_trend(const std::vector<ComparisonPoint>& pts) {
  TrendSummary t;
  if (pts.empty()) return t;
  const std::size_t n = pts.size();
  t.tail_begin = n >= 4 ? n / 2 : 0;
  if (n - t.tail_begin < 2 && n >= 2) t.tail_begin = n - 2;
  t.ratio_strictly_decreasing = t.difference_strictly_decreasing = n >= 2;
  t.difference_negative = true;
  for (std::size_t k = t.tail_begin; k < n; ++k) {
    if (!(pts[k].difference < 0.0)) t.difference_negative = false;
    if (k > t.tail_begin) {
      if (!(pts[k].ratio < pts[k - 1].ratio)) t.ratio_strictly_decreasing = false;
      if (!(pts[k].difference < pts[k - 1].difference)) t.difference_strictly_decreasing = false;
    }
  }
  t.final_ratio = pts.back().ratio;
  t.final_difference = pts.back().difference;
  return t;
}

/// H_{m,n}(X) and H_{m,n}(Y) along a joint schedule. Point k of each model
/// uses streams starting at k * kStreamsPerPoint under model_stream_seed.
inline ComparisonSeries compare_models(const ModelSpec& x, const ModelSpec& y, const Schedule& schedule,
                                       std::uint64_t sample_count, std::uint64_t seed,
                                       const EstimateOptions& opt = {}) {
  ComparisonSeries out;
  const auto sx = model_stream_seed(seed, x);
  const auto sy = model_stream_seed(seed, y);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto& pt = schedule[k];
    const auto id = static_cast<std::uint64_t>(k) * kStreamsPerPoint;
    const auto t0 = std::chrono::steady_clock::now();
    auto hx = estimate_Hmn(x, pt.m, pt.n, sample_count, RngStream(sx, id), opt);
    auto hy = estimate_Hmn(y, pt.m, pt.n, sample_count, RngStream(sy, id), opt);
    const double ratio = hx.rate.value / hy.rate.value;
    const double diff = hx.rate.value - hy.rate.value;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.points.push_back({pt.n, pt.m, std::move(hx), std::move(hy), ratio, diff, secs});
  }
  out.trend = summarize_trend(out.points);
  return out;
}

/// Logarithmic envelope c1 log n <= H_{m,n} <= c2 log n fitted over points
/// with n > 1, for discrete laws whose zeta has no closed form.
struct LogEnvelope {
  double c1 = std::numeric_limits<double>::quiet_NaN();
  double c2 = std::numeric_limits<double>::quiet_NaN();
};

inline LogEnvelope fit_log_envelope(const std::vector<std::int64_t>& ns, const std::vector<double>& H) {
  if (ns.size() != H.size()) throw std::invalid_argument("fit_log_envelope: size mismatch");
  LogEnvelope e;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] <= 1) continue;
    const double c = H[k] / std::log(static_cast<double>(ns[k]));
    e.c1 = std::isnan(e.c1) ? c : std::min(e.c1, c);
    e.c2 = std::isnan(e.c2) ? c : std::max(e.c2, c);
  }
  return e;
}

}  // namespace levyq
