// Exact-in-distribution draws of the window integrals X_i^(n) over
// consecutive intervals of length 1/n.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <variant>
#include <vector>

#include "levyq/noise_models.hpp"
#include "levyq/rng.hpp"

namespace levyq {

struct IncrementSpec {
  ModelSpec model;
  std::int64_t n = 1;

  IncrementSpec(ModelSpec m, std::int64_t n_) : model(std::move(m)), n(n_) {
    if (n < 1) throw std::invalid_argument("IncrementSpec: n must be >= 1");
  }
};

/// Shift b_n with X_1^(n) =d (X0 - b_n) / n^(1/alpha).
inline double shift_b_n(const StableParams& p, std::int64_t n) {
  const double nn = static_cast<double>(n);
  if (p.alpha == 1.0) return (2.0 / kPi) * p.sigma * p.beta * std::log(nn);
  return p.mu * (1.0 - std::pow(nn, 1.0 / p.alpha) / nn);
}

/// One draw of X0 ~ S(alpha, beta, sigma, mu) by Chambers-Mallows-Stuck
/// (Weron's form for this parametrization). alpha = 2 is sampled as
/// N(mu, 2 sigma^2) directly.
inline double sample_stable_x0(const StableParams& p, RngStream& rng) {
  if (p.alpha == 2.0) {
    std::normal_distribution<double> z(0.0, 1.0);
    return p.mu + std::numbers::sqrt2 * p.sigma * z(rng);
  }
  const double v = kPi * (rng.uniform01() - 0.5);
  const double w = rng.exponential();
  if (p.alpha == 1.0) {
    const double half_pi = 0.5 * kPi;
    const double bv = half_pi + p.beta * v;
    const double x = (2.0 / kPi) * (bv * std::tan(v) - p.beta * std::log(half_pi * w * std::cos(v) / bv));
    return p.sigma * x + (2.0 / kPi) * p.beta * p.sigma * std::log(p.sigma) + p.mu;
  }
  const double a = p.alpha;
  const double t = p.beta * std::tan(0.5 * kPi * a);
  const double b = std::atan(t) / a;
  const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
  const double x = s * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
  return p.sigma * x + p.mu;
}

inline double sample_stable_increment(const StableParams& p, std::int64_t n, RngStream& rng) {
  const double x0 = sample_stable_x0(p, rng);
  return (x0 - shift_b_n(p, n)) / std::pow(static_cast<double>(n), 1.0 / p.alpha);
}

/// Compound-Poisson window integral: K ~ Poisson(lambda / n) jumps. When K = 0
/// the result is the literal 0.0, so the atom at zero survives quantization.
inline double sample_poisson_increment(const PoissonParams& p, std::int64_t n, RngStream& rng) {
  std::poisson_distribution<std::int64_t> count(p.lambda / static_cast<double>(n));
  const std::int64_t k = count(rng);
  double sum = 0.0;
  for (std::int64_t i = 0; i < k; ++i) sum += p.amplitude.sample(rng);
  return sum;
}

/// Precomputed per-(model, n) sampler.
class IncrementSampler {
 public:
  explicit IncrementSampler(IncrementSpec spec) : spec_(std::move(spec)) {
    const double nn = static_cast<double>(spec_.n);
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, StableParams>) {
            setup_stable(p, nn);
          } else if constexpr (std::is_same_v<P, PoissonParams>) {
            poisson_mean_ = p.lambda / nn;
          } else if constexpr (std::is_same_v<P, GaussianParams>) {
            shift_ = p.mu / nn;
            scale_ = p.sigma / std::sqrt(nn);
          } else {
            setup_stable(p.stable, nn);
            poisson_mean_ = p.poisson.lambda / nn;
          }
        },
        spec_.model);
  }

  const IncrementSpec& spec() const noexcept { return spec_; }

  double operator()(RngStream& rng) const {
    return std::visit(
        [&](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, StableParams>) {
            return stable(p, rng);
          } else if constexpr (std::is_same_v<P, PoissonParams>) {
            return poisson(p, rng);
          } else if constexpr (std::is_same_v<P, GaussianParams>) {
            std::normal_distribution<double> z(0.0, 1.0);
            return shift_ + scale_ * z(rng);
          } else {
            const double x = stable(p.stable, rng);
            return x + poisson(p.poisson, rng);
          }
        },
        spec_.model);
  }

 private:
  void setup_stable(const StableParams& p, double nn) {
    shift_ = shift_b_n(p, spec_.n);
    scale_ = 1.0 / std::pow(nn, 1.0 / p.alpha);
  }

  double stable(const StableParams& p, RngStream& rng) const { return (sample_stable_x0(p, rng) - shift_) * scale_; }

  double poisson(const PoissonParams& p, RngStream& rng) const {
    std::poisson_distribution<std::int64_t> count(poisson_mean_);
    const std::int64_t k = count(rng);
    double sum = 0.0;
    for (std::int64_t i = 0; i < k; ++i) sum += p.amplitude.sample(rng);
    return sum;
  }

  IncrementSpec spec_;
  double shift_ = 0.0;
  double scale_ = 1.0;
  double poisson_mean_ = 0.0;
};

/// `count` iid draws of X_1^(n).
inline std::vector<double> sample_increments(const IncrementSpec& spec, std::size_t count, RngStream& rng) {
  IncrementSampler draw(spec);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw(rng));
  return out;
}

/// Draws of X0 (n = 1) summed from `n` consecutive increments at resolution n.
inline std::vector<double> sample_window_sums(const IncrementSpec& spec, std::size_t count, RngStream& rng) {
  IncrementSampler draw(spec);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double s = 0.0;
    for (std::int64_t j = 0; j < spec.n; ++j) s += draw(rng);
    out.push_back(s);
  }
  return out;
}

}  // namespace levyq
