// Discrete entropy estimation and closed-form entropy relations (continuity
// bound over the (alpha, l, v)-AC class, Renyi's quantized-entropy expansion).
// All entropies are in nats.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include "levyq/noise_models.hpp"
#include "levyq/quantization.hpp"

namespace levyq {

struct EntropyEstimate {
  double value = 0.0;      // nats
  double std_error = 0.0;  // delta-method standard error
  bool bias_corrected = false;
  std::size_t observed_support = 0;
};

enum class Correction { None, MillerMadow };

inline const char* to_string(Correction c) { return c == Correction::None ? "none" : "miller_madow"; }

/// Plug-in entropy Sum (c/N) log(N/c). Miller-Madow adds (K - 1) / (2N).
/// std_error = sqrt((Sum p log^2 p - H^2) / N).
inline EntropyEstimate plugin_entropy(const EmpiricalPmf& pmf, Correction correction = Correction::None) {
  if (pmf.empty()) throw std::invalid_argument("plugin_entropy: empty pmf");
  const double n = static_cast<double>(pmf.total());
  const double log_n = std::log(n);
  double h = 0.0;
  double second = 0.0;
  for (const auto& [k, c] : pmf.counts()) {
    const double cd = static_cast<double>(c);
    const double surprisal = log_n - std::log(cd);
    h += cd * surprisal;
    second += cd * surprisal * surprisal;
  }
  h /= n;
  second /= n;
  EntropyEstimate e;
  e.observed_support = pmf.observed_support();
  e.value = h;
  e.std_error = std::sqrt(std::max(0.0, second - h * h) / n);
  if (correction == Correction::MillerMadow) {
    e.value += (static_cast<double>(e.observed_support) - 1.0) / (2.0 * n);
    e.bias_corrected = true;
  }
  return e;
}

/// Entropy of an explicit probability vector (exact-pmf oracle path).
template <typename Range>
double discrete_entropy(const Range& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

inline double binary_entropy(double d) {
  if (d <= 0.0 || d >= 1.0) return 0.0;
  return -d * std::log(d) - (1.0 - d) * std::log1p(-d);
}

/// |h(p) - h(q)| <= c1 D + c2 D log(1/D) for p, q in the (alpha, l, v)-AC class
/// with ||p - q||_1 = D. Uses the essential-sup constant |log(l e)| in c1.
struct ContinuityConstants {
  double c1;
  double c2;
};

inline ContinuityConstants continuity_constants(const ACClassParams& cls) {
  const double a = cls.alpha;
  const double c1 = std::abs(std::log(2.0 * a * cls.v)) / a + std::abs(std::log(cls.ell * std::numbers::e)) +
                    std::log(std::numbers::e / 2.0) + std::log(2.0 * std::tgamma(1.0 + 1.0 / a)) + 1.0 / a + 1.0;
  return {c1, 1.0 / a + 2.0};
}

inline double entropy_continuity_bound(double tv, const ACClassParams& cls) {
  if (!(tv > 0.0)) throw std::invalid_argument("entropy_continuity_bound: distance must be positive");
  if (tv > 2.0) throw std::invalid_argument("entropy_continuity_bound: L1 distance between densities cannot exceed 2");
  const auto c = continuity_constants(cls);
  return c.c1 * tv + c.c2 * tv * std::log(1.0 / tv);
}

/// d log m + d h_c + (1 - d) H_D + H2(d): the quantized entropy of a
/// discrete-continuous law with entropy dimension d, up to o(1) in m.
inline double renyi_quantized_prediction(double d, double h_c, double H_D, double m) {
  if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("renyi_quantized_prediction: d must lie in [0, 1]");
  if (!(m > 0.0)) throw std::invalid_argument("renyi_quantized_prediction: m must be positive");
  double out = binary_entropy(d);
  if (d > 0.0) out += d * (std::log(m) + h_c);
  if (d < 1.0) out += (1.0 - d) * H_D;
  return out;
}

}  // namespace levyq
