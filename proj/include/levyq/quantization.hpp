// Amplitude quantization [x]_m = floor(1/2 + m x) / m, sparse histograms of
// cell indices, and the piecewise-constant step density q_{X;m}.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace levyq {

/// Cell i of step 1/m, covering [(i - 0.5)/m, (i + 0.5)/m).
struct QuantIndex {
  std::int64_t i;
  double m;

  friend bool operator==(const QuantIndex&, const QuantIndex&) = default;
};

inline std::int64_t quantize_index(double x, double m) {
  if (!std::isfinite(x)) throw std::domain_error("quantize: non-finite sample");
  const double v = std::floor(0.5 + m * x);
  if (!(std::abs(v) < 9.0e18)) throw std::out_of_range("quantize: index exceeds 64-bit range");
  return static_cast<std::int64_t>(v);
}

inline QuantIndex quantize(double x, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("quantize: m must be positive");
  return {quantize_index(x, m), m};
}

inline double dequantize(const QuantIndex& q) { return static_cast<double>(q.i) / q.m; }

/// Sparse cell histogram. Ordered keys keep every reduction over it
/// deterministic; merging is bin-wise count addition.
class EmpiricalPmf {
 public:
  void add(std::int64_t index, std::uint64_t count = 1) {
    if (count == 0) return;
    counts_[index] += count;
    total_ += count;
  }

  void merge(const EmpiricalPmf& other) {
    for (const auto& [k, c] : other.counts_) counts_[k] += c;
    total_ += other.total_;
  }

  std::uint64_t total() const noexcept { return total_; }
  std::size_t observed_support() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return total_ == 0; }
  const std::map<std::int64_t, std::uint64_t>& counts() const noexcept { return counts_; }

  std::uint64_t count(std::int64_t index) const {
    auto it = counts_.find(index);
    return it == counts_.end() ? 0 : it->second;
  }

  friend bool operator==(const EmpiricalPmf&, const EmpiricalPmf&) = default;

 private:
  std::map<std::int64_t, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct QuantizedBlock {
  double m;
  std::vector<std::int64_t> indices;
  EmpiricalPmf pmf;
};

inline QuantizedBlock quantize_block(std::span<const double> xs, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("quantize_block: m must be positive");
  QuantizedBlock out{m, {}, {}};
  out.indices.reserve(xs.size());
  for (double x : xs) {
    const auto i = quantize_index(x, m);
    out.indices.push_back(i);
    out.pmf.add(i);
  }
  return out;
}

inline void accumulate(EmpiricalPmf& pmf, std::span<const double> xs, double m) {
  for (double x : xs) pmf.add(quantize_index(x, m));
}

/// q_{X;m}(x) = m P[i] on cell i, over a dense window of cells.
class StepDensity {
 public:
  StepDensity(double m, std::int64_t first_index, std::vector<double> probs, double tail_mass = 0.0)
      : m_(m), first_(first_index), probs_(std::move(probs)), tail_(tail_mass) {
    if (!(m_ > 0.0)) throw std::invalid_argument("StepDensity: m must be positive");
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("StepDensity: probabilities must be finite and >= 0");
    }
    if (std::abs(mass() + tail_ - 1.0) > 1e-12) throw std::invalid_argument("StepDensity: window + tail mass must equal 1");
  }

  double m() const noexcept { return m_; }
  std::int64_t first_index() const noexcept { return first_; }
  std::int64_t last_index() const noexcept { return first_ + static_cast<std::int64_t>(probs_.size()) - 1; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }
  double tail_mass() const noexcept { return tail_; }

  double probability(std::int64_t i) const {
    if (i < first_ || i > last_index()) return 0.0;
    return probs_[static_cast<std::size_t>(i - first_)];
  }

  double mass() const {
    double s = 0.0;
    for (double p : probs_) s += p;
    return s;
  }

  double operator()(double x) const { return m_ * probability(quantize_index(x, m_)); }

  /// Exact -Int q log q over the window: Sum P log(1 / (m P)).
  double differential_entropy() const {
    double h = 0.0;
    for (double p : probs_) {
      if (p > 0.0) h -= p * std::log(m_ * p);
    }
    return h;
  }

  /// Exact E|X~_m|^alpha for X~_m uniform within each cell.
  double abs_moment(double alpha) const {
    auto prim = [alpha](double x) { return std::copysign(std::pow(std::abs(x), alpha + 1.0) / (alpha + 1.0), x); };
    double s = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
      if (probs_[k] == 0.0) continue;
      const double i = static_cast<double>(first_ + static_cast<std::int64_t>(k));
      s += probs_[k] * m_ * (prim((i + 0.5) / m_) - prim((i - 0.5) / m_));
    }
    return s;
  }

 private:
  double m_;
  std::int64_t first_;
  std::vector<double> probs_;
  double tail_;
};

inline StepDensity step_density_from_pmf(const std::map<std::int64_t, double>& pmf, double m) {
  if (pmf.empty()) throw std::invalid_argument("step_density_from_pmf: empty pmf");
  double total = 0.0;
  for (const auto& [k, p] : pmf) total += p;
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("step_density_from_pmf: pmf is not normalized");
  const auto first = pmf.begin()->first;
  const auto last = pmf.rbegin()->first;
  std::vector<double> probs(static_cast<std::size_t>(last - first + 1), 0.0);
  for (const auto& [k, p] : pmf) probs[static_cast<std::size_t>(k - first)] = p;
  return StepDensity(m, first, std::move(probs));
}

inline StepDensity step_density_from_pmf(const EmpiricalPmf& pmf, double m) {
  if (pmf.empty()) throw std::invalid_argument("step_density_from_pmf: empty pmf");
  std::map<std::int64_t, double> p;
  const double n = static_cast<double>(pmf.total());
  for (const auto& [k, c] : pmf.counts()) p[k] = static_cast<double>(c) / n;
  // rounding of c / n can leave ~1e-16 residue; fold it into the largest cell
  double s = 0.0;
  for (const auto& [k, v] : p) s += v;
  auto big = std::max_element(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  big->second += 1.0 - s;
  return step_density_from_pmf(p, m);
}

/// Int |q - r| for two step densities on the same lattice: Sum |P_i - Q_i|.
inline double tv_distance(const StepDensity& q, const StepDensity& r) {
  if (q.m() != r.m()) throw std::invalid_argument("tv_distance: step densities need the same m");
  const auto lo = std::min(q.first_index(), r.first_index());
  const auto hi = std::max(q.last_index(), r.last_index());
  double s = 0.0;
  for (auto i = lo; i <= hi; ++i) s += std::abs(q.probability(i) - r.probability(i));
  return s + std::abs(q.tail_mass() - r.tail_mass());
}

}  // namespace levyq
