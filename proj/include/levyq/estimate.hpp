// Monte Carlo H_{m,n} = n H([X_1^(n)]_m): sharded sampling, histogram
// merge in shard order, one plug-in evaluation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "levyq/entropy.hpp"
#include "levyq/parallel.hpp"
#include "levyq/quantization.hpp"
#include "levyq/rng.hpp"
#include "levyq/sampling.hpp"

namespace levyq {

struct EstimateOptions {
  Correction correction = Correction::MillerMadow;
  unsigned workers = 0;  // 0 = hardware concurrency
  std::size_t shard_size = 1 << 16;
  double undersampling_ratio = 0.1;  // warn when K^2 / N exceeds this
};

struct HmnEstimate {
  EntropyEstimate rate;           // n-scaled: value and std_error multiplied by n
  EntropyEstimate per_increment;  // H([X_1^(n)]_m)
  EmpiricalPmf pmf;
  std::uint64_t exact_zeros = 0;  // draws equal to 0.0 before quantization
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMaxShards = 4096;

namespace detail {

struct ShardPlan {
  std::uint64_t shard;
  std::uint64_t shards;
};

inline ShardPlan plan_shards(std::uint64_t sample_count, const RngStream& rng, const EstimateOptions& opt) {
  const std::uint64_t shard = std::max<std::uint64_t>(opt.shard_size, (sample_count + kMaxShards - 1) / kMaxShards);
  const std::uint64_t shards = (sample_count + shard - 1) / shard;
  if (rng.stream_id() + shards - 1 > RngStream::kMaxStreamId) {
    throw std::invalid_argument("estimate_Hmn: stream id range exhausted");
  }
  return {shard, shards};
}

inline void finish_estimate(HmnEstimate& out, std::int64_t n, std::uint64_t sample_count, const EstimateOptions& opt) {
  out.per_increment = plugin_entropy(out.pmf, opt.correction);
  out.rate = out.per_increment;
  const double nn = static_cast<double>(n);
  out.rate.value *= nn;
  out.rate.std_error *= nn;
  const double k = static_cast<double>(out.pmf.observed_support());
  const double ratio = k * k / static_cast<double>(sample_count);
  if (ratio > opt.undersampling_ratio) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "undersampled: observed support %zu, K^2/N = %.3g > %.3g",
                  out.pmf.observed_support(), ratio, opt.undersampling_ratio);
    out.warnings.emplace_back(buf);
  }
}

}  // namespace detail

/// Shard s draws from RngStream(rng.seed(), rng.stream_id() + s), so a point
/// occupies at most kMaxShards consecutive stream ids. Each shard's histogram
/// is merged in shard order; the result does not depend on `workers`.
inline HmnEstimate estimate_Hmn(const ModelSpec& model, double m, std::int64_t n, std::uint64_t sample_count,
                                const RngStream& rng, const EstimateOptions& opt = {}) {
  if (sample_count == 0) throw std::invalid_argument("estimate_Hmn: sample_count must be positive");
  if (!(m > 0.0)) throw std::invalid_argument("estimate_Hmn: m must be positive");
  const IncrementSampler draw(IncrementSpec(model, n));
  const auto plan = detail::plan_shards(sample_count, rng, opt);

  std::vector<EmpiricalPmf> parts(plan.shards);
  std::vector<std::uint64_t> zeros(plan.shards, 0);
  parallel_for(plan.shards, opt.workers, [&](std::size_t s) {
    RngStream local(rng.seed(), rng.stream_id() + s);
    const std::uint64_t begin = s * plan.shard;
    const std::uint64_t end = std::min(sample_count, begin + plan.shard);
    EmpiricalPmf& pmf = parts[s];
    std::uint64_t z = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double x = draw(local);
      if (x == 0.0) ++z;
      pmf.add(quantize_index(x, m));
    }
    zeros[s] = z;
  });

  HmnEstimate out;
  for (std::size_t s = 0; s < plan.shards; ++s) {
    out.pmf.merge(parts[s]);
    out.exact_zeros += zeros[s];
  }
  detail::finish_estimate(out, n, sample_count, opt);
  return out;
}

/// The index stream behind estimate_Hmn (same shards, concatenated in shard
/// order), for coding experiments that must see exactly the estimated sample.
inline std::vector<std::int64_t> sample_quantized(const ModelSpec& model, double m, std::int64_t n,
                                                  std::uint64_t sample_count, const RngStream& rng,
                                                  const EstimateOptions& opt = {}) {
  if (!(m > 0.0)) throw std::invalid_argument("sample_quantized: m must be positive");
  const IncrementSampler draw(IncrementSpec(model, n));
  std::vector<std::int64_t> out(sample_count);
  if (sample_count == 0) return out;
  const auto plan = detail::plan_shards(sample_count, rng, opt);
  parallel_for(plan.shards, opt.workers, [&](std::size_t s) {
    RngStream local(rng.seed(), rng.stream_id() + s);
    const std::uint64_t end = std::min(sample_count, (s + 1) * plan.shard);
    for (std::uint64_t i = s * plan.shard; i < end; ++i) out[i] = quantize_index(draw(local), m);
  });
  return out;
}

/// estimate_Hmn's result for an already drawn index stream.
inline HmnEstimate estimate_from_indices(std::span<const std::int64_t> indices, std::int64_t n,
                                         const EstimateOptions& opt = {}) {
  if (indices.empty()) throw std::invalid_argument("estimate_from_indices: empty stream");
  HmnEstimate out;
  for (auto i : indices) out.pmf.add(i);
  out.exact_zeros = 0;  // not observable after quantization
  detail::finish_estimate(out, n, indices.size(), opt);
  return out;
}

}  // namespace levyq
