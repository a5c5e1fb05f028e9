// Config-driven experiments: convergence tables, model comparisons and codec
// checks, each producing CSV tables, a JSON manifest, and a verdict over the
// assertions the config marks as required.
//
// Config (JSON):
//   {
//     "name": "gaussian-asymptote",
//     "model": <model>                        (converge, codec)
//     "models": [<model>, <model>]            (compare: X then Y; converge/codec: several)
//     "schedule": {"points": [[n, m], ...]}
//               | {"generator": "m_schedule", "n": [...], "granularity": g}
//               | {"generator": "fixed_m", "n": [...], "m": m}
//     "sample_count": N, "seed": s, "correction": "miller_madow" | "none",
//     "workers": 0, "output_dir": "out/run",
//     "undersampling": "warn" | "fail",
//     "allow_inadmissible": false,
//     "required": [{"kind": ..., ...}, ...]
//   }
// Assertion kinds:
//   converge: abs_residual_below {tolerance, point: "last" | "all"},
//             residuals_nonincreasing {sigmas (default 3)}
//   compare:  final_ratio {target, tolerance}, ratio_strictly_decreasing,
//             difference_negative_decreasing, ratios_exactly_one
//   codec:    rate_within_tolerance, rate_above_floor, roundtrip
// Model points k use RngStream(model_stream_seed(seed, model), k * 4096).
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "levyq/asymptotics.hpp"
#include "levyq/codec.hpp"
#include "levyq/estimate.hpp"
#include "levyq/io.hpp"
#include "levyq/model_json.hpp"

namespace levyq {

inline constexpr const char* kCodeVersion = "levyq 0.1.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<ModelSpec> models;
  Schedule schedule;
  std::uint64_t sample_count = 1000000;
  std::uint64_t seed = 0;
  Correction correction = Correction::MillerMadow;
  unsigned workers = 0;
  std::filesystem::path output_dir = "out";
  bool fail_on_undersampling = false;
  bool allow_inadmissible = false;
  std::vector<json> required;
  json source;  // the parsed document, for hashing
};

namespace detail {

inline Schedule schedule_from_json(const json& j, const ModelSpec& model) {
  if (j.contains("points")) {
    Schedule s;
    for (const auto& p : j.at("points")) s.push_back({p.at(0).get<std::int64_t>(), p.at(1).get<double>()});
    return s;
  }
  const auto gen = j.at("generator").get<std::string>();
  const auto ns = j.at("n").get<std::vector<std::int64_t>>();
  if (gen == "m_schedule") return m_schedule(model, ns, j.value("granularity", 1.0));
  if (gen == "fixed_m") {
    Schedule s;
    for (auto n : ns) s.push_back({n, j.at("m").get<double>()});
    return s;
  }
  throw ConfigError("unknown schedule generator: " + gen);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.source = j;
  c.name = j.value("name", c.name);
  if (j.contains("model")) c.models.push_back(model_from_json(j.at("model")));
  if (j.contains("models")) {
    for (const auto& m : j.at("models")) c.models.push_back(model_from_json(m));
  }
  if (c.models.empty()) throw ConfigError("config needs \"model\" or \"models\"");
  if (!j.contains("schedule")) throw ConfigError("config needs a \"schedule\"");
  c.schedule = detail::schedule_from_json(j.at("schedule"), c.models.front());
  if (c.schedule.empty()) throw ConfigError("schedule is empty");
  for (std::size_t k = 0; k < c.schedule.size(); ++k) {
    if (c.schedule[k].n < 1 || !(c.schedule[k].m > 0.0)) throw ConfigError("schedule points need n >= 1 and m > 0");
    if (k && c.schedule[k].n < c.schedule[k - 1].n) throw ConfigError("schedule n must be nondecreasing");
  }
  c.sample_count = j.value("sample_count", c.sample_count);
  if (c.sample_count == 0) throw ConfigError("sample_count must be positive");
  c.seed = j.value("seed", c.seed);
  const auto corr = j.value("correction", std::string("miller_madow"));
  if (corr == "miller_madow") c.correction = Correction::MillerMadow;
  else if (corr == "none") c.correction = Correction::None;
  else throw ConfigError("unknown correction: " + corr);
  c.workers = j.value("workers", 0u);
  c.output_dir = j.value("output_dir", std::string("out"));
  const auto policy = j.value("undersampling", std::string("warn"));
  if (policy != "warn" && policy != "fail") throw ConfigError("undersampling policy must be warn or fail");
  c.fail_on_undersampling = policy == "fail";
  c.allow_inadmissible = j.value("allow_inadmissible", false);
  if (j.contains("required")) c.required = j.at("required").get<std::vector<json>>();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  return config_from_json(json::parse(f));
}

inline std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a64(c.source.dump())); }

/// Rejects schedule points below the model's growth floor unless allowed.
inline void validate_admissible(const ExperimentConfig& c) {
  if (c.allow_inadmissible) return;
  for (const auto& model : c.models) {
    for (const auto& pt : c.schedule) {
      if (!admissible(model, pt.n, pt.m)) {
        throw ConfigError(fmt::format("schedule point (n={}, m={}) is below the growth floor {} for model {}", pt.n,
                                      fmt_double(pt.m), fmt_double(m_floor(model, pt.n)), model_hash(model)));
      }
    }
  }
}

struct AssertionResult {
  std::string name;
  bool passed;
  std::string detail;
};

struct PointTiming {
  std::string label;
  double seconds;
};

struct RunManifest {
  std::string command;
  std::string config_name;
  std::string config_hash;
  std::string code_version = kCodeVersion;
  std::uint64_t seed = 0;
  std::uint64_t sample_count = 0;
  std::vector<std::string> model_hashes;
  std::vector<PointTiming> timing;
  std::vector<std::string> warnings;
  std::vector<AssertionResult> assertions;
  std::vector<std::string> outputs;

  bool all_required_passed() const {
    for (const auto& a : assertions) {
      if (!a.passed) return false;
    }
    return true;
  }

  json to_json() const {
    json t = json::array();
    for (const auto& p : timing) t.push_back({{"point", p.label}, {"seconds", p.seconds}});
    json a = json::array();
    for (const auto& r : assertions) a.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    return {{"command", command},       {"config_name", config_name},   {"config_hash", config_hash},
            {"code_version", code_version}, {"seed", seed},               {"sample_count", sample_count},
            {"model_hashes", model_hashes}, {"timing", t},                {"warnings", warnings},
            {"assertions", a},          {"outputs", outputs},           {"passed", all_required_passed()}};
  }
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline RunManifest start_manifest(const char* command, const ExperimentConfig& c) {
  RunManifest m;
  m.command = command;
  m.config_name = c.name;
  m.config_hash = config_hash(c);
  m.seed = c.seed;
  m.sample_count = c.sample_count;
  for (const auto& model : c.models) m.model_hashes.push_back(model_hash(model));
  return m;
}

inline EstimateOptions estimate_options(const ExperimentConfig& c) {
  EstimateOptions o;
  o.correction = c.correction;
  o.workers = c.workers;
  return o;
}

inline RngStream point_stream(const ExperimentConfig& c, const ModelSpec& model, std::size_t k) {
  return RngStream(model_stream_seed(c.seed, model), static_cast<std::uint64_t>(k) * kStreamsPerPoint);
}

inline void note_warnings(RunManifest& m, const ExperimentConfig& c, const std::string& where,
                          const std::vector<std::string>& ws) {
  for (const auto& w : ws) {
    m.warnings.push_back(where + ": " + w);
    if (c.fail_on_undersampling) m.assertions.push_back({"undersampling " + where, false, w});
  }
}

inline void write_manifest(RunManifest& m, const ExperimentConfig& c) {
  const auto path = c.output_dir / "manifest.json";
  m.outputs.push_back(path.string());
  write_text(path, m.to_json().dump(2) + "\n");
}

inline std::string u64(std::uint64_t v) { return std::to_string(v); }
inline std::string i64(std::int64_t v) { return std::to_string(v); }

inline const json* find_required(const ExperimentConfig& c, const std::string& kind) {
  for (const auto& r : c.required) {
    if (r.at("kind").get<std::string>() == kind) return &r;
  }
  return nullptr;
}

inline void check_kinds(const ExperimentConfig& c, std::initializer_list<const char*> allowed) {
  for (const auto& r : c.required) {
    const auto k = r.at("kind").get<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("assertion kind \"" + k + "\" does not apply to this command");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  std::string model_hash;
  AsymptoticReport report;
  std::size_t support;
  std::uint64_t exact_zeros;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  RunManifest manifest;
  std::string csv;
};

inline std::string convergence_csv(const ExperimentConfig& c, const std::vector<ConvergenceRow>& rows) {
  CsvTable t({"model_hash", "seed", "sample_count", "n", "m", "H_emp", "H_pred", "kappa", "zeta", "residual",
              "stderr", "support", "classification", "correction"});
  for (const auto& r : rows) {
    const auto& a = r.report;
    t.row({r.model_hash, detail::u64(c.seed), detail::u64(c.sample_count), detail::i64(a.n), fmt_double(a.m),
           fmt_double(a.empirical_H.value), fmt_double(a.predicted), fmt_double(a.kappa), fmt_double(a.zeta),
           fmt_double(a.residual), fmt_double(a.empirical_H.std_error), std::to_string(r.support),
           to_string(a.classification), to_string(c.correction)});
  }
  return t.text();
}

/// |r_{k+1}| <= |r_k| + sigmas * sqrt(se_k^2 + se_{k+1}^2), with se the
/// residual's standard error (stderr / kappa for normalized residuals).
inline bool residuals_nonincreasing(const std::vector<AsymptoticReport>& rs, double sigmas, std::string& detail) {
  bool ok = true;
  for (std::size_t k = 1; k < rs.size(); ++k) {
    auto se = [](const AsymptoticReport& r) {
      return r.classification == X0Classification::Discrete ? r.empirical_H.std_error
                                                            : r.empirical_H.std_error / r.kappa;
    };
    const double slack = sigmas * std::hypot(se(rs[k - 1]), se(rs[k]));
    const bool step = std::abs(rs[k].residual) <= std::abs(rs[k - 1].residual) + slack;
    detail += fmt::format("{}|r|: {:.6g} -> {:.6g} (slack {:.3g}){}", k > 1 ? "; " : "", std::abs(rs[k - 1].residual),
                          std::abs(rs[k].residual), slack, step ? "" : " INCREASE");
    ok = ok && step;
  }
  return ok;
}

inline ConvergenceResult run_convergence(const ExperimentConfig& c) {
  detail::check_kinds(c, {"abs_residual_below", "residuals_nonincreasing"});
  validate_admissible(c);
  ConvergenceResult out;
  out.manifest = detail::start_manifest("converge", c);
  const auto opt = detail::estimate_options(c);
  for (const auto& model : c.models) {
    const auto hash = model_hash(model);
    std::vector<AsymptoticReport> reports;
    for (std::size_t k = 0; k < c.schedule.size(); ++k) {
      const auto& pt = c.schedule[k];
      detail::Stopwatch sw;
      auto est = estimate_Hmn(model, pt.m, pt.n, c.sample_count, detail::point_stream(c, model, k), opt);
      auto rep = make_report(model, pt.m, pt.n, est.rate);
      const auto label = fmt::format("{} n={} m={}", hash, pt.n, fmt_double(pt.m));
      out.manifest.timing.push_back({label, sw.seconds()});
      detail::note_warnings(out.manifest, c, label, est.warnings);
      out.rows.push_back({hash, rep, est.pmf.observed_support(), est.exact_zeros});
      reports.push_back(rep);
    }
    if (const auto* r = detail::find_required(c, "abs_residual_below")) {
      const double tol = r->at("tolerance").get<double>();
      const bool all = r->value("point", std::string("last")) == "all";
      const std::size_t first = all ? 0 : reports.size() - 1;
      bool ok = true;
      std::string d;
      for (std::size_t k = first; k < reports.size(); ++k) {
        const double res = reports[k].residual;
        ok = ok && std::isfinite(res) && std::abs(res) < tol;
        d += fmt::format("{}n={} residual={:.6g}", k > first ? "; " : "", reports[k].n, res);
      }
      out.manifest.assertions.push_back({fmt::format("{} |residual| < {}", hash, tol), ok, d});
    }
    if (const auto* r = detail::find_required(c, "residuals_nonincreasing")) {
      std::string d;
      const bool ok = residuals_nonincreasing(reports, r->value("sigmas", 3.0), d);
      out.manifest.assertions.push_back({hash + " residuals non-increasing", ok, d});
    }
  }
  out.csv = convergence_csv(c, out.rows);
  const auto path = c.output_dir / "convergence.csv";
  write_text(path, out.csv);
  out.manifest.outputs.push_back(path.string());
  detail::write_manifest(out.manifest, c);
  return out;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct ComparisonResult {
  ComparisonSeries series;
  RunManifest manifest;
  std::string csv;
};

inline ComparisonResult run_comparison(const ExperimentConfig& c) {
  detail::check_kinds(c, {"final_ratio", "ratio_strictly_decreasing", "difference_negative_decreasing",
                          "ratios_exactly_one"});
  if (c.models.size() != 2) throw ConfigError("compare needs exactly two models");
  validate_admissible(c);
  ComparisonResult out;
  out.manifest = detail::start_manifest("compare", c);
  const auto& x = c.models[0];
  const auto& y = c.models[1];
  const auto opt = detail::estimate_options(c);
  out.series = compare_models(x, y, c.schedule, c.sample_count, c.seed, opt);
  for (const auto& p : out.series.points) {
    const auto label = fmt::format("n={} m={}", p.n, fmt_double(p.m));
    out.manifest.timing.push_back({label, p.seconds});
    detail::note_warnings(out.manifest, c, "X " + label, p.x.warnings);
    detail::note_warnings(out.manifest, c, "Y " + label, p.y.warnings);
  }
  const auto& tr = out.series.trend;

  CsvTable t({"model_hash_x", "model_hash_y", "seed", "sample_count", "n", "m", "H_x", "H_y", "stderr_x", "stderr_y",
              "ratio", "difference"});
  const auto hx = model_hash(x), hy = model_hash(y);
  for (const auto& p : out.series.points) {
    t.row({hx, hy, detail::u64(c.seed), detail::u64(c.sample_count), detail::i64(p.n), fmt_double(p.m),
           fmt_double(p.x.rate.value), fmt_double(p.y.rate.value), fmt_double(p.x.rate.std_error),
           fmt_double(p.y.rate.std_error), fmt_double(p.ratio), fmt_double(p.difference)});
  }
  out.csv = t.text();

  if (const auto* r = detail::find_required(c, "final_ratio")) {
    const double target = r->at("target").get<double>();
    const double tol = r->at("tolerance").get<double>();
    out.manifest.assertions.push_back({fmt::format("final ratio = {} +- {}", target, tol),
                                       std::abs(tr.final_ratio - target) <= tol,
                                       fmt::format("final ratio {:.6g}", tr.final_ratio)});
  }
  std::string ratios, diffs;
  for (std::size_t k = tr.tail_begin; k < out.series.points.size(); ++k) {
    ratios += fmt::format("{}{:.6g}", k > tr.tail_begin ? " " : "", out.series.points[k].ratio);
    diffs += fmt::format("{}{:.6g}", k > tr.tail_begin ? " " : "", out.series.points[k].difference);
  }
  if (detail::find_required(c, "ratio_strictly_decreasing")) {
    out.manifest.assertions.push_back({"tail ratio strictly decreasing", tr.ratio_strictly_decreasing, ratios});
  }
  if (detail::find_required(c, "difference_negative_decreasing")) {
    out.manifest.assertions.push_back({"tail difference negative and decreasing",
                                       tr.difference_negative && tr.difference_strictly_decreasing, diffs});
  }
  if (detail::find_required(c, "ratios_exactly_one")) {
    bool ok = true;
    for (const auto& p : out.series.points) ok = ok && p.ratio == 1.0;
    out.manifest.assertions.push_back({"all ratios exactly 1", ok, ratios});
  }
  const auto path = c.output_dir / "comparison.csv";
  write_text(path, out.csv);
  out.manifest.outputs.push_back(path.string());
  detail::write_manifest(out.manifest, c);
  return out;
}

// ---------------------------------------------------------------------------
// codec
// ---------------------------------------------------------------------------

struct CodecRow {
  std::string model_hash;
  std::int64_t n;
  double m;
  RateReport rate;
  bool roundtrip;
};

struct CodecResult {
  std::vector<CodecRow> rows;
  RunManifest manifest;
  std::string csv;
};

inline CodecResult run_codec_check(const ExperimentConfig& c) {
  detail::check_kinds(c, {"rate_within_tolerance", "rate_above_floor", "roundtrip"});
  validate_admissible(c);
  CodecResult out;
  out.manifest = detail::start_manifest("codec", c);
  const auto opt = detail::estimate_options(c);
  for (const auto& model : c.models) {
    const auto hash = model_hash(model);
    for (std::size_t k = 0; k < c.schedule.size(); ++k) {
      const auto& pt = c.schedule[k];
      detail::Stopwatch sw;
      const auto idx = sample_quantized(model, pt.m, pt.n, c.sample_count, detail::point_stream(c, model, k), opt);
      const auto est = estimate_from_indices(idx, pt.n, opt);
      const auto bits = encode(idx);
      bool roundtrip = false;
      try {
        roundtrip = decode(bits, idx.size()) == idx;
      } catch (const CodecError&) {
        roundtrip = false;
      }
      const auto label = fmt::format("{} n={} m={}", hash, pt.n, fmt_double(pt.m));
      out.manifest.timing.push_back({label, sw.seconds()});
      detail::note_warnings(out.manifest, c, label, est.warnings);
      out.rows.push_back({hash, pt.n, pt.m, rate_report(idx.size(), bits.bit_length(), pt.n, est.rate), roundtrip});
    }
  }
  CsvTable t({"model_hash", "seed", "sample_count", "n", "m", "symbols", "payload_bits", "rate", "H_emp", "stderr",
              "gap", "tolerance", "within_tolerance", "roundtrip"});
  for (const auto& r : out.rows) {
    t.row({r.model_hash, detail::u64(c.seed), detail::u64(c.sample_count), detail::i64(r.n), fmt_double(r.m),
           detail::u64(r.rate.symbols), detail::u64(r.rate.payload_bits), fmt_double(r.rate.per_unit_time_nats),
           fmt_double(r.rate.reference), fmt_double(r.rate.reference_std_error), fmt_double(r.rate.gap),
           fmt_double(r.rate.tolerance), r.rate.within_tolerance ? "true" : "false", r.roundtrip ? "true" : "false"});
  }
  out.csv = t.text();
  auto all = [&](auto pred, const char* name) {
    bool ok = true;
    std::string d;
    for (const auto& r : out.rows) {
      ok = ok && pred(r);
      d += fmt::format("{}n={} rate={:.6g} H={:.6g}", d.empty() ? "" : "; ", r.n, r.rate.per_unit_time_nats,
                       r.rate.reference);
    }
    out.manifest.assertions.push_back({name, ok, d});
  };
  if (detail::find_required(c, "rate_within_tolerance")) {
    all([](const CodecRow& r) { return r.rate.within_tolerance; }, "coded rate within 2% + 64 bits of H_emp");
  }
  if (detail::find_required(c, "rate_above_floor")) {
    all([](const CodecRow& r) { return r.rate.above_floor; }, "coded rate >= H_emp - 3 stderr");
  }
  if (detail::find_required(c, "roundtrip")) {
    all([](const CodecRow& r) { return r.roundtrip; }, "lossless round trip");
  }
  const auto path = c.output_dir / "codec.csv";
  write_text(path, out.csv);
  out.manifest.outputs.push_back(path.string());
  detail::write_manifest(out.manifest, c);
  return out;
}

}  // namespace levyq
