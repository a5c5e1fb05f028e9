// levyq: command-line front end for the quantization-entropy experiments.
//
//   levyq converge --config cfg.json [--seed S] [--workers W] [--out DIR]
//   levyq compare  --config cfg.json ...
//   levyq codec    --config cfg.json ...
//   levyq density  --model '{"kind": "stable", ...}' --n 4 --out p.csv
//   levyq sample   --model model.json --n 4 --count 100000 --out xs.bin
//
// Seed precedence: --seed, then the config's "seed", then $LEVYQ_SEED, then 0.
// Exit status: 0 when every required assertion passes, 1 when one fails,
// 2 on usage or configuration errors.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "levyq/levyq.hpp"

namespace {

using levyq::json;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("LEVYQ_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 10);
  if (*end != '\0') throw levyq::ConfigError(std::string("LEVYQ_SEED is not an unsigned integer: ") + s);
  return v;
}

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
};

levyq::ExperimentConfig load(const RunFlags& f) {
  std::ifstream in(f.config);
  if (!in) throw levyq::ConfigError("cannot open config " + f.config);
  json j = json::parse(in);
  if (f.seed) {
    j["seed"] = *f.seed;
  } else if (!j.contains("seed")) {
    if (auto s = env_seed()) j["seed"] = *s;
  }
  if (!f.out.empty()) j["output_dir"] = f.out;
  auto c = levyq::config_from_json(j);
  if (f.workers) c.workers = *f.workers;
  return c;
}

int report(const levyq::RunManifest& m) {
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& a : m.assertions) {
    std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << " [" << a.detail << "]\n";
  }
  for (const auto& o : m.outputs) std::cout << "wrote " << o << "\n";
  return m.all_required_passed() ? 0 : 1;
}

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("-c,--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("-s,--seed", f.seed, "seed override");
  sub->add_option("-w,--workers", f.workers, "worker threads (0 = all cores)");
  sub->add_option("-o,--out", f.out, "output directory override");
}

json read_model_arg(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    return json::parse(in);
  }
  return json::parse(arg);
}

// Density of X_1^(n): cf inversion for stable, Gaussian and sum models; for
// Poisson models the continuous part p_{A_n} (the atom mass goes to stderr).
int run_density(const std::string& model_arg, std::int64_t n, double lo, double hi, std::size_t points,
                const std::string& out) {
  const auto model = levyq::model_from_json(read_model_arg(model_arg));
  std::string csv;
  if (const auto* p = std::get_if<levyq::PoissonParams>(&model)) {
    const auto& d = p->amplitude.density();
    if (!d || !p->amplitude.atoms().empty()) throw levyq::ConfigError("density: Poisson amplitude must be continuous");
    const double dx = (hi - lo) / static_cast<double>(points - 1);
    const auto pA = levyq::tabulate_density(*d, dx);
    const double rate = p->lambda / static_cast<double>(n);
    const auto an = levyq::compound_density_An(pA, p->lambda, n, levyq::poisson_k_max(rate));
    std::cerr << fmt::format("atom at 0 with mass {:.17g}; continuous part has mass {:.17g}\n", std::exp(-rate),
                             -std::expm1(-rate));
    csv = levyq::density_csv(an.grid);
  } else {
    const double nn = static_cast<double>(n);
    auto cf = [&](double w) { return std::exp(levyq::model_exponent(model, w) / nn); };
    const auto inv = levyq::cf_to_density(cf, lo, hi, points);
    std::cerr << fmt::format("tail mass {:.3g}, clamped mass {:.3g}, h = {:.17g}\n", inv.grid.tail_mass(),
                             inv.clamped_mass, levyq::differential_entropy(inv.grid));
    csv = levyq::density_csv(inv.grid);
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    levyq::write_text(out, csv);
  }
  return 0;
}

int run_sample(const std::string& model_arg, std::int64_t n, std::uint64_t count, std::optional<std::uint64_t> seed,
               std::uint64_t stream_id, const std::string& out) {
  const json mj = read_model_arg(model_arg);
  const auto model = levyq::model_from_json(mj);
  const std::uint64_t s = seed ? *seed : env_seed().value_or(0);
  levyq::RngStream rng(s, stream_id);
  const auto xs = levyq::sample_increments(levyq::IncrementSpec(model, n), count, rng);
  const json sidecar = {{"model", mj},           {"model_hash", levyq::model_hash(model)},
                        {"n", n},                {"seed", s},
                        {"stream_id", stream_id}, {"count", count},
                        {"format", "float64 little-endian"}, {"code_version", levyq::kCodeVersion}};
  levyq::write_stream(out, xs, sidecar);
  std::cout << "wrote " << out << " and " << out << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantization entropy of white Levy noise"};
  app.require_subcommand(1);

  RunFlags conv, cmp, cod;
  auto* converge = app.add_subcommand("converge", "H_{m,n} against kappa/zeta predictions along a schedule");
  add_run_flags(converge, conv);
  auto* compare = app.add_subcommand("compare", "ratio and difference series for two models");
  add_run_flags(compare, cmp);
  auto* codec = app.add_subcommand("codec", "coded rate against empirical H_{m,n}");
  add_run_flags(codec, cod);

  std::string d_model, d_out;
  std::int64_t d_n = 1;
  double d_lo = -20.0, d_hi = 20.0;
  std::size_t d_points = 4097;
  auto* density = app.add_subcommand("density", "tabulate the density of one increment");
  density->add_option("-m,--model", d_model, "model JSON or a file holding it")->required();
  density->add_option("-n,--n", d_n, "time resolution")->check(CLI::PositiveNumber);
  density->add_option("--lo", d_lo, "window start");
  density->add_option("--hi", d_hi, "window end");
  density->add_option("--points", d_points, "grid points")->check(CLI::Range(16, 1 << 24));
  density->add_option("-o,--out", d_out, "CSV path (stdout if omitted)");

  std::string s_model, s_out;
  std::int64_t s_n = 1;
  std::uint64_t s_count = 100000, s_stream = 0;
  std::optional<std::uint64_t> s_seed;
  auto* sample = app.add_subcommand("sample", "dump raw increments as float64 with a JSON sidecar");
  sample->add_option("-m,--model", s_model, "model JSON or a file holding it")->required();
  sample->add_option("-n,--n", s_n, "time resolution")->check(CLI::PositiveNumber);
  sample->add_option("--count", s_count, "number of increments");
  sample->add_option("-s,--seed", s_seed, "seed");
  sample->add_option("--stream-id", s_stream, "stream id");
  sample->add_option("-o,--out", s_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*converge) return report(levyq::run_convergence(load(conv)).manifest);
    if (*compare) return report(levyq::run_comparison(load(cmp)).manifest);
    if (*codec) return report(levyq::run_codec_check(load(cod)).manifest);
    if (*density) {
      if (!(d_hi > d_lo)) throw levyq::ConfigError("density: --hi must exceed --lo");
      return run_density(d_model, d_n, d_lo, d_hi, d_points, d_out);
    }
    if (*sample) return run_sample(s_model, s_n, s_count, s_seed, s_stream, s_out);
  } catch (const levyq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
