#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "levyq/levyq.hpp"

using namespace levyq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("levyq_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json gaussian_config() {
  return json::parse(R"({
    "name": "g",
    "model": {"kind": "gaussian", "sigma": 1.0},
    "schedule": {"points": [[1, 16], [4, 32], [9, 48]]},
    "sample_count": 60000,
    "seed": 5
  })");
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto e = s.find("\r\n", pos);
    out.push_back(s.substr(pos, e - pos));
    pos = e + 2;
  }
  return out;
}

}  // namespace

TEST(Config, ParsesDefaultsAndGenerators) {
  auto j = gaussian_config();
  const auto c = config_from_json(j);
  EXPECT_EQ(c.models.size(), 1u);
  EXPECT_EQ(c.schedule.size(), 3u);
  EXPECT_EQ(c.correction, Correction::MillerMadow);
  EXPECT_FALSE(c.fail_on_undersampling);

  j["schedule"] = {{"generator", "fixed_m"}, {"n", {2, 4}}, {"m", 64}};
  const auto f = config_from_json(j);
  EXPECT_EQ(f.schedule.at(1).n, 4);
  EXPECT_EQ(f.schedule.at(1).m, 64.0);

  j["schedule"] = {{"generator", "m_schedule"}, {"n", {1, 4, 16}}, {"granularity", 16}};
  const auto g = config_from_json(j);
  EXPECT_EQ(g.schedule.size(), 3u);
  for (const auto& pt : g.schedule) EXPECT_TRUE(admissible(g.models[0], pt.n, pt.m));
}

TEST(Config, Errors) {
  auto with = [](const char* key, json v) {
    auto j = gaussian_config();
    j[key] = std::move(v);
    return j;
  };
  EXPECT_THROW(config_from_json(with("correction", "jackknife")), ConfigError);
  EXPECT_THROW(config_from_json(with("undersampling", "ignore")), ConfigError);
  EXPECT_THROW(config_from_json(with("sample_count", 0)), ConfigError);
  EXPECT_THROW(config_from_json(with("schedule", {{"generator", "sqrt"}, {"n", {1}}})), ConfigError);
  EXPECT_THROW(config_from_json(with("schedule", {{"points", {{4, 8}, {2, 8}}}})), ConfigError);
  EXPECT_THROW(config_from_json(with("schedule", {{"points", json::array()}})), ConfigError);
  EXPECT_THROW(config_from_json(with("model", {{"kind", "levy-walk"}})), std::invalid_argument);
  auto none = gaussian_config();
  none.erase("model");
  EXPECT_THROW(config_from_json(none), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/levyq.json"), ConfigError);
}

TEST(Config, InadmissibleScheduleRejectedUnlessAllowed) {
  auto j = gaussian_config();
  j["model"] = {{"kind", "stable"}, {"alpha", 1.0}, {"sigma", 1.0}};
  j["schedule"] = {{"points", {{64, 8}}}};
  j["sample_count"] = 1000;
  j["output_dir"] = scratch("inadmissible").string();
  EXPECT_THROW(run_convergence(config_from_json(j)), ConfigError);
  j["allow_inadmissible"] = true;
  EXPECT_NO_THROW(run_convergence(config_from_json(j)));
}

TEST(Config, AssertionKindMustMatchCommand) {
  auto j = gaussian_config();
  j["output_dir"] = scratch("kinds").string();
  j["required"] = {{{"kind", "final_ratio"}, {"target", 1}, {"tolerance", 1}}};
  EXPECT_THROW(run_convergence(config_from_json(j)), ConfigError);
  j["required"] = {{{"kind", "roundtrip"}}};
  EXPECT_NO_THROW(run_codec_check(config_from_json(j)));
}

TEST(Converge, DeterministicAcrossRunsAndWorkers) {
  auto j = gaussian_config();
  j["output_dir"] = scratch("det1").string();
  j["workers"] = 1;
  const auto a = run_convergence(config_from_json(j));
  j["output_dir"] = scratch("det2").string();
  const auto b = run_convergence(config_from_json(j));
  const auto dir4 = scratch("det4");
  j["output_dir"] = dir4.string();
  j["workers"] = 4;
  const auto c = run_convergence(config_from_json(j));
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.csv, c.csv);
  EXPECT_EQ(slurp(dir4 / "convergence.csv"), c.csv);
  // a different seed gives a different table
  j["seed"] = 6;
  j["output_dir"] = scratch("det_seed").string();
  EXPECT_NE(run_convergence(config_from_json(j)).csv, a.csv);
}

TEST(Converge, FollowsDocumentedStreamLayout) {
  auto j = gaussian_config();
  j["output_dir"] = scratch("layout").string();
  const auto cfg = config_from_json(j);
  const auto res = run_convergence(cfg);
  const ModelSpec& model = cfg.models[0];
  for (std::size_t k = 0; k < cfg.schedule.size(); ++k) {
    const auto& pt = cfg.schedule[k];
    const auto est = estimate_Hmn(model, pt.m, pt.n, cfg.sample_count,
                                  RngStream(model_stream_seed(cfg.seed, model), k * 4096));
    EXPECT_EQ(res.rows[k].report.empirical_H.value, est.rate.value);
  }
}

TEST(Converge, EveryRowCarriesProvenance) {
  auto j = gaussian_config();
  j["output_dir"] = scratch("prov").string();
  const auto cfg = config_from_json(j);
  const auto res = run_convergence(cfg);
  const auto lines = split_lines(res.csv);
  ASSERT_EQ(lines.size(), 1 + cfg.schedule.size());
  EXPECT_EQ(lines[0].rfind("model_hash,seed,sample_count,n,m,", 0), 0u);
  const auto hash = model_hash(cfg.models[0]);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& pt = cfg.schedule[k - 1];
    const auto prefix = fmt::format("{},5,60000,{},{},", hash, pt.n, fmt_double(pt.m));
    EXPECT_EQ(lines[k].rfind(prefix, 0), 0u) << lines[k];
  }
  const auto manifest = json::parse(slurp(fs::path(j["output_dir"].get<std::string>()) / "manifest.json"));
  EXPECT_EQ(manifest.at("config_hash"), config_hash(cfg));
  EXPECT_EQ(manifest.at("code_version"), kCodeVersion);
  EXPECT_EQ(manifest.at("seed"), 5);
  EXPECT_EQ(manifest.at("model_hashes").at(0), hash);
  EXPECT_EQ(manifest.at("timing").size(), cfg.schedule.size());
  EXPECT_EQ(manifest.at("outputs").size(), 2u);
}

TEST(Converge, DegenerateModelRunsClean) {
  auto j = json::parse(slurp(fs::path(LEVYQ_SOURCE_DIR) / "configs/degenerate.json"));
  j["output_dir"] = scratch("degenerate").string();
  const auto res = run_convergence(config_from_json(j));
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& r : res.rows) {
    EXPECT_EQ(r.report.empirical_H.value, 0.0);
    EXPECT_EQ(r.report.residual, 0.0);
    EXPECT_EQ(r.exact_zeros, 100000u);
  }
  EXPECT_TRUE(res.manifest.all_required_passed());
}

TEST(Converge, RequiredAssertionsDecideTheVerdict) {
  auto j = gaussian_config();
  j["output_dir"] = scratch("verdict").string();
  j["required"] = {{{"kind", "abs_residual_below"}, {"tolerance", 1e-9}, {"point", "all"}}};
  EXPECT_FALSE(run_convergence(config_from_json(j)).manifest.all_required_passed());
  j["required"] = {{{"kind", "abs_residual_below"}, {"tolerance", 0.5}, {"point", "all"}},
                   {{"kind", "residuals_nonincreasing"}}};
  EXPECT_TRUE(run_convergence(config_from_json(j)).manifest.all_required_passed());
}

TEST(Converge, UndersamplingPolicy) {
  auto j = gaussian_config();
  j["schedule"] = {{"points", {{1, 4096}}}};
  j["sample_count"] = 20000;
  j["output_dir"] = scratch("under").string();
  const auto warn = run_convergence(config_from_json(j));
  EXPECT_FALSE(warn.manifest.warnings.empty());
  EXPECT_TRUE(warn.manifest.all_required_passed());
  j["undersampling"] = "fail";
  EXPECT_FALSE(run_convergence(config_from_json(j)).manifest.all_required_passed());
}

TEST(Compare, IdenticalModelsGiveUnitRatios) {
  const auto j = json::parse(R"({
    "models": [{"kind": "stable", "alpha": 1.3, "sigma": 1.0}, {"kind": "stable", "alpha": 1.3, "sigma": 1.0}],
    "schedule": {"generator": "m_schedule", "n": [1, 4], "granularity": 4},
    "sample_count": 30000, "seed": 3,
    "required": [{"kind": "ratios_exactly_one"}]
  })");
  auto cfg = config_from_json(j);
  cfg.output_dir = scratch("same");
  const auto res = run_comparison(cfg);
  for (const auto& p : res.series.points) {
    EXPECT_EQ(p.ratio, 1.0);
    EXPECT_EQ(p.difference, 0.0);
  }
  EXPECT_TRUE(res.manifest.all_required_passed());
  EXPECT_EQ(split_lines(res.csv)[0].rfind("model_hash_x,model_hash_y,seed,sample_count,n,m,", 0), 0u);
}

TEST(Compare, NeedsTwoModels) {
  auto cfg = config_from_json(gaussian_config());
  cfg.output_dir = scratch("one");
  EXPECT_THROW(run_comparison(cfg), ConfigError);
}

TEST(Codec, GaussianPointPassesAndDeterministicModelIsFree) {
  auto j = json::parse(slurp(fs::path(LEVYQ_SOURCE_DIR) / "configs/codec_check.json"));
  j["sample_count"] = 200000;
  j["schedule"] = {{"points", {{1, 64}}}};
  j["output_dir"] = scratch("codec").string();
  const auto res = run_codec_check(config_from_json(j));
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_TRUE(res.rows[0].roundtrip);
  EXPECT_TRUE(res.manifest.all_required_passed()) << res.csv;

  j["model"] = {{"kind", "poisson"}, {"lambda", 2.0}, {"amplitude", {{"kind", "point"}, {"value", 0.0}}}};
  j["required"] = {{{"kind", "roundtrip"}}};
  const auto zero = run_codec_check(config_from_json(j));
  EXPECT_LT(zero.rows[0].rate.per_unit_time_nats, 1e-3);
  EXPECT_TRUE(zero.manifest.all_required_passed());
}
