// JSON encoding of model specifications and Levy triplets.
//
// Every model object carries a "kind" discriminator:
//   {"kind": "stable",   "alpha": a, "beta": b, "sigma": s, "mu": m}
//   {"kind": "gaussian", "sigma": s, "mu": m}
//   {"kind": "poisson",  "lambda": l, "amplitude": <amplitude>,
//                        "theta_moment": {"theta": t, "value": v}?,
//                        "ac_class": {"alpha": a, "ell": l, "v": v}?}
//   {"kind": "sum",      "stable": <stable>, "poisson": <poisson>}
// Amplitudes:
//   {"kind": "point", "value": x}
//   {"kind": "uniform", "lo": a, "hi": b}
//   {"kind": "normal", "mean": m, "sd": s}
//   {"kind": "mixture", "atoms": [{"location": x, "weight": w}, ...], "density": <uniform|normal>?}
// Triplets:
//   {"mu": m, "sigma": s, "measure": {"atoms": [{"location": x, "mass": w}], "ac": {"density": ..., "mass": c}?}}
// A "singular" key inside a measure is rejected.
#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "levyq/noise_models.hpp"

namespace levyq {

using json = nlohmann::json;

inline json to_json(const AcDensity& d) {
  return std::visit(
      [](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UniformDensity>) {
          return {{"kind", "uniform"}, {"lo", s.lo}, {"hi", s.hi}};
        } else {
          return {{"kind", "normal"}, {"mean", s.mean}, {"sd", s.sd}};
        }
      },
      d.shape());
}

inline AcDensity density_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return AcDensity::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "normal") return AcDensity::normal(j.at("mean").get<double>(), j.at("sd").get<double>());
  throw std::invalid_argument("unknown density kind: " + kind);
}

inline json to_json(const AmplitudeLaw& a) {
  if (a.has_custom_sampler()) throw std::logic_error("sampler-only amplitude laws are not serializable");
  if (a.atoms().empty() && a.density()) return to_json(*a.density());
  if (a.atoms().size() == 1 && !a.density()) return {{"kind", "point"}, {"value", a.atoms().front().location}};
  json atoms = json::array();
  for (const auto& at : a.atoms()) atoms.push_back({{"location", at.location}, {"weight", at.weight}});
  json j = {{"kind", "mixture"}, {"atoms", atoms}};
  if (a.density()) j["density"] = to_json(*a.density());
  return j;
}

inline AmplitudeLaw amplitude_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "point") return AmplitudeLaw::point(j.at("value").get<double>());
  if (kind == "uniform" || kind == "normal") return AmplitudeLaw::continuous(density_from_json(j));
  if (kind == "mixture") {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back({a.at("location").get<double>(), a.at("weight").get<double>()});
    std::optional<AcDensity> d;
    if (j.contains("density") && !j.at("density").is_null()) d = density_from_json(j.at("density"));
    return AmplitudeLaw::mixture(std::move(atoms), std::move(d));
  }
  throw std::invalid_argument("unknown amplitude kind: " + kind);
}

inline json to_json(const StableParams& p) {
  return {{"kind", "stable"}, {"alpha", p.alpha}, {"beta", p.beta}, {"sigma", p.sigma}, {"mu", p.mu}};
}

inline json to_json(const GaussianParams& p) { return {{"kind", "gaussian"}, {"sigma", p.sigma}, {"mu", p.mu}}; }

inline json to_json(const PoissonParams& p) {
  json j = {{"kind", "poisson"}, {"lambda", p.lambda}, {"amplitude", to_json(p.amplitude)}};
  if (p.theta_moment) j["theta_moment"] = {{"theta", p.theta_moment->theta}, {"value", p.theta_moment->value}};
  if (p.ac_class) j["ac_class"] = {{"alpha", p.ac_class->alpha}, {"ell", p.ac_class->ell}, {"v", p.ac_class->v}};
  return j;
}

inline json to_json(const SumParams& p) {
  return {{"kind", "sum"}, {"stable", to_json(p.stable)}, {"poisson", to_json(p.poisson)}};
}

inline json to_json(const ModelSpec& m) {
  return std::visit([](const auto& p) { return to_json(p); }, m);
}

inline StableParams stable_from_json(const json& j) {
  return StableParams(j.at("alpha").get<double>(), j.value("beta", 0.0), j.at("sigma").get<double>(),
                      j.value("mu", 0.0));
}

inline PoissonParams poisson_from_json(const json& j) {
  std::optional<ThetaMoment> theta;
  if (j.contains("theta_moment")) {
    const auto& t = j.at("theta_moment");
    theta = ThetaMoment{t.at("theta").get<double>(), t.at("value").get<double>()};
  }
  std::optional<ACClassParams> cls;
  if (j.contains("ac_class")) {
    const auto& c = j.at("ac_class");
    cls = ACClassParams(c.at("alpha").get<double>(), c.at("ell").get<double>(), c.at("v").get<double>());
  }
  return PoissonParams(j.at("lambda").get<double>(), amplitude_from_json(j.at("amplitude")), theta, cls);
}

inline ModelSpec model_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "stable") return stable_from_json(j);
  if (kind == "gaussian") return GaussianParams(j.at("sigma").get<double>(), j.value("mu", 0.0));
  if (kind == "poisson") return poisson_from_json(j);
  if (kind == "sum") return SumParams{stable_from_json(j.at("stable")), poisson_from_json(j.at("poisson"))};
  throw std::invalid_argument("unknown model kind: " + kind);
}

inline json to_json(const LevyTriplet& t) {
  json atoms = json::array();
  for (const auto& a : t.measure.atoms()) atoms.push_back({{"location", a.location}, {"mass", a.mass}});
  json measure = {{"atoms", atoms}};
  if (const auto& ac = t.measure.ac()) measure["ac"] = {{"density", to_json(ac->shape)}, {"mass", ac->mass}};
  return {{"mu", t.mu}, {"sigma", t.sigma}, {"measure", measure}};
}

inline LevyTriplet triplet_from_json(const json& j) {
  std::vector<LevyAtom> atoms;
  std::optional<AcMeasurePart> ac;
  if (j.contains("measure")) {
    const auto& m = j.at("measure");
    if (m.contains("singular")) {
      throw std::invalid_argument("continuous-singular Levy measures are not supported");
    }
    if (m.contains("atoms")) {
      for (const auto& a : m.at("atoms")) atoms.push_back({a.at("location").get<double>(), a.at("mass").get<double>()});
    }
    if (m.contains("ac")) ac = AcMeasurePart{density_from_json(m.at("ac").at("density")), m.at("ac").at("mass").get<double>()};
  }
  return LevyTriplet(j.value("mu", 0.0), j.value("sigma", 0.0), LevyMeasure(std::move(atoms), std::move(ac)));
}

/// FNV-1a over the canonical (key-sorted, compact) JSON text.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string model_hash(const ModelSpec& m) { return hex64(fnv1a64(to_json(m).dump())); }

}  // namespace levyq
