#include <gtest/gtest.h>

#include <cmath>

#include "levyq/levyq.hpp"
#include "oracles.hpp"

using namespace levyq;

namespace {

LevyMeasure scaled(const LevyMeasure& m, double f) {
  std::vector<LevyAtom> atoms;
  for (const auto& a : m.atoms()) atoms.push_back({a.location, a.mass * f});
  std::optional<AcMeasurePart> ac;
  if (m.ac()) ac = AcMeasurePart{m.ac()->shape, m.ac()->mass * f};
  return LevyMeasure(std::move(atoms), std::move(ac));
}

}  // namespace

TEST(Classify, GaussianCoefficientIsContinuous) {
  EXPECT_EQ(classify_x0(LevyTriplet(0.0, 1.0, LevyMeasure{})), X0Classification::Continuous);
}

TEST(Classify, UnitAtomIsDiscrete) {
  EXPECT_EQ(classify_x0(LevyTriplet(0.0, 0.0, LevyMeasure({{1.0, 1.0}}))), X0Classification::Discrete);
}

TEST(Classify, AcMeasureIsDiscreteContinuous) {
  LevyMeasure m({}, AcMeasurePart{AcDensity::uniform(0.0, 1.0), 2.0});
  EXPECT_EQ(classify_x0(LevyTriplet(0.0, 0.0, m)), X0Classification::DiscreteContinuous);
}

TEST(Classify, SingularPartRejected) {
  EXPECT_THROW(LevyMeasure({}, std::nullopt, SingularPart{}), std::invalid_argument);
  const json j = {{"mu", 0.0}, {"sigma", 0.0}, {"measure", {{"singular", true}}}};
  EXPECT_THROW(triplet_from_json(j), std::invalid_argument);
}

TEST(Classify, MeasureValidation) {
  EXPECT_THROW(LevyMeasure({{0.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(LevyMeasure({{1.0, -1.0}}), std::invalid_argument);
  EXPECT_THROW(LevyMeasure({{1.0, 1.0}, {1.0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(LevyTriplet(0.0, -1.0, LevyMeasure{}), std::invalid_argument);
}

TEST(Classify, SamplerOnlyAmplitudeIsUndetermined) {
  PoissonParams p(1.0, AmplitudeLaw::from_sampler([](RngStream& r) { return r.uniform01(); }));
  EXPECT_EQ(classify(ModelSpec{p}), X0Classification::Undetermined);
  EXPECT_THROW(poisson_exponent(p, 1.0), std::logic_error);
}

TEST(Classify, InvariantUnderResolutionScaling) {
  const std::vector<LevyTriplet> cases = {
      LevyTriplet(0.3, 1.0, LevyMeasure{}),
      LevyTriplet(0.0, 0.0, LevyMeasure({{1.0, 1.0}, {-2.5, 0.5}})),
      LevyTriplet(1.0, 0.0, LevyMeasure({{0.5, 1.0}}, AcMeasurePart{AcDensity::normal(0.0, 1.0), 3.0})),
      LevyTriplet(0.0, 0.7, LevyMeasure({}, AcMeasurePart{AcDensity::uniform(0.0, 1.0), 2.0})),
  };
  for (const auto& t : cases) {
    for (double n : {2.0, 7.0, 64.0}) {
      LevyTriplet s(t.mu / n, t.sigma / std::sqrt(n), scaled(t.measure, 1.0 / n));
      EXPECT_EQ(classify_x0(s), classify_x0(t));
    }
  }
}

TEST(StableExponent, Examples) {
  const StableParams g(2.0, 0.7, 1.0, 0.0);
  EXPECT_EQ(g.beta, 0.0);
  const auto f1 = stable_exponent(g, 1.0);
  EXPECT_NEAR(f1.real(), -1.0, 1e-15);
  EXPECT_NEAR(f1.imag(), 0.0, 1e-15);

  const StableParams c(1.0, 0.0, 1.0, 0.0);
  const auto f2 = stable_exponent(c, 2.0);
  EXPECT_NEAR(f2.real(), -2.0, 1e-15);
  EXPECT_NEAR(f2.imag(), 0.0, 1e-15);

  for (const auto& p : {g, c, StableParams(1.0, 1.0, 2.0, 3.0), StableParams(0.5, -0.3, 1.0, 1.0)}) {
    EXPECT_EQ(stable_exponent(p, 0.0), cplx(0.0));
  }
}

TEST(StableExponent, HermitianWhenCentred) {
  for (const auto& p : {StableParams(1.5, 0.4, 1.2, 0.0), StableParams(1.0, -0.8, 0.5, 0.0),
                        StableParams(0.7, 1.0, 2.0, 0.0), StableParams(2.0, 0.0, 1.0, 0.0)}) {
    for (double w = 0.05; w < 20.0; w *= 1.7) {
      const auto a = stable_exponent(p, -w);
      const auto b = std::conj(stable_exponent(p, w));
      EXPECT_NEAR(a.real(), b.real(), 1e-12 * std::abs(b));
      EXPECT_NEAR(a.imag(), b.imag(), 1e-12 * std::abs(b) + 1e-15);
    }
  }
}

TEST(StableExponent, ParameterValidation) {
  EXPECT_THROW(StableParams(0.0, 0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(StableParams(2.1, 0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(StableParams(1.0, 1.5, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(StableParams(1.0, 0.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_EQ(StableParams(2.0, 1.0, 1.0, 0.0), StableParams(2.0, -1.0, 1.0, 0.0));
}

TEST(PoissonExponent, Examples) {
  const PoissonParams point(1.0, AmplitudeLaw::point(1.0));
  const auto f = poisson_exponent(point, oracle::kPi);
  EXPECT_NEAR(f.real(), -2.0, 1e-15);
  EXPECT_NEAR(f.imag(), 0.0, 1e-15);

  for (double lambda : {0.1, 1.0, 7.5}) {
    EXPECT_EQ(poisson_exponent(PoissonParams(lambda, AmplitudeLaw::normal(1.0, 2.0)), 0.0), cplx(0.0));
  }

  // series oracle: lambda (E e^{jwA} - 1) = j w lambda E[A] + O(w^2)
  const PoissonParams u(2.0, AmplitudeLaw::uniform(0.0, 1.0));
  const double w = 1e-6;
  const auto g = poisson_exponent(u, w) / w;
  EXPECT_NEAR(g.imag(), 1.0, 1e-9);
  EXPECT_NEAR(g.real(), 0.0, 1e-5);
}

TEST(Decompose, Examples) {
  const auto a = decompose_finite(LevyTriplet(0.0, 0.0, LevyMeasure({{2.0, 1.0}})));
  EXPECT_DOUBLE_EQ(a.poisson.lambda, 1.0);
  ASSERT_EQ(a.poisson.amplitude.atoms().size(), 1u);
  EXPECT_DOUBLE_EQ(a.poisson.amplitude.atoms()[0].location, 2.0);
  EXPECT_DOUBLE_EQ(a.drift, 0.0);

  const auto b = decompose_finite(LevyTriplet(0.0, 0.0, LevyMeasure({{0.5, 1.0}})));
  EXPECT_DOUBLE_EQ(b.poisson.lambda, 1.0);
  EXPECT_DOUBLE_EQ(b.poisson.amplitude.atoms()[0].location, 0.5);
  EXPECT_DOUBLE_EQ(b.drift, -0.5);

  const auto c = decompose_finite(LevyTriplet(1.0, 0.0, LevyMeasure({}, AcMeasurePart{AcDensity::uniform(0, 1), 2.0})));
  EXPECT_DOUBLE_EQ(c.poisson.lambda, 2.0);
  ASSERT_TRUE(c.poisson.amplitude.density());
  EXPECT_EQ(*c.poisson.amplitude.density(), AcDensity::uniform(0.0, 1.0));
  // oracle: Int_0^1 a * 2 da = 1
  EXPECT_NEAR(c.drift, 1.0 - oracle::simpson([](double a) { return 2.0 * a; }, 0.0, 1.0), 1e-12);
}

TEST(Decompose, Rejections) {
  EXPECT_THROW(decompose_finite(LevyTriplet(0.0, 1.0, LevyMeasure({{1.0, 1.0}}))), std::invalid_argument);
  EXPECT_THROW(decompose_finite(LevyTriplet(0.0, 0.0, LevyMeasure{})), std::invalid_argument);
}

// decompose_finite then lambda (A^ - 1) + j w mu' must give back the
// Levy-Khintchine exponent of the triplet; the compensator integral is
// checked against an independent quadrature of the AC part.
TEST(Decompose, ReproducesLevyKhintchineExponent) {
  const std::vector<LevyTriplet> cases = {
      LevyTriplet(0.2, 0.0, LevyMeasure({{0.5, 1.0}, {-3.0, 0.25}})),
      LevyTriplet(-1.0, 0.0, LevyMeasure({{0.9, 2.0}}, AcMeasurePart{AcDensity::normal(0.3, 0.8), 1.5})),
      LevyTriplet(0.0, 0.0, LevyMeasure({}, AcMeasurePart{AcDensity::uniform(-2.0, 0.5), 3.0})),
  };
  for (const auto& t : cases) {
    const auto d = decompose_finite(t);
    for (double w = -12.0; w <= 12.0; w += 0.37) {
      const cplx direct = levy_exponent(t, w);
      const cplx via = poisson_exponent(d.poisson, w) + cplx(0.0, w * d.drift);
      EXPECT_NEAR(direct.real(), via.real(), 1e-10);
      EXPECT_NEAR(direct.imag(), via.imag(), 1e-10);
    }
    double comp = 0.0;
    for (const auto& a : t.measure.atoms()) {
      if (std::abs(a.location) < 1.0) comp += a.location * a.mass;
    }
    if (const auto& ac = t.measure.ac()) {
      const auto& s = ac->shape;
      comp += ac->mass * oracle::simpson([&](double a) { return a * s.pdf(a); }, -1.0, 1.0, 1e-13);
    }
    EXPECT_NEAR(d.drift, t.mu - comp, 1e-9);
  }
}

TEST(DiscreteFraction, Examples) {
  EXPECT_DOUBLE_EQ(discrete_fraction(LevyMeasure({{1.0, 2.0}, {-1.0, 0.5}})), 1.0);
  EXPECT_DOUBLE_EQ(discrete_fraction(LevyMeasure({}, AcMeasurePart{AcDensity::uniform(0, 1), 2.0})), 0.0);
  EXPECT_DOUBLE_EQ(discrete_fraction(LevyMeasure({{1.0, 1.0}}, AcMeasurePart{AcDensity::uniform(0, 1), 3.0})), 0.25);
  EXPECT_THROW(discrete_fraction(LevyMeasure{}), std::invalid_argument);
}

TEST(DiscreteFraction, MatchesAmplitudeAtomWeight) {
  const LevyMeasure m({{1.0, 1.0}, {-2.0, 0.5}}, AcMeasurePart{AcDensity::normal(0, 1), 2.5});
  const auto d = decompose_finite(LevyTriplet(0.0, 0.0, m));
  EXPECT_NEAR(d.poisson.amplitude.discrete_weight(), discrete_fraction(m), 1e-15);
  EXPECT_NEAR(d.poisson.discrete_fraction(), discrete_fraction(m), 1e-15);
}

TEST(ModelJson, RoundTrip) {
  const std::vector<ModelSpec> models = {
      StableParams(1.5, 0.3, 2.0, -1.0),
      GaussianParams(1.0, 0.5),
      PoissonParams(2.0, AmplitudeLaw::uniform(0.0, 1.0), ThetaMoment{1.0, 0.5}, ACClassParams(1.0, 1.0, 0.5)),
      PoissonParams(1.0, AmplitudeLaw::mixture({{0.0, 0.25}, {2.0, 0.25}}, AcDensity::normal(0.0, 1.0))),
      SumParams{StableParams(1.0, 0.0, 1.0, 0.0), PoissonParams(1.0, AmplitudeLaw::point(0.0))},
  };
  for (const auto& m : models) {
    const auto j = to_json(m);
    const auto back = model_from_json(json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(model_hash(back), model_hash(m));
  }
  EXPECT_THROW(model_from_json(json{{"kind", "levy-flight"}}), std::exception);
}
