#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "levyq/levyq.hpp"
#include "oracles.hpp"

using namespace levyq;

namespace {

double value_at_zero(const DensityGrid& g) {
  const double u = -g.x0() / g.dx();
  EXPECT_NEAR(u, std::round(u), 1e-9);
  return g[static_cast<std::size_t>(std::llround(u))];
}

InvertedDensity invert_stable(double alpha, double half_width, std::size_t points) {
  const StableParams p(alpha, 0.0, 1.0, 0.0);
  return cf_to_density([&](double w) { return std::exp(stable_exponent(p, w)); }, -half_width, half_width, points);
}

}  // namespace

TEST(CfInversion, GaussianAtZero) {
  const auto inv = cf_to_density([](double w) { return cplx(std::exp(-0.5 * w * w)); }, -12.0, 12.0, 4097);
  EXPECT_NEAR(value_at_zero(inv.grid), 1.0 / std::sqrt(2.0 * oracle::kPi), 1e-6);
  EXPECT_LT(inv.clamped_mass, 1e-9);
  for (std::size_t i = 0; i < inv.grid.size(); i += 97) {
    EXPECT_NEAR(inv.grid[i], detail::normal_pdf(inv.grid.x(i)), 1e-9);
  }
}

TEST(CfInversion, CauchyAtZero) {
  const auto inv = invert_stable(1.0, 20000.0, (1u << 20) + 1);
  EXPECT_NEAR(value_at_zero(inv.grid), 1.0 / oracle::kPi, 1e-5);
  for (std::size_t i = inv.grid.size() / 2 - 200; i < inv.grid.size() / 2 + 200; i += 7) {
    const double x = inv.grid.x(i);
    EXPECT_NEAR(inv.grid[i], 1.0 / (oracle::kPi * (1.0 + x * x)), 1e-5);
  }
  EXPECT_NEAR(inv.grid.tail_mass(), 2.0 / (oracle::kPi * 20000.0), 2e-6);
}

TEST(CfInversion, StableOneAndAHalfAtZero) {
  const auto inv = invert_stable(1.5, 2000.0, (1u << 17) + 1);
  EXPECT_NEAR(value_at_zero(inv.grid), oracle::stable_density_at_zero(1.5), 1e-4);
  EXPECT_NEAR(oracle::stable_density_at_zero(1.5), oracle::kStable15AtZero, 1e-12);
}

TEST(CfInversion, FailuresAreSignalled) {
  // Cauchy on a narrow window leaves ~6% of the mass outside
  EXPECT_THROW(invert_stable(1.0, 10.0, 4097), DensityError);
  // exp(-w^4) is not positive definite: its inverse transform has negative lobes
  EXPECT_THROW(cf_to_density([](double w) { return cplx(std::exp(-std::pow(w, 4.0))); }, -10.0, 10.0, 4097),
               DensityError);
  EXPECT_THROW(cf_to_density([](double) { return cplx(1.0); }, 1.0, -1.0, 4097), std::invalid_argument);
}

TEST(DensityGrid, Invariants) {
  EXPECT_THROW(DensityGrid(0.0, 0.1, {1.0, 1.0}), std::invalid_argument);  // mass 0.1
  EXPECT_THROW(DensityGrid(0.0, 1.0, {1.0, -0.0001, 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(DensityGrid(0.0, 1.0, {0.5, 0.5}, 0.5));
  const auto g = DensityGrid::normalized(0.0, 0.5, {1.0, 2.0, 3.0}, 0.25);
  EXPECT_NEAR(g.trapezoid_mass() + g.tail_mass(), 1.0, 1e-15);
}

TEST(DifferentialEntropy, Examples) {
  EXPECT_NEAR(differential_entropy(tabulate_density(AcDensity::uniform(0.0, 1.0), 1e-4)), 0.0, 1e-3);
  const auto n = cf_to_density([](double w) { return cplx(std::exp(-0.5 * w * w)); }, -12.0, 12.0, 8193);
  EXPECT_NEAR(differential_entropy(n.grid), oracle::kHalfLog2PiE, 1e-4);
  const double hc = stable_entropy_uncached(StableParams(1.0, 0.0, 1.0, 0.0));
  EXPECT_NEAR(hc, oracle::kLog4Pi, 1e-3);
  EXPECT_NEAR(hc, oracle::cauchy_entropy_quadrature(1.0), 1e-3);
  EXPECT_NEAR(oracle::cauchy_entropy_quadrature(1.0), oracle::kLog4Pi, 1e-6);
}

TEST(DifferentialEntropy, ScaleShift) {
  // h(sX) = h(X) + log s
  const double h1 = stable_entropy(StableParams(1.5, 0.0, 1.0, 0.0));
  const double h3 = stable_entropy(StableParams(1.5, 0.0, 3.0, 7.0));
  EXPECT_NEAR(h3 - h1, std::log(3.0), 1e-3);
}

TEST(TvDistance, Examples) {
  const auto u = tabulate_density(AcDensity::uniform(0.0, 1.0), 1e-3);
  EXPECT_EQ(tv_distance(u, u), 0.0);
  const auto far = tabulate_density(AcDensity::uniform(5.0, 6.0), 1e-3);
  EXPECT_NEAR(tv_distance(u, far), 2.0, 1e-12);
  const auto half = tabulate_density(AcDensity::uniform(0.5, 1.5), 1e-3);
  EXPECT_NEAR(tv_distance(u, half), 1.0, 2e-3);
  const auto off = DensityGrid::tabulate([](double x) { return x > 0 && x < 1 ? 1.0 : 0.0; }, -0.00037, 1.2, 1001);
  EXPECT_THROW(tv_distance(u, off), std::invalid_argument);
  EXPECT_NEAR(tv_distance(u, off, true), 0.0, 0.01);
}

TEST(CompoundDensity, FirstWeightAtSmallX) {
  // on (0, 1): p_{A_n}(x) = w1 + w2 x + ..., so p(0+) is the k = 1 weight r / (e^r - 1)
  const double dx = 1.0 / 4096;
  const auto pA = tabulate_density(AcDensity::uniform(0.0, 1.0), dx);
  const auto an = compound_density_An(pA, 0.1, 1, poisson_k_max(0.1));
  EXPECT_NEAR(an.grid.at(2 * dx), oracle::kFirstWeightR01, 1e-3);
  EXPECT_NEAR(oracle::kFirstWeightR01, 0.1 / std::expm1(0.1), 1e-15);
  EXPECT_LT(an.truncation_mass, 1e-10);
}

TEST(CompoundDensity, TvBound) {
  const double dx = 1.0 / 2048;
  const auto pA = tabulate_density(AcDensity::uniform(0.0, 1.0), dx);
  double prev = INFINITY;
  for (double r : {0.5, 0.1, 0.01}) {
    const auto an = compound_density_An(pA, r, 1, poisson_k_max(r));
    const double tv = tv_distance(an.grid, pA);
    EXPECT_LE(tv, oracle::compound_tv_bound(r) + 1e-3) << "r=" << r;
    EXPECT_LT(tv, prev);
    prev = tv;
  }
  EXPECT_NEAR(oracle::compound_tv_bound(0.1), 0.0983336110449901, 1e-15);
}

TEST(CompoundDensity, SmallRateApproachesAmplitude) {
  const double dx = 1.0 / 1024;
  const auto pA = tabulate_density(AcDensity::normal(1.0, 0.5), dx);
  const auto an = compound_density_An(pA, 1e-3, 1, poisson_k_max(1e-3));
  double sup = 0.0;
  for (std::size_t i = 0; i < pA.size(); ++i) sup = std::max(sup, std::abs(an.grid.at(pA.x(i)) - pA[i]));
  EXPECT_LT(sup, 1e-3);
}

TEST(CompoundDensity, MatchesIrwinHallCells) {
  // exact cell masses of the compound Poisson law with U(0, 1) jumps, given K >= 1
  const double rate = 1.0, m = 16.0;
  const auto exact = oracle::compound_uniform_cells(rate, m, 20);
  const double atom = std::exp(-rate), cont = 1.0 - atom;
  const auto pA = tabulate_density(AcDensity::uniform(0.0, 1.0), 1.0 / 4096);
  const auto an = compound_density_An(pA, rate, 1, poisson_k_max(rate));
  const auto q = cell_masses(an.grid, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    const double want = (exact[i] - (i == 0 ? atom : 0.0)) / cont;
    worst = std::max(worst, std::abs(q.probability(static_cast<std::int64_t>(i)) - want));
  }
  EXPECT_LT(worst, 2e-4);
}

TEST(CompoundDensity, Errors) {
  const auto pA = tabulate_density(AcDensity::uniform(0.0, 1.0), 0.01);
  EXPECT_THROW(compound_density_An(pA, 1.0, 1, 2), std::invalid_argument);
  const auto shifted = DensityGrid::tabulate([](double x) { return x > 0 && x < 1 ? 1.0 : 0.0; }, -0.005, 1.005, 102);
  EXPECT_THROW(compound_density_An(shifted, 1.0, 1, 20), std::invalid_argument);
}

TEST(Property, BoundedDensityStaysBoundedUnderShifts) {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dx = 1.0 / 256;
  for (int t = 0; t < 20; ++t) {
    // random piecewise density aligned at zero
    std::vector<double> v(512);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u(g) < 0.3 ? 0.0 : u(g) * (1.0 + std::sin(0.05 * i));
    v.front() = v.back() = 0.0;
    const auto p = DensityGrid::normalized(-128 * dx, dx, v);
    const double ell = *std::max_element(p.values().begin(), p.values().end());
    // continuous shift law: the compound mixture of self-convolutions
    const double r = 0.2 + 3.0 * u(g);
    const auto an = compound_density_An(p, r, 1, poisson_k_max(r));
    EXPECT_LE(*std::max_element(an.grid.values().begin(), an.grid.values().end()), ell * (1.0 + 1e-9));
    // discrete shift law: a random atomic mixture
    std::vector<double> mix(v.size() + 2000, 0.0);
    double wsum = 0.0;
    for (int j = 0; j < 5; ++j) {
      const auto s = static_cast<std::size_t>(u(g) * 2000);
      const double w = u(g);
      wsum += w;
      for (std::size_t i = 0; i < v.size(); ++i) mix[i + s] += w * p[i];
    }
    for (double& x : mix) EXPECT_LE(x / wsum, ell * (1.0 + 1e-12));
  }
}

TEST(Property, EntropyContinuityOnAcClass) {
  std::mt19937_64 g(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dx = 1.0 / 512, lo = -8.0;
  for (int t = 0; t < 60; ++t) {
    auto make = [&] {
      const double c = 2 * u(g) - 1, s = 0.3 + u(g), w = u(g), a = 2 * u(g) - 1, b = a + 0.2 + 2 * u(g);
      return DensityGrid::tabulate(
          [=](double x) {
            return (1 - w) * detail::normal_pdf((x - c) / s) / s + w * (x >= a && x < b ? 1.0 / (b - a) : 0.0);
          },
          lo, -lo, static_cast<std::size_t>(-2 * lo / dx) + 1);
    };
    const auto p = make();
    const auto q = make();
    const double ell = std::max(*std::max_element(p.values().begin(), p.values().end()),
                                *std::max_element(q.values().begin(), q.values().end()));
    for (double alpha : {1.0, 2.0}) {
      double vp = 0.0, vq = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        vp += std::pow(std::abs(p.x(i)), alpha) * p[i] * dx;
        vq += std::pow(std::abs(q.x(i)), alpha) * q[i] * dx;
      }
      const ACClassParams cls(alpha, ell, std::max(vp, vq));
      const double d = tv_distance(p, q);
      const double gap = std::abs(differential_entropy(p) - differential_entropy(q));
      EXPECT_LE(gap, entropy_continuity_bound(d, cls)) << "t=" << t << " D=" << d;
    }
  }
}

TEST(Property, QuantizedMomentEnvelopes) {
  // exact cell masses from closed-form cdfs; E|X|^a by quadrature
  struct Law {
    std::function<double(double)> cdf, pdf;
    double lo, hi;
  };
  const double L = 50.0, z = 2.0 * std::atan(L) / oracle::kPi;
  const std::vector<Law> laws = {
      {[](double x) { return std::clamp(x, 0.0, 1.0); }, [](double x) { return x >= 0 && x < 1 ? 1.0 : 0.0; }, 0.0, 1.0},
      {[=](double x) { return (std::atan(std::clamp(x, -L, L)) + std::atan(L)) / (oracle::kPi * z); },
       [=](double x) { return std::abs(x) <= L ? 1.0 / (oracle::kPi * z * (1 + x * x)) : 0.0; }, -L, L},
  };
  for (const auto& law : laws) {
    for (double a : {0.5, 1.0, 2.0}) {
      const double moment = oracle::simpson([&](double x) { return std::pow(std::abs(x), a) * law.pdf(x); }, law.lo,
                                            0.0, 1e-12) +
                            oracle::simpson([&](double x) { return std::pow(std::abs(x), a) * law.pdf(x); }, 0.0,
                                            law.hi, 1e-12);
      for (double m : {4.0, 9.0, 64.0, 1000.0}) {
        std::map<std::int64_t, double> cells;
        for (auto i = quantize_index(law.lo, m); i <= quantize_index(law.hi, m); ++i) {
          const double pm = law.cdf((i + 0.5) / m) - law.cdf((i - 0.5) / m);
          if (pm > 0) cells[i] = pm;
        }
        double s = 0.0;
        for (auto& [k, v] : cells) s += v;
        cells.begin()->second += 1.0 - s;
        const double mq = step_density_from_pmf(cells, m).abs_moment(a);
        const double r = 1.0 / std::sqrt(m);
        const double upper = std::pow(2.0 * r, a) + std::exp(a * r) * moment;
        const double outside = 1.0 - (law.cdf(r) - law.cdf(-r));
        const double lower = outside * std::exp(-2.0 * a * r) * moment;
        EXPECT_LE(mq, upper) << "a=" << a << " m=" << m;
        EXPECT_GE(mq, lower) << "a=" << a << " m=" << m;
      }
    }
  }
}
