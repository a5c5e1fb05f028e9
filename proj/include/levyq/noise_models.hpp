// White Levy noise parametrizations: Levy triplets, stable and impulsive
// Poisson laws, classification of the unit-window integral X0, and the
// finite-measure to compound-Poisson reduction.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levyq/rng.hpp"

namespace levyq {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Absolutely continuous shapes
// ---------------------------------------------------------------------------

struct UniformDensity {
  double lo;
  double hi;
};

struct NormalDensity {
  double mean;
  double sd;
};

/// Probability density with closed-form pdf, characteristic function,
/// sampler and differential entropy. Used both as an amplitude law and as
/// the normalized shape of the absolutely continuous part of a Levy measure.
class AcDensity {
 public:
  using Shape = std::variant<UniformDensity, NormalDensity>;

  static AcDensity uniform(double lo, double hi) {
    detail::require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform density needs lo < hi");
    return AcDensity(UniformDensity{lo, hi});
  }

  static AcDensity normal(double mean, double sd) {
    detail::require(std::isfinite(mean) && std::isfinite(sd) && sd > 0.0, "normal density needs sd > 0");
    return AcDensity(NormalDensity{mean, sd});
  }

  const Shape& shape() const noexcept { return shape_; }

  double pdf(double x) const {
    return std::visit(
        [x](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            return (x >= s.lo && x < s.hi) ? 1.0 / (s.hi - s.lo) : 0.0;
          } else {
            return detail::normal_pdf((x - s.mean) / s.sd) / s.sd;
          }
        },
        shape_);
  }

  cplx cf(double omega) const {
    return std::visit(
        [omega](const auto& s) -> cplx {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            const double w = s.hi - s.lo;
            const double half = 0.5 * omega * w;
            // sinc form avoids cancellation near omega = 0
            const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
            return std::polar(sinc, 0.5 * omega * (s.hi + s.lo));
          } else {
            return std::exp(cplx(-0.5 * s.sd * s.sd * omega * omega, omega * s.mean));
          }
        },
        shape_);
  }

  double sample(RngStream& rng) const {
    return std::visit(
        [&rng](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            return s.lo + (s.hi - s.lo) * rng.uniform01();
          } else {
            std::normal_distribution<double> dist(s.mean, s.sd);
            return dist(rng);
          }
        },
        shape_);
  }

  double mean() const {
    return std::visit(
        [](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            return 0.5 * (s.lo + s.hi);
          } else {
            return s.mean;
          }
        },
        shape_);
  }

  /// E[A ; lo < A < hi].
  double truncated_first_moment(double lo, double hi) const {
    return std::visit(
        [lo, hi](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            const double a = std::max(lo, s.lo);
            const double b = std::min(hi, s.hi);
            if (a >= b) return 0.0;
            return (b * b - a * a) / (2.0 * (s.hi - s.lo));
          } else {
            const double za = (lo - s.mean) / s.sd;
            const double zb = (hi - s.mean) / s.sd;
            return s.mean * (detail::normal_cdf(zb) - detail::normal_cdf(za)) +
                   s.sd * (detail::normal_pdf(za) - detail::normal_pdf(zb));
          }
        },
        shape_);
  }

  /// Differential entropy in nats.
  double entropy() const {
    return std::visit(
        [](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            return std::log(s.hi - s.lo);
          } else {
            return 0.5 * std::log(2.0 * kPi * std::numbers::e * s.sd * s.sd);
          }
        },
        shape_);
  }

  double ess_sup() const {
    return std::visit(
        [](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            return 1.0 / (s.hi - s.lo);
          } else {
            return 1.0 / (s.sd * std::sqrt(2.0 * kPi));
          }
        },
        shape_);
  }

  /// E|A|^theta. Closed form for the uniform; composite Simpson over
  /// mean +- 14 sd for the normal.
  double abs_moment(double theta) const {
    detail::require(theta > 0.0, "abs_moment needs theta > 0");
    return std::visit(
        [theta](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            auto prim = [theta](double x) {
              return std::copysign(std::pow(std::abs(x), theta + 1.0) / (theta + 1.0), x);
            };
            return (prim(s.hi) - prim(s.lo)) / (s.hi - s.lo);
          } else {
            const int steps = 20000;
            const double a = s.mean - 14.0 * s.sd;
            const double h = 28.0 * s.sd / steps;
            double acc = 0.0;
            for (int i = 0; i <= steps; ++i) {
              const double x = a + h * i;
              const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
              acc += w * std::pow(std::abs(x), theta) * detail::normal_pdf((x - s.mean) / s.sd) / s.sd;
            }
            return acc * h / 3.0;
          }
        },
        shape_);
  }

  /// Interval holding all but ~1e-12 of the mass.
  std::pair<double, double> support_window() const {
    return std::visit(
        [](const auto& s) -> std::pair<double, double> {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformDensity>) {
            return {s.lo, s.hi};
          } else {
            return {s.mean - 7.5 * s.sd, s.mean + 7.5 * s.sd};
          }
        },
        shape_);
  }

  friend bool operator==(const AcDensity& a, const AcDensity& b) {
    if (a.shape_.index() != b.shape_.index()) return false;
    if (const auto* u = std::get_if<UniformDensity>(&a.shape_)) {
      const auto& v = std::get<UniformDensity>(b.shape_);
      return u->lo == v.lo && u->hi == v.hi;
    }
    const auto& u = std::get<NormalDensity>(a.shape_);
    const auto& v = std::get<NormalDensity>(b.shape_);
    return u.mean == v.mean && u.sd == v.sd;
  }

 private:
  explicit AcDensity(Shape s) : shape_(s) {}
  Shape shape_;
};

// ---------------------------------------------------------------------------
// Levy measure and triplet
// ---------------------------------------------------------------------------

struct LevyAtom {
  double location;
  double mass;
};

struct AcMeasurePart {
  AcDensity shape;  // normalized density of V_ac / total_mass
  double mass;
};

/// Tag for a continuous-singular Levy component. Any attempt to attach one is
/// rejected: such measures have no workable asymptotics here.
struct SingularPart {};

/// Finite Levy measure V = V_d + V_ac (V_cs is not representable).
class LevyMeasure {
 public:
  LevyMeasure() = default;

  explicit LevyMeasure(std::vector<LevyAtom> atoms, std::optional<AcMeasurePart> ac = std::nullopt)
      : atoms_(std::move(atoms)), ac_(std::move(ac)) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const auto& a = atoms_[i];
      detail::require(std::isfinite(a.location) && a.location != 0.0, "Levy atom location must be finite and nonzero");
      detail::require(std::isfinite(a.mass) && a.mass > 0.0, "Levy atom mass must be finite and positive");
      for (std::size_t j = 0; j < i; ++j) {
        detail::require(atoms_[j].location != a.location, "Levy atom locations must be distinct");
      }
    }
    if (ac_) {
      detail::require(std::isfinite(ac_->mass) && ac_->mass >= 0.0, "AC mass must be finite and >= 0");
      if (ac_->mass == 0.0) ac_.reset();
    }
  }

  LevyMeasure(std::vector<LevyAtom>, std::optional<AcMeasurePart>, SingularPart) {
    throw std::invalid_argument("continuous-singular Levy measures are not supported");
  }

  const std::vector<LevyAtom>& atoms() const noexcept { return atoms_; }
  const std::optional<AcMeasurePart>& ac() const noexcept { return ac_; }

  double discrete_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass;
    return s;
  }
  double ac_mass() const { return ac_ ? ac_->mass : 0.0; }
  double total_mass() const { return discrete_mass() + ac_mass(); }
  bool empty() const { return atoms_.empty() && !ac_; }

  /// Integral of a dV(a) over the open interval (-1, 1): the small-jump
  /// compensator of the Levy-Khintchine formula.
  double compensator_integral() const {
    double s = 0.0;
    for (const auto& a : atoms_) {
      if (std::abs(a.location) < 1.0) s += a.location * a.mass;
    }
    if (ac_) s += ac_->mass * ac_->shape.truncated_first_moment(-1.0, 1.0);
    return s;
  }

 private:
  std::vector<LevyAtom> atoms_;
  std::optional<AcMeasurePart> ac_;
};

/// (mu, sigma, V) with exponent -sigma^2 w^2 / 2 + j mu w + Int (e^{jwa} - 1 - jwa 1_{|a|<1}) dV(a).
struct LevyTriplet {
  double mu = 0.0;
  double sigma = 0.0;
  LevyMeasure measure;

  LevyTriplet() = default;
  LevyTriplet(double mu_, double sigma_, LevyMeasure measure_) : mu(mu_), sigma(sigma_), measure(std::move(measure_)) {
    detail::require(std::isfinite(mu) && std::isfinite(sigma) && sigma >= 0.0, "triplet needs finite mu and sigma >= 0");
  }
};

// ---------------------------------------------------------------------------
// Model parameter sets
// ---------------------------------------------------------------------------

/// Stable law S(alpha, beta, sigma, mu); at alpha = 2, beta is canonicalized to 0.
struct StableParams {
  double alpha;
  double beta;
  double sigma;
  double mu;

  StableParams(double alpha_, double beta_, double sigma_, double mu_)
      : alpha(alpha_), beta(beta_), sigma(sigma_), mu(mu_) {
    detail::require(alpha > 0.0 && alpha <= 2.0, "stable alpha must lie in (0, 2]");
    detail::require(beta >= -1.0 && beta <= 1.0, "stable beta must lie in [-1, 1]");
    detail::require(std::isfinite(sigma) && sigma > 0.0, "stable sigma must be > 0");
    detail::require(std::isfinite(mu), "stable mu must be finite");
    if (alpha == 2.0) beta = 0.0;
  }

  friend bool operator==(const StableParams&, const StableParams&) = default;
};

struct ACClassParams {
  double alpha;
  double ell;
  double v;

  ACClassParams(double alpha_, double ell_, double v_) : alpha(alpha_), ell(ell_), v(v_) {
    detail::require(std::isfinite(alpha) && alpha > 0.0, "AC class alpha must be positive and finite");
    detail::require(std::isfinite(ell) && ell > 0.0, "AC class ell must be positive and finite");
    detail::require(std::isfinite(v) && v > 0.0, "AC class v must be positive and finite");
  }

  friend bool operator==(const ACClassParams&, const ACClassParams&) = default;
};

struct Atom {
  double location;
  double weight;
};

/// Amplitude law of an impulsive Poisson noise: a mixture of atoms (total
/// weight w_d) and an optional absolutely continuous density (weight 1 - w_d).
/// The density handle and the sampler are separate: a law built from a bare
/// sampler can be simulated but has no density or characteristic function.
class AmplitudeLaw {
 public:
  using Sampler = std::function<double(RngStream&)>;

  static AmplitudeLaw point(double value) { return AmplitudeLaw({Atom{value, 1.0}}, std::nullopt); }
  static AmplitudeLaw continuous(AcDensity d) { return AmplitudeLaw({}, std::move(d)); }
  static AmplitudeLaw uniform(double lo, double hi) { return continuous(AcDensity::uniform(lo, hi)); }
  static AmplitudeLaw normal(double mean, double sd) { return continuous(AcDensity::normal(mean, sd)); }

  /// Atoms carry probabilities; if `density` is set it takes the remaining weight.
  static AmplitudeLaw mixture(std::vector<Atom> atoms, std::optional<AcDensity> density) {
    return AmplitudeLaw(std::move(atoms), std::move(density));
  }

  static AmplitudeLaw from_sampler(Sampler s) {
    detail::require(static_cast<bool>(s), "sampler must be callable");
    AmplitudeLaw law;
    law.sampler_ = std::move(s);
    return law;
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::optional<AcDensity>& density() const noexcept { return density_; }
  bool has_custom_sampler() const noexcept { return static_cast<bool>(sampler_); }
  bool has_cf() const noexcept { return !sampler_; }

  double discrete_weight() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
  }
  double continuous_weight() const { return density_ ? 1.0 - discrete_weight() : 0.0; }

  /// Probability that A is exactly zero (a null jump).
  double zero_weight() const {
    double s = 0.0;
    for (const auto& a : atoms_) {
      if (a.location == 0.0) s += a.weight;
    }
    return s;
  }

  double sample(RngStream& rng) const {
    if (sampler_) return sampler_(rng);
    if (atoms_.empty()) return density_->sample(rng);
    if (atoms_.size() == 1 && !density_) return atoms_.front().location;
    double u = rng.uniform01();
    for (const auto& a : atoms_) {
      if (u < a.weight) return a.location;
      u -= a.weight;
    }
    if (density_) return density_->sample(rng);
    return atoms_.back().location;
  }

  cplx cf(double omega) const {
    if (sampler_) throw std::logic_error("amplitude characteristic function unavailable for a sampler-only law");
    cplx s = 0.0;
    for (const auto& a : atoms_) s += a.weight * std::polar(1.0, omega * a.location);
    if (density_) s += continuous_weight() * density_->cf(omega);
    return s;
  }

  double mean() const {
    if (sampler_) throw std::logic_error("amplitude mean unavailable for a sampler-only law");
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * a.location;
    if (density_) s += continuous_weight() * density_->mean();
    return s;
  }

  double abs_moment(double theta) const {
    if (sampler_) throw std::logic_error("amplitude moments unavailable for a sampler-only law");
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * std::pow(std::abs(a.location), theta);
    if (density_) s += continuous_weight() * density_->abs_moment(theta);
    return s;
  }

 private:
  AmplitudeLaw() = default;
  AmplitudeLaw(std::vector<Atom> atoms, std::optional<AcDensity> density)
      : atoms_(std::move(atoms)), density_(std::move(density)) {
    double w = 0.0;
    for (const auto& a : atoms_) {
      detail::require(std::isfinite(a.location), "amplitude atom must be finite");
      detail::require(std::isfinite(a.weight) && a.weight > 0.0, "amplitude atom weight must be positive");
      w += a.weight;
    }
    if (density_) {
      detail::require(w < 1.0 + 1e-12, "atom weights exceed 1");
    } else {
      detail::require(std::abs(w - 1.0) < 1e-12, "atom weights must sum to 1 without a density");
    }
  }

  std::vector<Atom> atoms_;
  std::optional<AcDensity> density_;
  Sampler sampler_;
};

struct ThetaMoment {
  double theta;
  double value;  // E|A|^theta
};

struct PoissonParams {
  double lambda;
  AmplitudeLaw amplitude;
  std::optional<ThetaMoment> theta_moment;
  std::optional<ACClassParams> ac_class;  // set when the amplitude density is certified (alpha, ell, v)-AC

  PoissonParams(double lambda_, AmplitudeLaw amplitude_, std::optional<ThetaMoment> theta = std::nullopt,
                std::optional<ACClassParams> cls = std::nullopt)
      : lambda(lambda_), amplitude(std::move(amplitude_)), theta_moment(theta), ac_class(cls) {
    detail::require(std::isfinite(lambda) && lambda > 0.0, "Poisson rate must be positive and finite");
  }

  /// Rate of nonzero jumps.
  double effective_rate() const { return lambda * (1.0 - amplitude.zero_weight()); }

  /// Fraction of nonzero jump mass carried by atoms (the alpha of the
  /// discrete-continuous kappa(n)).
  double discrete_fraction() const {
    const double nz = 1.0 - amplitude.zero_weight();
    if (nz <= 0.0) return 1.0;
    return (amplitude.discrete_weight() - amplitude.zero_weight()) / nz;
  }
};

/// Gaussian white noise in the Levy-Khintchine convention
/// f(w) = -sigma^2 w^2 / 2 + j mu w, i.e. variance sigma^2 per unit time.
/// Not the same parametrization as StableParams{2, 0, s, mu}, whose variance is 2 s^2.
struct GaussianParams {
  double sigma;
  double mu = 0.0;

  GaussianParams(double sigma_, double mu_ = 0.0) : sigma(sigma_), mu(mu_) {
    detail::require(std::isfinite(sigma) && sigma > 0.0, "Gaussian sigma must be > 0");
    detail::require(std::isfinite(mu), "Gaussian mu must be finite");
  }
};

/// Independent stable plus impulsive Poisson noise.
struct SumParams {
  StableParams stable;
  PoissonParams poisson;
};

using ModelSpec = std::variant<StableParams, PoissonParams, GaussianParams, SumParams>;

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class X0Classification { Discrete, Continuous, DiscreteContinuous, Undetermined };

inline const char* to_string(X0Classification c) {
  switch (c) {
    case X0Classification::Discrete: return "discrete";
    case X0Classification::Continuous: return "continuous";
    case X0Classification::DiscreteContinuous: return "discrete-continuous";
    case X0Classification::Undetermined: return "undetermined";
  }
  return "?";
}

/// Type of X0 for a finite-measure triplet. sigma > 0 is the only continuity
/// criterion reachable with a finite V; with sigma = 0 the law is discrete iff
/// V is purely atomic and discrete-continuous iff V_ac is nonzero.
inline X0Classification classify_x0(const LevyTriplet& t) {
  if (t.sigma > 0.0) return X0Classification::Continuous;
  if (t.measure.ac_mass() > 0.0) return X0Classification::DiscreteContinuous;
  if (std::isfinite(t.measure.total_mass())) return X0Classification::Discrete;
  return X0Classification::Undetermined;
}

inline X0Classification classify(const PoissonParams& p) {
  if (p.amplitude.has_custom_sampler()) return X0Classification::Undetermined;
  if (p.amplitude.density() && p.amplitude.continuous_weight() > 0.0) return X0Classification::DiscreteContinuous;
  return X0Classification::Discrete;
}

inline X0Classification classify(const ModelSpec& model) {
  return std::visit(
      [](const auto& p) -> X0Classification {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, PoissonParams>) {
          return classify(p);
        } else {
          return X0Classification::Continuous;
        }
      },
      model);
}

/// True for a model whose increments are identically zero.
inline bool is_degenerate(const ModelSpec& model) {
  const auto* p = std::get_if<PoissonParams>(&model);
  return p && !p->amplitude.has_custom_sampler() && p->amplitude.zero_weight() >= 1.0 - 1e-15;
}

// ---------------------------------------------------------------------------
// Levy exponents
// ---------------------------------------------------------------------------

inline cplx stable_exponent(const StableParams& p, double omega) {
  if (omega == 0.0) return 0.0;
  const double aw = std::abs(omega);
  const double sgn = omega > 0.0 ? 1.0 : -1.0;
  const double phi = (p.alpha == 1.0) ? -(2.0 / kPi) * std::log(aw) : std::tan(kPi * p.alpha / 2.0);
  const double scale = std::pow(p.sigma * aw, p.alpha);
  const cplx body = cplx(1.0, -p.beta * sgn * phi);
  return cplx(0.0, omega * p.mu) - scale * body;
}

inline cplx poisson_exponent(const PoissonParams& p, double omega) {
  return p.lambda * (p.amplitude.cf(omega) - 1.0);
}

inline cplx gaussian_exponent(const GaussianParams& p, double omega) {
  return cplx(-0.5 * p.sigma * p.sigma * omega * omega, p.mu * omega);
}

inline cplx levy_exponent(const LevyTriplet& t, double omega) {
  cplx f(-0.5 * t.sigma * t.sigma * omega * omega, t.mu * omega);
  for (const auto& a : t.measure.atoms()) {
    const double small = std::abs(a.location) < 1.0 ? a.location : 0.0;
    f += a.mass * (std::polar(1.0, omega * a.location) - 1.0 - cplx(0.0, omega * small));
  }
  if (const auto& ac = t.measure.ac()) {
    const double comp = ac->shape.truncated_first_moment(-1.0, 1.0);
    f += ac->mass * (ac->shape.cf(omega) - 1.0 - cplx(0.0, omega * comp));
  }
  return f;
}

/// Levy exponent of the unit-window integral X0 for any model.
inline cplx model_exponent(const ModelSpec& model, double omega) {
  return std::visit(
      [omega](const auto& p) -> cplx {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, StableParams>) {
          return stable_exponent(p, omega);
        } else if constexpr (std::is_same_v<P, PoissonParams>) {
          return poisson_exponent(p, omega);
        } else if constexpr (std::is_same_v<P, GaussianParams>) {
          return gaussian_exponent(p, omega);
        } else {
          return stable_exponent(p.stable, omega) + poisson_exponent(p.poisson, omega);
        }
      },
      model);
}

// ---------------------------------------------------------------------------
// Finite measures as compound Poisson
// ---------------------------------------------------------------------------

struct FiniteDecomposition {
  PoissonParams poisson;
  double drift;  // mu'
};

/// Writes a sigma = 0 finite-measure noise as Y(t) + mu' with Y impulsive
/// Poisson of rate lambda = V(R \ {0}) and amplitude law V / lambda.
inline FiniteDecomposition decompose_finite(const LevyTriplet& t) {
  detail::require(t.sigma == 0.0, "decompose_finite needs sigma = 0");
  const double lambda = t.measure.total_mass();
  detail::require(lambda > 0.0 && std::isfinite(lambda), "decompose_finite needs a finite nonzero measure");

  std::vector<Atom> atoms;
  atoms.reserve(t.measure.atoms().size());
  for (const auto& a : t.measure.atoms()) atoms.push_back({a.location, a.mass / lambda});
  std::optional<AcDensity> density;
  if (const auto& ac = t.measure.ac()) density = ac->shape;

  auto law = (atoms.size() == 1 && !density) ? AmplitudeLaw::point(atoms.front().location)
                                             : AmplitudeLaw::mixture(std::move(atoms), std::move(density));
  return {PoissonParams(lambda, std::move(law)), t.mu - t.measure.compensator_integral()};
}

/// Pr{A is discrete} for the amplitude law V / V(R \ {0}).
inline double discrete_fraction(const LevyMeasure& m) {
  const double total = m.total_mass();
  detail::require(total > 0.0 && std::isfinite(total), "discrete_fraction needs a finite nonzero measure");
  return m.discrete_mass() / total;
}

/// Triplet of an impulsive Poisson noise (sigma = 0, V = lambda F_A on R \ {0}).
inline LevyTriplet to_triplet(const PoissonParams& p) {
  if (p.amplitude.has_custom_sampler()) throw std::logic_error("sampler-only amplitude has no Levy measure");
  std::vector<LevyAtom> atoms;
  for (const auto& a : p.amplitude.atoms()) {
    if (a.location != 0.0) atoms.push_back({a.location, p.lambda * a.weight});
  }
  std::optional<AcMeasurePart> ac;
  if (const auto& d = p.amplitude.density()) ac = AcMeasurePart{*d, p.lambda * p.amplitude.continuous_weight()};
  LevyMeasure m(std::move(atoms), std::move(ac));
  const double mu = m.compensator_integral();
  return LevyTriplet(mu, 0.0, std::move(m));
}

inline LevyTriplet to_triplet(const GaussianParams& g) { return LevyTriplet(g.mu, g.sigma, LevyMeasure{}); }

}  // namespace levyq
