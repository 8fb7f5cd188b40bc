#ifndef FOPT_DISTRIBUTIONS_HPP
#define FOPT_DISTRIBUTIONS_HPP

#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "fopt/rng.hpp"
#include "fopt/special.hpp"

namespace fopt {

// ---------------------------------------------------------------------------
// Node-count laws (support starts at 1: every strike fells at least one node,
// so the PGF vanishes at 0).
// ---------------------------------------------------------------------------

// P{n = s} = p[s-1], s = 1..R.
struct FiniteDiscrete {
  std::vector<double> p;
};

// P{n = k} = a b^{k-1} on {1, 2, ...}, b = 1 - a.
struct GeometricNodes {
  double a;
};

using NodeCountLaw = std::variant<FiniteDiscrete, GeometricNodes>;

inline void validate(const NodeCountLaw& law) {
  if (const auto* fd = std::get_if<FiniteDiscrete>(&law)) {
    if (fd->p.empty()) throw std::invalid_argument("node law: empty p vector");
    double sum = 0.0;
    for (double pi : fd->p) {
      if (pi < 0.0) throw std::invalid_argument("node law: negative probability");
      sum += pi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("node law: probabilities must sum to 1");
  } else {
    double a = std::get<GeometricNodes>(law).a;
    if (a <= 0.0 || a > 1.0)
      throw std::invalid_argument("node law: a must be in (0, 1]");
  }
}

// g(z).  strict=true enforces the PGF domain |z| <= 1; internal callers
// evaluating the meromorphic continuation pass strict=false.
inline cd pgf_eval(const NodeCountLaw& law, cd z, bool strict = true) {
  if (strict && std::abs(z) > 1.0 + 1e-12)
    throw std::domain_error("pgf_eval: |z| > 1");
  if (const auto* fd = std::get_if<FiniteDiscrete>(&law)) {
    // Horner over p_R..p_1, then one factor of z since support starts at 1.
    cd acc = 0.0;
    for (auto it = fd->p.rbegin(); it != fd->p.rend(); ++it) acc = acc * z + *it;
    return acc * z;
  }
  const auto& g = std::get<GeometricNodes>(law);
  double b = 1.0 - g.a;
  cd denom = 1.0 - b * z;
  if (std::abs(denom) < 1e-14)
    throw std::domain_error("pgf_eval: geometric PGF pole at 1 - bz = 0");
  return g.a * z / denom;
}

// Power-series coefficients g_1..g_K of the PGF; exact through order K.
inline std::vector<double> pgf_coefficients(const NodeCountLaw& law, int max_order) {
  std::vector<double> c(max_order + 1, 0.0);
  if (const auto* fd = std::get_if<FiniteDiscrete>(&law)) {
    for (std::size_t s = 0; s < fd->p.size(); ++s)
      if (static_cast<int>(s) + 1 <= max_order) c[s + 1] = fd->p[s];
  } else {
    const auto& g = std::get<GeometricNodes>(law);
    double b = 1.0 - g.a;
    double w = g.a;
    for (int s = 1; s <= max_order; ++s) {
      c[s] = w;
      w *= b;
    }
  }
  return c;
}

inline double node_mean(const NodeCountLaw& law) {
  if (const auto* fd = std::get_if<FiniteDiscrete>(&law)) {
    double m = 0.0;
    for (std::size_t s = 0; s < fd->p.size(); ++s) m += (s + 1.0) * fd->p[s];
    return m;
  }
  return 1.0 / std::get<GeometricNodes>(law).a;
}

inline long long sample(const NodeCountLaw& law, RngStream& rng) {
  if (const auto* fd = std::get_if<FiniteDiscrete>(&law)) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t s = 0; s < fd->p.size(); ++s) {
      acc += fd->p[s];
      if (u <= acc) return static_cast<long long>(s) + 1;
    }
    return static_cast<long long>(fd->p.size());
  }
  return rng.geometric1(std::get<GeometricNodes>(law).a);
}

// ---------------------------------------------------------------------------
// Per-node weight laws.
// ---------------------------------------------------------------------------

struct GammaWeight {
  double shape;  // alpha_w
  double rate;   // xi
};

struct ExponentialWeight {
  double rate;  // xi
};

using WeightLaw = std::variant<GammaWeight, ExponentialWeight>;

inline void validate(const WeightLaw& law) {
  if (const auto* g = std::get_if<GammaWeight>(&law)) {
    if (g->shape <= 0.0 || g->rate <= 0.0)
      throw std::invalid_argument("weight law: shape and rate must be positive");
  } else if (std::get<ExponentialWeight>(law).rate <= 0.0) {
    throw std::invalid_argument("weight law: rate must be positive");
  }
}

inline double weight_rate(const WeightLaw& law) {
  if (const auto* g = std::get_if<GammaWeight>(&law)) return g->rate;
  return std::get<ExponentialWeight>(law).rate;
}

inline double weight_shape(const WeightLaw& law) {
  if (const auto* g = std::get_if<GammaWeight>(&law)) return g->shape;
  return 1.0;
}

// l(s) = (xi / (s + xi))^shape.
inline cd lst_eval(const WeightLaw& law, cd s, bool strict = true) {
  if (strict && s.real() < -1e-12)
    throw std::domain_error("lst_eval: Re(s) < 0");
  double xi = weight_rate(law);
  double shape = weight_shape(law);
  cd denom = s + xi;
  if (std::abs(denom) < 1e-14)
    throw std::domain_error("lst_eval: pole at s = -rate");
  cd base = xi / denom;
  return (shape == 1.0) ? base : std::pow(base, shape);
}

inline double weight_mean(const WeightLaw& law) {
  return weight_shape(law) / weight_rate(law);
}

inline double sample(const WeightLaw& law, RngStream& rng) {
  if (const auto* g = std::get_if<GammaWeight>(&law))
    return rng.gamma(g->shape, g->rate);
  return rng.exponential(std::get<ExponentialWeight>(law).rate);
}

// ---------------------------------------------------------------------------
// Observation / initial-delay laws.
// ---------------------------------------------------------------------------

struct ConstantObs {
  double c;
};

struct ExponentialObs {
  double rate;  // mu_obs
};

struct ZeroDelay {};

using ObservationLaw = std::variant<ConstantObs, ExponentialObs>;
using DelayLaw = std::variant<ZeroDelay, ConstantObs, ExponentialObs>;

inline void validate(const ObservationLaw& law) {
  if (const auto* c = std::get_if<ConstantObs>(&law)) {
    if (c->c <= 0.0) throw std::invalid_argument("observation law: c must be > 0");
  } else if (std::get<ExponentialObs>(law).rate <= 0.0) {
    throw std::invalid_argument("observation law: rate must be > 0");
  }
}

inline void validate(const DelayLaw& law) {
  if (const auto* c = std::get_if<ConstantObs>(&law)) {
    if (c->c <= 0.0) throw std::invalid_argument("delay law: c must be > 0");
  } else if (const auto* e = std::get_if<ExponentialObs>(&law)) {
    if (e->rate <= 0.0) throw std::invalid_argument("delay law: rate must be > 0");
  }
}

inline cd lst_eval(const ObservationLaw& law, cd s, bool strict = true) {
  if (strict && s.real() < -1e-12)
    throw std::domain_error("lst_eval: Re(s) < 0");
  if (const auto* c = std::get_if<ConstantObs>(&law)) return std::exp(-s * c->c);
  double mu = std::get<ExponentialObs>(law).rate;
  cd denom = mu + s;
  if (std::abs(denom) < 1e-14)
    throw std::domain_error("lst_eval: pole at s = -rate");
  return mu / denom;
}

inline cd lst_eval(const DelayLaw& law, cd s, bool strict = true) {
  if (std::holds_alternative<ZeroDelay>(law)) return cd(1.0);
  if (const auto* c = std::get_if<ConstantObs>(&law))
    return lst_eval(ObservationLaw(*c), s, strict);
  return lst_eval(ObservationLaw(std::get<ExponentialObs>(law)), s, strict);
}

// n-th LST derivative divided by n!, at s0.  These are the composition
// coefficients the truncated-series machinery needs.
inline cd lst_taylor_coeff(const ObservationLaw& law, int n, cd s0) {
  if (const auto* c = std::get_if<ConstantObs>(&law)) {
    cd val = std::exp(-s0 * c->c);
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    return val * std::pow(cd(-c->c), n) / fact;
  }
  double mu = std::get<ExponentialObs>(law).rate;
  cd denom = mu + s0;
  if (std::abs(denom) < 1e-14)
    throw std::domain_error("lst_taylor_coeff: pole at s = -rate");
  double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * mu / std::pow(denom, n + 1);
}

inline cd lst_taylor_coeff(const DelayLaw& law, int n, cd s0) {
  if (std::holds_alternative<ZeroDelay>(law)) return n == 0 ? cd(1.0) : cd(0.0);
  if (const auto* c = std::get_if<ConstantObs>(&law))
    return lst_taylor_coeff(ObservationLaw(*c), n, s0);
  return lst_taylor_coeff(ObservationLaw(std::get<ExponentialObs>(law)), n, s0);
}

inline double obs_mean(const ObservationLaw& law) {
  if (const auto* c = std::get_if<ConstantObs>(&law)) return c->c;
  return 1.0 / std::get<ExponentialObs>(law).rate;
}

inline double sample(const ObservationLaw& law, RngStream& rng) {
  if (const auto* c = std::get_if<ConstantObs>(&law)) return c->c;
  return rng.exponential(std::get<ExponentialObs>(law).rate);
}

inline double sample(const DelayLaw& law, RngStream& rng) {
  if (std::holds_alternative<ZeroDelay>(law)) return 0.0;
  if (const auto* c = std::get_if<ConstantObs>(&law)) return c->c;
  return rng.exponential(std::get<ExponentialObs>(law).rate);
}

}  // namespace fopt

#endif  // FOPT_DISTRIBUTIONS_HPP
