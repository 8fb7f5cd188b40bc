#ifndef FOPT_PROCESS_HPP
#define FOPT_PROCESS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "fopt/distributions.hpp"

namespace fopt {

struct Thresholds {
  long long m1 = 0;  // auxiliary node level
  long long m = 1;   // critical node level
  double v = 1.0;    // critical weight level

  void validate(bool aux_used = true) const {
    if (m < 1) throw std::invalid_argument("thresholds: m must be >= 1");
    if (v <= 0.0) throw std::invalid_argument("thresholds: v must be > 0");
    if (m1 < 0) throw std::invalid_argument("thresholds: m1 must be >= 0");
    if (aux_used && m1 >= m)
      throw std::invalid_argument("thresholds: m1 < m required");
  }
};

struct ProcessParams {
  double lambda = 1.0;
  NodeCountLaw node_law = GeometricNodes{0.5};
  WeightLaw weight_law = ExponentialWeight{1.0};
  ObservationLaw obs_law = ExponentialObs{1.0};
  DelayLaw delay_law = ZeroDelay{};
  Thresholds thresholds;

  void validate(bool aux_used = true) const {
    if (lambda <= 0.0) throw std::invalid_argument("process: lambda must be > 0");
    fopt::validate(node_law);
    fopt::validate(weight_law);
    fopt::validate(obs_law);
    fopt::validate(delay_law);
    thresholds.validate(aux_used);
  }
};

// Argument vector of the twelve-slot functional.  Defaults are neutral:
// PGF-type slots 1, LST-type slots 0, so the untouched functional is E[1].
struct TransformArgs {
  cd u0 = 1.0, u = 1.0, alpha0 = 1.0, alpha = 1.0;
  cd v0 = 0.0, v = 0.0, beta0 = 0.0, beta = 0.0;
  cd theta0 = 0.0, theta = 0.0, h0 = 0.0, h = 0.0;
};

// ---------------------------------------------------------------------------
// Increment functionals.  One observation window accumulates a Poisson
// number of strikes, each felling a batch of weighted nodes, so the joint
// transform of (nodes, weight, elapsed time) per window is
//     gamma(z, v, theta) = L[theta + lambda - lambda g(z l(v))].
// The initial window [0, tau0] uses the delay law's LST instead.
// ---------------------------------------------------------------------------

inline cd gamma_argument(const ProcessParams& p, cd z, cd v, cd theta,
                         bool strict = false) {
  return theta + p.lambda -
         p.lambda * pgf_eval(p.node_law, z * lst_eval(p.weight_law, v, strict),
                             strict);
}

inline cd gamma_increment(const ProcessParams& p, cd z, cd v, cd theta) {
  return lst_eval(p.obs_law, gamma_argument(p, z, v, theta), false);
}

inline cd gamma_initial(const ProcessParams& p, cd z, cd v, cd theta) {
  if (std::holds_alternative<ZeroDelay>(p.delay_law)) return cd(1.0);
  return lst_eval(p.delay_law, gamma_argument(p, z, v, theta), false);
}

// E[z^{N(T)} e^{-v W(T)}] for a window of length t_len.
inline cd marked_poisson_transform(const ProcessParams& p, cd z, cd v,
                                   double t_len) {
  if (t_len < 0.0)
    throw std::domain_error("marked_poisson_transform: t_len must be >= 0");
  if (std::abs(z) > 1.0 + 1e-12)
    throw std::domain_error("marked_poisson_transform: |z| > 1");
  if (v.real() < -1e-12)
    throw std::domain_error("marked_poisson_transform: Re(v) < 0");
  if (t_len == 0.0) return cd(1.0);
  cd g = pgf_eval(p.node_law, z * lst_eval(p.weight_law, v));
  return std::exp(p.lambda * t_len * (g - 1.0));
}

// ---------------------------------------------------------------------------
// Domain validation for ||gamma|| < 1.  The sufficient condition is
// Re(theta) > 0, |z| < 1, Re(v) > 0 with any two of the three weakened to
// non-strict, i.e. at least one strict inequality with the others weak.
// ---------------------------------------------------------------------------

enum class StrictnessPattern {
  Auto,         // accept any single-strict pattern
  AllStrict,    // require all three strict
  ThetaStrict,  // Re(theta) > 0, |z| <= 1, Re(v) >= 0
  ZStrict,      // |z| < 1, Re(theta) >= 0, Re(v) >= 0
  VStrict,      // Re(v) > 0, |z| <= 1, Re(theta) >= 0
};

struct DomainReport {
  bool guaranteed = false;
  bool boundary = false;  // all conditions hold weakly but none strictly
  std::string pattern;    // which pattern established the guarantee
};

inline DomainReport validate_domain(cd z, cd v, cd theta,
                                    StrictnessPattern mode = StrictnessPattern::Auto) {
  const double eps = 1e-14;
  bool z_weak = std::abs(z) <= 1.0 + eps;
  bool v_weak = v.real() >= -eps;
  bool t_weak = theta.real() >= -eps;
  bool z_strict = std::abs(z) < 1.0 - eps;
  bool v_strict = v.real() > eps;
  bool t_strict = theta.real() > eps;

  DomainReport r;
  if (!(z_weak && v_weak && t_weak)) return r;  // outside even the weak box

  auto ok = [&](bool want_t, bool want_z, bool want_v) {
    return (want_t ? t_strict : t_weak) && (want_z ? z_strict : z_weak) &&
           (want_v ? v_strict : v_weak);
  };

  switch (mode) {
    case StrictnessPattern::AllStrict:
      r.guaranteed = ok(true, true, true);
      if (r.guaranteed) r.pattern = "all strict";
      break;
    case StrictnessPattern::ThetaStrict:
      r.guaranteed = ok(true, false, false);
      if (r.guaranteed) r.pattern = "Re(theta) > 0";
      break;
    case StrictnessPattern::ZStrict:
      r.guaranteed = ok(false, true, false);
      if (r.guaranteed) r.pattern = "|z| < 1";
      break;
    case StrictnessPattern::VStrict:
      r.guaranteed = ok(false, false, true);
      if (r.guaranteed) r.pattern = "Re(v) > 0";
      break;
    case StrictnessPattern::Auto:
      if (t_strict) {
        r.guaranteed = true;
        r.pattern = "Re(theta) > 0";
      } else if (z_strict) {
        r.guaranteed = true;
        r.pattern = "|z| < 1";
      } else if (v_strict) {
        r.guaranteed = true;
        r.pattern = "Re(v) > 0";
      }
      break;
  }
  r.boundary = !t_strict && !z_strict && !v_strict;
  return r;
}

}  // namespace fopt

#endif  // FOPT_PROCESS_HPP
