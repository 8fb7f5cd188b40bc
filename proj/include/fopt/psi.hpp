#ifndef FOPT_PSI_HPP
#define FOPT_PSI_HPP

#include <cmath>
#include <complex>
#include <string>

#include "fopt/laplace.hpp"
#include "fopt/process.hpp"
#include "fopt/series.hpp"

namespace fopt {

// The eight functional variants the operator pipeline evaluates.  The first
// four live on the two-threshold model (series in x, Laplace variable for
// the weight threshold); the last four add the auxiliary node threshold
// (series in x and y, Laplace variable for the weight threshold).
enum class PsiVariant {
  NodeFirst,        // node component crosses first
  Simultaneous,     // both components cross at the same observation
  WeightFirst,      // weight component crosses first
  Unrestricted,     // sum of the three ordering classes
  AuxNodeFirst,     // aux level first, then node, then weight
  AuxSimultaneous,  // aux level first, then a simultaneous crossing
  AuxWeightFirst,   // aux level first, then weight, then node
  AuxFirst,         // aux level strictly first (sum of the three)
};

inline bool is_aux_variant(PsiVariant v) {
  return v == PsiVariant::AuxNodeFirst || v == PsiVariant::AuxSimultaneous ||
         v == PsiVariant::AuxWeightFirst || v == PsiVariant::AuxFirst;
}

// Two dispositions of the inverse discrete operator: Statement evaluates
// the coefficient partial sums at the thresholds themselves, Proof at
// threshold-minus-one.  Proof is the default because the explicit model
// formulas are derived under it.
enum class IndexConvention { Proof, Statement };

struct PsiExpression {
  PsiVariant variant = PsiVariant::AuxFirst;
  ProcessParams params;
  TransformArgs args;
};

namespace detail {

// Truncated series (in x and/or y) of gamma(zfac * x^xd * y^yd, v, theta)
// at a fixed complex point of the remaining Laplace variable (already folded
// into v by the caller).  `initial` picks the delay law's LST.
inline TruncatedSeries gamma_series(const ProcessParams& p, bool initial,
                                    cd zfac, int xd, int yd, cd v_arg,
                                    cd theta_arg, int kx, int ky) {
  if (initial && std::holds_alternative<ZeroDelay>(p.delay_law))
    return TruncatedSeries::constant(cd(1.0), kx, ky);
  if (xd == 0 && yd == 0) {
    cd val = initial ? gamma_initial(p, zfac, v_arg, theta_arg)
                     : gamma_increment(p, zfac, v_arg, theta_arg);
    return TruncatedSeries::constant(val, kx, ky);
  }

  cd l_val = lst_eval(p.weight_law, v_arg, false);
  int smax = kx + ky;
  if (xd > 0) smax = std::min(smax, kx / xd);
  if (yd > 0) smax = std::min(smax, ky / yd);

  std::vector<double> g = pgf_coefficients(p.node_law, smax);
  TruncatedSeries inner(kx, ky);
  cd base = zfac * l_val;
  cd pw = 1.0;
  for (int s = 1; s <= smax; ++s) {
    pw *= base;
    if (g[s] != 0.0) inner.at(s * xd, s * yd) += g[s] * pw;
  }

  cd s0 = theta_arg + p.lambda;
  double lambda = p.lambda;
  auto coeff = [&](int n) -> cd {
    cd ln = initial ? lst_taylor_coeff(p.delay_law, n, s0)
                    : lst_taylor_coeff(p.obs_law, n, s0);
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return ln * sign * std::pow(lambda, n);  // (d^n L / n!) * (-lambda)^n
  };
  return compose_analytic(coeff, inner);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::domain_error("eval_psi: " + what);
}

}  // namespace detail

// Argument admissibility for the geometric-series denominators.  The series
// variables supply strict contraction on the PGF slot, so the scalar factors
// need only the weak box.
inline void validate_psi_args(const PsiExpression& e) {
  const TransformArgs& a = e.args;
  const double eps = 1e-12;
  if (is_aux_variant(e.variant)) {
    detail::require(std::abs(a.u0 * a.u * a.alpha0 * a.alpha) <= 1.0 + eps,
                    "|u0*u*alpha0*alpha| must be <= 1");
    detail::require((a.v0 + a.v + a.beta0 + a.beta).real() >= -eps,
                    "Re(v0+v+beta0+beta) must be >= 0");
    detail::require((a.theta0 + a.theta + a.h0 + a.h).real() >= -eps,
                    "Re(theta0+theta+h0+h) must be >= 0");
    detail::require(std::abs(a.alpha0 * a.alpha) <= 1.0 + eps,
                    "|alpha0*alpha| must be <= 1");
    detail::require((a.beta0 + a.beta).real() >= -eps,
                    "Re(beta0+beta) must be >= 0");
    detail::require((a.h0 + a.h).real() >= -eps, "Re(h0+h) must be >= 0");
  } else {
    detail::require(std::abs(a.alpha0 * a.alpha) <= 1.0 + eps,
                    "|alpha0*alpha| must be <= 1");
    detail::require((a.beta0 + a.beta).real() >= -eps,
                    "Re(beta0+beta) must be >= 0");
    detail::require((a.h0 + a.h).real() >= -eps, "Re(h0+h) must be >= 0");
  }
}

// Composes the variant's abbreviation bundle into the pre-inversion series
// at a fixed Laplace point w.  For the two-threshold variants the series is
// univariate in x (ky = 0).
inline TruncatedSeries eval_psi(const PsiExpression& e, cd w, int kx, int ky) {
  const ProcessParams& p = e.params;
  const TransformArgs& a = e.args;
  auto gam = [&](bool initial, cd zfac, int xd, int yd, cd v, cd th) {
    return detail::gamma_series(p, initial, zfac, xd, yd, v, th, kx, ky);
  };

  if (!is_aux_variant(e.variant)) {
    // x tracks the node threshold; w is the weight-threshold Laplace var.
    cd vv = a.beta0 + a.beta + w;
    cd th = a.h0 + a.h;
    TruncatedSeries gamma_hat = gam(false, a.alpha0 * a.alpha, 1, 0, vv, th);
    TruncatedSeries gamma0_hat = gam(true, a.alpha0 * a.alpha, 1, 0, vv, th);
    TruncatedSeries Gamma = gam(false, a.alpha, 1, 0, a.beta + w, a.h);
    TruncatedSeries Gamma0 = gam(true, a.alpha, 1, 0, a.beta + w, a.h);
    TruncatedSeries Gamma1 = gam(false, a.alpha, 0, 0, a.beta + w, a.h);
    TruncatedSeries Gamma01 = gam(true, a.alpha, 0, 0, a.beta + w, a.h);
    TruncatedSeries zeta = gam(false, a.alpha, 1, 0, a.beta, a.h);
    TruncatedSeries zeta0 = gam(true, a.alpha, 1, 0, a.beta, a.h);
    TruncatedSeries zeta1 = gam(false, a.alpha, 0, 0, a.beta, a.h);
    TruncatedSeries zeta01 = gam(true, a.alpha, 0, 0, a.beta, a.h);

    TruncatedSeries resolvent =
        gamma0_hat * (TruncatedSeries::constant(cd(1.0), kx, ky) - gamma_hat)
                         .reciprocal();
    switch (e.variant) {
      case PsiVariant::NodeFirst:
        return Gamma01 - Gamma0 + resolvent * (Gamma1 - Gamma);
      case PsiVariant::Simultaneous:
        return zeta01 - zeta0 - Gamma01 + Gamma0 +
               resolvent * (zeta1 - zeta - Gamma1 + Gamma);
      case PsiVariant::WeightFirst:
        return zeta0 - Gamma0 + resolvent * (zeta - Gamma);
      default:  // Unrestricted
        return zeta01 - Gamma0 + resolvent * (zeta1 - Gamma);
    }
  }

  // Auxiliary-threshold variants: x tracks the auxiliary level, y the
  // critical node level, w the weight threshold.
  cd z_full = a.u0 * a.u * a.alpha0 * a.alpha;
  cd z_mid = a.u * a.alpha0 * a.alpha;
  cd v_full = a.v0 + a.v + a.beta0 + a.beta + w;
  cd v_mid = a.v + a.beta0 + a.beta + w;
  cd t_full = a.theta0 + a.theta + a.h0 + a.h;
  cd t_mid = a.theta + a.h0 + a.h;

  TruncatedSeries vphi = gam(false, z_full, 1, 1, v_full, t_full);
  TruncatedSeries vphi0 = gam(true, z_full, 1, 1, v_full, t_full);
  TruncatedSeries phi = gam(false, z_mid, 1, 1, v_mid, t_mid);
  TruncatedSeries phi0 = gam(true, z_mid, 1, 1, v_mid, t_mid);
  TruncatedSeries phi1 = gam(false, z_mid, 0, 1, v_mid, t_mid);
  TruncatedSeries phi01 = gam(true, z_mid, 0, 1, v_mid, t_mid);
  TruncatedSeries psi =
      gam(false, a.alpha0 * a.alpha, 0, 1, a.beta0 + a.beta + w, a.h0 + a.h);
  TruncatedSeries chi = gam(false, a.alpha, 0, 1, a.beta + w, a.h);
  TruncatedSeries chi1 = gam(false, a.alpha, 0, 0, a.beta + w, a.h);
  TruncatedSeries xi_s = gam(false, a.alpha, 0, 1, a.beta, a.h);
  TruncatedSeries xi1 = gam(false, a.alpha, 0, 0, a.beta, a.h);

  TruncatedSeries one = TruncatedSeries::constant(cd(1.0), kx, ky);
  TruncatedSeries bracket =
      phi01 - phi0 + vphi0 * (one - vphi).reciprocal() * (phi1 - phi);
  TruncatedSeries tail(kx, ky);
  switch (e.variant) {
    case PsiVariant::AuxNodeFirst: tail = chi1 - chi; break;
    case PsiVariant::AuxSimultaneous: tail = xi1 - xi_s + chi - chi1; break;
    case PsiVariant::AuxWeightFirst: tail = xi_s - chi; break;
    default: tail = xi1 - chi; break;  // AuxFirst
  }
  return bracket * (one - psi).reciprocal() * tail;
}

// Full inversion: coefficient partial sums on the discrete axes, then
// numerical Laplace-Carson inversion on the weight axis at V.
inline LcResult invert_functional(const PsiExpression& e, const Thresholds& t,
                                  IndexConvention conv = IndexConvention::Proof,
                                  const LcOptions& opt = {}) {
  validate_psi_args(e);
  long long shift = (conv == IndexConvention::Proof) ? 1 : 0;
  if (is_aux_variant(e.variant)) {
    t.validate(true);
    long long ex = t.m1 - shift;
    long long ey = t.m - shift;
    if (ex < 0 || ey < 0) return LcResult{0.0, 0.0, false};
    auto f = [&](cd w) -> cd {
      TruncatedSeries s = eval_psi(e, w, static_cast<int>(ex), static_cast<int>(ey));
      return d_partial_sum(d_partial_sum(s, SeriesAxis::X, ex), SeriesAxis::Y, ey)
          .constant_term();
    };
    return lc_invert(f, t.v, opt);
  }
  t.validate(false);
  long long ex = t.m - shift;
  if (ex < 0) return LcResult{0.0, 0.0, false};
  auto f = [&](cd w) -> cd {
    TruncatedSeries s = eval_psi(e, w, static_cast<int>(ex), 0);
    return d_partial_sum(s, SeriesAxis::X, ex).constant_term();
  };
  return lc_invert(f, t.v, opt);
}

}  // namespace fopt

#endif  // FOPT_PSI_HPP
