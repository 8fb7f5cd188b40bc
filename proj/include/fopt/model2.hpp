#ifndef FOPT_MODEL2_HPP
#define FOPT_MODEL2_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include "fopt/process.hpp"
#include "fopt/special.hpp"

namespace fopt {

// Empty-sum disposition for the boundary coefficients.  Standard treats an
// empty sum as 0 (so the integer regularized gamma P(0, y) is 1); the
// alternate reading treats it as 1 (so P(0, y) becomes 1 - e^{-y}).
// Standard is the default: it is the reading consistent with the partial
// fractions behind these formulas, and it is the one simulation confirms.
enum class SumConvention { Standard, Paper };

struct Model2Params {
  double lambda = 1.0;
  double a = 0.5;       // geometric batch parameter, b = 1 - a
  double xi = 1.0;      // exponential per-node weight rate
  double mu_obs = 1.0;  // observation rate
  long long m1 = 1;
  long long m = 2;
  double v = 1.0;

  double b() const { return 1.0 - a; }

  void validate() const {
    if (lambda <= 0.0) throw std::invalid_argument("model2: lambda > 0 required");
    if (a <= 0.0 || a > 1.0) throw std::invalid_argument("model2: a in (0,1] required");
    if (xi <= 0.0) throw std::invalid_argument("model2: xi > 0 required");
    if (mu_obs <= 0.0) throw std::invalid_argument("model2: mu_obs > 0 required");
    if (m1 < 1) throw std::invalid_argument("model2: m1 >= 1 required");
    if (m <= m1) throw std::invalid_argument("model2: m > m1 required");
    if (v < 0.0) throw std::invalid_argument("model2: v >= 0 required");
  }

  ProcessParams to_process_params() const {
    ProcessParams p;
    p.lambda = lambda;
    p.node_law = GeometricNodes{a};
    p.weight_law = ExponentialWeight{xi};
    p.obs_law = ExponentialObs{mu_obs};
    p.delay_law = ZeroDelay{};
    p.thresholds = {m1, m, v};
    return p;
  }
};

namespace model2 {

inline cd c_of(const Model2Params& mp, cd theta) {
  return (mp.lambda + mp.b() * theta) / (mp.lambda + theta);
}

inline cd d_of(const Model2Params& mp, cd theta) {
  return (mp.lambda + mp.b() * (mp.mu_obs + theta)) /
         (mp.lambda + mp.mu_obs + theta);
}

inline cd l_of(const Model2Params& mp, cd s) { return mp.xi / (mp.xi + s); }

// s(x, y) = sum_{i=1}^{m-m1-1} (c(x)/d(y))^i; empty when m = m1 + 1.
inline cd s_of(const Model2Params& mp, cd x, cd y) {
  cd ratio = c_of(mp, x) / d_of(mp, y);
  cd acc = 0.0, pw = 1.0;
  for (long long i = 1; i <= mp.m - mp.m1 - 1; ++i) {
    pw *= ratio;
    acc += pw;
  }
  return acc;
}

// Integer regularized gamma with the convention hook at shape 0.
inline cd pfun(long long n, cd y, SumConvention conv) {
  if (n < 0) throw std::domain_error("model2::pfun: negative shape");
  if (n == 0)
    return conv == SumConvention::Standard ? cd(1.0) : cd(1.0) - std::exp(-y);
  return reg_gamma_p_int(n, y);
}

// k_j(v) = 1 - P(j+1, (v+xi)V); defined for j >= -1.
inline cd k_of(const Model2Params& mp, long long j, cd v, SumConvention conv) {
  if (j < -1) throw std::domain_error("model2::k_of: j >= -1 required");
  return cd(1.0) - pfun(j + 1, (v + mp.xi) * mp.v, conv);
}

// r_k^j(u, v, theta) = e^{-(v+xi)V} sum_{i=k}^{j} (xi d(theta) u V)^i / i!.
inline cd r_of(const Model2Params& mp, long long k, long long j, cd u, cd v,
               cd theta, SumConvention conv) {
  cd pre = std::exp(-(v + mp.xi) * mp.v);
  if (j < k) {
    // empty index range
    return conv == SumConvention::Paper ? pre : cd(0.0);
  }
  cd x = mp.xi * d_of(mp, theta) * u * mp.v;
  cd term = 1.0;
  for (long long i = 1; i <= k; ++i) term *= x / double(i);
  cd acc = term;
  for (long long i = k + 1; i <= j; ++i) {
    term *= x / double(i);
    acc += term;
  }
  return pre * acc;
}

namespace detail {

// dP(n, y)/dy = e^{-y} y^{n-1} / (n-1)!.
inline cd p_deriv(long long n, cd y) {
  double fact = 1.0;
  for (long long i = 2; i < n; ++i) fact *= double(i);
  return std::exp(-y) * std::pow(y, double(n - 1)) / fact;
}

// d^2 P(n, y)/dy^2 = e^{-y} y^{n-2} ((n-1) - y) / (n-1)!.
inline cd p_deriv2(long long n, cd y) {
  double fact = 1.0;
  for (long long i = 2; i < n; ++i) fact *= double(i);
  return std::exp(-y) * std::pow(y, double(n - 2)) * (double(n - 1) - y) / fact;
}

}  // namespace detail

// T_k = LC^{-1}_w( (1/w) l^k / (1 - da*l) )(V) with l = xi/(w + vbase + xi):
//   xi^k / s * [ P(k-1,(vbase+xi)V)/(vbase+xi)^{k-1}
//                - e^{-sV} P(k-1, xi*da*V)/(xi*da)^{k-1} ],
// where s = vbase + xi(1 - da).  The bracket vanishes with s, so near s = 0
// the removable singularity is evaluated by a second-order Taylor series.
inline cd lc_tail(const Model2Params& mp, long long k, cd dalpha, cd vbase,
                  SumConvention conv) {
  const double V = mp.v;
  const double xi = mp.xi;
  cd s = vbase + xi * (cd(1.0) - dalpha);
  cd x = xi * dalpha;  // note vbase + xi = x + s
  long long n = k - 1;
  cd xik = std::pow(cd(xi), double(k));

  if (std::abs(dalpha) < 1e-12) {
    // geometric factor absent: plain LC^{-1}((1/w) l^k)(V)
    return std::pow(cd(xi) / (vbase + xi), double(k)) *
           pfun(k, (vbase + xi) * V, conv);
  }

  if (std::abs(s) > 1e-6 * xi || conv == SumConvention::Paper) {
    cd term1 = pfun(n, (vbase + xi) * V, conv) / std::pow(vbase + xi, double(n));
    cd term2 = std::exp(-s * V) * pfun(n, x * V, conv) / std::pow(x, double(n));
    return xik * (term1 - term2) / s;
  }

  // Taylor branch (standard convention): N(s)/s with N(0) = 0.
  if (n == 0) {
    // (1 - e^{-sV})/s = V (1 + z/2 (1 + z/3 (1 + z/4))) with z = -sV,
    // written so that s = 0 needs no division
    cd z = -s * V;
    return xik * V * (1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0)));
  }
  cd xn = std::pow(x, double(n));
  cd C = reg_gamma_p_int(n, x * V) / xn;
  cd A1 = V * detail::p_deriv(n, x * V) / xn -
          double(n) * reg_gamma_p_int(n, x * V) / (xn * x);
  cd A2 = V * V * detail::p_deriv2(n, x * V) / xn -
          2.0 * double(n) * V * detail::p_deriv(n, x * V) / (xn * x) +
          double(n) * double(n + 1) * reg_gamma_p_int(n, x * V) / (xn * x * x);
  cd N1 = A1 + V * C;
  cd N2 = A2 - V * V * C;
  return xik * (N1 + s * N2 / 2.0);
}

}  // namespace model2

// ---------------------------------------------------------------------------
// Joint transform of (N, W, tau) at the observed auxiliary crossing,
// restricted to the auxiliary crossing happening strictly first.
// ---------------------------------------------------------------------------

inline cd model2_joint_at_mu1(const Model2Params& mp, cd u, cd v, cd theta,
                              SumConvention conv = SumConvention::Standard) {
  mp.validate();
  using namespace model2;
  const double xi = mp.xi;
  if (std::abs(u) == 0.0) return cd(0.0);  // N at the crossing is >= 1
  cd c = c_of(mp, theta);
  cd d = d_of(mp, theta);
  cd pref = mp.a * mp.lambda * mp.mu_obs * std::pow(c, double(mp.m1 - 1)) *
            std::pow(u, double(mp.m1)) /
            ((mp.mu_obs + theta + mp.lambda) * (theta + mp.lambda));
  if (mp.m == mp.m1 + 1) {
    return pref * std::pow(cd(xi) / (v + xi), double(mp.m1)) *
           pfun(mp.m1, (v + xi) * mp.v, conv);
  }
  // lc_tail(k) carries xi^k, so the tail term's weight is (du)^{m-m1} alone
  cd du = d * u;
  return pref * (lc_tail(mp, mp.m1, du, v, conv) -
                 std::pow(du, double(mp.m - mp.m1)) *
                     lc_tail(mp, mp.m, du, v, conv));
}

// P{ mu1 < min(mu, nu) }; own expression, kept independent of
// model2_joint_at_mu1 so the two can cross-check each other.
inline double model2_prob_mu1_first(const Model2Params& mp,
                                    SumConvention conv = SumConvention::Standard) {
  mp.validate();
  using namespace model2;
  const double xi = mp.xi;
  if (mp.m == mp.m1 + 1) {
    return mp.a * mp.mu_obs / (mp.mu_obs + mp.lambda) *
           pfun(mp.m1, cd(xi * mp.v), conv).real();
  }
  cd d0 = d_of(mp, 0.0);
  cd val = pfun(mp.m1 - 1, cd(xi * mp.v), conv) -
           r_of(mp, mp.m1 - 1, mp.m - 2, 1.0, 0.0, 0.0, conv) /
               std::pow(d0, double(mp.m1 - 1)) -
           std::pow(d0, double(mp.m - mp.m1)) *
               pfun(mp.m - 1, cd(xi * mp.v), conv);
  return val.real();
}

// ---------------------------------------------------------------------------
// Marginal transforms at the auxiliary crossing.  Independent expressions
// (the joint with two slots neutralized and simplified by hand); tests pin
// them against the joint to full precision.
// ---------------------------------------------------------------------------

enum class MarginalKind { Nodes, Weight, Time };

inline cd model2_marginal_at_mu1(const Model2Params& mp, MarginalKind which,
                                 cd arg,
                                 SumConvention conv = SumConvention::Standard) {
  mp.validate();
  using namespace model2;
  const double xi = mp.xi;
  if (which == MarginalKind::Nodes && std::abs(arg) == 0.0) return cd(0.0);
  if (mp.m == mp.m1 + 1) {
    switch (which) {
      case MarginalKind::Nodes:
        return mp.a * mp.mu_obs / (mp.mu_obs + mp.lambda) *
               std::pow(arg, double(mp.m1)) * pfun(mp.m1, cd(xi * mp.v), conv);
      case MarginalKind::Weight:
        return mp.a * mp.mu_obs / (mp.mu_obs + mp.lambda) *
               std::pow(cd(xi) / (arg + xi), double(mp.m1)) *
               pfun(mp.m1, (arg + xi) * mp.v, conv);
      case MarginalKind::Time: {
        cd c = c_of(mp, arg);
        return mp.a * mp.lambda * mp.mu_obs * std::pow(c, double(mp.m1 - 1)) /
               ((mp.mu_obs + arg + mp.lambda) * (arg + mp.lambda)) *
               pfun(mp.m1, cd(xi * mp.v), conv);
      }
    }
  }
  switch (which) {
    case MarginalKind::Nodes: {
      cd u = arg;
      if (std::abs(u) == 0.0) return cd(0.0);
      cd d0u = d_of(mp, 0.0) * u;
      cd denom = cd(1.0) - d0u;
      if (std::abs(denom) < 1e-12)
        throw std::domain_error("model2_marginal_at_mu1: pole at u = 1/d(0)");
      cd bracket = pfun(mp.m1 - 1, cd(xi * mp.v), conv) -
                   r_of(mp, mp.m1 - 1, mp.m - 2, u, 0.0, 0.0, conv) /
                       std::pow(d0u, double(mp.m1 - 1)) -
                   std::pow(d0u, double(mp.m - mp.m1)) *
                       pfun(mp.m - 1, cd(xi * mp.v), conv);
      return mp.a * mp.mu_obs * std::pow(u, double(mp.m1)) /
             ((mp.mu_obs + mp.lambda) * denom) * bracket;
    }
    case MarginalKind::Weight: {
      cd v = arg;
      cd d0 = d_of(mp, 0.0);
      cd bracket =
          pfun(mp.m1 - 1, (v + xi) * mp.v, conv) /
              std::pow(v + xi, double(mp.m1 - 1)) -
          r_of(mp, mp.m1 - 1, mp.m - 2, 1.0, v, 0.0, conv) /
              std::pow(d0 * xi, double(mp.m1 - 1)) -
          std::pow(d0 * xi, double(mp.m - mp.m1)) *
              pfun(mp.m - 1, (v + xi) * mp.v, conv) /
              std::pow(v + xi, double(mp.m - 1));
      return mp.a * mp.mu_obs * std::pow(cd(xi), double(mp.m1)) /
             ((mp.mu_obs + mp.lambda) * (v + xi * (cd(1.0) - d0))) * bracket;
    }
    case MarginalKind::Time: {
      cd theta = arg;
      cd c = c_of(mp, theta);
      cd d = d_of(mp, theta);
      cd bracket = pfun(mp.m1 - 1, cd(xi * mp.v), conv) -
                   r_of(mp, mp.m1 - 1, mp.m - 2, 1.0, 0.0, theta, conv) /
                       std::pow(d, double(mp.m1 - 1)) -
                   std::pow(d, double(mp.m - mp.m1)) *
                       pfun(mp.m - 1, cd(xi * mp.v), conv);
      return mp.a * mp.mu_obs * mp.lambda * std::pow(c, double(mp.m1 - 1)) /
             ((mp.mu_obs + theta + mp.lambda) * (theta + mp.lambda) *
              (cd(1.0) - d)) *
             bracket;
    }
  }
  return cd(0.0);
}

// ---------------------------------------------------------------------------
// Joint transform of (N, W, tau) at the first observed critical crossing,
// still restricted to the auxiliary crossing happening first.
// ---------------------------------------------------------------------------

inline cd model2_joint_at_min(const Model2Params& mp, cd alpha, cd beta, cd h,
                              SumConvention conv = SumConvention::Standard) {
  mp.validate();
  using namespace model2;
  const double xi = mp.xi;
  if (std::abs(alpha) == 0.0) return cd(0.0);  // N at the crossing is >= 1
  cd c = c_of(mp, h);
  cd d = d_of(mp, h);
  cd lbeta = l_of(mp, beta);
  cd da = d * alpha;
  cd denom = cd(1.0) - da * lbeta;
  if (std::abs(denom) < 1e-12)
    throw std::domain_error("model2_joint_at_min: pole at d(h) alpha l(beta) = 1");
  cd C = std::pow(mp.a * mp.mu_obs * mp.lambda, 2.0) *
         std::pow(alpha, double(mp.m1 + 1)) * std::pow(c, double(mp.m1 - 1)) /
         (denom * std::pow(h + mp.lambda, 2.0) *
          std::pow(mp.mu_obs + h + mp.lambda, 2.0));
  if (mp.m == mp.m1 + 1) {
    return C * lbeta * std::pow(cd(xi) / (beta + xi), double(mp.m1)) *
           pfun(mp.m1, (beta + xi) * mp.v, conv);
  }
  cd slope = lbeta - cd(1.0) / (alpha * c);
  cd mid = 0.0;
  cd ca = c * alpha;
  cd capow = 1.0;
  for (long long j = 1; j <= mp.m - mp.m1 - 1; ++j) {
    capow *= ca;
    mid += capow * lc_tail(mp, mp.m1 + j, da, beta, conv);
  }
  return C * (lbeta * lc_tail(mp, mp.m1, da, beta, conv) + slope * mid -
              std::pow(da, double(mp.m - mp.m1)) *
                  (lbeta + slope * s_of(mp, h, h)) *
                  lc_tail(mp, mp.m, da, beta, conv));
}

inline cd model2_marginal_at_min(const Model2Params& mp, MarginalKind which,
                                 cd arg,
                                 SumConvention conv = SumConvention::Standard) {
  mp.validate();
  using namespace model2;
  if (mp.m == mp.m1 + 1) {
    switch (which) {
      case MarginalKind::Nodes: return model2_joint_at_min(mp, arg, 0.0, 0.0, conv);
      case MarginalKind::Weight: return model2_joint_at_min(mp, 1.0, arg, 0.0, conv);
      case MarginalKind::Time: return model2_joint_at_min(mp, 1.0, 0.0, arg, conv);
    }
  }
  switch (which) {
    case MarginalKind::Nodes: {
      cd alpha = arg;
      if (std::abs(alpha) == 0.0) return cd(0.0);
      cd d0a = d_of(mp, 0.0) * alpha;
      cd denom = cd(1.0) - d0a;
      if (std::abs(denom) < 1e-12)
        throw std::domain_error("model2_marginal_at_min: pole at alpha = 1/d(0)");
      cd C = std::pow(mp.a * mp.mu_obs, 2.0) *
             std::pow(alpha, double(mp.m1 + 1)) /
             (denom * std::pow(mp.mu_obs + mp.lambda, 2.0));
      cd slope = (alpha - cd(1.0)) / alpha;
      cd mid = 0.0, apow = 1.0;
      for (long long j = 1; j <= mp.m - mp.m1 - 1; ++j) {
        apow *= alpha;
        mid += apow * lc_tail(mp, mp.m1 + j, d0a, 0.0, conv);
      }
      return C * (lc_tail(mp, mp.m1, d0a, 0.0, conv) + slope * mid -
                  std::pow(d0a, double(mp.m - mp.m1)) *
                      (cd(1.0) + slope * s_of(mp, 0.0, 0.0)) *
                      lc_tail(mp, mp.m, d0a, 0.0, conv));
    }
    case MarginalKind::Weight: {
      cd beta = arg;
      cd d0 = d_of(mp, 0.0);
      cd lbeta = l_of(mp, beta);
      cd denom = cd(1.0) - d0 * lbeta;
      if (std::abs(denom) < 1e-12)
        throw std::domain_error("model2_marginal_at_min: pole at d(0) l(beta) = 1");
      cd C = std::pow(mp.a * mp.mu_obs, 2.0) /
             (denom * std::pow(mp.mu_obs + mp.lambda, 2.0));
      cd slope = lbeta - cd(1.0);
      cd mid = 0.0;
      for (long long j = 1; j <= mp.m - mp.m1 - 1; ++j)
        mid += lc_tail(mp, mp.m1 + j, d0, beta, conv);
      return C * (lbeta * lc_tail(mp, mp.m1, d0, beta, conv) + slope * mid -
                  std::pow(d0, double(mp.m - mp.m1)) *
                      (lbeta + slope * s_of(mp, 0.0, 0.0)) *
                      lc_tail(mp, mp.m, d0, beta, conv));
    }
    case MarginalKind::Time: {
      cd h = arg;
      cd c = c_of(mp, h);
      cd d = d_of(mp, h);
      cd denom = cd(1.0) - d;
      cd C = std::pow(mp.a * mp.mu_obs * mp.lambda, 2.0) *
             std::pow(c, double(mp.m1 - 1)) /
             (denom * std::pow(h + mp.lambda, 2.0) *
              std::pow(mp.mu_obs + h + mp.lambda, 2.0));
      cd slope = (c - cd(1.0)) / c;
      cd mid = 0.0, cpow = 1.0;
      for (long long j = 1; j <= mp.m - mp.m1 - 1; ++j) {
        cpow *= c;
        mid += cpow * lc_tail(mp, mp.m1 + j, d, 0.0, conv);
      }
      return C * (lc_tail(mp, mp.m1, d, 0.0, conv) + slope * mid -
                  std::pow(d, double(mp.m - mp.m1)) *
                      (cd(1.0) + slope * s_of(mp, h, h)) *
                      lc_tail(mp, mp.m, d, 0.0, conv));
    }
  }
  return cd(0.0);
}

// ---------------------------------------------------------------------------
// Transform of the time between the observed auxiliary crossing and the
// first observed critical crossing.
// ---------------------------------------------------------------------------

inline cd model2_interval_transform(const Model2Params& mp, cd h,
                                    SumConvention conv = SumConvention::Standard) {
  mp.validate();
  using namespace model2;
  const double xi = mp.xi;
  cd pref_core = mp.a * mp.mu_obs * mp.mu_obs * mp.lambda /
                 ((mp.mu_obs + mp.lambda) * (mp.mu_obs + h) * (h + mp.lambda));
  if (mp.m == mp.m1 + 1) {
    return pref_core * pfun(mp.m1, cd(xi * mp.v), conv);
  }
  cd d0 = d_of(mp, 0.0);
  cd c = c_of(mp, h);
  auto G = [&](long long k) {
    return pfun(k - 1, cd(xi * mp.v), conv) -
           std::exp(-xi * (cd(1.0) - d0) * mp.v) *
               pfun(k - 1, xi * d0 * mp.v, conv) / std::pow(d0, double(k - 1));
  };
  cd slope = (c - cd(1.0)) / c;
  cd mid = 0.0, cpow = 1.0;
  for (long long j = 1; j <= mp.m - mp.m1 - 1; ++j) {
    cpow *= c;
    mid += cpow * G(mp.m1 + j);
  }
  cd val = G(mp.m1) + slope * mid -
           std::pow(d0, double(mp.m - mp.m1)) *
               (cd(1.0) + slope * s_of(mp, h, 0.0)) * G(mp.m);
  return pref_core / (cd(1.0) - d0) * val;
}

}  // namespace fopt

#endif  // FOPT_MODEL2_HPP
