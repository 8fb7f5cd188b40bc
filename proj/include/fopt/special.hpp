#ifndef FOPT_SPECIAL_HPP
#define FOPT_SPECIAL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fopt {

using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// Lower regularized incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
// Series for x < s + 1, Lentz continued fraction for the upper tail
// otherwise (Numerical Recipes partitioning).
// ---------------------------------------------------------------------------

namespace detail {

template <typename X>
X gamma_p_series(double s, X x) {
  double ap = s;
  X sum = X(1.0) / s;
  X del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + double(s) * std::log(x) - std::lgamma(s));
}

// Continued fraction for Q(s, x); modified Lentz.
template <typename X>
X gamma_q_cf(double s, X x) {
  const double tiny = 1e-300;
  X b = x + 1.0 - s;
  X c = X(1.0 / tiny);
  X d = X(1.0) / b;
  X h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = X(tiny);
    c = b + an / c;
    if (std::abs(c) < tiny) c = X(tiny);
    d = X(1.0) / d;
    X del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return std::exp(-x + double(s) * std::log(x) - std::lgamma(s)) * h;
}

inline double abs_or_self(double x) { return x; }
inline double abs_or_self(const cd& x) { return x.real(); }

}  // namespace detail

// Real argument version.  Monotone increasing in x, P(s, 0) = 0.
inline double reg_gamma_p(double shape, double x) {
  if (shape <= 0.0) throw std::domain_error("reg_gamma_p: shape must be > 0");
  if (x < 0.0) throw std::domain_error("reg_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < shape + 1.0) return detail::gamma_p_series(shape, x);
  return 1.0 - detail::gamma_q_cf(shape, x);
}

// Complex argument continuation (principal branch of log x).  Used when
// transforms are probed off the real axis; accuracy degrades far from the
// right half-plane, which is outside every supported argument domain.
inline cd reg_gamma_p(double shape, cd x) {
  if (shape <= 0.0) throw std::domain_error("reg_gamma_p: shape must be > 0");
  if (std::abs(x) == 0.0) return cd(0.0);
  if (std::abs(x) < shape + 1.0) return detail::gamma_p_series(shape, x);
  return cd(1.0) - detail::gamma_q_cf(shape, x);
}

// Integer-shape variant via the closed form
//   P(n, x) = 1 - e^{-x} sum_{i<n} x^i / i!,
// valid for complex x.  n = 0 returns 1 (the standard shape -> 0 limit for
// x away from 0); callers needing a different empty-sum convention handle
// n = 0 themselves.
template <typename X>
X reg_gamma_p_int(long long n, X x) {
  if (n < 0) throw std::domain_error("reg_gamma_p_int: negative shape");
  if (n == 0) return X(1.0);
  X term = X(1.0);
  X sum = X(1.0);
  for (long long i = 1; i < n; ++i) {
    term *= x / double(i);
    sum += term;
  }
  return X(1.0) - std::exp(-x) * sum;
}

// ---------------------------------------------------------------------------
// Polylogarithm at nonpositive integer order.  Li_{-n}(z) is the rational
// function  sum_k Eulerian(n, k) z^{n-k} / (1-z)^{n+1}; the Eulerian
// triangle is built once per requested size.  The rational form stays
// accurate for z near 1 where the defining series stalls.
// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<double>& eulerian_triangle(int n) {
  thread_local std::vector<std::vector<double>> tri = {{1.0}};
  while (static_cast<int>(tri.size()) <= n) {
    int m = static_cast<int>(tri.size());
    std::vector<double> row(m + 1, 0.0);
    const std::vector<double>& prev = tri.back();
    for (int k = 0; k <= m; ++k) {
      double left = (k < m) ? prev[k] : 0.0;
      double up = (k > 0 && k - 1 < static_cast<int>(prev.size())) ? prev[k - 1] : 0.0;
      row[k] = (k + 1) * left + (m - k) * up;
    }
    tri.push_back(std::move(row));
  }
  return tri[n];
}

template <typename X>
X polylog_nonpos_impl(int order, X z) {
  int n = -order;
  X omz = X(1.0) - z;
  if (std::abs(omz) < 1e-14)
    throw std::domain_error("polylog_nonpos: pole at z = 1");
  if (n == 0) return z / omz;
  const auto& row = eulerian_triangle(n);
  // Horner in z over Eulerian coefficients: sum_k A(n,k) z^{n-k}.
  X num = X(0.0);
  for (int k = 0; k <= n - 1; ++k) num = num * z + row[n - 1 - k];
  num *= z;  // lowest power is z^1
  return num / std::pow(omz, n + 1);
}

}  // namespace detail

// Real version with the (0, 1) domain contract.
inline double polylog_nonpos(int order, double z) {
  if (order > 0) throw std::domain_error("polylog_nonpos: order must be <= 0");
  if (z >= 1.0) throw std::domain_error("polylog_nonpos: requires z < 1");
  return detail::polylog_nonpos_impl(order, z);
}

inline cd polylog_nonpos(int order, cd z) {
  if (order > 0) throw std::domain_error("polylog_nonpos: order must be <= 0");
  return detail::polylog_nonpos_impl(order, z);
}

// sum_{i>=0} i^k z^i: equals Li_{-k}(z) for k >= 1 and 1/(1-z) for k = 0.
template <typename X>
X power_weighted_geometric_sum(int k, X z) {
  if (k == 0) return X(1.0) / (X(1.0) - z);
  return detail::polylog_nonpos_impl(-k, z);
}

// ---------------------------------------------------------------------------
// Constrained compositions: all beta in N_0^R with
//   sum_i beta_i = total   and   sum_i i * beta_i = weighted_total.
// Each term carries the multinomial-free weight p_1^b1 ... p_R^bR / (b1!...bR!).
// ---------------------------------------------------------------------------

struct CompositionTerm {
  std::vector<int> beta;
  double weight;
};

namespace detail {

inline void enumerate_comp_rec(int R, int part, int total_left, int weighted_left,
                               const std::vector<double>& p, double weight,
                               std::vector<int>& beta,
                               std::vector<CompositionTerm>& out) {
  if (part == R) {
    // only part size R remains: beta_R forced
    if (weighted_left == total_left * R && total_left >= 0) {
      double w = weight;
      double fact = 1.0;
      for (int i = 2; i <= total_left; ++i) fact *= i;
      w *= std::pow(p[R - 1], total_left) / fact;
      beta[R - 1] = total_left;
      out.push_back({beta, w});
      beta[R - 1] = 0;
    }
    return;
  }
  // Remaining parts have sizes in [part+1, R], so the reachable band for
  // the remaining weighted sum is [(part+1)*t_rem, R*t_rem].  Raising b by
  // one shifts w_rem relative to both band edges upward, hence the break
  // on the upper edge and the skip on the lower one.
  for (int b = 0;; ++b) {
    int t_rem = total_left - b;
    int w_rem = weighted_left - b * part;
    if (t_rem < 0 || w_rem < 0) break;
    if (w_rem > R * t_rem) break;
    if (w_rem < (part + 1) * t_rem) continue;
    double fact = 1.0;
    for (int i = 2; i <= b; ++i) fact *= i;
    beta[part - 1] = b;
    enumerate_comp_rec(R, part + 1, t_rem, w_rem, p,
                       weight * std::pow(p[part - 1], b) / fact, beta, out);
    beta[part - 1] = 0;
  }
}

}  // namespace detail

inline std::vector<CompositionTerm> enumerate_compositions(
    int R, int total, int weighted_total, const std::vector<double>& p) {
  if (R < 1) throw std::invalid_argument("enumerate_compositions: R >= 1");
  if (static_cast<int>(p.size()) != R)
    throw std::invalid_argument("enumerate_compositions: p has wrong length");
  std::vector<CompositionTerm> out;
  if (total < 0 || weighted_total < total || weighted_total > R * total)
    return out;  // infeasible
  std::vector<int> beta(R, 0);
  if (R == 1) {
    if (weighted_total == total) {
      double fact = 1.0;
      for (int i = 2; i <= total; ++i) fact *= i;
      beta[0] = total;
      out.push_back({beta, std::pow(p[0], total) / fact});
    }
    return out;
  }
  detail::enumerate_comp_rec(R, 1, total, weighted_total, p, 1.0, beta, out);
  return out;
}

// Summed weight over the feasible set; what the model evaluators consume.
inline double composition_weight_sum(int R, int total, int weighted_total,
                                     const std::vector<double>& p) {
  double s = 0.0;
  for (const auto& t : enumerate_compositions(R, total, weighted_total, p))
    s += t.weight;
  return s;
}

}  // namespace fopt

#endif  // FOPT_SPECIAL_HPP
