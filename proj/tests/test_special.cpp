#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "fopt/special.hpp"

using namespace fopt;
using Catch::Approx;

namespace {

// Adaptive Simpson quadrature; the independent oracle for the regularized
// incomplete gamma.
double simpson(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double eps, double whole, int depth) {
  double c = 0.5 * (a + b);
  double left = simpson(f, a, c);
  double right = simpson(f, c, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, c, eps / 2, left, depth - 1) +
         adaptive_simpson(f, c, b, eps / 2, right, depth - 1);
}

// Integrate t^{s-1} e^{-t} over [0, x] after t = u^2, which removes the
// endpoint singularity for s >= 1/2.
double gamma_p_quadrature(double s, double x) {
  auto f = [s](double u) {
    if (u > 0) return 2.0 * std::exp((2.0 * s - 1.0) * std::log(u) - u * u);
    return s == 0.5 ? 2.0 : 0.0;  // u^{2s-1} at u = 0
  };
  double ub = std::sqrt(x);
  double val = adaptive_simpson(f, 0.0, ub, 1e-13, simpson(f, 0.0, ub), 24);
  return val / std::tgamma(s);
}

// Direct series oracle for the polylogarithm; runs the sum to convergence
// (terms are unimodal in k, so a small-term stop after the peak is safe).
double polylog_series(int order, double z, int min_terms = 0) {
  double acc = 0.0;
  for (int k = 1; k <= 200000; ++k) {
    double term = std::pow(z, k) * std::pow(double(k), -order);
    acc += term;
    if (k > min_terms && k > -order && term < 1e-17 * std::abs(acc)) break;
  }
  return acc;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("regularized incomplete gamma point values") {
  CHECK(reg_gamma_p(1.0, std::log(2.0)) == Approx(0.5).margin(1e-14));
  CHECK(reg_gamma_p(3.0, 0.0) == 0.0);
  CHECK(reg_gamma_p(2.5, 4.0) ==
        Approx(gamma_p_quadrature(2.5, 4.0)).margin(1e-10));
  CHECK(reg_gamma_p(2.0, 200.0) == Approx(1.0).margin(1e-12));
}

TEST_CASE("regularized gamma vs quadrature oracle on a 10x10 grid") {
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      double s = 0.5 * i;
      double x = 0.8 * j;
      INFO("s=" << s << " x=" << x);
      CHECK(reg_gamma_p(s, x) == Approx(gamma_p_quadrature(s, x)).margin(1e-10));
    }
  }
}

TEST_CASE("regularized gamma recurrence P(s+1,x) = P(s,x) - x^s e^{-x}/Gamma(s+1)") {
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      double s = 0.5 * i;
      double x = 0.9 * j;
      double lhs = reg_gamma_p(s + 1.0, x);
      double rhs = reg_gamma_p(s, x) -
                   std::exp(s * std::log(x) - x - std::lgamma(s + 1.0));
      CHECK(lhs == Approx(rhs).margin(1e-10));
    }
  }
}

TEST_CASE("regularized gamma is monotone in x") {
  double prev = -1.0;
  for (double x = 0.0; x <= 12.0; x += 0.5) {
    double val = reg_gamma_p(2.5, x);
    CHECK(val >= prev);
    prev = val;
  }
}

TEST_CASE("integer-shape closed form matches the continuous evaluator") {
  for (long long n = 1; n <= 8; ++n) {
    for (double x : {0.3, 1.0, 2.7, 9.0}) {
      CHECK(reg_gamma_p_int(n, x) ==
            Approx(reg_gamma_p(double(n), x)).margin(1e-12));
    }
  }
  // complex argument consistency on the real axis
  cd z = reg_gamma_p_int(3, cd(2.0, 0.0));
  CHECK(z.real() == Approx(reg_gamma_p(3.0, 2.0)).margin(1e-12));
  CHECK(std::abs(z.imag()) < 1e-14);
  cd zc = reg_gamma_p(2.5, cd(4.0, 0.0));
  CHECK(zc.real() == Approx(reg_gamma_p(2.5, 4.0)).margin(1e-12));
}

TEST_CASE("regularized gamma domain errors") {
  CHECK_THROWS_AS(reg_gamma_p(-1.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(reg_gamma_p(0.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(reg_gamma_p(2.0, -0.1), std::domain_error);
}

TEST_CASE("polylogarithm at nonpositive integer orders") {
  CHECK(polylog_nonpos(0, 0.5) == Approx(1.0).margin(1e-14));
  CHECK(polylog_nonpos(-1, 0.5) == Approx(2.0).margin(1e-14));
  // partial sums settle by K = 200 at this argument
  CHECK(polylog_nonpos(-3, 0.3) ==
        Approx(polylog_series(-3, 0.3, 200)).margin(1e-12));

  for (int order = 0; order >= -6; --order) {
    for (double z = 0.1; z < 0.95; z += 0.1) {
      INFO("order=" << order << " z=" << z);
      double series = polylog_series(order, z);
      double err = std::abs(polylog_nonpos(order, z) - series);
      CHECK(err <= 1e-12 * std::max(1.0, std::abs(series)));
    }
  }
  CHECK_THROWS_AS(polylog_nonpos(-2, 1.0), std::domain_error);
  CHECK_THROWS_AS(polylog_nonpos(1, 0.5), std::domain_error);
}

TEST_CASE("power-weighted geometric sum") {
  // k = 0 is the plain geometric series, not Li_0
  CHECK(power_weighted_geometric_sum(0, 0.25) == Approx(4.0 / 3.0).margin(1e-14));
  double direct = 0.0;
  for (int i = 0; i < 300; ++i) direct += i * i * std::pow(0.4, i);
  CHECK(power_weighted_geometric_sum(2, 0.4) == Approx(direct).margin(1e-12));
}

TEST_CASE("constrained composition enumeration") {
  std::vector<double> p3 = {0.2, 0.3, 0.5};
  SECTION("single solution") {
    auto terms = enumerate_compositions(3, 2, 3, p3);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].beta == std::vector<int>{1, 1, 0});
    CHECK(terms[0].weight == Approx(0.2 * 0.3).margin(1e-15));
  }
  SECTION("empty composition") {
    auto terms = enumerate_compositions(2, 0, 0, {0.4, 0.6});
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].beta == std::vector<int>{0, 0});
    CHECK(terms[0].weight == 1.0);
  }
  SECTION("infeasible is empty") {
    CHECK(enumerate_compositions(3, 2, 7, p3).empty());
    CHECK(enumerate_compositions(3, 2, 1, p3).empty());
  }
  SECTION("matches brute force over {0..total}^R") {
    for (int R = 1; R <= 4; ++R) {
      std::vector<double> p(R, 1.0 / R);
      for (int total = 0; total <= 5; ++total) {
        for (int weighted = 0; weighted <= R * total + 1; ++weighted) {
          auto fast = enumerate_compositions(R, total, weighted, p);
          // brute force
          std::set<std::vector<int>> expect;
          std::vector<int> beta(R, 0);
          std::function<void(int)> rec = [&](int idx) {
            if (idx == R) {
              int t = 0, w = 0;
              for (int i = 0; i < R; ++i) {
                t += beta[i];
                w += (i + 1) * beta[i];
              }
              if (t == total && w == weighted) expect.insert(beta);
              return;
            }
            for (int b = 0; b <= total; ++b) {
              beta[idx] = b;
              rec(idx + 1);
            }
            beta[idx] = 0;
          };
          rec(0);
          std::set<std::vector<int>> got;
          for (const auto& t : fast) got.insert(t.beta);
          INFO("R=" << R << " total=" << total << " weighted=" << weighted);
          CHECK(got == expect);
        }
      }
    }
  }
}

TEST_CASE("composition weights sum to total probability") {
  // sum over node totals of multinomial(j; beta) p^beta must be 1 for any
  // strike count j: the batch sizes partition the probability space.
  std::vector<std::vector<double>> ps = {
      {1.0}, {0.5, 0.5}, {0.2, 0.3, 0.5}, {0.1, 0.2, 0.3, 0.4}};
  for (const auto& p : ps) {
    int R = int(p.size());
    for (int j = 0; j <= 6; ++j) {
      double total = 0.0;
      for (int w = j; w <= R * j; ++w)
        total += factorial(j) * composition_weight_sum(R, j, w, p);
      if (j == 0) total = composition_weight_sum(R, 0, 0, p);
      INFO("R=" << R << " j=" << j);
      CHECK(total == Approx(1.0).margin(1e-12));
    }
  }
}
