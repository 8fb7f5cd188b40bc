#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "fopt/rng.hpp"
#include "fopt/series.hpp"

using namespace fopt;

namespace {

TruncatedSeries random_series(RngStream& rng, int kx, int ky, bool unit_const) {
  TruncatedSeries s(kx, ky);
  for (int i = 0; i <= kx; ++i)
    for (int j = 0; j <= ky; ++j)
      s.at(i, j) = cd(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
  if (unit_const) s.at(0, 0) = cd(1.0);
  return s;
}

// univariate geometric series 1/(1 - b x) truncated at kx
TruncatedSeries geometric_x(cd b, int kx) {
  TruncatedSeries s(kx, 0);
  cd pw = 1.0;
  for (int i = 0; i <= kx; ++i) {
    s.at(i, 0) = pw;
    pw *= b;
  }
  return s;
}

cd spot(const TruncatedSeries& s) { return s.constant_term(); }

}  // namespace

TEST_CASE("series arithmetic basics") {
  RngStream rng(1);
  auto a = random_series(rng, 4, 3, false);
  auto b = random_series(rng, 4, 3, false);
  auto sum = a + b;
  CHECK(std::abs(sum.at(2, 1) - a.at(2, 1) - b.at(2, 1)) < 1e-15);
  auto prod1 = a * b;
  auto prod2 = b * a;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 3; ++j)
      CHECK(std::abs(prod1.at(i, j) - prod2.at(i, j)) < 1e-14);
}

TEST_CASE("series reciprocal inverts") {
  RngStream rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_series(rng, 5, 4, true);
    auto inv = s.reciprocal();
    auto prod = s * inv;
    for (int i = 0; i <= 5; ++i)
      for (int j = 0; j <= 4; ++j) {
        cd expect = (i == 0 && j == 0) ? cd(1.0) : cd(0.0);
        CHECK(std::abs(prod.at(i, j) - expect) < 1e-12);
      }
  }
  TruncatedSeries tiny(2, 2);
  tiny.at(0, 0) = cd(1e-12);
  CHECK_THROWS_AS(tiny.reciprocal(), NumericError);
}

TEST_CASE("partial sum edge contracts") {
  RngStream rng(3);
  auto s = random_series(rng, 4, 2, false);
  auto zero = d_partial_sum(s, SeriesAxis::X, -1);
  for (int j = 0; j <= 2; ++j) CHECK(zero.at(0, j) == cd(0.0));
  CHECK_THROWS_AS(d_partial_sum(s, SeriesAxis::X, 5), NumericError);
  CHECK_THROWS_AS(d_partial_sum(s, SeriesAxis::Y, 3), NumericError);
}

TEST_CASE("inverse operator is linear") {
  RngStream rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_series(rng, 6, 0, false);
    auto g = random_series(rng, 6, 0, false);
    cd a(rng.uniform(), rng.uniform());
    cd b(rng.uniform(), rng.uniform());
    int k = int(rng.uniform() * 6.99);
    cd lhs = spot(d_partial_sum(f * a + g * b, SeriesAxis::X, k));
    cd rhs = a * spot(d_partial_sum(f, SeriesAxis::X, k)) +
             b * spot(d_partial_sum(g, SeriesAxis::X, k));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("inverse operator maps the unit function to 1") {
  auto one = TruncatedSeries::constant(cd(1.0), 7, 0);
  for (int k = 0; k <= 7; ++k)
    CHECK(std::abs(spot(d_partial_sum(one, SeriesAxis::X, k)) - cd(1.0)) < 1e-15);
}

TEST_CASE("inverse operator absorbs monomial factors as index shifts") {
  RngStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_series(rng, 9, 0, false);
    int j = 1 + int(rng.uniform() * 3.99);
    int k = int(rng.uniform() * 9.99);
    auto shifted = g.shift_x(j);
    cd lhs = spot(d_partial_sum(shifted, SeriesAxis::X, k));
    cd rhs = (k - j >= 0) ? spot(d_partial_sum(g, SeriesAxis::X, k - j)) : cd(0.0);
    // valid whenever the shifted coefficients up to k are represented
    if (k <= 9) CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("inverse operator on diagonal series keeps y powers") {
  RngStream rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    int kx = 6, ky = 6;
    std::vector<cd> coef(kx + 1);
    TruncatedSeries s(kx, ky);
    for (int j = 0; j <= kx; ++j) {
      coef[j] = cd(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
      s.at(j, j) = coef[j];  // a(xy) = sum a_j (xy)^j
    }
    int k = int(rng.uniform() * 6.99);
    auto red = d_partial_sum(s, SeriesAxis::X, k);
    for (int j = 0; j <= ky; ++j) {
      cd expect = (j <= k) ? coef[j] : cd(0.0);
      CHECK(std::abs(red.at(0, j) - expect) < 1e-13);
    }
  }
}

TEST_CASE("partial sum of 1/(1 - x/2) at order 2") {
  auto geo = geometric_x(0.5, 6);
  CHECK(std::abs(spot(d_partial_sum(geo, SeriesAxis::X, 2)) - cd(1.75)) < 1e-15);
}

TEST_CASE("inverse operator closed form on a geometric series") {
  RngStream rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    cd b(rng.uniform() * 1.6 - 0.8, rng.uniform() * 0.4 - 0.2);
    int k = int(rng.uniform() * 7.99);
    auto geo = geometric_x(b, 9);
    cd lhs = spot(d_partial_sum(geo, SeriesAxis::X, k));
    cd rhs = (cd(1.0) - std::pow(b, k + 1)) / (cd(1.0) - b);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("inverse operator closed form on a product of geometrics") {
  RngStream rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    cd b(rng.uniform() * 1.2 - 0.6, rng.uniform() * 0.3);
    cd a(rng.uniform() * 1.2 - 0.6, rng.uniform() * 0.3);
    int k = int(rng.uniform() * 6.99);
    auto prod = geometric_x(b, 8) * geometric_x(a, 8);
    cd lhs = spot(d_partial_sum(prod, SeriesAxis::X, k));
    cd rhs = 0.0;
    for (int j = 0; j <= k; ++j)
      rhs += std::pow(a, j) * (cd(1.0) - std::pow(b, k + 1 - j));
    rhs /= (cd(1.0) - b);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("reciprocal of (1 - bx) equals the geometric series") {
  cd b(0.45, 0.1);
  TruncatedSeries lin(8, 0);
  lin.at(0, 0) = cd(1.0);
  lin.at(1, 0) = -b;
  auto inv = lin.reciprocal();
  auto geo = geometric_x(b, 8);
  for (int i = 0; i <= 8; ++i)
    CHECK(std::abs(inv.at(i, 0) - geo.at(i, 0)) < 1e-13);
}

TEST_CASE("analytic composition reproduces the exponential") {
  // exp(t(x,y)) with t = 0.3x + 0.2xy, checked against expanded coefficients
  TruncatedSeries t(4, 4);
  t.at(1, 0) = cd(0.3);
  t.at(1, 1) = cd(0.2);
  auto coeff = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return cd(1.0 / f);
  };
  auto e = compose_analytic(coeff, t);
  // coefficient of x^2: 0.3^2/2; of x^2 y^1: 0.3*0.2; of x^2 y^2: 0.2^2/2
  CHECK(std::abs(e.at(0, 0) - cd(1.0)) < 1e-14);
  CHECK(std::abs(e.at(2, 0) - cd(0.045)) < 1e-14);
  CHECK(std::abs(e.at(2, 1) - cd(0.06)) < 1e-14);
  CHECK(std::abs(e.at(2, 2) - cd(0.02)) < 1e-14);
}
