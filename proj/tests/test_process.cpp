#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fopt/process.hpp"
#include "fopt/rng.hpp"
#include "fopt/simulate.hpp"

using namespace fopt;
using Catch::Approx;

namespace {

ProcessParams model2_params() {
  ProcessParams p;
  p.lambda = 1.0;
  p.node_law = GeometricNodes{0.5};
  p.weight_law = ExponentialWeight{1.0};
  p.obs_law = ExponentialObs{1.0};
  p.thresholds = {3, 8, 10.0};
  return p;
}

ProcessParams model1_params() {
  ProcessParams p;
  p.lambda = 1.0;
  p.node_law = FiniteDiscrete{{0.2, 0.3, 0.5}};
  p.weight_law = GammaWeight{2.0, 1.0};
  p.obs_law = ConstantObs{0.5};
  p.thresholds = {3, 9, 12.0};
  return p;
}

}  // namespace

TEST_CASE("gamma functional neutral point") {
  for (const auto& p : {model2_params(), model1_params()}) {
    CHECK(std::abs(gamma_increment(p, 1.0, 0.0, 0.0) - cd(1.0)) < 1e-14);
    CHECK(gamma_initial(p, 0.3, 0.7, 2.0) == cd(1.0));  // zero delay
  }
}

TEST_CASE("gamma increment closed form, exponential observations") {
  ProcessParams p = model2_params();
  double mu = 1.0, lambda = 1.0, a = 0.5, b = 0.5;
  for (double z : {0.2, 0.5, 0.9}) {
    double g = a * z / (1.0 - b * z);
    double expect = mu / (mu + lambda - lambda * g);
    CHECK(gamma_increment(p, z, 0.0, 0.0).real() == Approx(expect).margin(1e-14));
  }
}

TEST_CASE("gamma increment closed form, constant observations") {
  ProcessParams p = model1_params();
  double c = 0.5, lambda = 1.0;
  cd l = lst_eval(p.weight_law, 0.7);
  cd g = pgf_eval(p.node_law, l);
  cd expect = std::exp(-c * (lambda - lambda * g));
  CHECK(std::abs(gamma_increment(p, 1.0, 0.7, 0.0) - expect) < 1e-14);
}

TEST_CASE("initial functional with explicit delays") {
  ProcessParams p = model2_params();
  p.delay_law = ConstantObs{0.8};
  // at z=1, v=0 the attack term vanishes and only the pure delay LST remains
  CHECK(std::abs(gamma_initial(p, 1.0, 0.0, 2.0) - cd(std::exp(-1.6))) < 1e-14);

  p.delay_law = ExponentialObs{3.0};
  cd g = pgf_eval(p.node_law, 0.5 * lst_eval(p.weight_law, 0.2));
  cd expect = 3.0 / (3.0 + cd(0.1) + p.lambda - p.lambda * g);
  CHECK(std::abs(gamma_initial(p, 0.5, 0.2, 0.1) - expect) < 1e-14);
}

TEST_CASE("marked Poisson transform") {
  ProcessParams p = model2_params();
  p.lambda = 2.0;
  CHECK(marked_poisson_transform(p, 0.8, 0.5, 0.0) == cd(1.0));
  CHECK(std::abs(marked_poisson_transform(p, 1.0, 0.0, 3.1) - cd(1.0)) < 1e-14);
  cd g = pgf_eval(p.node_law, 0.8 * lst_eval(p.weight_law, 0.5));
  cd expect = std::exp(2.0 * 1.3 * (g - 1.0));
  CHECK(std::abs(marked_poisson_transform(p, 0.8, 0.5, 1.3) - expect) < 1e-13);
  CHECK_THROWS_AS(marked_poisson_transform(p, 1.2, 0.0, 1.0), std::domain_error);
  // modulus stays at or below 1 on the unit circle
  for (double phi = 0.0; phi < 6.28; phi += 0.7) {
    cd z = std::polar(1.0, phi);
    CHECK(std::abs(marked_poisson_transform(p, z, 0.2, 1.7)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("marked Poisson transform agrees with simulated windows") {
  ProcessParams p = model2_params();
  const double t = 1.3;
  const std::size_t n = 100000;
  struct Probe {
    double z, v;
  };
  Probe probes[] = {{1.0, 0.2}, {0.8, 0.0}, {0.8, 0.5},
                    {0.5, 0.1}, {0.9, 1.0}, {0.6, 0.6}};
  int pi = 0;
  for (const auto& probe : probes) {
    RngStream rng(500 + pi++);
    double sum = 0, sumsq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [nodes, weight] = window_increment(p, t, rng);
      double x = std::pow(probe.z, double(nodes)) * std::exp(-probe.v * weight);
      sum += x;
      sumsq += x * x;
    }
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    double exact = marked_poisson_transform(p, probe.z, probe.v, t).real();
    INFO("z=" << probe.z << " v=" << probe.v);
    CHECK(std::abs(mean - exact) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("gamma increment agrees with simulated observation windows") {
  // E[z^X e^{-vY} e^{-theta Delta}] over exponential-length windows
  ProcessParams p = model2_params();
  const std::size_t n = 100000;
  struct Probe {
    double z, v, th;
  };
  Probe probes[] = {{0.7, 0.0, 0.0}, {1.0, 0.7, 0.0}, {0.8, 0.3, 0.4}};
  int pi = 0;
  for (const auto& probe : probes) {
    RngStream rng(600 + pi++);
    double sum = 0, sumsq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double dt = sample(p.obs_law, rng);
      auto [nodes, weight] = window_increment(p, dt, rng);
      double x = std::pow(probe.z, double(nodes)) *
                 std::exp(-probe.v * weight - probe.th * dt);
      sum += x;
      sumsq += x * x;
    }
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    double exact = gamma_increment(p, probe.z, probe.v, probe.th).real();
    INFO("z=" << probe.z << " v=" << probe.v << " th=" << probe.th);
    CHECK(std::abs(mean - exact) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("constant-observation consistency: gamma = e^{-theta c} * window transform") {
  ProcessParams p = model1_params();
  double c = 0.5;
  RngStream rng(77);
  for (int i = 0; i < 50; ++i) {
    double z = rng.uniform();
    double v = rng.uniform() * 2.0;
    double th = rng.uniform() * 1.5;
    cd lhs = gamma_increment(p, z, v, th);
    cd rhs = std::exp(cd(-th * c)) * marked_poisson_transform(p, z, v, c);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("domain validation patterns") {
  auto r1 = validate_domain(0.9, 0.1, 0.1);
  CHECK(r1.guaranteed);
  auto r2 = validate_domain(1.0, 0.0, 0.0);
  CHECK_FALSE(r2.guaranteed);
  CHECK(r2.boundary);
  auto r3 = validate_domain(1.0, 0.2, 0.0);
  CHECK(r3.guaranteed);
  CHECK(r3.pattern == "Re(v) > 0");
  auto r4 = validate_domain(0.9, 0.1, 0.1, StrictnessPattern::AllStrict);
  CHECK(r4.guaranteed);
  auto r5 = validate_domain(1.0, 0.2, 0.0, StrictnessPattern::AllStrict);
  CHECK_FALSE(r5.guaranteed);
  auto r6 = validate_domain(1.5, 0.2, 0.1);
  CHECK_FALSE(r6.guaranteed);
}

TEST_CASE("guaranteed domain implies contraction, fuzzed") {
  ProcessParams ps[] = {model2_params(), model1_params()};
  RngStream rng(99);
  int tested = 0;
  while (tested < 1000) {
    double z = rng.uniform() * 1.05;
    double v = rng.uniform() * 2.0 - 0.05;
    double th = rng.uniform() * 2.0 - 0.05;
    auto rep = validate_domain(z, v, th);
    if (!rep.guaranteed) continue;
    ++tested;
    for (const auto& p : ps) {
      double norm = std::abs(gamma_increment(p, z, v, th));
      INFO("z=" << z << " v=" << v << " th=" << th);
      CHECK(norm < 1.0);
    }
  }
}

TEST_CASE("gamma increment is completely monotone in theta (spot check)") {
  // alternating finite differences up to order 3 must alternate in sign
  ProcessParams p = model2_params();
  const double dh = 0.05;
  for (int i = 0; i < 10; ++i) {
    double th = 0.1 + 0.2 * i;
    double f0 = gamma_increment(p, 0.7, 0.3, th).real();
    double f1 = gamma_increment(p, 0.7, 0.3, th + dh).real();
    double f2 = gamma_increment(p, 0.7, 0.3, th + 2 * dh).real();
    double f3 = gamma_increment(p, 0.7, 0.3, th + 3 * dh).real();
    CHECK(f0 >= 0.0);
    CHECK(f1 - f0 <= 1e-12);                    // first difference <= 0
    CHECK(f2 - 2 * f1 + f0 >= -1e-12);          // second difference >= 0
    CHECK(f3 - 3 * f2 + 3 * f1 - f0 <= 1e-12);  // third difference <= 0
  }
}

TEST_CASE("threshold validation") {
  Thresholds t{3, 8, 10.0};
  CHECK_NOTHROW(t.validate());
  Thresholds bad{8, 8, 10.0};
  CHECK_THROWS_AS(bad.validate(true), std::invalid_argument);
  CHECK_NOTHROW(bad.validate(false));
  Thresholds negv{1, 3, -1.0};
  CHECK_THROWS_AS(negv.validate(), std::invalid_argument);
}
