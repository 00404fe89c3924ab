#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hozog/errors.hpp"
#include "hozog/lipschitz.hpp"
#include "hozog/problems.hpp"

using namespace hozog;
using testing::vec;

TEST_CASE("lipschitz_bound: small cases") {
  CHECK(lipschitz_bound(StepJacobians{{0.4}, {0.25}}) == 0.25);
  // T = 1: b1 * a2 + b2
  CHECK(lipschitz_bound(StepJacobians{{0.5, 0.9}, {0.2, 0.1}}) == doctest::Approx(0.28));
  for (std::size_t T : {0u, 1u, 7u, 50u}) {
    StepJacobians j{std::vector<double>(T + 1, 1.0), std::vector<double>(T + 1, 0.3)};
    CHECK(lipschitz_bound(j) == doctest::Approx((T + 1) * 0.3));
  }
}

TEST_CASE("lipschitz_bound: matches the literal suffix-product sum") {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + rep;
    StepJacobians j;
    for (std::size_t i = 0; i < n; ++i) {
      j.a.push_back(u(rng));
      j.b.push_back(u(rng));
    }
    double literal = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double prod = 1.0;
      for (std::size_t s = t + 1; s < n; ++s) prod *= j.a[s];
      literal += j.b[t] * prod;
    }
    CHECK(lipschitz_bound(j) == doctest::Approx(literal).epsilon(1e-12));
  }
}

TEST_CASE("lipschitz_bound: monotone in every entry") {
  StepJacobians j{{0.3, 0.8, 0.9, 0.5}, {0.1, 0.4, 0.2, 0.7}};
  const double base = lipschitz_bound(j);
  for (std::size_t i = 0; i < 4; ++i) {
    StepJacobians ja = j, jb = j;
    ja.a[i] += 0.1;
    jb.b[i] += 0.1;
    CHECK(lipschitz_bound(ja) >= base);
    CHECK(lipschitz_bound(jb) >= base);
  }
}

TEST_CASE("StepJacobians validation") {
  CHECK_THROWS_AS(lipschitz_bound(StepJacobians{{}, {}}), InvalidConfig);
  CHECK_THROWS_AS(lipschitz_bound(StepJacobians{{1.0}, {1.0, 2.0}}), InvalidConfig);
  CHECK_THROWS_AS(lipschitz_bound(StepJacobians{{-1.0}, {1.0}}), InvalidConfig);
  CHECK_THROWS_AS(lipschitz_bound(StepJacobians{{NAN}, {1.0}}), InvalidConfig);
}

TEST_CASE("synthetic_step_jacobians: point box and frozen solver") {
  const StepJacobians j = synthetic_step_jacobians(3.0, 1.0, 0.1, 5, 0.0, 0.0);
  REQUIRE(j.horizon() == 5);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(j.a[t] == doctest::Approx(0.7));
    CHECK(j.b[t] == doctest::Approx(0.6));  // 2 * 0.1 * e^0 * 3
  }
  CHECK(j.b[5] == 0.0);

  const StepJacobians frozen = synthetic_step_jacobians(3.0, 1.0, 0.0, 4, -1.0, 1.0);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(frozen.a[t] == 1.0);
    CHECK(frozen.b[t] == 0.0);
  }
  CHECK(lipschitz_bound(frozen) == frozen.b[4]);

  CHECK_THROWS_AS(synthetic_step_jacobians(3.0, 1.0, 0.5, 10, -2.0, 2.0), InvalidConfig);
}

TEST_CASE("synthetic envelope bounds every reachable iterate") {
  const double c = 3.0, eta = 0.1;
  const double env = synthetic_iterate_envelope(c, 0.0, -2.0, 2.0);
  const LossGradient g = problems::synthetic_loss_gradient(c);
  IterativeAlgorithm a;
  a.iterations = 60;
  a.lr = eta;
  for (double l = -2.0; l <= 2.0; l += 0.05) {
    for (const auto& w : trajectory(g, a, HyperParams(vec({l})), ModelParams(vec({0.0})))) {
      CHECK(std::abs(w[0]) <= env + 1e-12);
    }
  }
}

TEST_CASE("bound indexing reproduces the chain rule along one trajectory") {
  // At a single lambda with every term of one sign, the bound built from the
  // actual per-step Jacobians equals |df/dlambda| exactly.
  const double c = 3.0, w_star = 0.5, eta = 0.1, lambda = 0.0;
  IterativeAlgorithm a;
  a.iterations = 30;
  a.lr = eta;
  const auto ws = trajectory(problems::synthetic_loss_gradient(c), a, HyperParams(vec({lambda})),
                             ModelParams(vec({0.0})));
  REQUIRE(ws.size() == a.iterations + 1);
  StepJacobians j;
  for (std::size_t t = 1; t <= a.iterations; ++t) {
    j.a.push_back(std::abs(1.0 - eta * (1.0 + 2.0 * std::exp(lambda))));
    j.b.push_back(std::abs(-2.0 * eta * std::exp(lambda) * ws[t - 1][0]));
  }
  j.a.push_back(std::abs(ws.back()[0] - w_star));
  j.b.push_back(0.0);

  const ObjectiveSpec f = problems::make_synthetic(c, w_star, a);
  const double fd = testing::central_diff([&](double x) { return evaluate(f, HyperParams(vec({x}))).f_value; }, lambda);
  CHECK(lipschitz_bound(j) == doctest::Approx(std::abs(fd)).epsilon(1e-6));
}

TEST_CASE("empirical_lipschitz: simple oracles") {
  const ObjectiveSpec constant = make_function_objective(2, [](const Vector&) { return 1.0; });
  CHECK(empirical_lipschitz(constant, Box::uniform(2, -1, 1), 100, 1).empirical_max_ratio == 0.0);

  const ObjectiveSpec linear = make_function_objective(1, [](const Vector& x) { return 2.0 * x[0]; });
  const LipschitzReport r = empirical_lipschitz(linear, Box::uniform(1, 0, 1), 50, 7);
  CHECK(r.empirical_max_ratio == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.samples == 50);
  CHECK(std::isnan(r.bound));
  CHECK(empirical_lipschitz(linear, Box::uniform(1, 0, 1), 50, 7, 4).empirical_max_ratio == r.empirical_max_ratio);
}

TEST_CASE("empirical_lipschitz: domain checks") {
  ObjectiveSpec f = make_function_objective(1, [](const Vector& x) { return x[0]; });
  f.bounds = Box::uniform(1, -1, 1);
  CHECK_THROWS_AS(empirical_lipschitz(f, Box::uniform(1, -2, 1), 10, 0), InvalidConfig);
  CHECK_THROWS_AS(empirical_lipschitz(f, Box::uniform(2, -1, 1), 10, 0), DimensionMismatch);
  CHECK_THROWS_AS(empirical_lipschitz(f, Box::uniform(1, -1, 1), 0, 0), InvalidConfig);
  const ObjectiveSpec bad = make_function_objective(1, [](const Vector& x) { return x[0] > 0 ? NAN : 0.0; });
  CHECK_THROWS_AS(empirical_lipschitz(bad, Box::uniform(1, -1, 1), 100, 0), NonFiniteObjective);
}

TEST_CASE("dominance on the synthetic problem") {
  for (double eta : {0.05, 0.1}) {
    for (std::size_t T : {5u, 10u, 40u}) {
      IterativeAlgorithm a;
      a.iterations = T;
      a.lr = eta;
      const ObjectiveSpec spec = problems::make_synthetic(3.0, 1.0, a);
      const double bound = lipschitz_bound(synthetic_step_jacobians(3.0, 1.0, eta, T, -2.0, 2.0));
      CHECK(empirical_lipschitz(spec, Box::uniform(1, -2, 2), 2000, T).empirical_max_ratio <= bound);
    }
  }
}

TEST_CASE("bound grows at most linearly in the horizon") {
  const StepJacobians j10 = synthetic_step_jacobians(3.0, 1.0, 0.1, 10, -2.0, 2.0);
  double max_b = 0.0;
  for (double b : j10.b) max_b = std::max(max_b, b);
  const double b10 = lipschitz_bound(j10);
  for (std::size_t T : {20u, 100u, 400u}) {
    CHECK(lipschitz_bound(synthetic_step_jacobians(3.0, 1.0, 0.1, T, -2.0, 2.0)) <= b10 + (T - 10.0) * max_b + 1e-9);
  }
}
