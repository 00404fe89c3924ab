#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hozog/errors.hpp"
#include "hozog/inner_solvers.hpp"
#include "hozog/problems.hpp"

using namespace hozog;
using testing::vec;

namespace {

// L(w) = 1/2 (w - 3)^2
LossGradient shifted_quadratic() {
  return [](const Vector& w, const Vector&, Vector& g) { g = w.array() - 3.0; };
}

// L(w) = 1/2 w^2
LossGradient plain_quadratic() {
  return [](const Vector& w, const Vector&, Vector& g) { g = w; };
}

IterativeAlgorithm alg(InnerVariant v, std::size_t T, double lr) {
  IterativeAlgorithm a;
  a.variant = v;
  a.iterations = T;
  a.lr = lr;
  return a;
}

const HyperParams kNoLambda(vec({0.0}));

}  // namespace

TEST_CASE("gd_solve: zero iterations returns w0") {
  const ModelParams w0(vec({1.5, -2.0}));
  CHECK(gd_solve(plain_quadratic(), alg(InnerVariant::GD, 0, 0.1), kNoLambda, w0).values == w0.values);
  CHECK(adam_solve(plain_quadratic(), alg(InnerVariant::Adam, 0, 0.1), kNoLambda, w0).values == w0.values);
}

TEST_CASE("gd_solve: hand iteration") {
  const ModelParams w0(vec({0.0}));
  CHECK(gd_solve(shifted_quadratic(), alg(InnerVariant::GD, 1, 0.5), kNoLambda, w0)[0] == 1.5);
  CHECK(gd_solve(shifted_quadratic(), alg(InnerVariant::GD, 2, 0.5), kNoLambda, w0)[0] == 2.25);
}

TEST_CASE("gd_solve: counts gradient evaluations") {
  int calls = 0;
  LossGradient g = [&](const Vector& w, const Vector&, Vector& out) {
    ++calls;
    out = w;
  };
  gd_solve(g, alg(InnerVariant::GD, 17, 0.1), kNoLambda, ModelParams(vec({1.0})));
  CHECK(calls == 17);
}

TEST_CASE("gd_solve: synthetic inner converges to the stationary point") {
  const ModelParams w = gd_solve(problems::synthetic_loss_gradient(3.0), alg(InnerVariant::GD, 500, 0.1),
                                 HyperParams(vec({0.0})), ModelParams(vec({0.0})));
  CHECK(std::abs(w[0] - 1.0) <= 1e-6);
}

TEST_CASE("adam_solve: first step and long run") {
  const ModelParams w1 = adam_solve(plain_quadratic(), alg(InnerVariant::Adam, 1, 0.1), kNoLambda,
                                    ModelParams(vec({1.0})));
  // m_hat = g = 1, v_hat = g^2 = 1: w1 = 1 - 0.1 * 1 / (1 + 1e-8)
  CHECK(w1[0] == doctest::Approx(1.0 - 0.1 / (1.0 + 1e-8)).epsilon(1e-15));
  CHECK(w1[0] == doctest::Approx(0.9).epsilon(1e-7));
  const ModelParams wT = adam_solve(plain_quadratic(), alg(InnerVariant::Adam, 2000, 0.1), kNoLambda,
                                    ModelParams(vec({1.0})));
  CHECK(std::abs(wT[0]) <= 1e-3);
}

TEST_CASE("adam_solve: matches an independent recursion") {
  // Two steps of Adam on L(w) = 1/2 (w - 3)^2 from w0 = 0, written out by hand.
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.1;
  double w = 0.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    const double g = w - 3.0;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    w -= lr * mh / (std::sqrt(vh) + eps);
  }
  const ModelParams out = adam_solve(shifted_quadratic(), alg(InnerVariant::Adam, 2, lr), kNoLambda,
                                     ModelParams(vec({0.0})));
  CHECK(out[0] == doctest::Approx(w).epsilon(1e-14));
}

TEST_CASE("trajectory: endpoints and bitwise agreement with solve") {
  const auto t0 = trajectory(shifted_quadratic(), alg(InnerVariant::GD, 0, 0.5), kNoLambda, ModelParams(vec({0.0})));
  REQUIRE(t0.size() == 1);
  CHECK(t0[0][0] == 0.0);

  const auto t2 = trajectory(shifted_quadratic(), alg(InnerVariant::GD, 2, 0.5), kNoLambda, ModelParams(vec({0.0})));
  REQUIRE(t2.size() == 3);
  CHECK(t2[0][0] == 0.0);
  CHECK(t2[1][0] == 1.5);
  CHECK(t2[2][0] == 2.25);

  for (InnerVariant v : {InnerVariant::GD, InnerVariant::Adam}) {
    const IterativeAlgorithm a = alg(v, 73, 0.05);
    const HyperParams lambda(vec({0.3}));
    const ModelParams w0(vec({0.2}));
    const LossGradient g = problems::synthetic_loss_gradient(3.0);
    CHECK(trajectory(g, a, lambda, w0).back().values == solve(g, a, lambda, w0).values);
  }
}

TEST_CASE("gd: monotone descent on a convex quadratic below 1 / curvature") {
  Eigen::MatrixXd H(2, 2);
  H << 3.0, 1.0, 1.0, 2.0;
  const Vector b = vec({1.0, -1.0});
  LossGradient g = [&](const Vector& w, const Vector&, Vector& out) { out = H * w - b; };
  auto loss = [&](const Vector& w) { return 0.5 * w.dot(H * w) - b.dot(w); };
  const auto traj = trajectory(g, alg(InnerVariant::GD, 50, 0.25), kNoLambda, ModelParams(vec({4.0, 4.0})));
  for (std::size_t t = 1; t < traj.size(); ++t) CHECK(loss(traj[t].values) <= loss(traj[t - 1].values) + 1e-15);
}

TEST_CASE("non-finite iterate reports the step") {
  LossGradient explode = [](const Vector& w, const Vector&, Vector& out) { out = -1e200 * w; };
  try {
    gd_solve(explode, alg(InnerVariant::GD, 10, 1.0), kNoLambda, ModelParams(vec({1.0})));
    FAIL("expected NonFiniteIterate");
  } catch (const NonFiniteIterate& e) {
    CHECK(e.step() == 2);
  }
  LossGradient nan_grad = [](const Vector& w, const Vector&, Vector& out) { out = w * std::nan(""); };
  CHECK_THROWS_AS(adam_solve(nan_grad, alg(InnerVariant::Adam, 3, 0.1), kNoLambda, ModelParams(vec({1.0}))),
                  NonFiniteIterate);
}

TEST_CASE("solver map is Lipschitz-continuous in lambda") {
  const LossGradient g = problems::synthetic_loss_gradient(3.0);
  const IterativeAlgorithm a = alg(InnerVariant::GD, 100, 0.1);
  const ModelParams w0(vec({0.0}));
  for (double lambda : {-1.0, 0.0, 1.0}) {
    const double base = gd_solve(g, a, HyperParams(vec({lambda})), w0)[0];
    auto ratio = [&](double d) { return std::abs(gd_solve(g, a, HyperParams(vec({lambda + d})), w0)[0] - base) / d; };
    const double C = ratio(1e-2);
    for (double d : {1e-3, 1e-4}) CHECK(ratio(d) <= 2.0 * C + 1e-6);
  }
}

TEST_CASE("initial_point rules") {
  IterativeAlgorithm a;
  CHECK(initial_point(a, 3, 0).values.isZero(0.0));
  a.init = InitRule::Gaussian;
  a.init_scale = 0.1;
  const ModelParams x = initial_point(a, 1000, 5);
  CHECK(x.values.norm() > 0.0);
  CHECK(initial_point(a, 1000, 5).values == x.values);
  CHECK(std::abs(std::sqrt(x.values.squaredNorm() / 1000) - 0.1) < 0.01);
  a.w0 = ModelParams(vec({7.0, 8.0}));
  CHECK(initial_point(a, 2, 5).values == vec({7.0, 8.0}));
  CHECK_THROWS(initial_point(a, 3, 5));
}

TEST_CASE("IterativeAlgorithm validation") {
  IterativeAlgorithm a;
  CHECK_NOTHROW(a.validate());
  a.lr = 0.0;
  CHECK_THROWS_AS(a.validate(), InvalidConfig);
  a.lr = 0.1;
  a.variant = InnerVariant::Adam;
  a.adam.beta1 = 1.0;
  CHECK_THROWS_AS(a.validate(), InvalidConfig);
}
