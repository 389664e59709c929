#include "resq/levmar.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using namespace resq;
using optim::LevMarOptions;
using optim::levmar;

TEST_SUITE_BEGIN("levmar");

namespace {

// y = a exp(b x) sampled without noise; analytic Jacobian.
optim::ResidualFn exponential_problem(const std::vector<double>& xs,
                                      const std::vector<double>& ys) {
  return [xs, ys](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    r.resize(n);
    if (jac) jac->resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::exp(p[1] * xs[i]);
      r[i] = p[0] * e - ys[i];
      if (jac) {
        (*jac)(i, 0) = e;
        (*jac)(i, 1) = p[0] * xs[i] * e;
      }
    }
  };
}

}  // namespace

TEST_CASE("recovers exponential parameters from clean data") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 25; ++i) {
    xs.push_back(0.1 * i);
    ys.push_back(2.5 * std::exp(-1.3 * 0.1 * i));
  }
  Eigen::VectorXd p0(2);
  p0 << 1.0, -0.5;
  const auto result = levmar(exponential_problem(xs, ys), p0);
  CHECK(result.converged);
  CHECK(result.params[0] == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(result.params[1] == doctest::Approx(-1.3).epsilon(1e-8));
  CHECK(result.cost < 1e-16);
}

TEST_CASE("numeric jacobian matches the analytic one") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(0.2 * i);
    ys.push_back(1.7 * std::exp(-0.8 * 0.2 * i));
  }
  const auto fn = exponential_problem(xs, ys);
  Eigen::VectorXd p(2);
  p << 1.4, -0.6;
  Eigen::VectorXd r;
  Eigen::MatrixXd analytic;
  fn(p, r, &analytic);
  const Eigen::MatrixXd numeric = optim::numeric_jacobian(fn, p);
  CHECK((numeric - analytic).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("box constraints clamp the solution to the feasible edge") {
  // Minimize (p0 - 3)^2 + (p1 + 1)^2 subject to p0 <= 2, p1 >= 0.
  auto fn = [](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(2);
    r[0] = p[0] - 3.0;
    r[1] = p[1] + 1.0;
    if (jac) *jac = Eigen::MatrixXd::Identity(2, 2);
  };
  LevMarOptions opts;
  opts.lower = Eigen::Vector2d(-10.0, 0.0);
  opts.upper = Eigen::Vector2d(2.0, 10.0);
  Eigen::VectorXd p0(2);
  p0 << 0.0, 5.0;
  const auto result = levmar(fn, p0, opts);
  CHECK(result.converged);
  CHECK(result.params[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(result.params[1] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("covariance scales like sigma^2 (J^T J)^-1 for a linear model") {
  // Straight line through points with known residual variance; the covariance
  // of the slope/intercept has the closed textbook form.
  std::vector<double> xs, ys;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    const double x = i / 10.0;
    xs.push_back(x);
    // Deterministic "noise": alternating +-0.1 keeps the test seed-free.
    ys.push_back(0.7 * x + 0.2 + ((i % 2 == 0) ? 0.1 : -0.1));
  }
  auto fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(n);
    if (jac) jac->resize(n, 2);
    for (int i = 0; i < n; ++i) {
      r[i] = p[0] * xs[i] + p[1] - ys[i];
      if (jac) {
        (*jac)(i, 0) = xs[i];
        (*jac)(i, 1) = 1.0;
      }
    }
  };
  Eigen::VectorXd p0(2);
  p0 << 0.0, 0.0;
  const auto result = levmar(fn, p0);
  CHECK(result.converged);

  double sxx = 0.0, sx = 0.0;
  for (double x : xs) {
    sxx += x * x;
    sx += x;
  }
  Eigen::Matrix2d jtj;
  jtj << sxx, sx, sx, static_cast<double>(n);
  const double sigma2 = 2.0 * result.cost / (n - 2);
  const Eigen::Matrix2d expected = sigma2 * jtj.inverse();
  CHECK((result.covariance - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("argument validation") {
  auto fn = [](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(1);
    r[0] = p[0];
    if (jac) *jac = Eigen::MatrixXd::Ones(1, 1);
  };
  CHECK_THROWS_AS(levmar(fn, Eigen::VectorXd()), InvalidArgumentError);

  LevMarOptions bad;
  bad.lower = Eigen::VectorXd::Zero(2);  // mismatched: one parameter, two bounds
  Eigen::VectorXd p0(1);
  p0 << 1.0;
  CHECK_THROWS_AS(levmar(fn, p0, bad), InvalidArgumentError);
}

TEST_SUITE_END();
