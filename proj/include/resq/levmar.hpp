#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <utility>

#include "resq/errors.hpp"

namespace resq::optim {

// Fills `residuals`; when `jacobian` is non-null, also fills d(residual)/d(param).
using ResidualFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd*)>;

struct LevMarOptions {
  int max_iterations = 200;
  double cost_tol = 1e-12;   // relative cost decrease below which we stop
  double step_tol = 1e-14;   // relative step size below which we stop
  double lambda0 = 1e-3;
  Eigen::VectorXd lower;     // empty = unbounded
  Eigen::VectorXd upper;
};

struct LevMarResult {
  Eigen::VectorXd params;
  double cost = 0.0;         // 0.5 * ||r||^2
  int iterations = 0;
  bool converged = false;
  Eigen::MatrixXd covariance;  // sigma^2 (J^T J)^-1 at the solution
};

inline Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& params,
                                        double step = 1e-7) {
  Eigen::VectorXd r0;
  fn(params, r0, nullptr);
  Eigen::MatrixXd jac(r0.size(), params.size());
  for (int j = 0; j < params.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(params[j]));
    Eigen::VectorXd p_plus = params, p_minus = params;
    p_plus[j] += h;
    p_minus[j] -= h;
    Eigen::VectorXd r_plus, r_minus;
    fn(p_plus, r_plus, nullptr);
    fn(p_minus, r_minus, nullptr);
    jac.col(j) = (r_plus - r_minus) / (2.0 * h);
  }
  return jac;
}

// Levenberg-Marquardt with Marquardt-Fletcher scaling (damping on diag(J^T J))
// and optional box constraints enforced by clamping trial steps.
inline LevMarResult levmar(const ResidualFn& fn, Eigen::VectorXd params,
                           const LevMarOptions& options = {}) {
  if (params.size() == 0) throw InvalidArgumentError("levmar: empty parameter vector");
  const int n = static_cast<int>(params.size());
  const bool bounded = options.lower.size() == n && options.upper.size() == n;
  if ((options.lower.size() != 0 || options.upper.size() != 0) && !bounded)
    throw InvalidArgumentError("levmar: bounds must both be empty or match parameter size");

  const auto clamp = [&](Eigen::VectorXd p) {
    if (bounded) p = p.cwiseMax(options.lower).cwiseMin(options.upper);
    return p;
  };
  params = clamp(std::move(params));

  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  fn(params, residuals, &jacobian);
  if (jacobian.rows() != residuals.size() || jacobian.cols() != n)
    throw InvalidArgumentError("levmar: jacobian shape mismatch");
  double cost = 0.5 * residuals.squaredNorm();

  LevMarResult result;
  result.params = params;
  result.cost = cost;

  double lambda = options.lambda0;
  bool jacobian_fresh = true;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    if (!jacobian_fresh) {
      fn(params, residuals, &jacobian);
      jacobian_fresh = true;
    }
    Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    const Eigen::VectorXd jtr = jacobian.transpose() * residuals;
    Eigen::VectorXd diag = jtj.diagonal();
    for (int j = 0; j < n; ++j)
      if (diag[j] <= 0.0) diag[j] = 1.0;  // degenerate column: fall back to undamped scale

    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * diag;
      const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      const Eigen::VectorXd trial = clamp(params + delta);
      const Eigen::VectorXd step = trial - params;
      if (step.norm() <= options.step_tol * (params.norm() + options.step_tol)) {
        result.converged = true;
        break;
      }
      Eigen::VectorXd trial_residuals;
      fn(trial, trial_residuals, nullptr);
      const double trial_cost = 0.5 * trial_residuals.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double decrease = (cost - trial_cost) / std::max(cost, 1e-300);
        params = trial;
        residuals = std::move(trial_residuals);
        cost = trial_cost;
        jacobian_fresh = false;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (decrease < options.cost_tol) result.converged = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e15) break;
    }
    result.params = params;
    result.cost = cost;
    if (result.converged) break;
    if (!stepped) {
      // No acceptable step even with heavy damping: local minimum.
      result.converged = true;
      break;
    }
  }

  // Covariance from the final Jacobian, for standard errors.
  fn(params, residuals, &jacobian);
  const int m = static_cast<int>(residuals.size());
  if (m > n) {
    const double sigma2 = residuals.squaredNorm() / static_cast<double>(m - n);
    Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    result.covariance =
        sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  } else {
    result.covariance = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  }
  result.params = params;
  result.cost = cost;
  return result;
}

}  // namespace resq::optim
