#pragma once

#include <cmath>
#include <queue>
#include <vector>

namespace resq::quadrature {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
// Column layout: abscissa, Gauss weight (0 for Kronrod-only nodes), Kronrod weight.
inline constexpr double g7k15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class F>
void eval_panel(const F& f, double a, double b, double& value, double& error) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double ylo[8], yhi[8];
  ylo[0] = yhi[0] = f(mid);
  double g7 = g7k15[0][1] * ylo[0];
  double k15 = g7k15[0][2] * ylo[0];
  double resabs = g7k15[0][2] * std::fabs(ylo[0]);
  for (int i = 1; i < 8; ++i) {
    const double dx = half * g7k15[i][0];
    ylo[i] = f(mid - dx);
    yhi[i] = f(mid + dx);
    g7 += g7k15[i][1] * (ylo[i] + yhi[i]);
    k15 += g7k15[i][2] * (ylo[i] + yhi[i]);
    resabs += g7k15[i][2] * (std::fabs(ylo[i]) + std::fabs(yhi[i]));
  }

  // QUADPACK dqk15 error estimate: the raw |G7 - K15| difference is
  // sharpened against resasc, the variation of f about its panel mean, so
  // the estimate stays scale-invariant.
  const double mean = 0.5 * k15;
  double resasc = g7k15[0][2] * std::fabs(ylo[0] - mean);
  for (int i = 1; i < 8; ++i)
    resasc += g7k15[i][2] * (std::fabs(ylo[i] - mean) + std::fabs(yhi[i] - mean));
  resasc *= std::fabs(half);
  resabs *= std::fabs(half);

  value = k15 * half;
  error = std::fabs((k15 - g7) * half);
  if (resasc != 0.0 && error != 0.0) {
    const double scaled = 200.0 * error / resasc;
    error = resasc * std::min(1.0, scaled * std::sqrt(scaled));
  }
  constexpr double eps = 2.220446049250313e-16;
  if (resabs > 1e-290) error = std::max(error, 50.0 * eps * resabs);
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b]: the panel
// with the largest error estimate is bisected until the summed error falls
// below rel_tol * |integral| (or abs_tol). Integrands are expected to be
// finite on the closed interval; singular endpoints must be substituted
// away by the caller.
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 0.0,
                 int max_intervals = 4000) {
  Result res;
  if (a == b) {
    res.converged = true;
    return res;
  }

  std::priority_queue<detail::Interval> heap;
  detail::Interval first{a, b, 0.0, 0.0};
  detail::eval_panel(f, a, b, first.value, first.error);
  res.evaluations = 15;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);

  int n = 1;
  while (n < max_intervals) {
    if (total_err <= abs_tol || total_err <= rel_tol * std::fabs(total)) {
      res.converged = true;
      break;
    }
    detail::Interval worst = heap.top();
    heap.pop();

    const double mid = 0.5 * (worst.a + worst.b);
    detail::Interval left{worst.a, mid, 0.0, 0.0};
    detail::Interval right{mid, worst.b, 0.0, 0.0};
    detail::eval_panel(f, left.a, left.b, left.value, left.error);
    detail::eval_panel(f, right.a, right.b, right.value, right.error);
    res.evaluations += 30;

    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  if (!res.converged)
    res.converged = total_err <= abs_tol || total_err <= rel_tol * std::fabs(total);

  res.value = total;
  res.error_estimate = total_err;
  return res;
}

}  // namespace resq::quadrature
