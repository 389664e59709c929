#include "resq/sweep_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "resq/errors.hpp"
#include "resq/levmar.hpp"

namespace resq {

namespace {

struct DesignPoint {
  double d;   // L_bridge - L_trace
  double yp;  // qi_inv - L_trace
  double w;   // weight
  double x;
};

// Quasiparticle losses evaluated on the usable window: above t_min (the
// quasiparticle tail must be out of the noise) and below both critical
// temperatures.
std::vector<DesignPoint> design_points(const LossSweep& sweep, const SuperconductorParams& trace,
                                       const SuperconductorParams& bridge,
                                       const ParticipationFitOptions& options) {
  if (sweep.axis != SweepAxis::temperature)
    throw InvalidArgumentError("participation fit: sweep axis must be temperature");
  if (!(sweep.frequency > 0.0))
    throw InvalidArgumentError("participation fit: sweep frequency metadata required");
  const double t_max = std::min(trace.tc, bridge.tc);
  const bool weighted = options.use_sigma_weights && !sweep.sigma.empty();
  std::vector<DesignPoint> pts;
  for (std::size_t i = 0; i < sweep.x.size(); ++i) {
    const double t = sweep.x[i];
    if (t < options.t_min || t >= t_max) continue;
    const double l_t = quasiparticle_loss(trace, t, sweep.frequency, options.gap_model);
    const double l_b = quasiparticle_loss(bridge, t, sweep.frequency, options.gap_model);
    DesignPoint pt;
    pt.d = l_b - l_t;
    pt.yp = sweep.qi_inv[i] - l_t;
    pt.w = weighted ? 1.0 / (sweep.sigma[i] * sweep.sigma[i]) : 1.0;
    pt.x = t;
    pts.push_back(pt);
  }
  if (pts.size() < 3)
    throw InsufficientDataError("participation fit: fewer than 3 usable points in [" +
                                std::to_string(options.t_min) + " K, min Tc)");
  return pts;
}

double fit_cost(const std::vector<DesignPoint>& pts, double p, double q) {
  double c = 0.0;
  for (const auto& pt : pts) {
    const double r = pt.yp - p * pt.d - q;
    c += pt.w * r * r;
  }
  return c;
}

}  // namespace

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "temperature" || text == "t") return SweepAxis::temperature;
  if (text == "photon_number" || text == "n" || text == "power")
    return SweepAxis::photon_number;
  throw ParseError("unknown sweep axis: " + text);
}

std::string to_string(SweepAxis axis) {
  return axis == SweepAxis::temperature ? "temperature" : "photon_number";
}

void LossSweep::validate() const {
  if (x.size() != qi_inv.size())
    throw InvalidArgumentError("sweep: x and qi_inv lengths differ");
  if (x.size() < 2) throw InsufficientDataError("sweep: need at least 2 points");
  if (!sigma.empty() && sigma.size() != x.size())
    throw InvalidArgumentError("sweep: sigma length differs from x");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw InvalidArgumentError("sweep: x must be finite");
    if (i > 0 && x[i] <= x[i - 1])
      throw InvalidArgumentError("sweep: x must be strictly increasing");
    if (!std::isfinite(qi_inv[i])) throw InvalidArgumentError("sweep: qi_inv must be finite");
    if (!sigma.empty() && !(sigma[i] > 0.0 && std::isfinite(sigma[i])))
      throw InvalidArgumentError("sweep: sigma must be finite and positive");
  }
  if (!(frequency >= 0.0)) throw InvalidArgumentError("sweep: frequency must be non-negative");
  if (n_bridges < 0) throw InvalidArgumentError("sweep: n_bridges must be non-negative");
}

LossSweep delta_qi(const LossSweep& sweep, const LossSweep& baseline) {
  sweep.validate();
  baseline.validate();
  if (sweep.axis != baseline.axis)
    throw InvalidArgumentError("delta qi: sweeps use different axes");
  for (double v : sweep.qi_inv)
    if (!(v > 0.0)) throw InvalidArgumentError("delta qi: sweep losses must be positive");
  for (double v : baseline.qi_inv)
    if (!(v > 0.0)) throw InvalidArgumentError("delta qi: baseline losses must be positive");

  const bool out_sigma = !sweep.sigma.empty() || !baseline.sigma.empty();
  LossSweep out;
  out.axis = sweep.axis;
  out.frequency = sweep.frequency;
  out.n_bridges = sweep.n_bridges;
  out.label = sweep.label;
  for (std::size_t i = 0; i < sweep.x.size(); ++i) {
    const double xv = sweep.x[i];
    if (xv < baseline.x.front() || xv > baseline.x.back()) continue;
    auto hi = std::lower_bound(baseline.x.begin(), baseline.x.end(), xv);
    std::size_t k1 = static_cast<std::size_t>(hi - baseline.x.begin());
    if (k1 == 0) k1 = 1;
    const std::size_t k0 = k1 - 1;
    const double t = (xv - baseline.x[k0]) / (baseline.x[k1] - baseline.x[k0]);
    // Loss varies by orders of magnitude across a sweep; interpolate its log.
    const double log_base = (1.0 - t) * std::log10(baseline.qi_inv[k0]) +
                            t * std::log10(baseline.qi_inv[k1]);
    const double base_val = std::pow(10.0, log_base);
    out.x.push_back(xv);
    out.qi_inv.push_back(sweep.qi_inv[i] - base_val);
    if (out_sigma) {
      const double s_sweep = sweep.sigma.empty() ? 0.0 : sweep.sigma[i];
      const double s_base = baseline.sigma.empty()
                                ? 0.0
                                : (1.0 - t) * baseline.sigma[k0] + t * baseline.sigma[k1];
      out.sigma.push_back(std::hypot(s_sweep, s_base));
    }
  }
  if (out.x.empty())
    throw AlignmentError("delta qi: sweep and baseline ranges do not overlap");
  return out;
}

ParticipationFit fit_participation(const LossSweep& sweep, const SuperconductorParams& trace,
                                   const SuperconductorParams& bridge,
                                   const ParticipationFitOptions& options) {
  sweep.validate();
  trace.validate();
  bridge.validate();
  const auto pts = design_points(sweep, trace, bridge, options);

  double s_dd = 0.0, s_d = 0.0, s_w = 0.0, s_dy = 0.0, s_y = 0.0;
  for (const auto& pt : pts) {
    s_dd += pt.w * pt.d * pt.d;
    s_d += pt.w * pt.d;
    s_w += pt.w;
    s_dy += pt.w * pt.d * pt.yp;
    s_y += pt.w * pt.yp;
  }
  if (!(s_dd > 0.0))
    throw NumericError("participation fit: trace and bridge losses are indistinguishable", 0.0);

  // The box-constrained quadratic attains its minimum either at the interior
  // stationary point or on an edge; enumerate the clamped candidates.
  std::vector<std::pair<double, double>> candidates;
  const double det = s_dd * s_w - s_d * s_d;
  if (det > 1e-12 * s_dd * s_w)
    candidates.emplace_back((s_dy * s_w - s_d * s_y) / det, (s_dd * s_y - s_d * s_dy) / det);
  candidates.emplace_back(0.0, s_y / s_w);
  candidates.emplace_back(1.0, (s_y - s_d) / s_w);
  candidates.emplace_back(s_dy / s_dd, 0.0);

  double best_p = 0.0, best_q = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (auto [p, q] : candidates) {
    p = std::clamp(p, 0.0, 1.0);
    q = std::max(q, 0.0);
    const double c = fit_cost(pts, p, q);
    if (c < best_cost) {
      best_cost = c;
      best_p = p;
      best_q = q;
    }
  }

  ParticipationFit fit;
  fit.p = best_p;
  fit.q_other_inv = best_q;
  fit.n_points_used = pts.size();
  const double dof = static_cast<double>(pts.size()) - 2.0;
  const double sigma2 = best_cost / dof;
  if (det > 0.0) {
    fit.covariance = {sigma2 * s_w / det, -sigma2 * s_d / det,
                      -sigma2 * s_d / det, sigma2 * s_dd / det};
    fit.p_std = std::sqrt(std::max(fit.covariance[0], 0.0));
    fit.q_other_std = std::sqrt(std::max(fit.covariance[3], 0.0));
  }
  double rss = 0.0;
  for (const auto& pt : pts) {
    const double r = pt.yp - best_p * pt.d - best_q;
    rss += r * r;
  }
  fit.rms_residual = std::sqrt(rss / static_cast<double>(pts.size()));
  return fit;
}

SharedParticipationFit fit_participation_shared(const std::vector<LossSweep>& sweeps,
                                                const SuperconductorParams& trace,
                                                const SuperconductorParams& bridge,
                                                const ParticipationFitOptions& options) {
  if (sweeps.empty()) throw InvalidArgumentError("shared participation fit: no sweeps");
  trace.validate();
  bridge.validate();
  std::vector<std::vector<DesignPoint>> groups;
  groups.reserve(sweeps.size());
  for (const auto& sweep : sweeps) {
    sweep.validate();
    groups.push_back(design_points(sweep, trace, bridge, options));
  }
  const std::size_t n_sweeps = groups.size();

  std::vector<double> s_dd(n_sweeps, 0.0), s_d(n_sweeps, 0.0), s_dy(n_sweeps, 0.0);
  double s_w = 0.0, s_y = 0.0;
  std::size_t m_total = 0;
  for (std::size_t j = 0; j < n_sweeps; ++j) {
    for (const auto& pt : groups[j]) {
      s_dd[j] += pt.w * pt.d * pt.d;
      s_d[j] += pt.w * pt.d;
      s_dy[j] += pt.w * pt.d * pt.yp;
      s_w += pt.w;
      s_y += pt.w * pt.yp;
    }
    if (!(s_dd[j] > 0.0))
      throw NumericError("shared participation fit: degenerate loss difference", 0.0);
    m_total += groups[j].size();
  }

  // Coordinate descent on the convex box-constrained quadratic: each p_j and
  // the shared offset have closed-form clamped updates.
  std::vector<double> p(n_sweeps, 0.0);
  double q = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    double max_change = 0.0;
    double num = s_y;
    for (std::size_t j = 0; j < n_sweeps; ++j) num -= p[j] * s_d[j];
    const double q_new = std::max(num / s_w, 0.0);
    max_change = std::max(max_change, std::abs(q_new - q) / std::max(q_new, 1e-12));
    q = q_new;
    for (std::size_t j = 0; j < n_sweeps; ++j) {
      const double pj = std::clamp((s_dy[j] - q * s_d[j]) / s_dd[j], 0.0, 1.0);
      max_change = std::max(max_change, std::abs(pj - p[j]) / std::max(pj, 1e-12));
      p[j] = pj;
    }
    if (max_change < 1e-13) break;
  }

  SharedParticipationFit shared;
  shared.q_other_inv = q;

  double rss_w = 0.0, rss = 0.0;
  for (std::size_t j = 0; j < n_sweeps; ++j) {
    for (const auto& pt : groups[j]) {
      const double r = pt.yp - p[j] * pt.d - q;
      rss_w += pt.w * r * r;
      rss += r * r;
    }
  }
  shared.rms_residual = std::sqrt(rss / static_cast<double>(m_total));

  const double dof = static_cast<double>(m_total) - static_cast<double>(n_sweeps + 1);
  const double sigma2 = dof > 0.0 ? rss_w / dof : 0.0;
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_sweeps + 1),
                                                 static_cast<Eigen::Index>(n_sweeps + 1));
  for (std::size_t j = 0; j < n_sweeps; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    normal(jj, jj) = s_dd[j];
    normal(jj, static_cast<Eigen::Index>(n_sweeps)) = s_d[j];
    normal(static_cast<Eigen::Index>(n_sweeps), jj) = s_d[j];
  }
  normal(static_cast<Eigen::Index>(n_sweeps), static_cast<Eigen::Index>(n_sweeps)) = s_w;
  const Eigen::MatrixXd cov =
      sigma2 * normal.completeOrthogonalDecomposition().pseudoInverse();
  shared.q_other_std = std::sqrt(std::max(
      cov(static_cast<Eigen::Index>(n_sweeps), static_cast<Eigen::Index>(n_sweeps)), 0.0));

  for (std::size_t j = 0; j < n_sweeps; ++j) {
    ParticipationFit fit;
    fit.p = p[j];
    fit.q_other_inv = q;
    const auto jj = static_cast<Eigen::Index>(j);
    const auto qq = static_cast<Eigen::Index>(n_sweeps);
    fit.covariance = {cov(jj, jj), cov(jj, qq), cov(qq, jj), cov(qq, qq)};
    fit.p_std = std::sqrt(std::max(cov(jj, jj), 0.0));
    fit.q_other_std = shared.q_other_std;
    fit.n_points_used = groups[j].size();
    double rss_j = 0.0;
    for (const auto& pt : groups[j]) {
      const double r = pt.yp - p[j] * pt.d - q;
      rss_j += r * r;
    }
    fit.rms_residual = std::sqrt(rss_j / static_cast<double>(groups[j].size()));
    shared.fits.push_back(fit);
  }
  return shared;
}

PowerSweepFit fit_power_sweep(const LossSweep& sweep, const PowerFitOptions& options) {
  sweep.validate();
  if (sweep.axis != SweepAxis::photon_number)
    throw InvalidArgumentError("power sweep fit: axis must be photon_number");
  for (double v : sweep.x)
    if (!(v > 0.0)) throw InvalidArgumentError("power sweep fit: photon numbers must be positive");
  if (sweep.x.size() < 6)
    throw InsufficientDataError("power sweep fit: need at least 6 points");
  if (std::log10(sweep.x.back() / sweep.x.front()) < 4.0)
    throw InsufficientDataError("power sweep fit: sweep must span at least 4 decades");

  const bool weighted = options.use_sigma_weights && !sweep.sigma.empty();
  const std::size_t n = sweep.x.size();
  const auto fn = [&](const Eigen::VectorXd& prm, Eigen::VectorXd& residuals,
                      Eigen::MatrixXd* jacobian) {
    const double a = prm[0], n_c = prm[1], beta = prm[2], c = prm[3];
    residuals.resize(static_cast<Eigen::Index>(n));
    if (jacobian) jacobian->resize(static_cast<Eigen::Index>(n), 4);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = 1.0 + sweep.x[i] / n_c;
      const double decay = std::pow(u, -0.5 * beta);
      const double inv_sigma = weighted ? 1.0 / sweep.sigma[i] : 1.0;
      const auto ii = static_cast<Eigen::Index>(i);
      residuals[ii] = (a * decay + c - sweep.qi_inv[i]) * inv_sigma;
      if (!jacobian) continue;
      (*jacobian)(ii, 0) = decay * inv_sigma;
      (*jacobian)(ii, 1) =
          a * 0.5 * beta * sweep.x[i] / (n_c * n_c) * decay / u * inv_sigma;
      (*jacobian)(ii, 2) = -0.5 * std::log(u) * a * decay * inv_sigma;
      (*jacobian)(ii, 3) = inv_sigma;
    }
  };

  const double y_min = *std::min_element(sweep.qi_inv.begin(), sweep.qi_inv.end());
  const double y_max = *std::max_element(sweep.qi_inv.begin(), sweep.qi_inv.end());
  if (!(y_min > 0.0))
    throw InvalidArgumentError("power sweep fit: losses must be positive");
  Eigen::VectorXd p0(4);
  p0 << std::max(y_max - y_min, 0.1 * y_max), std::sqrt(sweep.x.front() * sweep.x.back()),
      1.0, 0.9 * y_min;

  optim::LevMarOptions lm_options;
  lm_options.max_iterations = options.max_iterations;
  lm_options.cost_tol = options.tolerance;
  lm_options.lower.resize(4);
  lm_options.upper.resize(4);
  lm_options.lower << 0.0, 1e-9, 1e-6, 0.0;
  lm_options.upper << 1.0, 1e15, 2.0, 1.0;
  const auto lm = optim::levmar(fn, p0, lm_options);
  if (!lm.converged) {
    std::vector<double> last(lm.params.data(), lm.params.data() + lm.params.size());
    throw NonConvergenceError("power sweep fit hit the iteration limit", last);
  }

  PowerSweepFit fit;
  fit.model.q_tls0_inv = lm.params[0];
  fit.model.n_c = lm.params[1];
  fit.model.beta = lm.params[2];
  fit.model.q_const_inv = lm.params[3];
  fit.model.validate();
  const Eigen::VectorXd diag = lm.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.model_std.q_tls0_inv = diag[0];
  fit.model_std.n_c = diag[1];
  fit.model_std.beta = diag[2];
  fit.model_std.q_const_inv = diag[3];
  fit.iterations = lm.iterations;
  fit.converged = lm.converged;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = power_dependent_loss(fit.model, sweep.x[i]) - sweep.qi_inv[i];
    rss += r * r;
  }
  fit.rms_residual = std::sqrt(rss / static_cast<double>(n));
  return fit;
}

LossSweep synthesize_temperature_sweep(const CompositeLossModel& model,
                                       const SuperconductorParams& trace,
                                       const SuperconductorParams& bridge,
                                       const std::vector<double>& temperatures, double frequency,
                                       double noise_rel, std::uint64_t seed, GapModel gap_model) {
  if (!(noise_rel >= 0.0))
    throw InvalidArgumentError("synthesize sweep: noise_rel must be non-negative");
  if (!(frequency > 0.0))
    throw InvalidArgumentError("synthesize sweep: frequency must be positive");
  LossSweep sweep;
  sweep.axis = SweepAxis::temperature;
  sweep.frequency = frequency;
  sweep.label = "synthetic";
  sweep.x = temperatures;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double t : temperatures) {
    const double y = composite_loss(model, t, frequency, trace, bridge, gap_model);
    double noisy = y;
    if (noise_rel > 0.0) {
      noisy = y * (1.0 + noise_rel * gauss(rng));
      noisy = std::max(noisy, 1e-3 * y);
      sweep.sigma.push_back(noise_rel * y);
    }
    sweep.qi_inv.push_back(noisy);
  }
  sweep.validate();
  return sweep;
}

LossSweep synthesize_power_sweep(const PowerLossModel& model,
                                 const std::vector<double>& photon_numbers, double noise_rel,
                                 std::uint64_t seed) {
  if (!(noise_rel >= 0.0))
    throw InvalidArgumentError("synthesize sweep: noise_rel must be non-negative");
  model.validate();
  LossSweep sweep;
  sweep.axis = SweepAxis::photon_number;
  sweep.label = "synthetic";
  sweep.x = photon_numbers;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double n : photon_numbers) {
    const double y = power_dependent_loss(model, n);
    double noisy = y;
    if (noise_rel > 0.0) {
      noisy = y * (1.0 + noise_rel * gauss(rng));
      noisy = std::max(noisy, 1e-3 * y);
      sweep.sigma.push_back(noise_rel * y);
    }
    sweep.qi_inv.push_back(noisy);
  }
  sweep.validate();
  return sweep;
}

}  // namespace resq
