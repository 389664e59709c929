#include "resq/resonance_fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "resq/constants.hpp"
#include "resq/errors.hpp"
#include "resq/levmar.hpp"
#include "resq/units.hpp"

namespace resq {

namespace {

constexpr std::size_t kMinPoints = 8;

using cplx = std::complex<double>;

struct ModelParts {
  cplx baseline;
  cplx phase;  // e^{i phi}
  cplx denom;  // 1 + i q_l xi
  double amp;  // q_l cos(phi) / q_c
  double xi;
};

ModelParts model_parts(const Eigen::VectorXd& p, double f) {
  ModelParts m;
  m.baseline = cplx(p[0], p[1]);
  const double f_r = p[2], q_l = p[3], q_c = p[4], phi = p[5];
  m.phase = std::polar(1.0, phi);
  m.xi = f / f_r - f_r / f;
  m.denom = cplx(1.0, q_l * m.xi);
  m.amp = q_l * std::cos(phi) / q_c;
  return m;
}

cplx model_value(const ModelParts& m) {
  return m.baseline * (1.0 - m.amp * m.phase / m.denom);
}

Eigen::VectorXd pack(const DcmParams& p) {
  Eigen::VectorXd v(6);
  v << p.s_x, p.s_y, p.f_r, p.q_l, p.q_c_mag, p.phi;
  return v;
}

DcmParams unpack(const Eigen::VectorXd& v) {
  DcmParams p;
  p.s_x = v[0];
  p.s_y = v[1];
  p.f_r = v[2];
  p.q_l = v[3];
  p.q_c_mag = v[4];
  p.phi = v[5];
  return p;
}

optim::ResidualFn make_residual_fn(const S21Trace& trace) {
  return [&trace](const Eigen::VectorXd& p, Eigen::VectorXd& residuals,
                  Eigen::MatrixXd* jacobian) {
    const auto n = static_cast<Eigen::Index>(trace.frequency.size());
    residuals.resize(2 * n);
    if (jacobian) jacobian->resize(2 * n, 6);
    const double f_r = p[2], q_l = p[3], q_c = p[4], phi = p[5];
    const double tan_phi = std::tan(phi);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double f = trace.frequency[static_cast<std::size_t>(i)];
      const auto m = model_parts(p, f);
      const cplx value = model_value(m);
      const cplx diff = value - trace.s21[static_cast<std::size_t>(i)];
      residuals[2 * i] = diff.real();
      residuals[2 * i + 1] = diff.imag();
      if (!jacobian) continue;
      const cplx g = 1.0 - m.amp * m.phase / m.denom;
      const cplx b_ae = m.baseline * m.amp * m.phase;
      const double dxi_dfr = -f / (f_r * f_r) - 1.0 / f;
      const cplx d[6] = {
          g,
          cplx(0.0, 1.0) * g,
          b_ae * cplx(0.0, 1.0) * q_l * dxi_dfr / (m.denom * m.denom),
          -m.baseline * m.phase *
              ((m.amp / q_l) / m.denom - m.amp * cplx(0.0, m.xi) / (m.denom * m.denom)),
          b_ae / (q_c * m.denom),
          -b_ae * (cplx(0.0, 1.0) - tan_phi) / m.denom,
      };
      for (int j = 0; j < 6; ++j) {
        (*jacobian)(2 * i, j) = d[j].real();
        (*jacobian)(2 * i + 1, j) = d[j].imag();
      }
    }
  };
}

optim::LevMarOptions make_levmar_options(const S21Trace& trace, const FitOptions& options) {
  optim::LevMarOptions lm;
  lm.max_iterations = options.max_iterations;
  lm.cost_tol = options.tolerance;
  lm.lower.resize(6);
  lm.upper.resize(6);
  lm.lower << -1e6, -1e6, trace.frequency.front(), 1.0, 1.0, -1.5;
  lm.upper << 1e6, 1e6, trace.frequency.back(), 1e12, 1e12, 1.5;
  return lm;
}

ResonanceFit build_fit(const S21Trace& trace, const optim::LevMarResult& lm) {
  ResonanceFit fit;
  fit.params = unpack(lm.params);
  fit.iterations = lm.iterations;
  fit.converged = lm.converged;
  fit.rms_residual =
      std::sqrt(2.0 * lm.cost / static_cast<double>(trace.frequency.size()));
  DcmParams std_errs;
  Eigen::VectorXd diag = lm.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  std_errs.s_x = diag[0];
  std_errs.s_y = diag[1];
  std_errs.f_r = diag[2];
  std_errs.q_l = diag[3];
  std_errs.q_c_mag = diag[4];
  std_errs.phi = diag[5];
  fit.param_std = std_errs;
  fit.covariance.assign(lm.covariance.data(), lm.covariance.data() + 36);

  // The optimizer may legitimately settle at q_l >= q_c_mag (net external
  // gain exceeding internal loss is unphysical); report q_i as NaN there
  // rather than failing the whole fit.
  const double qi_inv = 1.0 / fit.params.q_l - 1.0 / fit.params.q_c_mag;
  if (qi_inv > 0.0) {
    fit.q_i = 1.0 / qi_inv;
    const double g_l = (fit.q_i / fit.params.q_l) * (fit.q_i / fit.params.q_l);
    const double g_c = -(fit.q_i / fit.params.q_c_mag) * (fit.q_i / fit.params.q_c_mag);
    const double var = g_l * g_l * lm.covariance(3, 3) + g_c * g_c * lm.covariance(4, 4) +
                       2.0 * g_l * g_c * lm.covariance(3, 4);
    fit.q_i_std = std::sqrt(std::max(var, 0.0));
  } else {
    fit.q_i = std::numeric_limits<double>::quiet_NaN();
    fit.q_i_std = std::numeric_limits<double>::quiet_NaN();
  }

  if (std::isfinite(trace.applied_power_dbm) && std::isfinite(trace.line_attenuation_db))
    fit.photon_number =
        photon_number(fit.params, trace.applied_power_dbm, trace.line_attenuation_db);
  return fit;
}

}  // namespace

void S21Trace::validate() const {
  if (frequency.size() != s21.size())
    throw InvalidArgumentError("trace: frequency and s21 lengths differ");
  if (frequency.size() < kMinPoints)
    throw InsufficientDataError("trace: need at least " + std::to_string(kMinPoints) +
                                " points");
  for (std::size_t i = 0; i < frequency.size(); ++i) {
    if (!std::isfinite(frequency[i]) || frequency[i] <= 0.0)
      throw InvalidArgumentError("trace: frequencies must be finite and positive");
    if (i > 0 && frequency[i] <= frequency[i - 1])
      throw InvalidArgumentError("trace: frequencies must be strictly increasing");
    if (!std::isfinite(s21[i].real()) || !std::isfinite(s21[i].imag()))
      throw InvalidArgumentError("trace: s21 values must be finite");
  }
}

void DcmParams::validate() const {
  if (!std::isfinite(s_x) || !std::isfinite(s_y) || std::abs(cplx(s_x, s_y)) <= 0.0)
    throw InvalidArgumentError("dcm: baseline must be finite and non-zero");
  if (!(f_r > 0.0)) throw InvalidArgumentError("dcm: f_r must be positive");
  if (!(q_l > 0.0)) throw InvalidArgumentError("dcm: q_l must be positive");
  if (!(q_c_mag > 0.0)) throw InvalidArgumentError("dcm: q_c_mag must be positive");
  if (!(std::abs(phi) < 0.5 * constants::pi))
    throw InvalidArgumentError("dcm: phi must lie in (-pi/2, pi/2)");
}

std::complex<double> evaluate_s21(const DcmParams& params, double frequency) {
  params.validate();
  if (!(frequency > 0.0)) throw InvalidArgumentError("s21: frequency must be positive");
  return model_value(model_parts(pack(params), frequency));
}

double qi_from_fit(double q_l, double q_c_mag) {
  if (!(q_l > 0.0) || !(q_c_mag > 0.0))
    throw InvalidArgumentError("qi: quality factors must be positive");
  const double qi_inv = 1.0 / q_l - 1.0 / q_c_mag;
  if (!(qi_inv > 0.0))
    throw DomainError("qi undefined: loaded q must be below the coupling q");
  return 1.0 / qi_inv;
}

double qi_from_fit(const DcmParams& params) {
  params.validate();
  return qi_from_fit(params.q_l, params.q_c_mag);
}

double photon_number(const DcmParams& params, double power_dbm, double attenuation_db) {
  params.validate();
  if (!(attenuation_db >= 0.0))
    throw InvalidArgumentError("photon number: attenuation must be non-negative");
  const double p_device = units::dbm_to_watts(power_dbm - attenuation_db);
  const double omega = 2.0 * constants::pi * params.f_r;
  return 2.0 * params.q_l * params.q_l * p_device /
         (constants::hbar * omega * omega * params.q_c_mag);
}

S21Trace synthesize_trace(const DcmParams& params, const std::vector<double>& frequency,
                          double noise_sigma, std::uint64_t seed) {
  params.validate();
  if (!(noise_sigma >= 0.0))
    throw InvalidArgumentError("synthesize: noise_sigma must be non-negative");
  S21Trace trace;
  trace.frequency = frequency;
  trace.s21.reserve(frequency.size());
  for (double f : frequency) trace.s21.push_back(evaluate_s21(params, f));
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Split the target complex RMS evenly across quadratures.
    const double scale = noise_sigma * std::abs(cplx(params.s_x, params.s_y)) / std::sqrt(2.0);
    for (auto& s : trace.s21) {
      const double g_re = gauss(rng);
      const double g_im = gauss(rng);
      s += scale * cplx(g_re, g_im);
    }
  }
  trace.validate();
  return trace;
}

S21Trace synthesize_trace(const DcmParams& params, int n_points, double span,
                          double noise_sigma, std::uint64_t seed) {
  params.validate();
  if (n_points < static_cast<int>(kMinPoints))
    throw InvalidArgumentError("synthesize: need at least " + std::to_string(kMinPoints) +
                               " points");
  if (!(span > 0.0) || !(params.f_r - 0.5 * span > 0.0))
    throw InvalidArgumentError("synthesize: span must be positive and below 2 f_r");
  const double f_start = params.f_r - 0.5 * span;
  const double f_stop = params.f_r + 0.5 * span;
  std::vector<double> frequency(static_cast<std::size_t>(n_points));
  const double step = (f_stop - f_start) / static_cast<double>(n_points - 1);
  for (int i = 0; i < n_points; ++i)
    frequency[static_cast<std::size_t>(i)] = f_start + step * i;
  frequency.back() = f_stop;
  return synthesize_trace(params, frequency, noise_sigma, seed);
}

DcmParams initial_guess(const S21Trace& trace) {
  trace.validate();
  const std::size_t n = trace.frequency.size();
  const std::size_t edge = std::max<std::size_t>(2, n / 20);

  cplx baseline = 0.0;
  for (std::size_t i = 0; i < edge; ++i) baseline += trace.s21[i] + trace.s21[n - 1 - i];
  baseline /= static_cast<double>(2 * edge);
  const double base_mag = std::abs(baseline);
  if (!(base_mag > 0.0)) throw FitInitError("trace baseline is zero");

  double noise_sq = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    noise_sq += std::norm(trace.s21[i] - baseline);
    noise_sq += std::norm(trace.s21[n - 1 - i] - baseline);
  }
  const double noise_est = std::sqrt(noise_sq / static_cast<double>(2 * edge));

  std::vector<double> depth(n);
  std::size_t i_dip = 0;
  for (std::size_t i = 0; i < n; ++i) {
    depth[i] = std::abs(trace.s21[i] - baseline);
    if (depth[i] > depth[i_dip]) i_dip = i;
  }
  const double dip = depth[i_dip];
  if (dip < std::max(5.0 * noise_est, 1e-3 * base_mag))
    throw FitInitError("no resonance dip above the noise floor");

  // Width at half the dip depth; |1/(1+i q_l xi)| = 1/2 at q_l|xi| = sqrt(3).
  const double half = 0.5 * dip;
  double f_left = trace.frequency.front();
  for (std::size_t i = i_dip; i-- > 0;) {
    if (depth[i] < half) {
      const double w = (half - depth[i]) / (depth[i + 1] - depth[i]);
      f_left = trace.frequency[i] + w * (trace.frequency[i + 1] - trace.frequency[i]);
      break;
    }
  }
  double f_right = trace.frequency.back();
  for (std::size_t i = i_dip + 1; i < n; ++i) {
    if (depth[i] < half) {
      const double w = (depth[i - 1] - half) / (depth[i - 1] - depth[i]);
      f_right = trace.frequency[i - 1] + w * (trace.frequency[i] - trace.frequency[i - 1]);
      break;
    }
  }
  const double f_r = trace.frequency[i_dip];
  double width = f_right - f_left;
  if (!(width > 0.0)) width = (trace.frequency.back() - trace.frequency.front()) / 10.0;
  const double q_l = std::clamp(std::sqrt(3.0) * f_r / width, 10.0, 1e9);

  // Least-squares circle through all points (the model sweeps a full circle).
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(static_cast<Eigen::Index>(i), 0) = 2.0 * trace.s21[i].real();
    a(static_cast<Eigen::Index>(i), 1) = 2.0 * trace.s21[i].imag();
    a(static_cast<Eigen::Index>(i), 2) = 1.0;
    b[static_cast<Eigen::Index>(i)] = std::norm(trace.s21[i]);
  }
  const Eigen::Vector3d sol = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  const cplx center(sol[0], sol[1]);
  const double radius = std::sqrt(std::max(sol[2] + std::norm(center), 1e-300));

  // Off resonance the model sits at the baseline; the center is displaced
  // from it by (a/2) e^{i phi} relative to the baseline direction.
  const cplx rel = 1.0 - center / baseline;
  double phi = std::arg(rel);
  phi = std::clamp(phi, -1.45, 1.45);
  const double amp = std::max(2.0 * radius / base_mag, 1e-12);
  const double q_c = std::clamp(q_l * std::cos(phi) / amp, 1.0, 1e12);

  DcmParams guess;
  guess.s_x = baseline.real();
  guess.s_y = baseline.imag();
  guess.f_r = f_r;
  guess.q_l = q_l;
  guess.q_c_mag = q_c;
  guess.phi = phi;
  guess.validate();
  return guess;
}

ResonanceFit fit_s21(const S21Trace& trace, const FitOptions& options) {
  DcmParams guess;
  if (options.initial) {
    trace.validate();
    options.initial->validate();
    guess = *options.initial;
  } else {
    guess = initial_guess(trace);
  }
  const auto fn = make_residual_fn(trace);
  const auto lm_options = make_levmar_options(trace, options);
  const auto lm = optim::levmar(fn, pack(guess), lm_options);
  if (!lm.converged) {
    std::vector<double> last(lm.params.data(), lm.params.data() + lm.params.size());
    throw NonConvergenceError("resonance fit hit the iteration limit", last);
  }
  ResonanceFit fit = build_fit(trace, lm);
  if (options.bootstrap)
    fit.q_i_std_bootstrap =
        bootstrap_qi_std(trace, fit, options.n_bootstrap, options.seed);
  return fit;
}

double bootstrap_qi_std(const S21Trace& trace, const ResonanceFit& fit, int n_replicas,
                        std::uint64_t seed) {
  trace.validate();
  if (n_replicas < 8)
    throw InvalidArgumentError("bootstrap: need at least 8 replicas");
  const std::size_t n = trace.frequency.size();
  std::vector<cplx> model(n), residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    model[i] = evaluate_s21(fit.params, trace.frequency[i]);
    residual[i] = trace.s21[i] - model[i];
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  auto lm_options = make_levmar_options(trace, FitOptions{});
  lm_options.max_iterations = 100;

  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(n_replicas));
  S21Trace replica = trace;
  for (int k = 0; k < n_replicas; ++k) {
    for (std::size_t i = 0; i < n; ++i) replica.s21[i] = model[i] + residual[pick(rng)];
    const auto fn = make_residual_fn(replica);
    const auto lm = optim::levmar(fn, pack(fit.params), lm_options);
    const DcmParams p = unpack(lm.params);
    const double qi_inv = 1.0 / p.q_l - 1.0 / p.q_c_mag;
    if (lm.converged && qi_inv > 0.0) samples.push_back(1.0 / qi_inv);
  }
  if (samples.size() < 8)
    throw NumericError("bootstrap: too few replicas produced a valid qi", 0.0);

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size() - 1);
  return std::sqrt(var);
}

}  // namespace resq
