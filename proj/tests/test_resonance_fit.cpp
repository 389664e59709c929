#include "resq/resonance_fit.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "resq/errors.hpp"

using namespace resq;

namespace {

DcmParams reference_params() {
  DcmParams p;
  p.s_x = 0.8;
  p.s_y = -0.3;
  p.f_r = 6e9;
  p.q_l = 2e5;
  p.q_c_mag = 3e5;
  p.phi = 0.2;
  return p;
}

S21Trace clean_trace(const DcmParams& p, int n = 401, double linewidths = 10.0) {
  return synthesize_trace(p, n, linewidths * p.f_r / p.q_l, 0.0, 1);
}

}  // namespace

TEST_SUITE_BEGIN("resonance_fit");

TEST_CASE("model evaluation at pinned points") {
  const auto p = reference_params();
  const auto at_fr = evaluate_s21(p, 6e9);
  CHECK(at_fr.real() == doctest::Approx(0.248775234035032).epsilon(1e-12));
  CHECK(at_fr.imag() == doctest::Approx(-0.211738791882018).epsilon(1e-12));

  // One half linewidth above resonance. xi = f/f_r - f_r/f cancels to ~5e-6
  // here, so the last ~2 digits of the reference depend on association order;
  // 1e-9 is the honest pin for this point.
  const auto off = evaluate_s21(p, 6000015000.0);
  CHECK(off.real() == doctest::Approx(0.56851787656164).epsilon(1e-9));
  CHECK(off.imag() == doctest::Approx(0.019743042204411).epsilon(1e-9));

  CHECK_THROWS_AS(evaluate_s21(p, -1.0), InvalidArgumentError);
}

TEST_CASE("internal quality factor arithmetic") {
  CHECK(qi_from_fit(1e5, 2e5) == doctest::Approx(2e5).epsilon(1e-12));
  CHECK(qi_from_fit(2e5, 3e5) == doctest::Approx(6e5).epsilon(1e-12));
  // Near-critical coupling blows the internal Q up by two orders.
  CHECK(qi_from_fit(9.9e4, 1e5) == doctest::Approx(9.9e6).epsilon(1e-10));

  // 1/qi + 1/qc recomposes 1/ql.
  const double qi = qi_from_fit(1.3e5, 4.1e5);
  CHECK(1.0 / qi + 1.0 / 4.1e5 == doctest::Approx(1.0 / 1.3e5).epsilon(1e-12));

  CHECK_THROWS_AS(qi_from_fit(2e5, 2e5), DomainError);
  CHECK_THROWS_AS(qi_from_fit(3e5, 1e5), DomainError);
  CHECK_THROWS_AS(qi_from_fit(0.0, 1e5), InvalidArgumentError);
  CHECK_THROWS_AS(qi_from_fit(1e5, -1.0), InvalidArgumentError);

  const auto p = reference_params();
  CHECK(qi_from_fit(p) == doctest::Approx(6e5).epsilon(1e-12));
}

TEST_CASE("photon number calibration") {
  const auto p = reference_params();
  CHECK(photon_number(p, -70.0, 70.0) == doctest::Approx(17.7922279375).epsilon(1e-9));
  // Ten times the power, ten times the photons.
  CHECK(photon_number(p, -60.0, 70.0) ==
        doctest::Approx(10.0 * photon_number(p, -70.0, 70.0)).epsilon(1e-12));
  // n scales with q_l^2 at fixed coupling.
  auto double_ql = p;
  double_ql.q_l *= 2.0;
  CHECK(photon_number(double_ql, -70.0, 70.0) ==
        doctest::Approx(4.0 * photon_number(p, -70.0, 70.0)).epsilon(1e-12));
  CHECK_THROWS_AS(photon_number(p, -70.0, -1.0), InvalidArgumentError);
}

TEST_CASE("synthesized traces are deterministic and sized as requested") {
  const auto p = reference_params();
  const auto a = synthesize_trace(p, 101, 3e5, 0.01, 42);
  const auto b = synthesize_trace(p, 101, 3e5, 0.01, 42);
  const auto c = synthesize_trace(p, 101, 3e5, 0.01, 43);
  REQUIRE(a.frequency.size() == 101);
  CHECK(a.frequency == b.frequency);
  CHECK(a.s21 == b.s21);
  CHECK(a.s21 != c.s21);

  CHECK(a.frequency.front() == doctest::Approx(6e9 - 1.5e5).epsilon(1e-12));
  CHECK(a.frequency.back() == doctest::Approx(6e9 + 1.5e5).epsilon(1e-12));
  const double step = a.frequency[1] - a.frequency[0];
  CHECK(step == doctest::Approx(3e5 / 100.0).epsilon(1e-9));

  CHECK_THROWS_AS(synthesize_trace(p, 7, 3e5, 0.0, 1), InvalidArgumentError);
  CHECK_THROWS_AS(synthesize_trace(p, 101, -1.0, 0.0, 1), InvalidArgumentError);
  CHECK_THROWS_AS(synthesize_trace(p, 101, 3e5, -0.1, 1), InvalidArgumentError);

  // Explicit-grid form.
  std::vector<double> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(6e9 - 1e5 + i * 3200.0);
  const auto d = synthesize_trace(p, grid, 0.0, 1);
  CHECK(d.frequency == grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(d.s21[i] - evaluate_s21(p, grid[i])) < 1e-15);
}

TEST_CASE("synthesized noise amplitude tracks the requested sigma") {
  const auto p = reference_params();
  const double sigma = 0.02;
  const auto trace = synthesize_trace(p, 4001, 6e5, sigma, 7);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < trace.frequency.size(); ++i)
    sum_sq += std::norm(trace.s21[i] - evaluate_s21(p, trace.frequency[i]));
  const double rms = std::sqrt(sum_sq / trace.frequency.size());
  const double expected = sigma * std::hypot(p.s_x, p.s_y);
  CHECK(rms == doctest::Approx(expected).epsilon(0.20));
}

TEST_CASE("noiseless fit recovers the generator parameters") {
  const auto truth = reference_params();
  const auto fit = fit_s21(clean_trace(truth));
  CHECK(fit.converged);
  CHECK(fit.params.f_r == doctest::Approx(truth.f_r).epsilon(1e-9));
  CHECK(fit.params.q_l == doctest::Approx(truth.q_l).epsilon(1e-6));
  CHECK(fit.params.q_c_mag == doctest::Approx(truth.q_c_mag).epsilon(1e-6));
  CHECK(fit.params.phi == doctest::Approx(truth.phi).epsilon(1e-6));
  CHECK(fit.params.s_x == doctest::Approx(truth.s_x).epsilon(1e-6));
  CHECK(fit.params.s_y == doctest::Approx(truth.s_y).epsilon(1e-6));
  CHECK(fit.q_i == doctest::Approx(6e5).epsilon(1e-5));
  CHECK(fit.rms_residual < 1e-10);
  CHECK(fit.covariance.size() == 36);
  // Without power metadata there is no photon number.
  CHECK(std::isnan(fit.photon_number));
}

TEST_CASE("roundtrip across random generator parameters") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    DcmParams truth;
    truth.q_l = std::pow(10.0, 4.0 + 2.0 * u(rng));          // 1e4 .. 1e6
    truth.q_c_mag = 5e4 * std::pow(10.0, u(rng));            // 5e4 .. 5e5
    truth.phi = -0.4 + 0.8 * u(rng);
    truth.f_r = 4e9 + 4e9 * u(rng);
    const double mag = 0.5 + 1.5 * u(rng);
    const double arg = -0.6 + 1.2 * u(rng);
    truth.s_x = mag * std::cos(arg);
    truth.s_y = mag * std::sin(arg);

    CAPTURE(k);
    CAPTURE(truth.q_l);
    CAPTURE(truth.q_c_mag);
    const auto fit = fit_s21(clean_trace(truth, 301));
    CHECK(fit.params.q_l == doctest::Approx(truth.q_l).epsilon(1e-5));
    CHECK(fit.params.q_c_mag == doctest::Approx(truth.q_c_mag).epsilon(1e-5));
    CHECK(fit.params.f_r == doctest::Approx(truth.f_r).epsilon(1e-5));
    CHECK(std::abs(fit.params.phi - truth.phi) < 1e-5);
    CHECK(std::abs(fit.params.s_x - truth.s_x) < 1e-5 * mag);
    CHECK(std::abs(fit.params.s_y - truth.s_y) < 1e-5 * mag);
  }
}

TEST_CASE("baseline-normalized model lies on the canonical circle") {
  // S21/B traces a circle of radius a/2 centred at 1 - (a/2) e^{i phi}.
  const auto p = reference_params();
  const auto trace = clean_trace(p, 801, 40.0);
  const std::complex<double> baseline(p.s_x, p.s_y);
  const double a = (p.q_l / p.q_c_mag) * std::cos(p.phi);
  const std::complex<double> centre =
      1.0 - 0.5 * a * std::exp(std::complex<double>(0.0, p.phi));
  double worst = 0.0;
  for (const auto& s : trace.s21)
    worst = std::max(worst, std::abs(std::abs(s / baseline - centre) - 0.5 * a));
  CHECK(worst <= 1e-9);
}

TEST_CASE("internal q is invariant under complex rescaling of the trace") {
  const auto truth = reference_params();
  auto trace = clean_trace(truth);
  const auto base = fit_s21(trace);

  const std::complex<double> scale = 0.37 * std::exp(std::complex<double>(0.0, 0.9));
  for (auto& s : trace.s21) s *= scale;
  const auto scaled = fit_s21(trace);
  CHECK(scaled.q_i == doctest::Approx(base.q_i).epsilon(1e-6));
  CHECK(scaled.params.q_l == doctest::Approx(base.params.q_l).epsilon(1e-6));
}

TEST_CASE("noisy fit reports uncertainties and residual scale") {
  const auto truth = reference_params();
  const double sigma = 0.01;
  const auto trace = synthesize_trace(truth, 501, 10.0 * truth.f_r / truth.q_l, sigma, 11);
  const auto fit = fit_s21(trace);
  CHECK(fit.converged);
  CHECK(fit.q_i == doctest::Approx(6e5).epsilon(0.05));
  CHECK(fit.param_std.q_l > 0.0);
  CHECK(fit.q_i_std > 0.0);
  for (int d = 0; d < 6; ++d) CHECK(fit.covariance[7 * d] >= 0.0);
  CHECK(fit.rms_residual ==
        doctest::Approx(sigma * std::hypot(truth.s_x, truth.s_y)).epsilon(0.2));
}

TEST_CASE("unphysical loaded q yields NaN internal q rather than a throw") {
  DcmParams p = reference_params();
  p.q_l = 3e5;
  p.q_c_mag = 1.2e5;
  p.phi = 0.0;
  // a = q_l/q_c > 1: a deeper-than-unity dip, still a valid model curve.
  const auto fit = fit_s21(clean_trace(p, 401, 20.0));
  CHECK(fit.params.q_l == doctest::Approx(3e5).epsilon(1e-4));
  CHECK(fit.params.q_c_mag == doctest::Approx(1.2e5).epsilon(1e-4));
  CHECK(std::isnan(fit.q_i));
  CHECK(std::isnan(fit.q_i_std));
}

TEST_CASE("flat traces cannot seed a fit") {
  S21Trace flat;
  for (int i = 0; i < 64; ++i) {
    flat.frequency.push_back(5e9 + i * 1e4);
    flat.s21.emplace_back(0.7, -0.1);
  }
  CHECK_THROWS_AS(fit_s21(flat), FitInitError);
}

TEST_CASE("caller-supplied initial parameters are honoured") {
  const auto truth = reference_params();
  const auto trace = clean_trace(truth);
  FitOptions options;
  options.initial = truth;
  const auto fit = fit_s21(trace, options);
  CHECK(fit.converged);
  CHECK(fit.params.q_l == doctest::Approx(truth.q_l).epsilon(1e-8));

  FitOptions bad;
  bad.initial = truth;
  bad.initial->q_l = -5.0;
  CHECK_THROWS_AS(fit_s21(trace, bad), InvalidArgumentError);
}

TEST_CASE("trace validation") {
  S21Trace t;
  t.frequency = {1e9, 2e9, 3e9, 4e9, 5e9, 6e9, 7e9};
  t.s21.assign(7, {1.0, 0.0});
  CHECK_THROWS_AS(t.validate(), InsufficientDataError);

  t.frequency = {1e9, 2e9, 3e9, 4e9, 5e9, 6e9, 7e9, 6.5e9};
  t.s21.assign(8, {1.0, 0.0});
  CHECK_THROWS_AS(t.validate(), InvalidArgumentError);

  t.frequency = {1e9, 2e9, 3e9, 4e9, 5e9, 6e9, 7e9, 8e9};
  t.s21.assign(7, {1.0, 0.0});
  CHECK_THROWS_AS(t.validate(), InvalidArgumentError);
}

TEST_CASE("bootstrap error bars are deterministic for a seed") {
  const auto truth = reference_params();
  const auto trace = synthesize_trace(truth, 201, 10.0 * truth.f_r / truth.q_l, 0.01, 3);
  const auto fit = fit_s21(trace);
  const double s1 = bootstrap_qi_std(trace, fit, 32, 99);
  const double s2 = bootstrap_qi_std(trace, fit, 32, 99);
  CHECK(s1 == s2);
  CHECK(s1 > 0.0);
  CHECK_THROWS_AS(bootstrap_qi_std(trace, fit, 4, 99), InvalidArgumentError);

  FitOptions options;
  options.bootstrap = true;
  options.n_bootstrap = 16;
  options.seed = 5;
  const auto with_bootstrap = fit_s21(trace, options);
  REQUIRE(with_bootstrap.q_i_std_bootstrap.has_value());
  CHECK(*with_bootstrap.q_i_std_bootstrap > 0.0);
}

TEST_CASE("power metadata on the trace flows into the photon number") {
  const auto truth = reference_params();
  auto trace = clean_trace(truth);
  trace.applied_power_dbm = -70.0;
  trace.line_attenuation_db = 70.0;
  const auto fit = fit_s21(trace);
  CHECK(fit.photon_number == doctest::Approx(17.7922279375).epsilon(1e-4));
}

TEST_SUITE_END();
