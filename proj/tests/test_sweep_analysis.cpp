#include "resq/sweep_analysis.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "resq/errors.hpp"

using namespace resq;

namespace {

const SuperconductorParams& al() { return preset_al(); }
const SuperconductorParams& ta() { return preset_ta(); }

std::vector<double> temperature_grid(int n = 20, double lo = 0.4, double hi = 1.15) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = lo + (hi - lo) * i / (n - 1);
  return t;
}

std::vector<double> photon_grid() {
  std::vector<double> n;
  for (double v = 1.0; v <= 1.001e8; v *= std::sqrt(10.0)) n.push_back(v);
  return n;
}

}  // namespace

TEST_SUITE_BEGIN("sweep_analysis");

TEST_CASE("sweep axis names round-trip") {
  CHECK(parse_sweep_axis(to_string(SweepAxis::temperature)) == SweepAxis::temperature);
  CHECK(parse_sweep_axis(to_string(SweepAxis::photon_number)) == SweepAxis::photon_number);
  CHECK_THROWS_AS(parse_sweep_axis("voltage"), ParseError);
}

TEST_CASE("sweep validation") {
  LossSweep s;
  s.x = {0.4, 0.5};
  s.qi_inv = {1e-6};
  CHECK_THROWS_AS(s.validate(), InvalidArgumentError);

  s.qi_inv = {1e-6, 2e-6};
  CHECK_NOTHROW(s.validate());

  s.x = {0.5, 0.4};  // not increasing
  CHECK_THROWS_AS(s.validate(), InvalidArgumentError);

  s.x = {0.4};
  s.qi_inv = {1e-6};
  CHECK_THROWS_AS(s.validate(), InsufficientDataError);

  s.x = {0.4, 0.5};
  s.qi_inv = {1e-6, 2e-6};
  s.sigma = {1e-8, -1e-8};
  CHECK_THROWS_AS(s.validate(), InvalidArgumentError);
}

TEST_CASE("baseline subtraction on matching grids is exact") {
  CompositeLossModel with_bridges{0.03, 1e-6};
  CompositeLossModel bare{0.0, 1e-6};
  const auto grid = temperature_grid();
  const auto sweep = synthesize_temperature_sweep(with_bridges, ta(), al(), grid, 6.15e9, 0.0, 1);
  const auto baseline = synthesize_temperature_sweep(bare, ta(), al(), grid, 6.15e9, 0.0, 1);

  const auto delta = delta_qi(sweep, baseline);
  REQUIRE(delta.x.size() == grid.size());
  for (std::size_t i = 0; i < delta.x.size(); ++i) {
    // What remains is exactly the bridge-minus-trace contribution.
    const double expected =
        0.03 * (quasiparticle_loss(al(), grid[i], 6.15e9) -
                quasiparticle_loss(ta(), grid[i], 6.15e9));
    CHECK(delta.qi_inv[i] == doctest::Approx(expected).epsilon(1e-9));
  }
  CHECK(delta.frequency == sweep.frequency);
}

TEST_CASE("baseline subtraction requires overlapping ranges") {
  LossSweep a, b;
  a.x = {0.4, 0.5, 0.6};
  a.qi_inv = {1e-6, 2e-6, 3e-6};
  b.x = {0.8, 0.9};
  b.qi_inv = {1e-6, 2e-6};
  CHECK_THROWS_AS(delta_qi(a, b), AlignmentError);

  b.axis = SweepAxis::photon_number;
  CHECK_THROWS_AS(delta_qi(a, b), InvalidArgumentError);

  LossSweep c = a;
  c.qi_inv[1] = -1e-6;
  b.axis = SweepAxis::temperature;
  b.x = {0.35, 0.65};
  CHECK_THROWS_AS(delta_qi(c, b), InvalidArgumentError);
}

TEST_CASE("participation fit recovers a noiseless generator exactly") {
  CompositeLossModel truth{0.042, 2e-6};
  const auto sweep =
      synthesize_temperature_sweep(truth, ta(), al(), temperature_grid(), 6.15e9, 0.0, 1);
  const auto fit = fit_participation(sweep, ta(), al());
  CHECK(fit.p == doctest::Approx(0.042).epsilon(1e-9));
  CHECK(fit.q_other_inv == doctest::Approx(2e-6).epsilon(1e-9));
  CHECK(fit.rms_residual < 1e-15);
  CHECK(fit.n_points_used == 20);
}

TEST_CASE("participation fit within tolerance under measurement noise") {
  CompositeLossModel truth{0.042, 2e-6};
  const auto sweep =
      synthesize_temperature_sweep(truth, ta(), al(), temperature_grid(), 6.15e9, 0.02, 7);
  const auto fit = fit_participation(sweep, ta(), al());
  CHECK(fit.p == doctest::Approx(0.042).epsilon(0.05));
  CHECK(fit.q_other_inv == doctest::Approx(2e-6).epsilon(0.10));
  CHECK(fit.p_std > 0.0);
  CHECK(fit.q_other_std > 0.0);
  // Covariance layout: diagonal squares of the reported deviations.
  CHECK(fit.covariance[0] == doctest::Approx(fit.p_std * fit.p_std).epsilon(1e-12));
  CHECK(fit.covariance[3] ==
        doctest::Approx(fit.q_other_std * fit.q_other_std).epsilon(1e-12));
  CHECK(fit.covariance[1] == fit.covariance[2]);
  // Residuals stay at the scale of the injected noise.
  double typical = 0.0;
  for (double s : sweep.sigma) typical = std::max(typical, s);
  CHECK(fit.rms_residual <= 2.0 * typical);
}

TEST_CASE("bridge-free devices fit to zero participation") {
  CompositeLossModel truth{0.0, 2e-6};
  const auto clean =
      synthesize_temperature_sweep(truth, ta(), al(), temperature_grid(), 6.15e9, 0.0, 1);
  const auto exact = fit_participation(clean, ta(), al());
  CHECK(exact.p <= 1e-9);

  const auto noisy =
      synthesize_temperature_sweep(truth, ta(), al(), temperature_grid(), 6.15e9, 0.02, 3);
  const auto fit = fit_participation(noisy, ta(), al());
  CHECK(fit.p >= 0.0);  // box constraint holds exactly
  CHECK(fit.p <= 0.001);
}

TEST_CASE("constant loss offsets move only the background term") {
  CompositeLossModel truth{0.02, 1e-6};
  auto sweep =
      synthesize_temperature_sweep(truth, ta(), al(), temperature_grid(), 6.15e9, 0.01, 5);
  const auto before = fit_participation(sweep, ta(), al());
  const double c = 4e-6;
  for (auto& v : sweep.qi_inv) v += c;
  const auto after = fit_participation(sweep, ta(), al());
  CHECK(std::abs(after.p - before.p) < 1e-6);
  CHECK(after.q_other_inv == doctest::Approx(before.q_other_inv + c).epsilon(1e-6));
}

TEST_CASE("points below the usable temperature floor are dropped") {
  CompositeLossModel truth{0.03, 1e-6};
  std::vector<double> grid = {0.15, 0.25, 0.35};
  auto warm = temperature_grid(12, 0.45, 1.1);
  grid.insert(grid.end(), warm.begin(), warm.end());
  const auto sweep = synthesize_temperature_sweep(truth, ta(), al(), grid, 6.15e9, 0.0, 1);
  const auto fit = fit_participation(sweep, ta(), al());
  CHECK(fit.n_points_used == 12);
  CHECK(fit.p == doctest::Approx(0.03).epsilon(1e-6));

  // Too few usable points once the floor is applied.
  std::vector<double> cold = {0.1, 0.2, 0.3, 0.45, 0.6};
  const auto short_sweep =
      synthesize_temperature_sweep(truth, ta(), al(), cold, 6.15e9, 0.0, 1);
  CHECK_THROWS_AS(fit_participation(short_sweep, ta(), al()), InsufficientDataError);

  LossSweep wrong_axis;
  wrong_axis.axis = SweepAxis::photon_number;
  wrong_axis.x = {1.0, 10.0, 100.0, 1000.0};
  wrong_axis.qi_inv = {1e-6, 1e-6, 1e-6, 1e-6};
  wrong_axis.frequency = 6e9;
  CHECK_THROWS_AS(fit_participation(wrong_axis, ta(), al()), InvalidArgumentError);
}

TEST_CASE("sweeps of one chip can share the background loss") {
  const auto grid = temperature_grid();
  std::vector<LossSweep> sweeps;
  const double q_other = 1.5e-6;
  const std::vector<double> ps = {0.0085, 0.02, 0.042};
  for (std::size_t i = 0; i < ps.size(); ++i)
    sweeps.push_back(synthesize_temperature_sweep(CompositeLossModel{ps[i], q_other}, ta(), al(),
                                                  grid, 6.15e9, 0.01, 11 + i));
  const auto shared = fit_participation_shared(sweeps, ta(), al());
  REQUIRE(shared.fits.size() == 3);
  CHECK(shared.q_other_inv == doctest::Approx(q_other).epsilon(0.10));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(shared.fits[i].p == doctest::Approx(ps[i]).epsilon(0.05));
    CHECK(shared.fits[i].q_other_inv == shared.q_other_inv);
  }
  CHECK(shared.fits[0].p < shared.fits[1].p);
  CHECK(shared.fits[1].p < shared.fits[2].p);

  CHECK_THROWS_AS(fit_participation_shared({}, ta(), al()), InvalidArgumentError);
}

TEST_CASE("synthetic sweeps are deterministic and sigma-tagged") {
  CompositeLossModel m{0.02, 1e-6};
  const auto grid = temperature_grid();
  const auto a = synthesize_temperature_sweep(m, ta(), al(), grid, 6.15e9, 0.02, 9);
  const auto b = synthesize_temperature_sweep(m, ta(), al(), grid, 6.15e9, 0.02, 9);
  const auto c = synthesize_temperature_sweep(m, ta(), al(), grid, 6.15e9, 0.02, 10);
  CHECK(a.qi_inv == b.qi_inv);
  CHECK(a.qi_inv != c.qi_inv);
  REQUIRE(a.sigma.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = composite_loss(m, grid[i], 6.15e9, ta(), al());
    CHECK(a.sigma[i] == doctest::Approx(0.02 * y).epsilon(1e-12));
  }
}

TEST_CASE("power sweep fit round-trips its generator") {
  PowerLossModel truth{2e-6, 50.0, 1.2, 5e-7};
  const auto clean = synthesize_power_sweep(truth, photon_grid(), 0.0, 1);
  const auto fit = fit_power_sweep(clean);
  CHECK(fit.converged);
  CHECK(fit.model.q_tls0_inv == doctest::Approx(truth.q_tls0_inv).epsilon(1e-6));
  CHECK(fit.model.n_c == doctest::Approx(truth.n_c).epsilon(1e-4));
  CHECK(fit.model.beta == doctest::Approx(truth.beta).epsilon(1e-4));
  CHECK(fit.model.q_const_inv == doctest::Approx(truth.q_const_inv).epsilon(1e-6));

  const auto noisy = synthesize_power_sweep(truth, photon_grid(), 0.01, 21);
  const auto nfit = fit_power_sweep(noisy);
  CHECK(nfit.converged);
  CHECK(nfit.model.q_tls0_inv == doctest::Approx(truth.q_tls0_inv).epsilon(0.10));
  CHECK(nfit.model.q_const_inv == doctest::Approx(truth.q_const_inv).epsilon(0.10));
  CHECK(nfit.model_std.q_const_inv > 0.0);
}

TEST_CASE("a vanishing power-independent floor is recovered as zero") {
  PowerLossModel truth{2e-6, 30.0, 1.0, 0.0};
  const auto clean = synthesize_power_sweep(truth, photon_grid(), 0.0, 1);
  const auto fit = fit_power_sweep(clean);
  CHECK(fit.model.q_const_inv <= 1e-8);
}

TEST_CASE("power sweep fit rejects unusable inputs") {
  PowerLossModel m{2e-6, 50.0, 1.2, 5e-7};
  // Under four decades of span.
  std::vector<double> narrow;
  for (double v = 10.0; v <= 1.001e13; v *= 10.0) {
    narrow.push_back(v);
    if (narrow.size() == 6) break;
  }
  narrow = {10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0};
  const auto sweep = synthesize_power_sweep(m, narrow, 0.0, 1);
  CHECK_THROWS_AS(fit_power_sweep(sweep), InsufficientDataError);

  LossSweep wrong_axis = synthesize_power_sweep(m, photon_grid(), 0.0, 1);
  wrong_axis.axis = SweepAxis::temperature;
  CHECK_THROWS_AS(fit_power_sweep(wrong_axis), InvalidArgumentError);
}

TEST_SUITE_END();
