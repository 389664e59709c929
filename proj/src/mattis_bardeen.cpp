#include "resq/mattis_bardeen.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "resq/constants.hpp"
#include "resq/errors.hpp"
#include "resq/quadrature.hpp"

namespace resq::mb {

namespace {

constexpr double kRelTol = 1e-10;  // target well below the 1e-8 contract
// Exact weak-coupling ratio pi / e^gamma; the self-consistent equation only
// closes at t = 1 with this value, not with the rounded 1.764.
constexpr double kExactBcsRatio = 1.763876988862046;

void check_point(const SuperconductorParams& params, double temperature, double frequency) {
  params.validate();
  if (!std::isfinite(temperature) || temperature <= 0)
    throw InvalidArgumentError("temperature must be positive and finite");
  if (!std::isfinite(frequency) || frequency <= 0)
    throw InvalidArgumentError("frequency must be positive and finite");
}

// ---- cache ----------------------------------------------------------------

struct Key {
  long long gap_q, tc_q, t_q, f_q;
  int model;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  size_t operator()(const Key& k) const {
    size_t h = 14695981039346656037ull;
    auto mix = [&h](long long v) {
      h ^= static_cast<size_t>(v);
      h *= 1099511628211ull;
    };
    mix(k.gap_q);
    mix(k.tc_q);
    mix(k.t_q);
    mix(k.f_q);
    mix(k.model);
    return h;
  }
};

long long quantize(double x) { return std::llround(std::log(x) * 1e6); }

std::atomic<bool> g_cache_enabled{true};
std::mutex g_cache_mutex;
std::unordered_map<Key, ComplexConductivityRatio, KeyHash>& cache() {
  static std::unordered_map<Key, ComplexConductivityRatio, KeyHash> c;
  return c;
}

// ---- gap ------------------------------------------------------------------

double gap_interpolation(double gap0, double tc, double temperature) {
  if (temperature >= tc) return 0.0;
  if (temperature <= 0) return gap0;
  return gap0 * std::tanh(1.74 * std::sqrt(tc / temperature - 1.0));
}

// RHS of the reduced gap equation: 2 * integral_0^inf du f(E/kT) with
// E = delta * cosh(u) in units of gap0 and kT = t / ratio.
double gap_equation_rhs(double delta, double t) {
  const double scale = delta * kExactBcsRatio / t;  // E/kT at u = 0
  // occupation is negligible once E/kT > 60
  const double cap = 60.0 / scale;
  if (cap <= 1.0) {
    // even the gap edge is frozen out; integrate the exponential tail anyway
    return 0.0;
  }
  const double umax = std::acosh(cap);
  auto integrand = [scale](double u) {
    const double x = scale * std::cosh(u);
    if (x > 700.0) return 0.0;
    return 1.0 / (1.0 + std::exp(x));
  };
  auto r = quadrature::integrate(integrand, 0.0, umax, 1e-12, 1e-300);
  return 2.0 * r.value;
}

}  // namespace

double fermi(double eps, double temperature) {
  if (!std::isfinite(eps) || !std::isfinite(temperature))
    throw InvalidArgumentError("fermi: non-finite input");
  if (temperature <= 0) throw InvalidArgumentError("fermi: temperature must be positive");
  const double x = eps / (constants::boltzmann * temperature);
  if (x > 700.0) return 0.0;
  if (x < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(x));
}

double reduced_gap_bcs(double t) {
  if (!std::isfinite(t) || t < 0) throw InvalidArgumentError("reduced_gap_bcs: bad t");
  if (t >= 1.0) return 0.0;
  if (t <= 0.03) return 1.0;  // suppression < 1e-20 here

  // ln(1/delta) = RHS(delta); bisect in log(delta). The bracket is
  // guaranteed: at delta -> 0 the residual tends to -ln(t) > 0, at
  // delta = 1 it is negative below t = 1.
  auto residual = [t](double delta) { return -std::log(delta) - gap_equation_rhs(delta, t); };
  double lo = 1e-12, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (residual(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

double gap_at_temperature(const SuperconductorParams& params, double temperature, GapModel model) {
  params.validate();
  if (!std::isfinite(temperature) || temperature < 0)
    throw InvalidArgumentError("gap_at_temperature: temperature must be non-negative");
  if (temperature >= params.tc) return 0.0;
  switch (model) {
    case GapModel::interpolation:
      return gap_interpolation(params.gap0, params.tc, temperature);
    case GapModel::self_consistent:
      return params.gap0 * reduced_gap_bcs(temperature / params.tc);
    case GapModel::constant_gap:
      return params.gap0;
  }
  return 0.0;
}

ComplexConductivityRatio conductivity_ratio(const SuperconductorParams& params,
                                            double temperature, double frequency, GapModel model) {
  check_point(params, temperature, frequency);

  ComplexConductivityRatio out;
  out.temperature = temperature;
  out.frequency = frequency;

  if (temperature >= params.tc) {  // normal state
    out.s1 = 1.0;
    out.s2 = 0.0;
    return out;
  }

  Key key{quantize(params.gap0), quantize(params.tc), quantize(temperature), quantize(frequency),
          static_cast<int>(model)};
  if (g_cache_enabled.load(std::memory_order_relaxed)) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = cache().find(key);
    if (it != cache().end()) {
      out.s1 = it->second.s1;
      out.s2 = it->second.s2;
      return out;
    }
  }

  const double gap = gap_at_temperature(params, temperature, model);
  const double hf = constants::planck * frequency;
  if (hf >= 2.0 * gap)
    throw DomainError("photon energy reaches the pair-breaking threshold (h f >= 2 gap(T)); "
                      "this regime is not modeled");
  const double kt = constants::boltzmann * temperature;

  // sigma1: substitute eps = gap * cosh(u) so that d eps / sqrt(eps^2 - gap^2)
  // becomes du, removing the inverse-square-root edge at eps = gap. The
  // Fermi-factor difference is below 1e-18 of its edge value past
  // eps = gap + 45 kB T, which sets the truncation.
  {
    const double eps_max = gap + 45.0 * kt;
    const double umax = std::acosh(eps_max / gap);
    auto integrand = [&](double u) {
      const double e1 = gap * std::cosh(u);
      const double e2 = e1 + hf;
      const double occ = fermi(e1, temperature) - fermi(e2, temperature);
      if (occ == 0.0) return 0.0;
      return occ * (e1 * e2 + gap * gap) / std::sqrt(e2 * e2 - gap * gap);
    };
    auto r = quadrature::integrate(integrand, 0.0, umax, kRelTol, 1e-300);
    if (!r.converged)
      throw NumericError("sigma1 quadrature did not converge",
                         r.error_estimate / std::max(std::fabs(r.value), 1e-300));
    out.s1 = 2.0 / hf * r.value;
  }

  // sigma2: limits [gap - hf, gap] carry inverse-square-root singularities at
  // both ends; eps = gap - hf sin^2(theta) absorbs both (the sin cos factor
  // from d eps cancels against the two singular roots exactly).
  {
    auto integrand = [&](double theta) {
      const double s = std::sin(theta);
      const double eps = gap - hf * s * s;
      const double e2 = eps + hf;
      const double occ = 1.0 - 2.0 * fermi(e2, temperature);
      return 2.0 * occ * (eps * e2 + gap * gap) /
             (hf * std::sqrt((gap + eps) * (e2 + gap)));
    };
    auto r = quadrature::integrate(integrand, 0.0, 0.5 * constants::pi, kRelTol, 1e-300);
    if (!r.converged)
      throw NumericError("sigma2 quadrature did not converge",
                         r.error_estimate / std::max(std::fabs(r.value), 1e-300));
    out.s2 = r.value;
  }

  if (g_cache_enabled.load(std::memory_order_relaxed)) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    cache().emplace(key, out);
  }
  return out;
}

double sigma1_ratio(const SuperconductorParams& params, double temperature, double frequency,
                    GapModel model) {
  return conductivity_ratio(params, temperature, frequency, model).s1;
}

double sigma2_ratio(const SuperconductorParams& params, double temperature, double frequency,
                    GapModel model) {
  return conductivity_ratio(params, temperature, frequency, model).s2;
}

double penetration_depth(const SuperconductorParams& params, double temperature, double frequency,
                         GapModel model) {
  check_point(params, temperature, frequency);
  if (temperature >= params.tc)
    throw DomainError("penetration depth undefined at or above tc (no superfluid response)");
  const double s2 = sigma2_ratio(params, temperature, frequency, model) * params.sigma_n;
  if (s2 <= 0) throw DomainError("sigma2 vanished; no superfluid response");
  return 1.0 / std::sqrt(2.0 * constants::pi * constants::mu0 * frequency * s2);
}

double surface_resistance(const SuperconductorParams& params, double temperature, double frequency,
                          GapModel model) {
  const auto c = conductivity_ratio(params, temperature, frequency, model);
  if (temperature >= params.tc || c.s2 <= 0)
    throw DomainError("surface resistance model requires T < tc");
  const double lambda = 1.0 / std::sqrt(2.0 * constants::pi * constants::mu0 * frequency *
                                        c.s2 * params.sigma_n);
  return 2.0 * constants::pi * frequency * constants::mu0 * lambda * c.s1 / (2.0 * c.s2);
}

double kinetic_inductance(const SuperconductorParams& params, double temperature, double frequency,
                          GapModel model) {
  return constants::mu0 * penetration_depth(params, temperature, frequency, model);
}

void set_cache_enabled(bool enabled) { g_cache_enabled.store(enabled); }

void clear_cache() {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  cache().clear();
}

}  // namespace resq::mb
