#include <cmath>
#include <memory>

#include "doctest.h"
#include "svlab/action_lab.hpp"

using namespace svlab;

namespace {

SdeParams params_with(double nu, double T, Drift drift) {
  SdeParams p;
  p.nu = nu;
  p.T = T;
  p.drift = std::move(drift);
  return p;
}

std::shared_ptr<const TimeDependentVelocity> frozen_tg(double nu, double T, int frames) {
  return std::make_shared<const TimeDependentVelocity>(TimeDependentVelocity::steady(
      taylor_green_velocity(nu, 0.0, 2), taylor_green_pressure(nu, 0.0, 2), nu, T, frames));
}

}  // namespace

TEST_CASE("action of a constant drift") {
  const auto ens = simulate_ito(params_with(0.1, 1.0, Drift::constant({1.0, 0.0})), 50, 16, 3);
  const auto per_path = action_per_path(ens);
  for (double s : per_path) CHECK(s == 0.5);
  const auto e = action(ens);
  CHECK(e.value == 0.5);
  CHECK(e.std_error == 0.0);
  CHECK(e.n == 50);
  CHECK(action_per_path(ens, 8)[0] == 0.25);
  CHECK(action_per_path(ens, 0)[0] == 0.0);
  CHECK_THROWS(action_per_path(ens, 17));
}

TEST_CASE("Taylor-Green action") {
  const double nu = 0.1;
  CHECK(taylor_green_action(nu, 1.0) == doctest::Approx((1.0 - std::exp(-0.4)) / 1.6).epsilon(1e-15));
  CHECK(taylor_green_action(nu, 1.0) == doctest::Approx(0.2060500).epsilon(1e-6));

  // Deterministic oracle: ½∫ E|u(T−t, g)|² dt for uniform g, by quadrature.
  const int n = 20000;
  double q = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = double(i) / n;
    const double energy = 2.0 * kinetic_energy(taylor_green_velocity(nu, 1.0 - t, 2));
    q += (i == 0 || i == n ? 0.5 : 1.0) * energy / n;
  }
  CHECK(0.5 * q == doctest::Approx(taylor_green_action(nu, 1.0)).epsilon(1e-9));

  const auto u = std::make_shared<const TimeDependentVelocity>(taylor_green(nu, 1.0, 200, 2));
  const auto ens = simulate_ito(params_with(nu, 1.0, Drift::velocity(u, TimeOrientation::reversed)), 4000, 100, 5);
  const auto e = action(ens);
  CHECK(std::abs(e.value - taylor_green_action(nu, 1.0)) <= 3.0 * e.std_error + 1e-3);
}

TEST_CASE("bridge action closed form") {
  for (int j = 3; j <= 8; ++j) {
    const double eps = std::ldexp(1.0, -j);
    const double inc = bridge_action(eps / 2) - bridge_action(eps);
    CHECK(inc == doctest::Approx(0.5 * (std::log(2.0) - eps / 2)).epsilon(1e-13));
  }
  // ½∫₀^{1−ε} t/(1−t) dt by quadrature.
  const double eps = 0.125;
  const int n = 200000;
  double q = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = (1.0 - eps) * i / n;
    q += (i == 0 || i == n ? 0.5 : 1.0) * t / (1.0 - t) * (1.0 - eps) / n;
  }
  CHECK(0.5 * q == doctest::Approx(bridge_action(eps)).epsilon(1e-9));
}

TEST_CASE("occupation measure") {
  const auto one = simulate_ito(params_with(0.1, 1.0, Drift::zero()), 1, 4, 1);
  const auto samples = occupation_measure(one);
  CHECK(samples.size() == 5);
  CHECK(samples.front().t == 0.0);
  CHECK(samples.back().t == 1.0);
  CHECK(samples.front().weight == 0.5);
  CHECK(samples[2].weight == 1.0);
  CHECK(samples.back().weight == 0.5);
  // Trapezoid weights integrate t exactly.
  const auto mean_t = occupation_mean(samples, [](const OccupationSample& s) { return s.t; });
  CHECK(mean_t.value == doctest::Approx(0.5).epsilon(1e-15));

  const double nu = 0.1;
  const auto u = std::make_shared<const TimeDependentVelocity>(taylor_green(nu, 1.0, 200, 2));
  const auto ens = simulate_ito(params_with(nu, 1.0, Drift::velocity(u, TimeOrientation::reversed)), 4000, 100, 5);
  const auto mu = occupation_measure(ens, 2);
  CHECK(mu.size() == ens.paths() * 51);
  for (const auto& s : mu) {
    CHECK(s.x.x >= 0.0);
    CHECK(s.x.x < kTwoPi);
  }
  const auto unit = occupation_mean(mu, [](const OccupationSample&) { return 1.0; });
  CHECK(unit.value == 1.0);
  CHECK(unit.std_error == 0.0);

  const auto dense = occupation_measure(ens);
  const auto energy = occupation_mean(dense, [](const OccupationSample& s) { return norm2(s.v); });
  const auto s = action(ens);
  CHECK(std::abs(energy.value - 2.0 * s.value / ens.horizon()) <= 3.0 * energy.std_error + 2e-3);
}

TEST_CASE("weak-form integrand and residuals") {
  const double nu = 0.1;
  const BasisIndexSet basis(3.0, 8, nu);
  const auto bank = test_bank(basis, 1.0);
  REQUIRE(bank.size() == 6);
  CHECK(bank.front().name == "A(1,0) x sin(pi t/T)");
  for (const auto& pair : bank) {
    CHECK(pair.w.is_divergence_free());
    CHECK(std::abs(pair.profile.alpha(0.0)) <= 1e-15);
    CHECK(std::abs(pair.profile.alpha(1.0)) <= 1e-15);
  }

  SUBCASE("zero drift gives an exact zero") {
    const auto ens = simulate_ito(params_with(nu, 1.0, Drift::zero()), 100, 20, 4);
    for (const auto& pair : bank) {
      const auto r = dpm_residual(occupation_measure(ens), pair, nu);
      CHECK(r.value == 0.0);
    }
  }
  SUBCASE("linear in w and in alpha") {
    const auto u = std::make_shared<const TimeDependentVelocity>(taylor_green(nu, 1.0, 100, 2));
    const auto ens = simulate_ito(params_with(nu, 1.0, Drift::velocity(u, TimeOrientation::reversed)), 200, 50, 4);
    const auto mu = occupation_measure(ens);
    TestPair sum = bank[0];
    sum.w = bank[0].w + bank[2].w;
    const double lhs = dpm_residual(mu, sum, nu).value;
    const double rhs = dpm_residual(mu, bank[0], nu).value + dpm_residual(mu, bank[2], nu).value;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    const double scaled = dpm_residual(mu, bank[1].scaled(-2.5), nu).value;
    CHECK(std::abs(scaled + 2.5 * dpm_residual(mu, bank[1], nu).value) <= 1e-12 * (1.0 + std::abs(scaled)));
    TestPair both = bank[0];
    const TimeProfile a = bank[0].profile;
    const TimeProfile b = bank[1].profile;
    both.profile.alpha = [a, b](double t) { return a.alpha(t) + b.alpha(t); };
    both.profile.alpha_prime = [a, b](double t) { return a.alpha_prime(t) + b.alpha_prime(t); };
    const double l = dpm_residual(mu, both, nu).value;
    const double r = dpm_residual(mu, bank[0], nu).value + dpm_residual(mu, bank[1], nu).value;
    CHECK(std::abs(l - r) <= 1e-12 * (1.0 + std::abs(l)));
  }
  SUBCASE("deterministic residual vanishes on Taylor-Green only") {
    const TimeDependentVelocity tg = taylor_green(nu, 1.0, 4000, 2);
    for (const auto& pair : bank) CHECK(std::abs(weak_ns_residual(tg, pair)) <= 1e-8);
    TestPair still = bank[0];
    still.profile = TimeProfile::zero(1.0);
    CHECK(weak_ns_residual(tg, still) == 0.0);
    const auto frozen = frozen_tg(nu, 1.0, 4000);
    double worst = 0.0;
    for (const auto& pair : bank) worst = std::max(worst, std::abs(weak_ns_residual(*frozen, pair)));
    CHECK(worst > 1e-3);
  }
  SUBCASE("stochastic and deterministic residuals agree") {
    const auto frozen = frozen_tg(nu, 1.0, 100);
    const auto ens =
        simulate_ito(params_with(nu, 1.0, Drift::velocity(frozen, TimeOrientation::forward)), 20000, 100, 12);
    const auto mu = occupation_measure(ens);
    for (const auto& pair : bank) {
      const auto r = dpm_residual(mu, pair, nu);
      CHECK(std::abs(r.value - weak_ns_residual(*frozen, pair)) <= 3.0 * r.std_error + 2e-3);
    }
  }
}
