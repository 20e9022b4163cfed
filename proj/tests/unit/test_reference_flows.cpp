#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "svlab/reference_flows.hpp"
#include "svlab/torus_fields.hpp"

using namespace svlab;

namespace {

double l2_distance(const FourierVectorField& a, const FourierVectorField& b) {
  const FourierVectorField d = a - b;
  return std::sqrt(l2_inner(d, d));
}

double max_scalar_diff(const FourierScalarField& a, const FourierScalarField& b) {
  const int K = std::min(a.truncation(), b.truncation());
  double m = std::abs(a.mean() - b.mean());
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) m = std::max(m, std::abs(a.coeff({k1, k2}) - b.coeff({k1, k2})));
  }
  return m;
}

FourierVectorField solve_fixed_steps(const FourierVectorField& u0, double nu, double T, int steps) {
  const NsStepper stepper(u0.truncation(), nu);
  FourierVectorField u = u0;
  for (int i = 0; i < steps; ++i) u = stepper.step(u, T / steps);
  return u;
}

}  // namespace

TEST_CASE("Taylor-Green closed form") {
  const FourierVectorField u0 = taylor_green_velocity(0.1, 0.0, 4);
  const Vec2 v = u0.evaluate({0.0, kPi / 2});
  CHECK(v.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(v.y) <= 1e-15);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  for (double t : {0.0, 0.3, 1.7}) {
    const FourierVectorField u = taylor_green_velocity(0.1, t, 4);
    const FourierScalarField p = taylor_green_pressure(0.1, t, 4);
    CHECK(u.is_divergence_free());
    for (int i = 0; i < 10; ++i) {
      const Vec2 x{unif(rng), unif(rng)};
      const double e = std::exp(-0.2 * t);
      const Vec2 ref{e * std::cos(x.x) * std::sin(x.y), -e * std::sin(x.x) * std::cos(x.y)};
      CHECK(norm(u.evaluate(x) - ref) <= 1e-15);
      CHECK(std::abs(u.divergence(x)) <= 1e-15);
      const double pref = -0.25 * e * e * (std::cos(2 * x.x) + std::cos(2 * x.y));
      CHECK(std::abs(p.evaluate(x) - pref) <= 1e-15);
    }
  }
  CHECK_THROWS(taylor_green_velocity(0.1, 0.0, 1));
}

TEST_CASE("Taylor-Green has a vanishing Navier-Stokes residual") {
  const double nu = 0.1;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const FourierVectorField u = taylor_green_velocity(nu, t, 4);
    const FourierVectorField dudt = (-2.0 * nu) * u;
    CHECK(ns_residual(u, dudt, taylor_green_pressure(nu, t, 4), nu) <= 1e-10);
  }
  // A wrong pressure is detected.
  const FourierVectorField u = taylor_green_velocity(nu, 0.5, 4);
  CHECK(ns_residual(u, (-2.0 * nu) * u, FourierScalarField(4), nu) > 1e-2);
}

TEST_CASE("spectral solver tracks Taylor-Green") {
  const double nu = 0.1;
  const FourierVectorField u0 = taylor_green_velocity(nu, 0.0, 16);
  const FourierVectorField uT = solve_fixed_steps(u0, nu, 0.5, 500);
  CHECK(l2_distance(uT, taylor_green_velocity(nu, 0.5, 16)) <= 1e-6);
}

TEST_CASE("solver error contracts at fourth order") {
  const double nu = 0.1;
  const double T = 2.0;
  const FourierVectorField u0 = taylor_green_velocity(nu, 0.0, 4);
  const FourierVectorField exact = taylor_green_velocity(nu, T, 4);
  double prev = 0.0;
  for (int steps : {4, 8, 16}) {
    const double err = l2_distance(solve_fixed_steps(u0, nu, T, steps), exact);
    if (prev > 0.0) CHECK(prev / err >= 12.0);
    prev = err;
  }
}

TEST_CASE("solver steps preserve structure") {
  SUBCASE("rest state") {
    const FourierVectorField z(4);
    CHECK(ns_step(z, 0.1, 0.01) == z);
  }
  SUBCASE("divergence-free and energy non-increasing") {
    std::mt19937_64 rng(3);
    FourierVectorField u = random_divergence_free(6, rng);
    u.set_mean({});
    u *= 0.3;
    const NsStepper stepper(6, 0.05);
    double e = kinetic_energy(u);
    for (int i = 0; i < 50; ++i) {
      u = stepper.step(u, 0.01);
      CHECK(u.is_divergence_free(1e-12));
      const double e1 = kinetic_energy(u);
      CHECK(e1 <= e * (1.0 + 1e-14));
      e = e1;
    }
  }
  SUBCASE("blow-up is signalled") {
    FourierVectorField u = taylor_green_velocity(0.1, 0.0, 4);
    u *= 1e300;
    CHECK_THROWS(ns_step(u, 0.1, 1.0));
  }
}

TEST_CASE("pressure from velocity") {
  const FourierScalarField p = pressure_from_velocity(taylor_green_velocity(0.1, 0.0, 4));
  CHECK(max_scalar_diff(p, taylor_green_pressure(0.1, 0.0, 4)) <= 1e-15);

  const BasisIndexSet basis(3.0, 4, 0.1);
  const FourierScalarField single = pressure_from_velocity(basis_field({2, 1}, BasisKind::cos, basis));
  CHECK(max_scalar_diff(single, FourierScalarField(4)) <= 1e-15);

  CHECK(pressure_from_velocity(FourierVectorField(3)) == FourierScalarField(3));
}

TEST_CASE("pressure Hessian bound") {
  const double nu = 0.1;
  const FourierScalarField p0 = taylor_green_pressure(nu, 0.0, 4);
  CHECK(hessian_bound(p0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hessian_bound(FourierScalarField(4)) == 0.0);
  const double t = 0.7;
  CHECK(hessian_bound(taylor_green_pressure(nu, t, 4)) ==
        doctest::Approx(std::exp(-4.0 * nu * t)).epsilon(1e-14));

  FourierScalarField shifted = p0;
  shifted.set_mean(3.5);
  CHECK(hessian_bound(shifted) == hessian_bound(p0));
  CHECK(std::abs(hessian_bound(p0, 256) - hessian_bound(p0, 128)) <= 1e-6);

  std::mt19937_64 rng(9);
  const FourierScalarField q = pressure_from_velocity(random_divergence_free(5, rng));
  CHECK(std::abs(hessian_bound(q, 256) - hessian_bound(q, 128)) <= 1e-2 * (1.0 + hessian_bound(q, 256)));
}

TEST_CASE("time-dependent velocity container") {
  const TimeDependentVelocity tg = taylor_green(0.1, 1.0, 10, 3);
  CHECK(tg.steps() == 10);
  CHECK(tg.time(10) == doctest::Approx(1.0));
  for (const auto& p : tg.pressures()) CHECK(p.mean() == 0.0);
  const Vec2 x{0.4, 1.9};
  const Vec2 mid = tg.value(0.05, x);
  const Vec2 lin = 0.5 * (tg.frame(0).evaluate(x) + tg.frame(1).evaluate(x));
  CHECK(norm(mid - lin) <= 1e-15);
  CHECK(norm(tg.value(0.05, x) - taylor_green_velocity(0.1, 0.05, 3).evaluate(x)) <= 1e-4);
  CHECK(std::abs(tg.pressure_value(0.3, x) - taylor_green_pressure(0.1, 0.3, 3).evaluate(x)) <= 1e-12);

  FourierScalarField offset = taylor_green_pressure(0.1, 0.0, 3);
  offset.set_mean(2.0);
  const auto steady = TimeDependentVelocity::steady(taylor_green_velocity(0.1, 0.0, 3), offset, 0.1, 1.0, 4);
  CHECK(steady.pressure(2).mean() == 0.0);

  FourierVectorField bad(2);
  bad.set_coeff({1, 0}, {Complex{1.0, 0.0}, Complex{}});
  CHECK_THROWS(TimeDependentVelocity::steady(bad, FourierScalarField(2), 0.1, 1.0, 2));
  CHECK_THROWS(taylor_green(-1.0, 1.0, 4, 2));
}

TEST_CASE("velocity history save and load") {
  const auto dir = std::filesystem::temp_directory_path() / "svlab_velocity_roundtrip";
  std::filesystem::remove_all(dir);
  const TimeDependentVelocity u = ns_solve(taylor_green_velocity(0.1, 0.0, 4), 0.1, 0.2, 4, 5);
  save_velocity(dir, u);
  const TimeDependentVelocity back = load_velocity(dir / "manifest.json");
  CHECK(back.steps() == u.steps());
  CHECK(back.nu() == u.nu());
  for (int j = 0; j <= u.steps(); ++j) {
    CHECK(back.frame(j) == u.frame(j));
    CHECK(back.pressure(j) == u.pressure(j));
  }
  std::filesystem::remove_all(dir);
}
