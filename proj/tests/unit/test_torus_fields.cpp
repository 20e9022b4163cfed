#include <cmath>
#include <random>

#include "doctest.h"
#include "svlab/field_io.hpp"
#include "svlab/reference_flows.hpp"
#include "svlab/spectral_grid.hpp"
#include "svlab/torus_fields.hpp"

using namespace svlab;

namespace {

// Basis whose ν equals its own truncated normalizer, so √(ν/ν₀) = 1.
BasisIndexSet unit_amplitude_basis(double beta, int K) {
  const BasisIndexSet probe(beta, K, 1.0);
  return BasisIndexSet(beta, K, probe.nu0());
}

double max_coeff_diff(const FourierVectorField& a, const FourierVectorField& b) {
  const int K = std::max(a.truncation(), b.truncation());
  double m = norm(a.mean() - b.mean());
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const Wavevector k{k1, k2};
      const CVec2 ca = a.contains(k) ? a.coeff(k) : CVec2{};
      const CVec2 cb = b.contains(k) ? b.coeff(k) : CVec2{};
      m = std::max({m, std::abs(ca[0] - cb[0]), std::abs(ca[1] - cb[1])});
    }
  }
  return m;
}

double max_coeff(const FourierVectorField& a) { return max_coeff_diff(a, FourierVectorField(a.truncation())); }

}  // namespace

TEST_CASE("basis field A(1,0) with unit amplitude is cos(x1) (0,-1)") {
  const BasisIndexSet basis = unit_amplitude_basis(3.0, 8);
  CHECK(basis.amplitude() == doctest::Approx(1.0).epsilon(1e-15));
  const FourierVectorField a = basis_field({1, 0}, BasisKind::cos, basis);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int i = 0; i < 50; ++i) {
    const Vec2 th{u(rng), u(rng)};
    const Vec2 v = a.evaluate(th);
    CHECK(std::abs(v.x) <= 1e-15);
    CHECK(std::abs(v.y + std::cos(th.x)) <= 1e-14);
  }
  const Vec2 origin = a.evaluate({0.0, 0.0});
  CHECK(origin.x == doctest::Approx(0.0));
  CHECK(origin.y == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("every basis field is divergence-free") {
  const BasisIndexSet basis(3.0, 8, 0.1);
  for (const Wavevector& k : basis.modes()) {
    for (BasisKind kind : {BasisKind::cos, BasisKind::sin}) {
      const FourierVectorField f = basis_field(k, kind, basis);
      CHECK(f.is_divergence_free());
      CHECK(std::abs(f.divergence({0.3, 1.7})) <= 1e-14);
    }
  }
}

TEST_CASE("B(2,1) matches the closed form on a 32x32 grid") {
  const double nu = 0.07;
  const BasisIndexSet basis(3.0, 8, nu);
  const FourierVectorField b = basis_field({2, 1}, BasisKind::sin, basis);
  const double amp = std::sqrt(nu / basis.nu0()) / std::pow(std::sqrt(5.0), 3.0);
  double worst = 0.0;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      const Vec2 th{kTwoPi * i / 32, kTwoPi * j / 32};
      const double s = amp * std::sin(2.0 * th.x + th.y);
      worst = std::max(worst, norm(b.evaluate(th) - Vec2{s * 1.0, s * -2.0}));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("basis construction and mode validation") {
  CHECK_THROWS_AS(BasisIndexSet(1.0, 4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(BasisIndexSet(3.0, 4, 0.0), std::invalid_argument);
  const BasisIndexSet basis(3.0, 4, 0.1);
  CHECK(basis.modes().size() == std::size_t((9 * 9 - 1) / 2));
  for (const Wavevector& k : basis.modes()) {
    CHECK(k.in_half_space());
    CHECK_FALSE(basis.contains(-k));
  }
  CHECK_THROWS(basis_field({0, 0}, BasisKind::cos, basis));
  CHECK_THROWS(basis_field({5, 0}, BasisKind::cos, basis));
  CHECK_THROWS(basis_field({-1, 0}, BasisKind::cos, basis));

  double series = 0.0;
  for (const Wavevector& k : basis.modes()) series += 1.0 / (2.0 * std::pow(double(k.norm2()), 3.0));
  CHECK(basis.series_nu0() == doctest::Approx(series).epsilon(1e-15));
}

TEST_CASE("frame identity holds exactly under the truncated normalizer") {
  SUBCASE("spec values") {
    CHECK(frame_sum({1, 0}, {0.4, 2.2}, BasisIndexSet(3.0, 8, 0.05)) == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(frame_sum({0, 0}, {0.4, 2.2}, BasisIndexSet(3.0, 8, 0.05)) == 0.0);
    CHECK(frame_sum({3, 4}, {1.0, 5.0}, BasisIndexSet(3.0, 8, 0.1)) == doctest::Approx(2.5).epsilon(1e-13));
  }
  SUBCASE("random points and vectors") {
    const BasisIndexSet basis(3.0, 8, 0.1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const Vec2 v{n(rng), n(rng)};
      const double target = 0.1 * norm2(v);
      CHECK(std::abs(frame_sum(v, {u(rng), u(rng)}, basis) - target) <= 1e-12 * target);
    }
  }
}

TEST_CASE("Stratonovich correction vanishes") {
  const BasisIndexSet basis(3.0, 8, 0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int i = 0; i < 20; ++i) CHECK(norm(strat_correction(basis, {u(rng), u(rng)})) <= 1e-12);

  const FourierVectorField a = basis_field({1, 0}, BasisKind::cos, unit_amplitude_basis(3.0, 8));
  const Vec2 th{kPi / 4, 0.0};
  CHECK(norm(a.gradient_tensor(th) * a.evaluate(th)) <= 1e-15);

  // Central-difference directional derivative of A along itself.
  const double h = 1e-5;
  const Vec2 d = a.evaluate(th);
  const Vec2 fd = (a.evaluate(th + h * d) - a.evaluate(th - h * d)) / (2.0 * h);
  CHECK(norm(fd) <= 1e-8);
}

TEST_CASE("Leray projection") {
  SUBCASE("gradients project to zero") {
    FourierScalarField s(2);
    s.set_coeff({1, 0}, Complex{0.0, -0.5});  // sin(x1)
    const FourierVectorField g = gradient_field(s);
    CHECK(g.evaluate({0.0, 0.0}).x == doctest::Approx(1.0));
    CHECK(max_coeff(leray_project(g)) == 0.0);
  }
  SUBCASE("basis fields are fixed points") {
    const BasisIndexSet basis(3.0, 8, 0.1);
    for (const Wavevector& k : basis.modes()) {
      const FourierVectorField a = basis_field(k, BasisKind::cos, basis);
      CHECK(leray_project(a) == a);
    }
  }
  SUBCASE("idempotent bitwise on random fields") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    FourierVectorField f(6);
    for (int k1 = 0; k1 <= 6; ++k1) {
      for (int k2 = -6; k2 <= 6; ++k2) {
        if (!Wavevector{k1, k2}.in_half_space()) continue;
        f.set_coeff({k1, k2}, {Complex{n(rng), n(rng)}, Complex{n(rng), n(rng)}});
      }
    }
    const FourierVectorField p = leray_project(f);
    CHECK(p.is_divergence_free());
    CHECK(leray_project(p) == p);
  }
}

TEST_CASE("Ebin-Marsden Laplacian") {
  const BasisIndexSet basis(3.0, 8, 0.1);
  const FourierVectorField a = basis_field({2, 1}, BasisKind::cos, basis);
  CHECK(max_coeff_diff(ebin_marsden_laplacian(a), 5.0 * a) <= 1e-15);
  CHECK(max_coeff(ebin_marsden_laplacian(FourierVectorField(4))) == 0.0);
  const FourierVectorField tg = taylor_green_velocity(0.1, 0.0, 4);
  CHECK(max_coeff_diff(ebin_marsden_laplacian(tg), 2.0 * tg) <= 1e-15);
  CHECK(max_coeff_diff(ebin_marsden_laplacian(tg), negative_laplacian(tg)) <= 1e-15);

  FourierVectorField bad(2);
  bad.set_coeff({1, 0}, {Complex{1.0, 0.0}, Complex{}});
  CHECK_THROWS_AS(ebin_marsden_laplacian(bad), std::invalid_argument);
}

TEST_CASE("Hodge Laplacian agrees with the deformation Laplacian") {
  const BasisIndexSet basis(3.0, 8, 0.1);
  const FourierVectorField a = basis_field({2, 1}, BasisKind::sin, basis);
  CHECK(max_coeff_diff(hodge_laplacian(a), 5.0 * a) <= 1e-15);
  CHECK(max_coeff(hodge_laplacian(FourierVectorField(3))) == 0.0);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const FourierVectorField f = random_divergence_free(8, rng);
    const FourierVectorField h = hodge_laplacian(f);
    CHECK(max_coeff_diff(h, ebin_marsden_laplacian(f)) <= 1e-12 * max_coeff(h));
  }
}

TEST_CASE("deformation adjointness and Parseval") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const FourierVectorField f = random_divergence_free(8, rng);
    const FourierVectorField g = random_divergence_free(8, rng);
    const double lhs = l2_inner(ebin_marsden_laplacian(f), g);
    const double rhs = 2.0 * deformation_inner(f, g);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    const double spectral = l2_inner(f, f);
    CHECK(std::abs(grid_energy(f, 64) - spectral) <= 1e-10 * spectral);
  }
}

TEST_CASE("pointwise evaluation and Jacobian") {
  FourierVectorField c(3);
  c.set_mean({0.5, -2.0});
  const Mat2 zero = c.gradient_tensor({1.0, 2.0});
  CHECK(zero.frobenius2() == 0.0);

  std::mt19937_64 rng(29);
  const FourierVectorField f = random_divergence_free(5, rng);
  const double h = 1e-5;
  for (const Vec2 th : {Vec2{0.1, 0.2}, Vec2{3.0, 5.5}, Vec2{6.0, 1.1}}) {
    const Mat2 J = f.gradient_tensor(th);
    for (int j = 0; j < 2; ++j) {
      Vec2 e;
      e[j] = h;
      const Vec2 d = (f.evaluate(th + e) - f.evaluate(th - e)) / (2.0 * h);
      const double scale = 1.0 + std::sqrt(J.frobenius2());
      CHECK(std::abs(J(0, j) - d.x) <= 1e-8 * scale * 10);
      CHECK(std::abs(J(1, j) - d.y) <= 1e-8 * scale * 10);
    }
  }
}

TEST_CASE("Hermitian storage and JSON round trip") {
  std::mt19937_64 rng(31);
  const FourierVectorField f = random_divergence_free(4, rng);
  for (const Wavevector& k : f.active_modes()) {
    const CVec2 a = f.coeff(k);
    const CVec2 b = f.coeff(-k);
    CHECK(a[0] == std::conj(b[0]));
    CHECK(a[1] == std::conj(b[1]));
  }
  CHECK(vector_field_from_json(to_json(f)) == f);

  const FourierScalarField p = taylor_green_pressure(0.1, 0.3, 3);
  CHECK(scalar_field_from_json(to_json(p)) == p);
}

TEST_CASE("grid transforms invert on band-limited data") {
  std::mt19937_64 rng(37);
  const FourierVectorField f = random_divergence_free(5, rng);
  const SpectralGrid grid(16);
  const auto values = grid.synthesize(f);
  const FourierVectorField back = grid.analyze(values[0], values[1], 5);
  CHECK(max_coeff_diff(back, f) <= 1e-13);
  CHECK(norm(f.evaluate(grid.point(3, 7)) - Vec2{values[0][3 * 16 + 7], values[1][3 * 16 + 7]}) <= 1e-12);
}
