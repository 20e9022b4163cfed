#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "svlab/variation_lab.hpp"

using namespace svlab;

namespace {

constexpr double kNu = 0.1;

SdeParams params_with(Drift drift, double nu = kNu) {
  SdeParams p;
  p.nu = nu;
  p.T = 1.0;
  p.drift = std::move(drift);
  return p;
}

std::shared_ptr<const TimeDependentVelocity> tg(int frames = 200) {
  return std::make_shared<const TimeDependentVelocity>(taylor_green(kNu, 1.0, frames, 2));
}

PathEnsemble tg_forward(std::size_t n, std::size_t m, std::uint64_t seed) {
  return simulate_ito(params_with(Drift::velocity(tg(), TimeOrientation::forward)), n, m, seed);
}

PathEnsemble tg_reversed(std::size_t n, std::size_t m, std::uint64_t seed) {
  return simulate_ito(params_with(Drift::velocity(tg(), TimeOrientation::reversed)), n, m, seed);
}

TestPair constant_pair(Vec2 c) {
  TestPair pair;
  pair.name = "const";
  pair.w = FourierVectorField(1);
  pair.w.set_mean(c);
  pair.profile = TimeProfile::sine(1, 1.0);
  return pair;
}

}  // namespace

TEST_CASE("perturbation flows") {
  const BasisIndexSet basis(3.0, 8, kNu);
  const auto bank = test_bank(basis, 1.0);
  const auto spec = PerturbationSpec::flow(PerturbationKind::psi, bank[2]);
  const Vec2 x{1.3, 4.2};
  CHECK(flow_psi(spec, 0.0, 0.4, x) == x);
  CHECK(flow_phi(spec, 0.0, x, 0.4) == x);

  const auto c = PerturbationSpec::flow(PerturbationKind::psi, constant_pair({0.7, -0.2}));
  const double a = std::sin(kPi * 0.3);
  CHECK(norm(flow_psi(c, 0.05, 0.3, x) - (x + 0.05 * a * Vec2{0.7, -0.2})) <= 1e-15);
  CHECK(norm(flow_phi(c, 0.05, x, 0.3) - (x + 0.05 * a * Vec2{0.7, -0.2})) <= 1e-12);

  FourierVectorField bad(2);
  bad.set_coeff({1, 0}, {Complex{1.0, 0.0}, Complex{}});
  TestPair bp = bank[0];
  bp.w = bad;
  CHECK_THROWS(PerturbationSpec::flow(PerturbationKind::psi, bp));
}

TEST_CASE("the psi flow preserves volume") {
  TestPair pair;
  pair.w = taylor_green_velocity(0.0, 0.0, 2);
  pair.profile = TimeProfile::sine(1, 1.0);
  const auto spec = PerturbationSpec::flow(PerturbationKind::psi, pair);
  const double h = 1e-5;
  double worst = 0.0;
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      const Vec2 x{kTwoPi * i / 32, kTwoPi * j / 32};
      const Vec2 d1 = (flow_psi(spec, 0.1, 0.5, x + Vec2{h, 0}) - flow_psi(spec, 0.1, 0.5, x - Vec2{h, 0})) / (2 * h);
      const Vec2 d2 = (flow_psi(spec, 0.1, 0.5, x + Vec2{0, h}) - flow_psi(spec, 0.1, 0.5, x - Vec2{0, h})) / (2 * h);
      worst = std::max(worst, std::abs(d1.x * d2.y - d1.y * d2.x - 1.0));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("the psi flow maps uniform marginals to uniform marginals") {
  const auto ens = tg_reversed(20000, 50, 3);
  const BasisIndexSet basis(3.0, 8, kNu);
  TestPair pair = test_bank(basis, 1.0)[0];
  pair.w = taylor_green_velocity(0.0, 0.0, 2);
  const auto spec = PerturbationSpec::flow(PerturbationKind::psi, pair);
  std::vector<double> a(ens.paths()), b(ens.paths());
  for (std::size_t p = 0; p < ens.paths(); ++p) {
    const Vec2 y = wrap(flow_psi(spec, 0.5, 0.5, ens.wrapped(p, 25)));
    a[p] = y.x;
    b[p] = y.y;
  }
  CHECK(ks_uniform(a, 0.0, kTwoPi) <= ks_critical(ens.paths(), 1e-3));
  CHECK(ks_uniform(b, 0.0, kTwoPi) <= ks_critical(ens.paths(), 1e-3));
}

TEST_CASE("first variation along the critical ensemble") {
  const BasisIndexSet basis(3.0, 8, kNu);
  const auto bank = test_bank(basis, 1.0);
  const auto ens = tg_forward(4000, 100, 42);
  for (const auto& pair : bank) CHECK(first_variation_direct(ens, pair, kNu).within(3.0));

  const auto still = simulate_ito(params_with(Drift::zero()), 200, 20, 1);
  for (const auto& pair : bank) CHECK(first_variation_direct(still, pair, kNu).value == 0.0);

  const Drift corrupted = Drift::velocity(tg(), TimeOrientation::forward) +
                          Drift::steady(basis_field({1, 1}, BasisKind::sin, BasisIndexSet(3.0, 2, 1.0)), 0.5);
  const auto bad = simulate_ito(params_with(corrupted), 4000, 100, 42);
  double worst = 0.0;
  for (const auto& pair : bank) worst = std::max(worst, first_variation_direct(bad, pair, kNu).z_score());
  CHECK(worst > 5.0);
}

TEST_CASE("finite-difference variation matches the direct estimator") {
  const BasisIndexSet basis(3.0, 8, kNu);
  const auto bank = test_bank(basis, 1.0);
  const auto ens = tg_forward(300, 50, 7);
  FdOptions opt;
  opt.threads = 2;
  for (std::size_t i : {std::size_t(0), std::size_t(3)}) {
    const auto pair = bank[i].scaled(1.0 / basis.amplitude());
    const auto direct = first_variation_direct(ens, pair, kNu);
    const auto fd = first_variation_fd(ens, PerturbationSpec::flow(PerturbationKind::psi, pair), kNu, opt);
    CHECK(fd.consistent);
    CHECK(fd.by_eps.size() == 3);
    CHECK(std::abs(fd.estimate.value - direct.value) <= 3.0 * combined_se(fd.estimate.std_error, direct.std_error));

    const auto flipped =
        first_variation_fd(ens, PerturbationSpec::flow(PerturbationKind::phi, pair.scaled(-1.0)), kNu, opt);
    CHECK(std::abs(flipped.estimate.value + fd.estimate.value) <= 1e-6 * (1.0 + std::abs(fd.estimate.value)));
  }

  const auto still = simulate_ito(params_with(Drift::zero()), 100, 20, 1);
  const auto zero = first_variation_fd(still, PerturbationSpec::flow(PerturbationKind::psi, bank[1]), kNu);
  CHECK(std::abs(zero.estimate.value) <= 3.0 * zero.estimate.std_error + 1e-9);

  FdOptions bad_eps;
  bad_eps.eps = {0.01, 0.05};
  CHECK_THROWS(first_variation_fd(still, PerturbationSpec::flow(PerturbationKind::psi, bank[1]), kNu, bad_eps));
}

TEST_CASE("class G members") {
  const auto base = tg_reversed(2000, 100, 11);
  const auto bank = alpha_fn_bank();
  REQUIRE(bank.size() == 3);

  SUBCASE("zero driver leaves the path unchanged") {
    const auto g = sample_class_g(base, PerturbationSpec::pinned_shift("0", [](Vec2) { return 0.0; }, {1.0, 0.5}));
    for (std::size_t p = 0; p < base.paths(); p += 97) {
      for (std::size_t j = 0; j <= base.steps(); ++j) {
        CHECK(g.position(p, j) == base.position(p, j));
        CHECK(g.drift(p, j) == base.drift(p, j));
      }
    }
  }
  SUBCASE("endpoints match and the gap equals the velocity energy") {
    for (const auto& [name, fn] : bank) {
      const auto g = sample_class_g(base, PerturbationSpec::pinned_shift(name, fn, {0.6, -0.8}), 2);
      CHECK(g.endpoint_gap() <= 1e-10);
      CHECK(g.position(3, 0) == base.position(3, 0));
      const auto gap = paired_difference(g.action_per_path(), action_per_path(base));
      const auto half = estimate_mean(g.half_velocity_energy());
      CHECK(gap.value >= -3.0 * gap.std_error);
      std::vector<double> excess(base.paths());
      const auto sg = g.action_per_path();
      const auto sb = action_per_path(base);
      const auto hv = g.half_velocity_energy();
      for (std::size_t p = 0; p < excess.size(); ++p) excess[p] = sg[p] - sb[p] - hv[p];
      CHECK(estimate_mean(excess).within(3.0));
      CHECK(half.value > 0.0);
    }
  }
  SUBCASE("adapted: a prefix depends only on the prefix noise") {
    const auto spec = PerturbationSpec::pinned_shift(bank[1].first, bank[1].second, {1.0, 0.0});
    const auto full = sample_class_g(base, spec);
    PathEnsemble altered = base;
    for (std::size_t j = 50; j < altered.steps(); ++j) {
      for (double& v : altered.mutable_increments(5, j)) v = -v;
    }
    const auto again = sample_class_g(altered, spec);
    for (std::size_t j = 0; j <= 50; ++j) CHECK(full.beta(5, j) == again.beta(5, j));
    CHECK(full.beta(5, 80) != again.beta(5, 80));
  }
}

TEST_CASE("minimality report") {
  const auto u = tg();
  const auto base = tg_reversed(2000, 100, 13);
  SUBCASE("identical competitor") {
    const auto same = class_g_from_profile(base, [](double) { return 0.0; }, [](double) { return 0.0; }, {1, 0}, "id");
    const auto r = minimality_check(base, same, *u);
    CHECK(r.b_base.value == r.b_star.value);
    CHECK(r.s_base.value == r.s_star.value);
    CHECK(r.s_gap.value == 0.0);
    CHECK(r.hessian_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.hypothesis_holds);
    CHECK(r.passed());
  }
  SUBCASE("Poincare equality case") {
    const double w = kPi;
    const auto g = class_g_from_profile(
        base, [w](double t) { return std::sin(w * t); }, [w](double t) { return w * std::cos(w * t); }, {0.3, 0.4},
        "sine");
    const auto r = minimality_check(base, g, *u, 2, 1.0);
    CHECK(std::abs(r.max_poincare_ratio - 1.0) <= 1e-6);
    CHECK(r.poincare);
  }
  SUBCASE("random pinned-shift members") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto bank = alpha_fn_bank();
    for (const auto& [name, fn] : bank) {
      const auto g = sample_class_g(base, PerturbationSpec::pinned_shift(name, fn, {n(rng), n(rng)}));
      const auto r = minimality_check(base, g, *u, 1, 1.0);
      CHECK(r.b_inequality);
      CHECK(r.s_inequality);
      CHECK(r.gap_matches);
      CHECK(r.poincare);
      CHECK(r.fd_zero);
      CHECK(r.max_poincare_ratio <= 1.0 + 1e-6);
    }
  }
  SUBCASE("hypothesis warning") {
    const auto big = std::make_shared<const TimeDependentVelocity>(taylor_green(kNu, 4.0, 40, 2));
    const auto ens = simulate_ito(
        [&] {
          SdeParams p = params_with(Drift::velocity(big, TimeOrientation::reversed));
          p.T = 4.0;
          return p;
        }(),
        200, 40, 3);
    const auto g = class_g_from_profile(ens, [](double) { return 0.0; }, [](double) { return 0.0; }, {1, 0}, "id");
    const auto r = minimality_check(ens, g, *big);
    CHECK_FALSE(r.hypothesis_holds);
    CHECK(r.warnings.size() == 1);
  }
}

TEST_CASE("second time derivative along the reversed flow") {
  SUBCASE("Taylor-Green") {
    const auto u = tg(400);
    const auto coarse = tg_reversed(8000, 100, 17);
    const auto fine = tg_reversed(8000, 200, 17);
    const auto rc = dtdtg_check(coarse, *u);
    const auto rf = dtdtg_check(fine, *u);
    CHECK(rc.bin_means.size() == 16);
    // Two-level fit of the O(dt) term.
    const double c = std::max(0.0, (rc.residual.value - rf.residual.value) / (coarse.dt() - fine.dt()));
    CHECK(rf.residual.value <= 3.0 * rf.residual.std_error + c * fine.dt());
    CHECK(rf.martingale_gap.within(3.0));
  }
  SUBCASE("steady Euler flow with constant pressure") {
    const BasisIndexSet basis(3.0, 4, 1.0);
    const auto w = basis_field({1, 2}, BasisKind::cos, basis);
    const auto steady =
        std::make_shared<const TimeDependentVelocity>(TimeDependentVelocity::steady(w, FourierScalarField(4), kNu, 1.0, 10));
    const auto ens = simulate_ito(params_with(Drift::velocity(steady, TimeOrientation::reversed)), 4000, 64, 2);
    const auto r = dtdtg_check(ens, *steady);
    for (std::size_t b = 0; b < r.bin_means.size(); ++b) {
      CHECK(std::abs(r.bin_means[b].x) <= 4.0 * r.bin_se[b].x);
      CHECK(std::abs(r.bin_means[b].y) <= 4.0 * r.bin_se[b].y);
    }
  }
}
