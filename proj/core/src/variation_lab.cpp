#include "svlab/variation_lab.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "svlab/parallel.hpp"

namespace svlab {

namespace {

template <class F>
Vec2 rk4(Vec2 y, double h, int steps, F f) {
  for (int i = 0; i < steps; ++i) {
    const Vec2 k1 = f(i, 0.0, y);
    const Vec2 k2 = f(i, 0.5, y + (0.5 * h) * k1);
    const Vec2 k3 = f(i, 0.5, y + (0.5 * h) * k2);
    const Vec2 k4 = f(i, 1.0, y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!std::isfinite(y.x) || !std::isfinite(y.y)) throw std::runtime_error("flow integration produced a non-finite point");
  return y;
}

double trapezoid(const std::vector<double>& f, double dt) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * dt;
}

}  // namespace

PerturbationSpec PerturbationSpec::flow(PerturbationKind kind, TestPair pair) {
  if (kind == PerturbationKind::pinned_shift) throw std::invalid_argument("use PerturbationSpec::pinned_shift");
  if (!pair.w.is_divergence_free()) throw std::invalid_argument("perturbation field must be divergence-free");
  PerturbationSpec s;
  s.kind = kind;
  s.pair = std::move(pair);
  return s;
}

PerturbationSpec PerturbationSpec::pinned_shift(std::string alpha_name, std::function<double(Vec2)> alpha_fn, Vec2 a) {
  PerturbationSpec s;
  s.kind = PerturbationKind::pinned_shift;
  s.alpha_name = std::move(alpha_name);
  s.alpha_fn = std::move(alpha_fn);
  s.a = a;
  return s;
}

std::vector<std::pair<std::string, std::function<double(Vec2)>>> alpha_fn_bank() {
  return {{"cos(x1)", [](Vec2 w) { return std::cos(w.x); }},
          {"sin(x1+x2)", [](Vec2 w) { return std::sin(w.x + w.y); }},
          {"tanh(x1)", [](Vec2 w) { return std::tanh(w.x); }}};
}

Vec2 flow_psi(const PerturbationSpec& spec, double eps, double t, Vec2 x, int substeps) {
  if (eps == 0.0) return x;
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const double a = spec.pair.profile.alpha(t);
  const FourierVectorField& w = spec.pair.w;
  return rk4(x, eps / substeps, substeps, [&](int, double, Vec2 y) { return a * w.evaluate(y); });
}

Vec2 flow_phi(const PerturbationSpec& spec, double eps, Vec2 x, double t, int steps_per_unit) {
  if (eps == 0.0 || t == 0.0) return x;
  const int n = std::max(1, int(std::ceil(std::abs(t) * steps_per_unit)));
  const double h = t / n;
  const FourierVectorField& w = spec.pair.w;
  const auto& ap = spec.pair.profile.alpha_prime;
  return rk4(x, h, n, [&](int i, double frac, Vec2 y) { return (eps * ap((i + frac) * h)) * w.evaluate(y); });
}

EstimateWithError first_variation_direct(const PathEnsemble& ens, const TestPair& pair, double nu, unsigned threads) {
  const FourierVectorField box_w = ebin_marsden_laplacian(pair.w);
  std::vector<double> per_path(ens.paths());
  parallel_for(ens.paths(), threads, [&](std::size_t p) {
    std::vector<double> f(ens.steps() + 1);
    for (std::size_t j = 0; j <= ens.steps(); ++j) {
      f[j] = weak_integrand(pair, box_w, nu, ens.time(j), ens.wrapped(p, j), ens.drift(p, j));
    }
    per_path[p] = trapezoid(f, ens.dt());
  });
  return estimate_mean(per_path);
}

FdResult first_variation_fd(const PathEnsemble& ens, const PerturbationSpec& spec, double nu,
                            const FdOptions& options) {
  if (spec.kind == PerturbationKind::pinned_shift) {
    throw std::invalid_argument("finite-difference variation needs a flow perturbation");
  }
  if (options.eps.empty()) throw std::invalid_argument("need at least one epsilon");
  for (std::size_t i = 1; i < options.eps.size(); ++i) {
    if (!(options.eps[i] < options.eps[i - 1])) throw std::invalid_argument("epsilon list must decrease");
  }
  const std::size_t ne = options.eps.size();
  const double h = options.h;
  const double tau = options.tau;
  // Φ^ε_t and Ψ^t_ε coincide (both are the time-εα(t) flow of w), so both kinds use Ψ.
  std::vector<std::vector<double>> diff(ne, std::vector<double>(ens.paths()));
  parallel_for(ens.paths(), options.threads, [&](std::size_t p) {
    std::vector<double> sq(ens.steps() + 1);
    for (std::size_t e = 0; e < ne; ++e) {
      double s[2];
      for (int sign = 0; sign < 2; ++sign) {
        const double eps = sign == 0 ? options.eps[e] : -options.eps[e];
        auto delta = [&](double t, Vec2 y) { return flow_psi(spec, eps, t, y, options.substeps) - y; };
        for (std::size_t j = 0; j <= ens.steps(); ++j) {
          const double t = ens.time(j);
          const Vec2 x = ens.wrapped(p, j);
          const Vec2 d = ens.drift(p, j);
          const Vec2 c0 = delta(t, x);
          const Vec2 xp = delta(t, x + Vec2{h, 0.0});
          const Vec2 xm = delta(t, x - Vec2{h, 0.0});
          const Vec2 yp = delta(t, x + Vec2{0.0, h});
          const Vec2 ym = delta(t, x - Vec2{0.0, h});
          const Vec2 dt_psi = (delta(t + tau, x) - delta(t - tau, x)) / (2.0 * tau);
          const Vec2 d1 = (xp - xm) / (2.0 * h);  // ∂₁δ
          const Vec2 d2 = (yp - ym) / (2.0 * h);  // ∂₂δ
          const Vec2 lap = (xp + xm + yp + ym - 4.0 * c0) / (h * h);
          const Vec2 phi = dt_psi + d + d.x * d1 + d.y * d2 + nu * lap;
          sq[j] = norm2(phi);
        }
        s[sign] = 0.5 * trapezoid(sq, ens.dt());
      }
      diff[e][p] = (s[0] - s[1]) / (2.0 * options.eps[e]);
    }
  });

  FdResult result;
  for (const auto& d : diff) result.by_eps.push_back(estimate_mean(d));
  if (ne == 1) {
    result.estimate = result.coarse = result.by_eps[0];
    return result;
  }
  auto richardson = [&](std::size_t coarse, std::size_t fine) {
    const double r = options.eps[coarse] / options.eps[fine];
    const double r2 = r * r;
    std::vector<double> v(ens.paths());
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = (r2 * diff[fine][p] - diff[coarse][p]) / (r2 - 1.0);
    return estimate_mean(v);
  };
  result.estimate = richardson(ne - 2, ne - 1);
  result.coarse = ne >= 3 ? richardson(ne - 3, ne - 2) : result.by_eps[ne - 2];
  const double gap = std::abs(result.estimate.value - result.coarse.value);
  result.consistent = gap <= result.estimate.std_error + 1e-8 * (1.0 + std::abs(result.estimate.value));
  if (!result.consistent && options.strict) {
    throw std::runtime_error("Richardson estimates disagree (" + to_string(result.coarse) + " vs " +
                             to_string(result.estimate) + "); adjust the epsilon schedule");
  }
  return result;
}

// ---------------------------------------------------------------------------

ClassGMember::ClassGMember(const PathEnsemble& base, Vec2 a, std::vector<double> beta, std::vector<double> c,
                           std::string label)
    : base_(&base), a_(a), beta_(std::move(beta)), c_(std::move(c)), label_(std::move(label)) {
  const std::size_t n = base.paths() * (base.steps() + 1);
  if (beta_.size() != n || c_.size() != n) throw std::invalid_argument("class member size mismatch");
}

double ClassGMember::endpoint_gap() const {
  double gap = 0.0;
  for (std::size_t p = 0; p < base_->paths(); ++p) {
    gap = std::max(gap, norm(position(p, base_->steps()) - base_->position(p, base_->steps())));
  }
  return gap;
}

std::vector<double> ClassGMember::action_per_path() const {
  std::vector<double> out(base_->paths());
  std::vector<double> f(base_->steps() + 1);
  for (std::size_t p = 0; p < out.size(); ++p) {
    for (std::size_t j = 0; j <= base_->steps(); ++j) f[j] = norm2(drift(p, j));
    out[p] = 0.5 * trapezoid(f, base_->dt());
  }
  return out;
}

std::vector<double> ClassGMember::half_velocity_energy() const {
  std::vector<double> out(base_->paths());
  std::vector<double> f(base_->steps() + 1);
  for (std::size_t p = 0; p < out.size(); ++p) {
    for (std::size_t j = 0; j <= base_->steps(); ++j) f[j] = norm2(velocity(p, j));
    out[p] = 0.5 * trapezoid(f, base_->dt());
  }
  return out;
}

ClassGMember sample_class_g(const PathEnsemble& base, const PerturbationSpec& spec, unsigned threads) {
  if (spec.kind != PerturbationKind::pinned_shift || !spec.alpha_fn) {
    throw std::invalid_argument("class-G sampling needs an pinned-shift spec with a driver function");
  }
  if (base.kind() == EnsembleKind::bridge || base.channels() < 2) {
    throw std::invalid_argument("class-G sampling needs a 2-channel torus ensemble");
  }
  const std::size_t m = base.steps();
  const double T = base.horizon();
  const double dt = base.dt();
  const double omega = kPi / T;
  std::vector<double> beta(base.paths() * (m + 1)), c(beta.size());
  parallel_for(base.paths(), threads, [&](std::size_t p) {
    std::vector<double> dw(base.channels());
    Vec2 w;  // Brownian driver, w_0 = 0
    double integral = 0.0;
    double alpha_prev = spec.alpha_fn(w);
    for (std::size_t j = 0; j <= m; ++j) {
      const double t = base.time(j);
      const double alpha = spec.alpha_fn(w);
      if (j > 0) integral += 0.5 * (alpha_prev + alpha) * dt;
      const double s = j == m ? std::sin(kPi) : std::sin(omega * t);
      const double co = j == m ? -1.0 : std::cos(omega * t);
      beta[p * (m + 1) + j] = s * integral;
      c[p * (m + 1) + j] = omega * co * integral + s * alpha;
      alpha_prev = alpha;
      if (j < m) {
        base.increments_into(p, j, dw);
        w += Vec2{dw[0], dw[1]};
      }
    }
  });
  return ClassGMember(base, spec.a, std::move(beta), std::move(c), spec.alpha_name);
}

ClassGMember class_g_from_profile(const PathEnsemble& base, const std::function<double(double)>& beta_fn,
                                  const std::function<double(double)>& c_fn, Vec2 a, std::string label) {
  const std::size_t m = base.steps();
  std::vector<double> beta(base.paths() * (m + 1)), c(beta.size());
  for (std::size_t p = 0; p < base.paths(); ++p) {
    for (std::size_t j = 0; j <= m; ++j) {
      beta[p * (m + 1) + j] = beta_fn(base.time(j));
      c[p * (m + 1) + j] = c_fn(base.time(j));
    }
  }
  return ClassGMember(base, a, std::move(beta), std::move(c), std::move(label));
}

MinimalityReport minimality_check(const PathEnsemble& g, const ClassGMember& gstar, const TimeDependentVelocity& u,
                                  unsigned threads, double hessian) {
  if (&gstar.base() != &g) throw std::invalid_argument("competitor must share the base ensemble");
  const double T = g.horizon();
  if (std::abs(u.horizon() - T) > 1e-9 * T) throw std::invalid_argument("velocity and ensemble horizons differ");
  const std::size_t n = g.paths();
  const std::size_t m = g.steps();
  const double dt = g.dt();
  const double a2 = norm2(gstar.direction());
  constexpr double fd_eps = 1e-3;

  std::vector<double> s_base(n), s_star(n), b_base(n), b_star(n), half_v(n), excess(n), fd(n), ratio(n);
  parallel_for(n, threads, [&](std::size_t p) {
    std::vector<double> d2(m + 1), ds2(m + 1), pr(m + 1), prs(m + 1), v2(m + 1), b2(m + 1), c2(m + 1),
        plus(m + 1), minus(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
      const double t = g.time(j);
      const Vec2 d = g.drift(p, j);
      const Vec2 v = gstar.velocity(p, j);
      d2[j] = norm2(d);
      ds2[j] = norm2(gstar.drift(p, j));
      v2[j] = norm2(v);
      pr[j] = u.pressure_value(T - t, g.position(p, j));
      prs[j] = u.pressure_value(T - t, gstar.position(p, j));
      b2[j] = gstar.beta(p, j) * gstar.beta(p, j) * a2;
      c2[j] = gstar.c(p, j) * gstar.c(p, j) * a2;
      plus[j] = norm2(d + fd_eps * v);
      minus[j] = norm2(d - fd_eps * v);
    }
    s_base[p] = 0.5 * trapezoid(d2, dt);
    s_star[p] = 0.5 * trapezoid(ds2, dt);
    b_base[p] = s_base[p] - trapezoid(pr, dt);
    b_star[p] = s_star[p] - trapezoid(prs, dt);
    half_v[p] = 0.5 * trapezoid(v2, dt);
    excess[p] = s_star[p] - s_base[p] - half_v[p];
    fd[p] = (0.5 * trapezoid(plus, dt) - 0.5 * trapezoid(minus, dt)) / (2.0 * fd_eps);
    const double num = trapezoid(b2, dt);
    const double den = (T / kPi) * (T / kPi) * trapezoid(c2, dt);
    ratio[p] = den == 0.0 ? 0.0 : num / den;
  });

  MinimalityReport r;
  r.s_base = estimate_mean(s_base);
  r.s_star = estimate_mean(s_star);
  r.b_base = estimate_mean(b_base);
  r.b_star = estimate_mean(b_star);
  r.s_gap = paired_difference(s_star, s_base);
  r.half_v_energy = estimate_mean(half_v);
  r.gap_excess = estimate_mean(excess);
  r.fd_derivative = estimate_mean(fd);
  for (double q : ratio) r.max_poincare_ratio = std::max(r.max_poincare_ratio, q);
  r.hessian_bound = std::isnan(hessian) ? hessian_bound(u) : hessian;
  r.R_T2 = r.hessian_bound * T * T;
  r.hypothesis_holds = r.R_T2 <= kPi * kPi;
  if (!r.hypothesis_holds) r.warnings.push_back("RT^2 > pi^2: minimality hypothesis violated");
  r.b_inequality = r.b_base.value <= r.b_star.value + 3.0 * combined_se(r.b_base.std_error, r.b_star.std_error);
  r.s_inequality = r.s_base.value <= r.s_star.value + 3.0 * combined_se(r.s_base.std_error, r.s_star.std_error);
  r.gap_matches = r.gap_excess.within(3.0);
  r.poincare = r.max_poincare_ratio <= 1.0 + 1e-6;
  r.fd_zero = r.fd_derivative.within(3.0);
  return r;
}

DtDtgReport dtdtg_check(const PathEnsemble& ens, const TimeDependentVelocity& u, int bins) {
  if (bins < 1 || std::size_t(bins) > ens.steps()) throw std::invalid_argument("invalid bin count");
  const std::size_t n = ens.paths();
  const std::size_t m = ens.steps();
  const double T = ens.horizon();
  const double dt = ens.dt();
  const double two_nu = 2.0 * u.nu();
  const std::size_t nb = static_cast<std::size_t>(bins);
  std::vector<std::vector<double>> ex(nb, std::vector<double>(n)), ey = ex;
  std::vector<double> gap(n), var(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<Vec2> sum(nb);
    std::vector<std::size_t> count(nb, 0);
    double qv = 0.0;
    double compensator = 0.0;
    Vec2 x = ens.wrapped(p, 0);
    Vec2 U = u.value(T, x);
    for (std::size_t j = 0; j < m; ++j) {
      const double t = ens.time(j);
      const Vec2 gp = u.pressure_gradient(T - t, x);
      const Mat2 J = u.jacobian(T - t, x);
      const Vec2 x1 = ens.wrapped(p, j + 1);
      const Vec2 U1 = u.value(T - ens.time(j + 1), x1);
      const Vec2 dU = U1 - U;
      const std::size_t b = std::min(nb - 1, j * nb / m);
      sum[b] += dU / dt - gp;
      ++count[b];
      qv += norm2(dU - dt * gp);
      compensator += two_nu * J.frobenius2() * dt;
      x = x1;
      U = U1;
    }
    for (std::size_t b = 0; b < nb; ++b) {
      ex[b][p] = sum[b].x / double(count[b]);
      ey[b][p] = sum[b].y / double(count[b]);
    }
    gap[p] = qv - compensator;
    var[p] = qv;
  }
  DtDtgReport r;
  double ms = 0.0;
  double se2 = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const EstimateWithError mx = estimate_mean(ex[b]);
    const EstimateWithError my = estimate_mean(ey[b]);
    r.bin_means.push_back({mx.value, my.value});
    r.bin_se.push_back({mx.std_error, my.std_error});
    ms += mx.value * mx.value + my.value * my.value;
    se2 += mx.std_error * mx.std_error + my.std_error * my.std_error;
  }
  r.residual.value = std::sqrt(ms / bins);
  r.residual.std_error = std::sqrt(se2 / bins);
  r.residual.n = n;
  r.martingale_gap = estimate_mean(gap);
  r.martingale_variance = estimate_mean(var);
  return r;
}

}  // namespace svlab
