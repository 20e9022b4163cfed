#include "svlab/sde_engine.hpp"

#include <cmath>
#include <stdexcept>

#include "svlab/errors.hpp"
#include "svlab/parallel.hpp"

namespace svlab {

namespace {

void check_finite(Vec2 x, std::size_t path, std::size_t step) {
  if (!std::isfinite(x.x) || !std::isfinite(x.y)) {
    throw NonFiniteError("non-finite state on path " + std::to_string(path) + " at step " +
                         std::to_string(step));
  }
}

void check_sizes(std::size_t paths, std::size_t steps) {
  if (paths == 0) throw std::invalid_argument("ensemble needs at least one path");
  if (steps >= kInitialStep) throw std::invalid_argument("too many time steps");
}

// Euler–Maruyama along one path whose increments are already in `ens`.
void integrate_ito_path(const SdeParams& params, PathEnsemble& ens, std::size_t p, Vec2 x) {
  const double dt = ens.dt();
  const double sigma = std::sqrt(2.0 * params.nu);
  double dw[2];
  ens.set_position(p, 0, x);
  for (std::size_t j = 0; j < ens.steps(); ++j) {
    const Vec2 b = params.drift.value(ens.time(j), x);
    ens.set_drift(p, j, b);
    ens.increments_into(p, j, dw);
    x = x + dt * b + sigma * Vec2{dw[0], dw[1]};
    check_finite(x, p, j + 1);
    ens.set_position(p, j + 1, x);
  }
  ens.set_drift(p, ens.steps(), params.drift.value(ens.time(ens.steps()), x));
}

}  // namespace

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::ito:
      return "ito";
    case EnsembleKind::stratonovich_basis:
      return "stratonovich_basis";
    case EnsembleKind::bridge:
      return "bridge";
  }
  return "unknown";
}

Vec2 InitialLaw::sample(const PathRng& rng) const {
  switch (kind) {
    case Kind::fixed:
      return point;
    case Kind::uniform:
    case Kind::product: {
      double u[2];
      rng.uniforms(kInitialStep, u);
      if (kind == Kind::uniform) return {kTwoPi * u[0], kTwoPi * u[1]};
      if (!sampler) throw std::invalid_argument("product initial law needs a sampler");
      return sampler(u[0], u[1]);
    }
  }
  return point;
}

void SdeParams::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
}

// ---------------------------------------------------------------------------

PathEnsemble::PathEnsemble(EnsembleKind kind, std::size_t paths, std::size_t steps, int dim,
                           std::size_t channels, double dt, std::uint64_t seed, bool store_increments)
    : kind_(kind), paths_(paths), steps_(steps), dim_(dim), channels_(channels), dt_(dt), seed_(seed) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("ensemble dimension must be 1 or 2");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  pos_.assign(paths * (steps + 1) * std::size_t(dim), 0.0);
  drift_.assign(pos_.size(), 0.0);
  if (store_increments) dw_.assign(paths * steps * channels, 0.0);
}

Vec2 PathEnsemble::position(std::size_t p, std::size_t j) const {
  const std::size_t i = node(p, j);
  return dim_ == 2 ? Vec2{pos_[i], pos_[i + 1]} : Vec2{pos_[i], 0.0};
}

Vec2 PathEnsemble::wrapped(std::size_t p, std::size_t j) const {
  const Vec2 x = position(p, j);
  return kind_ == EnsembleKind::bridge ? x : wrap(x);
}

Vec2 PathEnsemble::drift(std::size_t p, std::size_t j) const {
  const std::size_t i = node(p, j);
  return dim_ == 2 ? Vec2{drift_[i], drift_[i + 1]} : Vec2{drift_[i], 0.0};
}

std::span<const double> PathEnsemble::increments(std::size_t p, std::size_t j) const {
  if (dw_.empty()) throw std::logic_error("ensemble does not store Brownian increments");
  return std::span<const double>(dw_).subspan((p * steps_ + j) * channels_, channels_);
}

void PathEnsemble::increments_into(std::size_t p, std::size_t j, std::span<double> out) const {
  if (out.size() != channels_) throw std::invalid_argument("increment buffer size mismatch");
  if (!dw_.empty()) {
    const auto src = increments(p, j);
    std::copy(src.begin(), src.end(), out.begin());
    return;
  }
  PathRng(seed_, p).normals(std::uint32_t(j), out);
  const double s = std::sqrt(dt_);
  for (double& v : out) v *= s;
}

void PathEnsemble::set_position(std::size_t p, std::size_t j, Vec2 x) {
  const std::size_t i = node(p, j);
  pos_[i] = x.x;
  if (dim_ == 2) pos_[i + 1] = x.y;
}

void PathEnsemble::set_drift(std::size_t p, std::size_t j, Vec2 b) {
  const std::size_t i = node(p, j);
  drift_[i] = b.x;
  if (dim_ == 2) drift_[i + 1] = b.y;
}

std::span<double> PathEnsemble::mutable_increments(std::size_t p, std::size_t j) {
  if (dw_.empty()) throw std::logic_error("ensemble does not store Brownian increments");
  return std::span<double>(dw_).subspan((p * steps_ + j) * channels_, channels_);
}

bool PathEnsemble::operator==(const PathEnsemble& o) const {
  return kind_ == o.kind_ && paths_ == o.paths_ && steps_ == o.steps_ && dim_ == o.dim_ &&
         channels_ == o.channels_ && dt_ == o.dt_ && seed_ == o.seed_ && pos_ == o.pos_ &&
         drift_ == o.drift_ && dw_ == o.dw_;
}

// ---------------------------------------------------------------------------

PathEnsemble simulate_ito(const SdeParams& params, std::size_t paths, std::size_t steps, std::uint64_t seed,
                          const SimOptions& options) {
  params.validate();
  check_sizes(paths, steps);
  if (steps == 0) throw std::invalid_argument("steps must be positive");
  PathEnsemble ens(EnsembleKind::ito, paths, steps, 2, 2, params.T / double(steps), seed,
                   options.store_increments);
  ens.set_nu(params.nu);
  ens.set_description("ito: " + params.drift.describe());
  const double sqdt = std::sqrt(ens.dt());
  parallel_for(paths, options.threads, [&](std::size_t p) {
    const PathRng rng(seed, p);
    for (std::size_t j = 0; options.store_increments && j < steps; ++j) {
      auto dw = ens.mutable_increments(p, j);
      rng.normals(std::uint32_t(j), dw);
      dw[0] *= sqdt;
      dw[1] *= sqdt;
    }
    integrate_ito_path(params, ens, p, params.initial.sample(rng));
  });
  return ens;
}

PathEnsemble replay_ito(const SdeParams& params, double dt, std::span<const Vec2> starts,
                        std::span<const double> increments, std::size_t steps, std::uint64_t seed) {
  params.validate();
  if (increments.size() != starts.size() * steps * 2) throw std::invalid_argument("increment count mismatch");
  PathEnsemble ens(EnsembleKind::ito, starts.size(), steps, 2, 2, dt, seed, true);
  ens.set_nu(params.nu);
  for (std::size_t p = 0; p < starts.size(); ++p) {
    for (std::size_t j = 0; j < steps; ++j) {
      auto dw = ens.mutable_increments(p, j);
      dw[0] = increments[(p * steps + j) * 2];
      dw[1] = increments[(p * steps + j) * 2 + 1];
    }
    integrate_ito_path(params, ens, p, starts[p]);
  }
  return ens;
}

PathEnsemble simulate_stratonovich_basis(const SdeParams& params, const BasisIndexSet& basis,
                                         std::size_t paths, std::size_t steps, std::uint64_t seed,
                                         const SimOptions& options) {
  params.validate();
  check_sizes(paths, steps);
  if (steps == 0) throw std::invalid_argument("steps must be positive");
  if (std::abs(basis.nu() - params.nu) > 1e-12 * params.nu) {
    throw std::invalid_argument("basis diffusivity must match params.nu");
  }
  const std::size_t channels = basis.channel_count();
  PathEnsemble ens(EnsembleKind::stratonovich_basis, paths, steps, 2, channels, params.T / double(steps),
                   seed, options.store_increments);
  ens.set_nu(params.nu);
  ens.set_description("stratonovich_basis: " + params.drift.describe());
  const double dt = ens.dt();
  const double sqdt = std::sqrt(dt);
  const double gain = std::sqrt(2.0);
  parallel_for(paths, options.threads, [&](std::size_t p) {
    const PathRng rng(seed, p);
    std::vector<double> dw(channels);
    std::vector<Vec2> ch0(channels), ch1(channels);
    Vec2 x = params.initial.sample(rng);
    ens.set_position(p, 0, x);
    for (std::size_t j = 0; j < steps; ++j) {
      const double t = ens.time(j);
      rng.normals(std::uint32_t(j), dw);
      for (double& v : dw) v *= sqdt;
      if (options.store_increments) {
        auto dst = ens.mutable_increments(p, j);
        std::copy(dw.begin(), dw.end(), dst.begin());
      }
      const Vec2 b0 = params.drift.value(t, x);
      ens.set_drift(p, j, b0);
      evaluate_channels(basis, x, ch0);
      Vec2 n0;
      for (std::size_t c = 0; c < channels; ++c) n0 += dw[c] * ch0[c];
      n0 *= gain;
      const Vec2 xp = x + dt * b0 + n0;
      const Vec2 b1 = params.drift.value(t + dt, xp);
      evaluate_channels(basis, xp, ch1);
      Vec2 n1;
      for (std::size_t c = 0; c < channels; ++c) n1 += dw[c] * ch1[c];
      n1 *= gain;
      x = x + (0.5 * dt) * (b0 + b1) + 0.5 * (n0 + n1);
      check_finite(x, p, j + 1);
      ens.set_position(p, j + 1, x);
    }
    ens.set_drift(p, steps, params.drift.value(ens.time(steps), x));
  });
  return ens;
}

PathEnsemble brownian_bridge(double x, double y, std::size_t paths, std::size_t steps, double cutoff,
                             std::uint64_t seed, const SimOptions& options) {
  if (!(cutoff > 0.0) || !(cutoff < 1.0)) throw std::invalid_argument("bridge cutoff must lie in (0, 1)");
  check_sizes(paths, steps);
  if (steps == 0) throw std::invalid_argument("steps must be positive");
  PathEnsemble ens(EnsembleKind::bridge, paths, steps, 1, 1, (1.0 - cutoff) / double(steps), seed, true);
  ens.set_nu(0.5);
  ens.set_description("bridge");
  const double dt = ens.dt();
  const double sqdt = std::sqrt(dt);
  parallel_for(paths, options.threads, [&](std::size_t p) {
    const PathRng rng(seed, p);
    double g = x;
    ens.set_position(p, 0, {g, 0.0});
    for (std::size_t j = 0; j < steps; ++j) {
      const double s = ens.time(j);
      const double t = ens.time(j + 1);
      ens.set_drift(p, j, {-(g - y) / (1.0 - s), 0.0});
      double z[1];
      rng.normals(std::uint32_t(j), z);
      ens.mutable_increments(p, j)[0] = z[0] * sqdt;
      // Exact transition: N(y + (1−t)/(1−s)(g − y), (1−t)(t−s)/(1−s)).
      const double mean = y + (1.0 - t) / (1.0 - s) * (g - y);
      const double var = (1.0 - t) * (t - s) / (1.0 - s);
      g = mean + std::sqrt(var) * z[0];
      check_finite({g, 0.0}, p, j + 1);
      ens.set_position(p, j + 1, {g, 0.0});
    }
    ens.set_drift(p, steps, {-(g - y) / (1.0 - ens.time(steps)), 0.0});
  });
  return ens;
}

PathEnsemble thin(const PathEnsemble& ens, std::size_t stride) {
  if (stride == 0 || ens.steps() % stride != 0) throw std::invalid_argument("stride must divide the step count");
  const bool keep = ens.stores_increments() && ens.channels() > 0;
  const std::size_t steps = ens.steps() / stride;
  PathEnsemble out(ens.kind(), ens.paths(), steps, ens.dim(), keep ? ens.channels() : 0,
                   ens.dt() * double(stride), ens.seed(), true);
  out.set_nu(ens.nu());
  out.set_description(ens.description() + " (thinned x" + std::to_string(stride) + ")");
  for (std::size_t p = 0; p < ens.paths(); ++p) {
    for (std::size_t j = 0; j <= steps; ++j) {
      out.set_position(p, j, ens.position(p, j * stride));
      out.set_drift(p, j, ens.drift(p, j * stride));
    }
    for (std::size_t j = 0; keep && j < steps; ++j) {
      auto dst = out.mutable_increments(p, j);
      for (std::size_t s = 0; s < stride; ++s) {
        const auto src = ens.increments(p, j * stride + s);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> density_K(const PathEnsemble& ens, std::size_t path, const BasisIndexSet* basis,
                              const Drift& drift) {
  const std::size_t steps = ens.steps();
  std::vector<double> k(steps + 1, 1.0);
  if (basis && basis->channel_count() != ens.channels()) {
    throw std::invalid_argument("basis does not match the ensemble's noise channels");
  }
  const std::size_t channels = basis ? basis->channel_count() : 0;
  std::vector<Mat2> j0(channels), j1(channels);
  std::vector<double> dw(ens.channels());
  double log_k = 0.0;
  Vec2 x0 = ens.position(path, 0);
  double div_b0 = drift.divergence(0.0, x0);
  if (basis) channel_jacobians(*basis, x0, j0);
  for (std::size_t j = 0; j < steps; ++j) {
    const Vec2 x1 = ens.position(path, j + 1);
    const double div_b1 = drift.divergence(ens.time(j + 1), x1);
    double noise = 0.0;
    if (basis) {
      channel_jacobians(*basis, x1, j1);
      ens.increments_into(path, j, dw);
      for (std::size_t c = 0; c < channels; ++c) noise += 0.5 * (j0[c].trace() + j1[c].trace()) * dw[c];
      noise *= std::sqrt(2.0);
      std::swap(j0, j1);
    }
    log_k -= noise + 0.5 * (div_b0 + div_b1) * ens.dt();
    k[j + 1] = std::exp(log_k);
    div_b0 = div_b1;
  }
  return k;
}

EstimateWithError drift_orthogonality(const PathEnsemble& ens, const FourierScalarField& f, std::size_t step) {
  if (step > ens.steps()) throw std::out_of_range("step outside ensemble");
  std::vector<double> v(ens.paths());
  for (std::size_t p = 0; p < ens.paths(); ++p) v[p] = dot(f.gradient(ens.wrapped(p, step)), ens.drift(p, step));
  return estimate_mean(v);
}

std::array<double, 2> uniformity_ks(const PathEnsemble& ens, std::size_t step) {
  std::vector<double> a(ens.paths()), b(ens.paths());
  for (std::size_t p = 0; p < ens.paths(); ++p) {
    const Vec2 x = ens.wrapped(p, step);
    a[p] = x.x;
    b[p] = x.y;
  }
  return {ks_uniform(std::move(a), 0.0, kTwoPi), ks_uniform(std::move(b), 0.0, kTwoPi)};
}

std::vector<double> displacements(const PathEnsemble& ens, std::size_t step, int axis) {
  std::vector<double> d(ens.paths());
  for (std::size_t p = 0; p < ens.paths(); ++p) d[p] = ens.position(p, step)[axis] - ens.position(p, 0)[axis];
  return d;
}

std::vector<double> realized_quadratic_variation(const PathEnsemble& ens, int axis) {
  std::vector<double> qv(ens.paths(), 0.0);
  for (std::size_t p = 0; p < ens.paths(); ++p) {
    double s = 0.0;
    for (std::size_t j = 0; j < ens.steps(); ++j) {
      const double d = ens.position(p, j + 1)[axis] - ens.position(p, j)[axis];
      s += d * d;
    }
    qv[p] = s;
  }
  return qv;
}

}  // namespace svlab
