#include "svlab/action_lab.hpp"

#include <cmath>
#include <stdexcept>

#include "svlab/parallel.hpp"
#include "svlab/spectral_grid.hpp"

namespace svlab {

std::vector<double> action_per_path(const PathEnsemble& ens, std::size_t upto_step, unsigned threads) {
  const std::size_t last = upto_step == kWholePath ? ens.steps() : upto_step;
  if (last > ens.steps()) throw std::out_of_range("action cutoff beyond the ensemble horizon");
  std::vector<double> out(ens.paths(), 0.0);
  const double dt = ens.dt();
  parallel_for(ens.paths(), threads, [&](std::size_t p) {
    if (last == 0) return;
    double s = 0.5 * (norm2(ens.drift(p, 0)) + norm2(ens.drift(p, last)));
    for (std::size_t j = 1; j < last; ++j) s += norm2(ens.drift(p, j));
    out[p] = 0.5 * dt * s;
  });
  return out;
}

EstimateWithError action(const PathEnsemble& ens, unsigned threads) {
  return estimate_mean(action_per_path(ens, kWholePath, threads));
}

double taylor_green_action(double nu, double T) { return -std::expm1(-4.0 * nu * T) / (16.0 * nu); }

double bridge_action(double cutoff) { return 0.5 * (-std::log(cutoff) - 1.0 + cutoff); }

std::vector<OccupationSample> occupation_measure(const PathEnsemble& ens, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  std::vector<OccupationSample> out;
  out.reserve(ens.paths() * (ens.steps() / stride + 1));
  const std::size_t last = ens.steps() / stride * stride;
  for (std::size_t p = 0; p < ens.paths(); ++p) {
    for (std::size_t j = 0; j <= ens.steps(); j += stride) {
      const double w = (last > 0 && (j == 0 || j == last)) ? 0.5 : 1.0;
      out.push_back({ens.time(j), ens.wrapped(p, j), ens.drift(p, j), p, w});
    }
  }
  return out;
}

EstimateWithError occupation_mean(const std::vector<OccupationSample>& samples,
                                  const std::function<double(const OccupationSample&)>& f) {
  if (samples.empty()) return {};
  // Per-path weighted block means, then the mean over paths; blocks are equal-sized.
  std::vector<double> blocks;
  std::vector<double> current;
  std::vector<double> weights;
  std::size_t path = samples.front().path;
  std::size_t block_size = 0;
  auto flush = [&] {
    if (block_size == 0) block_size = current.size();
    if (current.size() != block_size) throw std::invalid_argument("occupation blocks must have equal size");
    blocks.push_back(pairwise_sum(current) / pairwise_sum(weights));
    current.clear();
    weights.clear();
  };
  for (const auto& s : samples) {
    if (s.path != path) {
      flush();
      path = s.path;
    }
    current.push_back(s.weight * f(s));
    weights.push_back(s.weight);
  }
  flush();
  EstimateWithError e = estimate_mean(blocks);
  e.n = samples.size();
  return e;
}

TimeProfile TimeProfile::sine(int harmonic, double T) {
  if (harmonic < 1) throw std::invalid_argument("harmonic must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  const double w = harmonic * kPi / T;
  TimeProfile p;
  p.name = harmonic == 1 ? "sin(pi t/T)" : "sin(" + std::to_string(harmonic) + " pi t/T)";
  p.T = T;
  p.alpha = [w](double t) { return std::sin(w * t); };
  p.alpha_prime = [w](double t) { return w * std::cos(w * t); };
  return p;
}

TimeProfile TimeProfile::zero(double T) {
  TimeProfile p;
  p.name = "0";
  p.T = T;
  p.alpha = [](double) { return 0.0; };
  p.alpha_prime = [](double) { return 0.0; };
  return p;
}

TestPair TestPair::scaled(double s) const {
  TestPair out = *this;
  out.w *= s;
  return out;
}

std::vector<TestPair> test_bank(const BasisIndexSet& basis, double T) {
  struct Entry {
    const char* name;
    Wavevector k;
    BasisKind kind;
  };
  const Entry fields[] = {{"A(1,0)", {1, 0}, BasisKind::cos},
                          {"B(1,1)", {1, 1}, BasisKind::sin},
                          {"A(2,1)", {2, 1}, BasisKind::cos}};
  std::vector<TestPair> bank;
  for (const Entry& e : fields) {
    for (int h = 1; h <= 2; ++h) {
      TestPair pair;
      pair.profile = TimeProfile::sine(h, T);
      pair.w = basis_field(e.k, e.kind, basis);
      pair.name = std::string(e.name) + " x " + pair.profile.name;
      bank.push_back(std::move(pair));
    }
  }
  return bank;
}

double weak_integrand(const TestPair& pair, const FourierVectorField& box_w, double nu, double t, Vec2 x,
                      Vec2 v) {
  const double a = pair.profile.alpha(t);
  const double ap = pair.profile.alpha_prime(t);
  double out = ap * dot(v, pair.w.evaluate(x));
  if (a != 0.0) out += a * (dot(v, pair.w.gradient_tensor(x) * v) - nu * dot(v, box_w.evaluate(x)));
  return out;
}

EstimateWithError dpm_residual(const std::vector<OccupationSample>& samples, const TestPair& pair, double nu) {
  const FourierVectorField box_w = ebin_marsden_laplacian(pair.w);
  EstimateWithError e = occupation_mean(samples, [&](const OccupationSample& s) {
    return weak_integrand(pair, box_w, nu, s.t, s.x, s.v);
  });
  e.value *= pair.profile.T;
  e.std_error *= pair.profile.T;
  return e;
}

double weak_ns_residual(const TimeDependentVelocity& u, const TestPair& pair) {
  const FourierVectorField box_w = ebin_marsden_laplacian(pair.w);
  const int k = std::max(u.truncation(), pair.w.truncation());
  const SpectralGrid grid(dealiased_grid_size(k));
  // ∂_j w as vector fields, j = 0, 1.
  std::array<std::array<std::vector<double>, 2>, 2> dw;
  for (int j = 0; j < 2; ++j) {
    const FourierVectorField d = pair.w.map_modes(
        [j](Wavevector q, const CVec2& c) -> CVec2 {
          const Complex f{0.0, double(q[j])};
          return {f * c[0], f * c[1]};
        },
        [](Vec2) { return Vec2{}; });
    dw[j] = grid.synthesize(d.with_truncation(k));
  }
  const double nu = u.nu();
  std::vector<double> integrand(std::size_t(u.steps()) + 1);
  for (int f = 0; f <= u.steps(); ++f) {
    const double t = u.time(f);
    const FourierVectorField& uf = u.frame(f);
    const double a = pair.profile.alpha(t);
    double value = pair.profile.alpha_prime(t) * l2_inner(uf, pair.w);
    if (a != 0.0) {
      const auto uv = grid.synthesize(uf.with_truncation(k));
      // ⟨u, ∇_u w⟩ = mean over the grid of u_i u_j ∂_j w_i, exact for n > 3K.
      std::vector<double> cubic(uv[0].size());
      for (std::size_t i = 0; i < cubic.size(); ++i) {
        const double u0 = uv[0][i];
        const double u1 = uv[1][i];
        cubic[i] = u0 * (u0 * dw[0][0][i] + u1 * dw[1][0][i]) + u1 * (u0 * dw[0][1][i] + u1 * dw[1][1][i]);
      }
      const double transport = pairwise_sum(cubic) / double(cubic.size());
      value += a * (transport - nu * l2_inner(uf, box_w));
    }
    integrand[std::size_t(f)] = value;
  }
  double s = 0.5 * (integrand.front() + integrand.back());
  for (std::size_t i = 1; i + 1 < integrand.size(); ++i) s += integrand[i];
  return s * u.dt();
}

}  // namespace svlab
