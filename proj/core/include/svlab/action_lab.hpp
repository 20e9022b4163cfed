#pragma once

// Kinetic action of path ensembles, the occupation measure of (t, g_t, D_t g)
// and weak-form Navier-Stokes residuals against divergence-free test pairs.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "svlab/estimate.hpp"
#include "svlab/reference_flows.hpp"
#include "svlab/sde_engine.hpp"
#include "svlab/torus_fields.hpp"

namespace svlab {

inline constexpr std::size_t kWholePath = std::numeric_limits<std::size_t>::max();

/// ½ ∫₀^{t_upto} |D_t g|² dt per path (trapezoid).
std::vector<double> action_per_path(const PathEnsemble& ens, std::size_t upto_step = kWholePath,
                                    unsigned threads = 1);
EstimateWithError action(const PathEnsemble& ens, unsigned threads = 1);

/// Action of the Taylor–Green drift: (1 − e^{−4νT}) / (16ν).
double taylor_green_action(double nu, double T);
/// Bridge 0 → 0 action on [0, 1 − ε]: ½(−ln ε − 1 + ε).
double bridge_action(double cutoff);

struct OccupationSample {
  double t = 0.0;
  Vec2 x;
  Vec2 v;
  std::size_t path = 0;
  double weight = 1.0;  // trapezoid weight: 1/2 at a path's first and last sample
};

/// (t_j, g_{t_j}, D_{t_j} g) for every `stride`-th step (always including t = 0), path-major.
std::vector<OccupationSample> occupation_measure(const PathEnsemble& ens, std::size_t stride = 1);

/// Mean of f over the samples; the SE treats each path's samples as one block.
EstimateWithError occupation_mean(const std::vector<OccupationSample>& samples,
                                  const std::function<double(const OccupationSample&)>& f);

/// Test profile α on [0, T] with α(0) = α(T) = 0 and its derivative.
struct TimeProfile {
  std::string name;
  double T = 1.0;
  std::function<double(double)> alpha;
  std::function<double(double)> alpha_prime;

  /// sin(nπt/T).
  static TimeProfile sine(int harmonic, double T);
  static TimeProfile zero(double T);
};

struct TestPair {
  std::string name;
  FourierVectorField w;
  TimeProfile profile;

  /// Same pair with w scaled by s.
  TestPair scaled(double s) const;
};

/// {A(1,0), B(1,1), A(2,1)} × {sin(πt/T), sin(2πt/T)}.
std::vector<TestPair> test_bank(const BasisIndexSet& basis, double T);

/// α′(t) v·w(x) + α(t) v·∇_v w(x) − ν α(t) v·□̂w(x), with □̂w supplied.
double weak_integrand(const TestPair& pair, const FourierVectorField& box_w, double nu, double t, Vec2 x,
                      Vec2 v);

/// T · (occupation mean of the weak integrand); un-normalized like the deterministic residual.
EstimateWithError dpm_residual(const std::vector<OccupationSample>& samples, const TestPair& pair, double nu);

/// ∫₀ᵀ ⟨u_t, α′w + α ∇_{u_t}w − να □̂w⟩ dt: spectral in x, trapezoid over the stored frames.
double weak_ns_residual(const TimeDependentVelocity& u, const TestPair& pair);

}  // namespace svlab
