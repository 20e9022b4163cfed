#pragma once

// Perturbations of path ensembles: the two perturbation-of-identity flows,
// Gâteaux derivatives of the action, and the class of same-noise,
// endpoint-matched competitors used for minimality.

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "svlab/action_lab.hpp"

namespace svlab {

enum class PerturbationKind { phi, psi, pinned_shift };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::psi;
  TestPair pair;
  /// Bounded continuous function of the Brownian driver (pinned_shift).
  std::function<double(Vec2)> alpha_fn;
  std::string alpha_name;
  /// Spatially constant direction of the competitor velocity (pinned_shift).
  Vec2 a;

  static PerturbationSpec flow(PerturbationKind kind, TestPair pair);
  static PerturbationSpec pinned_shift(std::string alpha_name, std::function<double(Vec2)> alpha_fn, Vec2 a);
};

/// The driver functions {cos(x₁), sin(x₁+x₂), tanh(x₁)}.
std::vector<std::pair<std::string, std::function<double(Vec2)>>> alpha_fn_bank();

/// Ψ^t_ε(x): RK4 in s ∈ [0, ε] of dΨ/ds = α(t) w(Ψ).
Vec2 flow_psi(const PerturbationSpec& spec, double eps, double t, Vec2 x, int substeps = 8);
/// Φ^ε_t(x): RK4 in τ ∈ [0, t] of dΦ/dτ = ε α′(τ) w(Φ).
Vec2 flow_phi(const PerturbationSpec& spec, double eps, Vec2 x, double t, int steps_per_unit = 400);

/// Pathwise E ∫ [α′ w·D + α (∇_D w)·D − να □̂w·D](g_t) dt (trapezoid).
EstimateWithError first_variation_direct(const PathEnsemble& ens, const TestPair& pair, double nu,
                                         unsigned threads = 1);

struct FdOptions {
  std::vector<double> eps = {0.1, 0.05, 0.025};
  double h = 1e-3;      // spatial stencil for dΨ and ΔΨ
  double tau = 1e-5;    // time stencil for ∂_t Ψ
  int substeps = 2;     // RK4 steps per flow evaluation
  unsigned threads = 1;
  bool strict = true;   // throw when the Richardson estimates disagree
};

struct FdResult {
  EstimateWithError estimate;                // finest Richardson estimate
  EstimateWithError coarse;                  // Richardson estimate one level up
  std::vector<EstimateWithError> by_eps;     // raw central differences
  bool consistent = true;
};

/// Central difference of S(Ψ_{±ε}(g)) on common random numbers, Richardson-extrapolated.
/// The perturbed drift is ∂_tΨ + dΨ·D_t g + νΔΨ, evaluated by finite differences.
FdResult first_variation_fd(const PathEnsemble& ens, const PerturbationSpec& spec, double nu,
                            const FdOptions& options = {});

/// Competitor g* = g + β(w,t) a with drift D_t g + c(w,t) a; shares the base ensemble's noise.
class ClassGMember {
 public:
  ClassGMember(const PathEnsemble& base, Vec2 a, std::vector<double> beta, std::vector<double> c,
               std::string label);

  const PathEnsemble& base() const { return *base_; }
  Vec2 direction() const { return a_; }
  const std::string& label() const { return label_; }

  double beta(std::size_t p, std::size_t j) const { return beta_[index(p, j)]; }
  double c(std::size_t p, std::size_t j) const { return c_[index(p, j)]; }
  Vec2 velocity(std::size_t p, std::size_t j) const { return c(p, j) * a_; }
  Vec2 position(std::size_t p, std::size_t j) const { return base_->position(p, j) + beta(p, j) * a_; }
  Vec2 drift(std::size_t p, std::size_t j) const { return base_->drift(p, j) + velocity(p, j); }

  /// max_p |g*(T) − g(T)|.
  double endpoint_gap() const;
  /// ½ ∫ |D_t g*|² dt per path.
  std::vector<double> action_per_path() const;
  /// ½ ∫ |v|² dt per path.
  std::vector<double> half_velocity_energy() const;

 private:
  std::size_t index(std::size_t p, std::size_t j) const { return p * (base_->steps() + 1) + j; }

  const PathEnsemble* base_;
  Vec2 a_;
  std::vector<double> beta_;
  std::vector<double> c_;
  std::string label_;
};

/// β = sin(πt/T) ∫₀ᵗ α(w_s) ds and c = ∂_tβ along each stored Brownian driver.
ClassGMember sample_class_g(const PathEnsemble& base, const PerturbationSpec& spec, unsigned threads = 1);
/// Deterministic β(t), c(t) shared by every path.
ClassGMember class_g_from_profile(const PathEnsemble& base, const std::function<double(double)>& beta,
                                  const std::function<double(double)>& c, Vec2 a, std::string label);

struct MinimalityReport {
  EstimateWithError b_base, b_star;
  EstimateWithError s_base, s_star;
  EstimateWithError s_gap;           // S(g*) − S(g), paired
  EstimateWithError half_v_energy;   // ½ E ∫ |v|²
  EstimateWithError gap_excess;      // S(g*) − S(g) − ½∫|v|², paired
  EstimateWithError fd_derivative;   // d/dε S(g + εβa) at 0
  double max_poincare_ratio = 0.0;
  double hessian_bound = 0.0;
  double R_T2 = 0.0;
  bool hypothesis_holds = true;      // R T² ≤ π²
  bool b_inequality = true;
  bool s_inequality = true;
  bool gap_matches = true;
  bool poincare = true;
  bool fd_zero = true;
  std::vector<std::string> warnings;

  bool passed() const { return b_inequality && s_inequality && gap_matches && poincare && fd_zero; }
};

/// Compare the reversed-drift ensemble g with a competitor; p(t, ·) is the
/// Navier-Stokes pressure at time T − t. A NaN `hessian` means compute it from u.
MinimalityReport minimality_check(const PathEnsemble& g, const ClassGMember& gstar, const TimeDependentVelocity& u,
                                  unsigned threads = 1,
                                  double hessian = std::numeric_limits<double>::quiet_NaN());

struct DtDtgReport {
  EstimateWithError residual;        // RMS over bins of E[ΔU/Δt − ∇p]
  std::vector<Vec2> bin_means;
  std::vector<Vec2> bin_se;
  EstimateWithError martingale_gap; // Σ|ΔU − ∇p dt|² − Σ 2ν|∇U|² dt per path
  EstimateWithError martingale_variance;
};

/// Drift identity of U_t = u(T − t, g_t) along the reversed-drift ensemble,
/// binned over 16 equal time bins.
DtDtgReport dtdtg_check(const PathEnsemble& ens, const TimeDependentVelocity& u, int bins = 16);

}  // namespace svlab
