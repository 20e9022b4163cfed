#pragma once

// Ensembles of torus-valued semimartingales: Itô drift-diffusion, the
// Stratonovich SDE driven by the divergence-free basis, and the 1-d
// Brownian bridge.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "svlab/drift.hpp"
#include "svlab/estimate.hpp"
#include "svlab/rng.hpp"
#include "svlab/torus_fields.hpp"

namespace svlab {

enum class EnsembleKind : std::uint64_t { ito = 0, stratonovich_basis = 1, bridge = 2 };

std::string to_string(EnsembleKind kind);

struct InitialLaw {
  enum class Kind { uniform, fixed, product };

  Kind kind = Kind::uniform;
  Vec2 point;
  /// Maps two independent Uniform[0,1) draws to a starting point.
  std::function<Vec2(double, double)> sampler;

  static InitialLaw uniform() { return {}; }
  static InitialLaw fixed(Vec2 p) { return {Kind::fixed, p, {}}; }
  static InitialLaw product(std::function<Vec2(double, double)> fn) { return {Kind::product, {}, std::move(fn)}; }

  Vec2 sample(const PathRng& rng) const;
};

struct SdeParams {
  double nu = 0.1;
  double T = 1.0;
  InitialLaw initial;
  Drift drift;

  void validate() const;
};

struct SimOptions {
  unsigned threads = 1;
  /// Keep every Brownian increment. When off, increments are regenerated
  /// from the counter-based stream on demand.
  bool store_increments = true;
};

class PathEnsemble {
 public:
  PathEnsemble(EnsembleKind kind, std::size_t paths, std::size_t steps, int dim, std::size_t channels,
               double dt, std::uint64_t seed, bool store_increments = true);

  EnsembleKind kind() const { return kind_; }
  std::size_t paths() const { return paths_; }
  std::size_t steps() const { return steps_; }
  int dim() const { return dim_; }
  std::size_t channels() const { return channels_; }
  double dt() const { return dt_; }
  double horizon() const { return dt_ * double(steps_); }
  double time(std::size_t j) const { return dt_ * double(j); }
  std::uint64_t seed() const { return seed_; }
  double nu() const { return nu_; }
  void set_nu(double nu) { nu_ = nu; }
  const std::string& description() const { return description_; }
  void set_description(std::string d) { description_ = std::move(d); }

  /// Lifted position in ℝ² (ℝ for the bridge, with y = 0).
  Vec2 position(std::size_t p, std::size_t j) const;
  /// Position reduced to [0, 2π)²; equal to position() for the bridge.
  Vec2 wrapped(std::size_t p, std::size_t j) const;
  Vec2 drift(std::size_t p, std::size_t j) const;

  bool stores_increments() const { return !dw_.empty() || channels_ == 0 || steps_ == 0; }
  /// Brownian increments of step j → j+1 (variance dt per channel).
  std::span<const double> increments(std::size_t p, std::size_t j) const;
  /// Stored or regenerated increments.
  void increments_into(std::size_t p, std::size_t j, std::span<double> out) const;

  void set_position(std::size_t p, std::size_t j, Vec2 x);
  void set_drift(std::size_t p, std::size_t j, Vec2 b);
  std::span<double> mutable_increments(std::size_t p, std::size_t j);

  std::span<const double> position_data() const { return pos_; }
  std::span<const double> drift_data() const { return drift_; }
  std::span<const double> increment_data() const { return dw_; }

  bool operator==(const PathEnsemble& o) const;

 private:
  std::size_t node(std::size_t p, std::size_t j) const { return (p * (steps_ + 1) + j) * std::size_t(dim_); }

  EnsembleKind kind_;
  std::size_t paths_;
  std::size_t steps_;
  int dim_;
  std::size_t channels_;
  double dt_;
  std::uint64_t seed_;
  double nu_ = 0.0;
  std::string description_;
  std::vector<double> pos_;
  std::vector<double> drift_;
  std::vector<double> dw_;
};

/// Euler–Maruyama for dg = b(t, g) dt + √(2ν) dW with two channels.
PathEnsemble simulate_ito(const SdeParams& params, std::size_t paths, std::size_t steps, std::uint64_t seed,
                          const SimOptions& options = {});

/// Re-integrate the Itô scheme from given starting points and stored
/// increments (path-major, `steps` × 2 per path).
PathEnsemble replay_ito(const SdeParams& params, double dt, std::span<const Vec2> starts,
                        std::span<const double> increments, std::size_t steps, std::uint64_t seed = 0);

/// Heun scheme for dξ = Σ √2 (A_k ∘ dw^k + B_k ∘ dw̃^k) + b(t, ξ) dt over every basis channel.
/// The basis carries ν; params.nu must match it.
PathEnsemble simulate_stratonovich_basis(const SdeParams& params, const BasisIndexSet& basis,
                                         std::size_t paths, std::size_t steps, std::uint64_t seed,
                                         const SimOptions& options = {});

/// dg = dW − (g − y)/(1 − t) dt on [0, 1 − ε], advanced with the exact
/// Gaussian transition of the linear SDE.
PathEnsemble brownian_bridge(double x, double y, std::size_t paths, std::size_t steps, double cutoff,
                             std::uint64_t seed, const SimOptions& options = {});

/// K_j = exp(−Σ_c ∫ div σ_c ∘ dW^c − ∫ div b ds) along one stored path, with
/// σ_c the basis channels (nullptr for isotropic constant noise).
/// Every `stride`-th node; stored increments are summed over each coarse step.
PathEnsemble thin(const PathEnsemble& ens, std::size_t stride);

std::vector<double> density_K(const PathEnsemble& ens, std::size_t path, const BasisIndexSet* basis,
                              const Drift& drift);

/// E⟨∇f(g_t), D_t g⟩ at step j.
EstimateWithError drift_orthogonality(const PathEnsemble& ens, const FourierScalarField& f, std::size_t step);

/// KS distance of each wrapped coordinate at step j from Uniform[0, 2π).
std::array<double, 2> uniformity_ks(const PathEnsemble& ens, std::size_t step);

/// Per-path values of g_j − g_0 in coordinate `axis`.
std::vector<double> displacements(const PathEnsemble& ens, std::size_t step, int axis);

/// Per-path realized quadratic variation Σ_j (Δg)² of coordinate `axis`.
std::vector<double> realized_quadratic_variation(const PathEnsemble& ens, int axis);

}  // namespace svlab
