#pragma once

// Divergence-free basis fields on T² and the differential operators acting on
// truncated Fourier fields.

#include <span>
#include <vector>

#include "svlab/fourier_field.hpp"

namespace svlab {

enum class BasisKind { cos, sin };

/// Canonical half-space modes 0 < |k|_∞ ≤ K with decay |k|^{-β}, scaled so that
/// the cos/sin frame {A_k, B_k} carries diffusivity ν.
class BasisIndexSet {
 public:
  BasisIndexSet(double beta, int truncation, double nu);
  /// Same normalization restricted to an explicit list of half-space modes.
  static BasisIndexSet from_modes(double beta, double nu, std::vector<Wavevector> modes);

  double beta() const { return beta_; }
  int truncation() const { return truncation_; }
  double nu() const { return nu_; }
  /// Σ_k |k⊥|² / (2|k|^{2β}) over the retained modes; makes the frame identity exact.
  double nu0() const { return nu0_; }
  /// Σ_k 1 / (2|k|^{2β}) over the retained modes, as literally summed.
  double series_nu0() const { return series_nu0_; }
  /// √(ν / ν₀).
  double amplitude() const { return amplitude_; }

  const std::vector<Wavevector>& modes() const { return modes_; }
  /// amp / |k|^β per retained mode.
  const std::vector<double>& scales() const { return scales_; }
  /// Two channels (A_k, B_k) per retained mode.
  std::size_t channel_count() const { return 2 * modes_.size(); }
  bool contains(Wavevector k) const;

 private:
  BasisIndexSet() = default;
  void normalize();

  double beta_ = 3.0;
  int truncation_ = 0;
  double nu_ = 0.0;
  double nu0_ = 0.0;
  double series_nu0_ = 0.0;
  double amplitude_ = 0.0;
  std::vector<Wavevector> modes_;
  std::vector<double> scales_;
};

/// A_k = amp·cos(k·θ) k⊥/|k|^β (kind cos) or B_k with sin.
FourierVectorField basis_field(Wavevector k, BasisKind kind, const BasisIndexSet& basis);
/// cos(k·θ) k⊥/|k| or sin(k·θ) k⊥/|k|: the unit-amplitude shear along k.
FourierVectorField unit_shear(Wavevector k, BasisKind kind);

/// Values of every noise channel at θ, ordered A_{k₀}, B_{k₀}, A_{k₁}, B_{k₁}, ...
void evaluate_channels(const BasisIndexSet& basis, Vec2 theta, std::span<Vec2> out);
/// Jacobians of every channel at θ, same order.
void channel_jacobians(const BasisIndexSet& basis, Vec2 theta, std::span<Mat2> out);

/// Σ_k ⟨A_k(θ), v⟩² + ⟨B_k(θ), v⟩².
double frame_sum(Vec2 v, Vec2 theta, const BasisIndexSet& basis);
/// Σ_k ∇_{A_k}A_k + ∇_{B_k}B_k at θ.
Vec2 strat_correction(const BasisIndexSet& basis, Vec2 theta);

/// Per-mode I − kkᵀ/|k|²; the mean is kept.
FourierVectorField leray_project(const FourierVectorField& f);
/// −Δf, i.e. |k|² f̂(k).
FourierVectorField negative_laplacian(const FourierVectorField& f);
/// 2 Def*Def f via the symmetrized gradient. Throws for non-divergence-free input.
FourierVectorField ebin_marsden_laplacian(const FourierVectorField& f);
/// (dd* + d*d) on the 1-form dual to f, returned as a vector field.
FourierVectorField hodge_laplacian(const FourierVectorField& f);

/// Normalized ⟨Def f, Def g⟩ = (2π)⁻² ∫ Σ_ij Def_ij f Def_ij g dx.
double deformation_inner(const FourierVectorField& f, const FourierVectorField& g);

/// (2π)⁻² ∫ |f|² dx by midpoint quadrature on an n×n grid.
double grid_energy(const FourierVectorField& f, int n);

/// Random divergence-free field with O(1) coefficients on |k|_∞ ≤ K.
template <class Rng>
FourierVectorField random_divergence_free(int truncation, Rng& rng);

}  // namespace svlab

#include <random>

namespace svlab {

template <class Rng>
FourierVectorField random_divergence_free(int truncation, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierVectorField f(truncation);
  for (int k1 = 0; k1 <= truncation; ++k1) {
    for (int k2 = -truncation; k2 <= truncation; ++k2) {
      const Wavevector k{k1, k2};
      if (!k.in_half_space()) continue;
      const Complex a{normal(rng), normal(rng)};
      const double s = 1.0 / std::sqrt(double(k.norm2()));
      f.set_coeff(k, {a * (k.k2 * s), a * (-k.k1 * s)});
    }
  }
  f.set_mean({normal(rng), normal(rng)});
  return f;
}

}  // namespace svlab
