#pragma once

// Real-valued fields on T² stored as truncated Fourier series
//
//   f(θ) = f̂(0) + Σ_{k ≠ 0, |k|_∞ ≤ K} f̂(k) e^{i k·θ},   f̂(−k) = conj(f̂(k)).
//
// Coefficients live on a dense (2K+1)² lattice. Hermitian symmetry is
// maintained by every mutator, so evaluation sums only the canonical half
// space and doubles the real part.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "svlab/geometry.hpp"

namespace svlab {

using Complex = std::complex<double>;
using CVec2 = std::array<Complex, 2>;

class FourierVectorField {
 public:
  static constexpr int dim = 2;

  explicit FourierVectorField(int truncation = 0);

  int truncation() const { return truncation_; }
  bool contains(Wavevector k) const { return k.norm_inf() <= truncation_; }

  /// Coefficient of e^{ik·θ}; zero outside the truncation. k = 0 gives the mean.
  CVec2 coeff(Wavevector k) const;
  /// Set f̂(k) and f̂(−k) = conj(f̂(k)). Throws for k = 0 or k outside the truncation.
  void set_coeff(Wavevector k, const CVec2& c);
  void add_to_coeff(Wavevector k, const CVec2& c);

  Vec2 mean() const { return {coeffs_[center()][0].real(), coeffs_[center()][1].real()}; }
  void set_mean(Vec2 m);

  /// Half-space wavevectors with a nonzero coefficient, in lattice order.
  const std::vector<Wavevector>& active_modes() const { return active_; }

  /// Pointwise value by direct trigonometric summation.
  Vec2 evaluate(Vec2 theta) const;
  /// Jacobian J(i, j) = ∂_j f_i by direct trigonometric summation.
  Mat2 gradient_tensor(Vec2 theta) const;
  double divergence(Vec2 theta) const;

  /// k · f̂(k) = 0 for all k, up to rtol · |k||f̂(k)|.
  bool is_divergence_free(double rtol = 1e-12) const;

  /// Same coefficients on a different truncation (dropping or zero-padding modes).
  FourierVectorField with_truncation(int truncation) const;

  /// Apply fn(k, f̂(k)) on the half space (k ≠ 0); partners and mean are
  /// handled automatically (the mean is passed through `mean_fn`).
  FourierVectorField map_modes(const std::function<CVec2(Wavevector, const CVec2&)>& fn,
                               const std::function<Vec2(Vec2)>& mean_fn = {}) const;

  FourierVectorField& operator+=(const FourierVectorField& o);
  FourierVectorField& operator-=(const FourierVectorField& o);
  FourierVectorField& operator*=(double s);
  friend FourierVectorField operator+(FourierVectorField a, const FourierVectorField& b) { return a += b; }
  friend FourierVectorField operator-(FourierVectorField a, const FourierVectorField& b) { return a -= b; }
  friend FourierVectorField operator*(double s, FourierVectorField a) { return a *= s; }

  bool operator==(const FourierVectorField& o) const;

 private:
  std::size_t side() const { return std::size_t(2 * truncation_ + 1); }
  std::size_t center() const { return index({0, 0}); }
  std::size_t index(Wavevector k) const {
    return std::size_t(k.k1 + truncation_) * side() + std::size_t(k.k2 + truncation_);
  }
  void refresh_active();

  int truncation_;
  std::vector<CVec2> coeffs_;
  std::vector<Wavevector> active_;
};

class FourierScalarField {
 public:
  explicit FourierScalarField(int truncation = 0);

  int truncation() const { return truncation_; }
  bool contains(Wavevector k) const { return k.norm_inf() <= truncation_; }

  Complex coeff(Wavevector k) const;
  void set_coeff(Wavevector k, Complex c);

  double mean() const { return coeffs_[center()].real(); }
  void set_mean(double m);

  const std::vector<Wavevector>& active_modes() const { return active_; }

  double evaluate(Vec2 theta) const;
  Vec2 gradient(Vec2 theta) const;
  /// H(i, j) = ∂_i ∂_j f.
  Mat2 hessian(Vec2 theta) const;

  FourierScalarField with_truncation(int truncation) const;
  FourierScalarField map_modes(const std::function<Complex(Wavevector, Complex)>& fn,
                               const std::function<double(double)>& mean_fn = {}) const;

  FourierScalarField& operator+=(const FourierScalarField& o);
  FourierScalarField& operator*=(double s);
  friend FourierScalarField operator+(FourierScalarField a, const FourierScalarField& b) { return a += b; }
  friend FourierScalarField operator*(double s, FourierScalarField a) { return a *= s; }

  bool operator==(const FourierScalarField& o) const;

 private:
  std::size_t side() const { return std::size_t(2 * truncation_ + 1); }
  std::size_t center() const { return index({0, 0}); }
  std::size_t index(Wavevector k) const {
    return std::size_t(k.k1 + truncation_) * side() + std::size_t(k.k2 + truncation_);
  }
  void refresh_active();

  int truncation_;
  std::vector<Complex> coeffs_;
  std::vector<Wavevector> active_;
};

/// Normalized L² inner product ⟨f, g⟩ = (2π)⁻² ∫ f·g dx, computed spectrally.
double l2_inner(const FourierVectorField& f, const FourierVectorField& g);
double l2_inner(const FourierScalarField& f, const FourierScalarField& g);

/// Gradient of a scalar field as a vector field.
FourierVectorField gradient_field(const FourierScalarField& p);
/// Divergence of a vector field as a scalar field.
FourierScalarField divergence_field(const FourierVectorField& f);

}  // namespace svlab
