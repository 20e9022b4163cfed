#pragma once

// Velocity/pressure histories on T²: the exact Taylor–Green vortex and a
// pseudo-spectral Navier-Stokes integrator.

#include <filesystem>
#include <memory>
#include <vector>

#include "svlab/fourier_field.hpp"
#include "svlab/spectral_grid.hpp"

namespace svlab {

/// Velocity frames u(t_j) and zero-mean pressures p(t_j) on a uniform grid
/// t_j = j·T/M. Off-grid times interpolate linearly in the coefficients.
class TimeDependentVelocity {
 public:
  TimeDependentVelocity(double T, std::vector<FourierVectorField> frames,
                        std::vector<FourierScalarField> pressures, double nu);

  /// Same field at every time.
  static TimeDependentVelocity steady(const FourierVectorField& u, const FourierScalarField& p,
                                      double nu, double T, int steps);

  double nu() const { return nu_; }
  double horizon() const { return T_; }
  int steps() const { return int(frames_.size()) - 1; }
  double dt() const { return T_ / steps(); }
  double time(int j) const { return j * dt(); }
  int truncation() const { return frames_.front().truncation(); }

  const FourierVectorField& frame(int j) const { return frames_.at(std::size_t(j)); }
  const FourierScalarField& pressure(int j) const { return pressures_.at(std::size_t(j)); }
  const std::vector<FourierVectorField>& frames() const { return frames_; }
  const std::vector<FourierScalarField>& pressures() const { return pressures_; }

  Vec2 value(double t, Vec2 x) const;
  Mat2 jacobian(double t, Vec2 x) const;
  double divergence(double t, Vec2 x) const { return jacobian(t, x).trace(); }
  double pressure_value(double t, Vec2 x) const;
  Vec2 pressure_gradient(double t, Vec2 x) const;

  FourierVectorField velocity_at(double t) const;
  FourierScalarField pressure_at(double t) const;

 private:
  // Frame index j and weight λ with t = (1−λ)t_j + λ t_{j+1}.
  std::pair<int, double> locate(double t) const;

  double T_;
  double nu_;
  std::vector<FourierVectorField> frames_;
  std::vector<FourierScalarField> pressures_;
};

/// u(t, x) = e^{−2νt}(cos x₁ sin x₂, −sin x₁ cos x₂) stored at truncation K ≥ 2.
FourierVectorField taylor_green_velocity(double nu, double t, int truncation);
/// p(t, x) = −e^{−4νt}(cos 2x₁ + cos 2x₂)/4.
FourierScalarField taylor_green_pressure(double nu, double t, int truncation);
TimeDependentVelocity taylor_green(double nu, double T, int steps, int truncation);

/// (u·∇)u truncated to the field's K, computed alias-free on a grid n > 3K.
FourierVectorField advection(const FourierVectorField& u);

/// Zero-mean p solving Δp = −div((u·∇)u).
FourierScalarField pressure_from_velocity(const FourierVectorField& u);

/// L² norm of ∂_t u + (u·∇)u + ν(−Δ)u + ∇p, with ∂_t u supplied.
double ns_residual(const FourierVectorField& u, const FourierVectorField& dudt,
                   const FourierScalarField& p, double nu);

/// RK4 integrator for the Leray-projected spectral NS equation dealiased on a padded grid.
class NsStepper {
 public:
  NsStepper(int truncation, double nu);

  FourierVectorField rhs(const FourierVectorField& u) const;
  FourierVectorField step(const FourierVectorField& u, double dt) const;

 private:
  int truncation_;
  double nu_;
  SpectralGrid grid_;
};

FourierVectorField ns_step(const FourierVectorField& state, double nu, double dt);

/// Integrate from u0 over [0, T], storing `frames` + 1 frames with their pressures.
TimeDependentVelocity ns_solve(const FourierVectorField& u0, double nu, double T, int frames,
                               int substeps = 1);

/// Largest eigenvalue of ∇²p over an n×n grid.
double hessian_bound(const FourierScalarField& p, int grid = 128);
/// Max of hessian_bound over every stored pressure frame.
double hessian_bound(const TimeDependentVelocity& u, int grid = 128);

/// ½ (2π)⁻² ∫ |u|² dx.
double kinetic_energy(const FourierVectorField& u);

/// JSON manifest plus one field file per frame and pressure, all in `dir`.
void save_velocity(const std::filesystem::path& dir, const TimeDependentVelocity& u);
TimeDependentVelocity load_velocity(const std::filesystem::path& manifest);

}  // namespace svlab
