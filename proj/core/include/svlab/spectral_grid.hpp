#pragma once

// Uniform n×n collocation grid on T² and the transforms between grid values
// and truncated Fourier coefficients. Grid point (a, b) sits at
// (2πa/n, 2πb/n); values are stored row-major as v[a * n + b].
//
// Synthesis/analysis are exact for trigonometric polynomials whose modes
// satisfy |k|_∞ < n/2, so products of two fields truncated at K are
// resolved alias-free when n > 3K (the 2/3 rule).

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "svlab/fourier_field.hpp"

namespace svlab {

class SpectralGrid {
 public:
  explicit SpectralGrid(int n);
  ~SpectralGrid();
  SpectralGrid(SpectralGrid&&) noexcept;
  SpectralGrid& operator=(SpectralGrid&&) noexcept;
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int size() const { return n_; }
  Vec2 point(int a, int b) const;

  std::vector<double> synthesize(const FourierScalarField& f) const;
  std::array<std::vector<double>, 2> synthesize(const FourierVectorField& f) const;

  /// Project grid values onto modes |k|_∞ ≤ truncation (requires 2·truncation < n).
  FourierScalarField analyze(std::span<const double> values, int truncation) const;
  FourierVectorField analyze(std::span<const double> x, std::span<const double> y,
                             int truncation) const;

  /// Sample a function on the grid.
  std::vector<double> sample(const std::function<double(Vec2)>& fn) const;

 private:
  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
};

/// Smallest grid that resolves quadratic products of fields truncated at K.
inline int dealiased_grid_size(int truncation) { return 3 * truncation + 1 < 4 ? 4 : 3 * truncation + 1; }

/// Spectral projection of an analytic vector field onto |k|_∞ ≤ truncation,
/// sampled on an n×n grid (n defaults to 4·truncation + 4).
FourierVectorField project_vector_field(int truncation, const std::function<Vec2(Vec2)>& fn,
                                        int grid = 0);
FourierScalarField project_scalar_field(int truncation, const std::function<double(Vec2)>& fn,
                                        int grid = 0);

}  // namespace svlab
