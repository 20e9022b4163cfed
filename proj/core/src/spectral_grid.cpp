#include "svlab/spectral_grid.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace svlab {

namespace {

// The FFTW planner is not re-entrant; plan execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwDeleter> fftw_buffer(std::size_t count) {
  return std::unique_ptr<T[], FftwDeleter>(static_cast<T*>(fftw_malloc(sizeof(T) * count)));
}

}  // namespace

struct SpectralGrid::Plans {
  int n;
  std::size_t real_count;
  std::size_t complex_count;
  fftw_plan forward = nullptr;   // r2c
  fftw_plan backward = nullptr;  // c2r

  explicit Plans(int n_) : n(n_) {
    real_count = std::size_t(n) * std::size_t(n);
    complex_count = std::size_t(n) * std::size_t(n / 2 + 1);
    auto r = fftw_buffer<double>(real_count);
    auto c = fftw_buffer<fftw_complex>(complex_count);
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_r2c_2d(n, n, r.get(), c.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(n, n, c.get(), r.get(), FFTW_ESTIMATE);
    if (!forward || !backward) throw std::runtime_error("FFTW planning failed");
  }

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  std::size_t cindex(int k1, int k2) const {
    const int row = ((k1 % n) + n) % n;
    return std::size_t(row) * std::size_t(n / 2 + 1) + std::size_t(k2);
  }

  template <class CoeffFn>
  std::vector<double> synthesize(int truncation, CoeffFn coeff_of) const {
    if (2 * truncation >= n) throw std::invalid_argument("grid too coarse for field truncation");
    auto c = fftw_buffer<fftw_complex>(complex_count);
    for (std::size_t i = 0; i < complex_count; ++i) c[i][0] = c[i][1] = 0.0;
    for (int k1 = -truncation; k1 <= truncation; ++k1) {
      for (int k2 = 0; k2 <= truncation; ++k2) {
        const Complex v = coeff_of(Wavevector{k1, k2});
        const std::size_t i = cindex(k1, k2);
        c[i][0] = v.real();
        c[i][1] = v.imag();
      }
    }
    auto r = fftw_buffer<double>(real_count);
    fftw_execute_dft_c2r(backward, c.get(), r.get());
    return std::vector<double>(r.get(), r.get() + real_count);
  }

  template <class Store>
  void analyze(std::span<const double> values, int truncation, Store store) const {
    if (values.size() != real_count) throw std::invalid_argument("grid value count mismatch");
    if (2 * truncation >= n) throw std::invalid_argument("grid too coarse for requested truncation");
    auto r = fftw_buffer<double>(real_count);
    std::copy(values.begin(), values.end(), r.get());
    auto c = fftw_buffer<fftw_complex>(complex_count);
    fftw_execute_dft_r2c(forward, r.get(), c.get());
    const double scale = 1.0 / double(real_count);
    for (int k1 = -truncation; k1 <= truncation; ++k1) {
      for (int k2 = 0; k2 <= truncation; ++k2) {
        const std::size_t i = cindex(k1, k2);
        store(Wavevector{k1, k2}, Complex{c[i][0] * scale, c[i][1] * scale});
      }
    }
  }
};

SpectralGrid::SpectralGrid(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("grid size must be at least 2");
  plans_ = std::make_unique<Plans>(n);
}

SpectralGrid::~SpectralGrid() = default;
SpectralGrid::SpectralGrid(SpectralGrid&&) noexcept = default;
SpectralGrid& SpectralGrid::operator=(SpectralGrid&&) noexcept = default;

Vec2 SpectralGrid::point(int a, int b) const { return {kTwoPi * a / n_, kTwoPi * b / n_}; }

std::vector<double> SpectralGrid::synthesize(const FourierScalarField& f) const {
  return plans_->synthesize(f.truncation(), [&](Wavevector k) { return f.coeff(k); });
}

std::array<std::vector<double>, 2> SpectralGrid::synthesize(const FourierVectorField& f) const {
  return {plans_->synthesize(f.truncation(), [&](Wavevector k) { return f.coeff(k)[0]; }),
          plans_->synthesize(f.truncation(), [&](Wavevector k) { return f.coeff(k)[1]; })};
}

FourierScalarField SpectralGrid::analyze(std::span<const double> values, int truncation) const {
  const int side = 2 * truncation + 1;
  std::vector<Complex> lattice(std::size_t(side) * std::size_t(side));
  auto at = [&](int k1, int k2) -> Complex& {
    return lattice[std::size_t(k1 + truncation) * side + std::size_t(k2 + truncation)];
  };
  plans_->analyze(values, truncation, [&](Wavevector k, Complex c) { at(k.k1, k.k2) = c; });
  return FourierScalarField(truncation).map_modes(
      [&](Wavevector k, Complex) { return k.k2 >= 0 ? at(k.k1, k.k2) : std::conj(at(-k.k1, -k.k2)); },
      [&](double) { return at(0, 0).real(); });
}

FourierVectorField SpectralGrid::analyze(std::span<const double> x, std::span<const double> y,
                                         int truncation) const {
  const int side = 2 * truncation + 1;
  std::vector<CVec2> lattice(std::size_t(side) * std::size_t(side));
  auto at = [&](int k1, int k2) -> CVec2& {
    return lattice[std::size_t(k1 + truncation) * side + std::size_t(k2 + truncation)];
  };
  plans_->analyze(x, truncation, [&](Wavevector k, Complex c) { at(k.k1, k.k2)[0] = c; });
  plans_->analyze(y, truncation, [&](Wavevector k, Complex c) { at(k.k1, k.k2)[1] = c; });
  FourierVectorField zero(truncation);
  return zero.map_modes(
      [&](Wavevector k, const CVec2&) -> CVec2 {
        if (k.k2 >= 0) return at(k.k1, k.k2);
        const CVec2& p = at(-k.k1, -k.k2);
        return {std::conj(p[0]), std::conj(p[1])};
      },
      [&](Vec2) { return Vec2{at(0, 0)[0].real(), at(0, 0)[1].real()}; });
}

std::vector<double> SpectralGrid::sample(const std::function<double(Vec2)>& fn) const {
  std::vector<double> v(std::size_t(n_) * std::size_t(n_));
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) v[std::size_t(a) * n_ + b] = fn(point(a, b));
  }
  return v;
}

FourierVectorField project_vector_field(int truncation, const std::function<Vec2(Vec2)>& fn,
                                        int grid) {
  const SpectralGrid g(grid > 0 ? grid : 4 * truncation + 4);
  const auto x = g.sample([&](Vec2 p) { return fn(p).x; });
  const auto y = g.sample([&](Vec2 p) { return fn(p).y; });
  return g.analyze(x, y, truncation);
}

FourierScalarField project_scalar_field(int truncation, const std::function<double(Vec2)>& fn,
                                        int grid) {
  const SpectralGrid g(grid > 0 ? grid : 4 * truncation + 4);
  return g.analyze(g.sample(fn), truncation);
}

}  // namespace svlab
