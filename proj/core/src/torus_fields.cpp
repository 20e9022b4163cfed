#include "svlab/torus_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace svlab {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_basis_mode(Wavevector k, int truncation) {
  if (k.is_zero()) throw std::invalid_argument("basis mode k = 0 is not allowed");
  if (!k.in_half_space()) throw std::invalid_argument("basis mode must lie in the canonical half-space");
  if (k.norm_inf() > truncation) throw std::out_of_range("basis mode outside truncation");
}

// Symmetrized gradient of one mode: Def_ij = ½ i (k_j c_i + k_i c_j).
std::array<std::array<Complex, 2>, 2> mode_deformation(Wavevector k, const CVec2& c) {
  std::array<std::array<Complex, 2>, 2> d{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) d[i][j] = 0.5 * kI * (double(k[j]) * c[i] + double(k[i]) * c[j]);
  }
  return d;
}

}  // namespace

BasisIndexSet::BasisIndexSet(double beta, int truncation, double nu)
    : beta_(beta), truncation_(truncation), nu_(nu) {
  if (truncation < 1) throw std::invalid_argument("basis truncation must be at least 1");
  for (int k1 = 0; k1 <= truncation; ++k1) {
    for (int k2 = -truncation; k2 <= truncation; ++k2) {
      const Wavevector k{k1, k2};
      if (k.in_half_space()) modes_.push_back(k);
    }
  }
  normalize();
}

BasisIndexSet BasisIndexSet::from_modes(double beta, double nu, std::vector<Wavevector> modes) {
  if (modes.empty()) throw std::invalid_argument("basis needs at least one mode");
  BasisIndexSet b;
  b.beta_ = beta;
  b.nu_ = nu;
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  for (const Wavevector& k : modes) {
    if (!k.in_half_space()) throw std::invalid_argument("basis mode must lie in the canonical half-space");
    b.truncation_ = std::max(b.truncation_, k.norm_inf());
  }
  b.modes_ = std::move(modes);
  b.normalize();
  return b;
}

void BasisIndexSet::normalize() {
  if (!(beta_ > 1.0)) throw std::invalid_argument("beta must exceed 1");
  if (!(nu_ > 0.0)) throw std::invalid_argument("nu must be positive");
  nu0_ = 0.0;
  series_nu0_ = 0.0;
  for (const Wavevector& k : modes_) {
    const double k2 = double(k.norm2());
    const double term = 1.0 / (2.0 * std::pow(k2, beta_));
    series_nu0_ += term;
    nu0_ += k2 * term;
  }
  amplitude_ = std::sqrt(nu_ / nu0_);
  scales_.clear();
  for (const Wavevector& k : modes_) scales_.push_back(amplitude_ / std::pow(double(k.norm2()), 0.5 * beta_));
}

bool BasisIndexSet::contains(Wavevector k) const {
  return std::binary_search(modes_.begin(), modes_.end(), k);
}

namespace {

FourierVectorField single_mode(Wavevector k, BasisKind kind, double s) {
  const Wavevector p = k.perp();
  // cos(k·θ) = (e^{ik·θ} + e^{-ik·θ})/2, sin(k·θ) = (e^{ik·θ} − e^{-ik·θ})/(2i).
  const Complex w = kind == BasisKind::cos ? Complex{0.5 * s, 0.0} : Complex{0.0, -0.5 * s};
  FourierVectorField f(k.norm_inf());
  f.set_coeff(k, {w * double(p.k1), w * double(p.k2)});
  return f;
}

}  // namespace

FourierVectorField basis_field(Wavevector k, BasisKind kind, const BasisIndexSet& basis) {
  check_basis_mode(k, basis.truncation());
  return single_mode(k, kind, basis.amplitude() / std::pow(double(k.norm2()), 0.5 * basis.beta()));
}

FourierVectorField unit_shear(Wavevector k, BasisKind kind) {
  check_basis_mode(k, k.norm_inf());
  return single_mode(k, kind, 1.0 / std::sqrt(double(k.norm2())));
}

void evaluate_channels(const BasisIndexSet& basis, Vec2 theta, std::span<Vec2> out) {
  if (out.size() < basis.channel_count()) throw std::invalid_argument("channel buffer too small");
  const auto& modes = basis.modes();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Wavevector k = modes[m];
    const double s = basis.scales()[m];
    const double phase = dot(k, theta);
    const Vec2 p = to_vec(k.perp());
    out[2 * m] = (s * std::cos(phase)) * p;
    out[2 * m + 1] = (s * std::sin(phase)) * p;
  }
}

void channel_jacobians(const BasisIndexSet& basis, Vec2 theta, std::span<Mat2> out) {
  if (out.size() < basis.channel_count()) throw std::invalid_argument("channel buffer too small");
  const auto& modes = basis.modes();
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Wavevector k = modes[m];
    const double s = basis.scales()[m];
    const double phase = dot(k, theta);
    const Vec2 p = to_vec(k.perp());
    const double dc = -s * std::sin(phase);
    const double ds = s * std::cos(phase);
    Mat2 a, b;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        a(i, j) = dc * p[i] * k[j];
        b(i, j) = ds * p[i] * k[j];
      }
    }
    out[2 * m] = a;
    out[2 * m + 1] = b;
  }
}

double frame_sum(Vec2 v, Vec2 theta, const BasisIndexSet& basis) {
  std::vector<Vec2> ch(basis.channel_count());
  evaluate_channels(basis, theta, ch);
  double sum = 0.0;
  for (const Vec2& c : ch) {
    const double d = dot(c, v);
    sum += d * d;
  }
  return sum;
}

Vec2 strat_correction(const BasisIndexSet& basis, Vec2 theta) {
  std::vector<Vec2> ch(basis.channel_count());
  std::vector<Mat2> jac(basis.channel_count());
  evaluate_channels(basis, theta, ch);
  channel_jacobians(basis, theta, jac);
  Vec2 sum;
  for (std::size_t c = 0; c < ch.size(); ++c) sum += jac[c] * ch[c];
  return sum;
}

FourierVectorField leray_project(const FourierVectorField& f) {
  return f.map_modes([](Wavevector k, const CVec2& c) -> CVec2 {
    const Complex dot = double(k.k1) * c[0] + double(k.k2) * c[1];
    // Modes already transverse to rounding are kept, which makes P idempotent bitwise.
    const double scale = std::sqrt(double(k.norm2())) * (std::abs(c[0]) + std::abs(c[1]));
    if (std::abs(dot) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) return c;
    const Complex a = (double(k.k2) * c[0] - double(k.k1) * c[1]) / double(k.norm2());
    return {double(k.k2) * a, -double(k.k1) * a};
  });
}

FourierVectorField negative_laplacian(const FourierVectorField& f) {
  return f.map_modes(
      [](Wavevector k, const CVec2& c) -> CVec2 {
        const double s = double(k.norm2());
        return {s * c[0], s * c[1]};
      },
      [](Vec2) { return Vec2{}; });
}

FourierVectorField ebin_marsden_laplacian(const FourierVectorField& f) {
  if (!f.is_divergence_free()) {
    throw std::invalid_argument("ebin_marsden_laplacian requires a divergence-free field");
  }
  return f.map_modes(
      [](Wavevector k, const CVec2& c) -> CVec2 {
        const auto d = mode_deformation(k, c);
        // Def* D = −div of the symmetric tensor: (Def* D)_i = −i Σ_j k_j D_ij.
        CVec2 out{};
        for (int i = 0; i < 2; ++i) {
          out[i] = -2.0 * kI * (double(k.k1) * d[i][0] + double(k.k2) * d[i][1]);
        }
        return out;
      },
      [](Vec2) { return Vec2{}; });
}

FourierVectorField hodge_laplacian(const FourierVectorField& f) {
  return f.map_modes(
      [](Wavevector k, const CVec2& c) -> CVec2 {
        const double a = k.k1;
        const double b = k.k2;
        // dd*: gradient of −div, giving k (k·c).
        const Complex kc = a * c[0] + b * c[1];
        const CVec2 dds{a * kc, b * kc};
        // d*d: curl of the scalar vorticity i(k₁c₂ − k₂c₁).
        const CVec2 dsd{b * b * c[0] - a * b * c[1], a * a * c[1] - a * b * c[0]};
        return {dds[0] + dsd[0], dds[1] + dsd[1]};
      },
      [](Vec2) { return Vec2{}; });
}

double deformation_inner(const FourierVectorField& f, const FourierVectorField& g) {
  double sum = 0.0;
  for (const Wavevector& k : f.active_modes()) {
    const auto df = mode_deformation(k, f.coeff(k));
    const auto dg = mode_deformation(k, g.coeff(k));
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) s += (df[i][j] * std::conj(dg[i][j])).real();
    }
    sum += 2.0 * s;
  }
  return sum;
}

double grid_energy(const FourierVectorField& f, int n) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) sum += norm2(f.evaluate({kTwoPi * a / n, kTwoPi * b / n}));
  }
  return sum / (double(n) * double(n));
}

}  // namespace svlab
