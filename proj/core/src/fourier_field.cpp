#include "svlab/fourier_field.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace svlab {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_truncation(int truncation) {
  if (truncation < 0) throw std::invalid_argument("truncation must be non-negative");
}

void check_mode(Wavevector k, int truncation) {
  if (k.is_zero()) throw std::invalid_argument("wavevector k = 0 is the mean, use set_mean");
  if (k.norm_inf() > truncation) {
    throw std::out_of_range("wavevector (" + std::to_string(k.k1) + "," + std::to_string(k.k2) +
                            ") outside truncation " + std::to_string(truncation));
  }
}

CVec2 conj(const CVec2& c) { return {std::conj(c[0]), std::conj(c[1])}; }

bool is_zero(const CVec2& c) { return c[0] == Complex{} && c[1] == Complex{}; }

}  // namespace

// ---------------------------------------------------------------------------
// FourierVectorField

FourierVectorField::FourierVectorField(int truncation) : truncation_(truncation) {
  check_truncation(truncation);
  coeffs_.assign(side() * side(), CVec2{});
}

CVec2 FourierVectorField::coeff(Wavevector k) const {
  if (!contains(k)) return {};
  return coeffs_[index(k)];
}

void FourierVectorField::set_coeff(Wavevector k, const CVec2& c) {
  check_mode(k, truncation_);
  coeffs_[index(k)] = c;
  coeffs_[index(-k)] = conj(c);
  refresh_active();
}

void FourierVectorField::add_to_coeff(Wavevector k, const CVec2& c) {
  check_mode(k, truncation_);
  CVec2& slot = coeffs_[index(k)];
  slot[0] += c[0];
  slot[1] += c[1];
  coeffs_[index(-k)] = conj(slot);
  refresh_active();
}

void FourierVectorField::set_mean(Vec2 m) {
  coeffs_[center()] = {Complex{m.x, 0.0}, Complex{m.y, 0.0}};
}

void FourierVectorField::refresh_active() {
  active_.clear();
  for (int k1 = 0; k1 <= truncation_; ++k1) {
    for (int k2 = -truncation_; k2 <= truncation_; ++k2) {
      const Wavevector k{k1, k2};
      if (!k.in_half_space()) continue;
      if (!is_zero(coeffs_[index(k)])) active_.push_back(k);
    }
  }
}

Vec2 FourierVectorField::evaluate(Vec2 theta) const {
  Vec2 out = mean();
  for (const Wavevector& k : active_) {
    const CVec2& c = coeffs_[index(k)];
    const double phase = dot(k, theta);
    const double cs = std::cos(phase);
    const double sn = std::sin(phase);
    // 2 Re(c e^{iφ}) = 2 (Re c cos φ − Im c sin φ)
    out.x += 2.0 * (c[0].real() * cs - c[0].imag() * sn);
    out.y += 2.0 * (c[1].real() * cs - c[1].imag() * sn);
  }
  return out;
}

Mat2 FourierVectorField::gradient_tensor(Vec2 theta) const {
  Mat2 jac;
  for (const Wavevector& k : active_) {
    const CVec2& c = coeffs_[index(k)];
    const double phase = dot(k, theta);
    const double cs = std::cos(phase);
    const double sn = std::sin(phase);
    for (int i = 0; i < 2; ++i) {
      // ∂_j of 2 Re(c e^{iφ}) = 2 k_j Re(i c e^{iφ}) = −2 k_j (Re c sin φ + Im c cos φ)
      const double d = -2.0 * (c[i].real() * sn + c[i].imag() * cs);
      jac(i, 0) += k.k1 * d;
      jac(i, 1) += k.k2 * d;
    }
  }
  return jac;
}

double FourierVectorField::divergence(Vec2 theta) const { return gradient_tensor(theta).trace(); }

bool FourierVectorField::is_divergence_free(double rtol) const {
  for (const Wavevector& k : active_) {
    const CVec2& c = coeffs_[index(k)];
    const Complex kc = double(k.k1) * c[0] + double(k.k2) * c[1];
    const double scale = std::sqrt(double(k.norm2())) * std::sqrt(std::norm(c[0]) + std::norm(c[1]));
    if (std::abs(kc) > rtol * scale + 1e-300) return false;
  }
  return true;
}

FourierVectorField FourierVectorField::with_truncation(int truncation) const {
  FourierVectorField out(truncation);
  out.set_mean(mean());
  for (const Wavevector& k : active_) {
    if (out.contains(k)) {
      out.coeffs_[out.index(k)] = coeffs_[index(k)];
      out.coeffs_[out.index(-k)] = coeffs_[index(-k)];
    }
  }
  out.refresh_active();
  return out;
}

FourierVectorField FourierVectorField::map_modes(
    const std::function<CVec2(Wavevector, const CVec2&)>& fn,
    const std::function<Vec2(Vec2)>& mean_fn) const {
  FourierVectorField out(truncation_);
  out.set_mean(mean_fn ? mean_fn(mean()) : mean());
  for (int k1 = 0; k1 <= truncation_; ++k1) {
    for (int k2 = -truncation_; k2 <= truncation_; ++k2) {
      const Wavevector k{k1, k2};
      if (!k.in_half_space()) continue;
      const CVec2 c = fn(k, coeffs_[index(k)]);
      out.coeffs_[out.index(k)] = c;
      out.coeffs_[out.index(-k)] = conj(c);
    }
  }
  out.refresh_active();
  return out;
}

FourierVectorField& FourierVectorField::operator+=(const FourierVectorField& o) {
  if (o.truncation_ > truncation_) *this = with_truncation(o.truncation_);
  for (int k1 = -o.truncation_; k1 <= o.truncation_; ++k1) {
    for (int k2 = -o.truncation_; k2 <= o.truncation_; ++k2) {
      const Wavevector k{k1, k2};
      CVec2& dst = coeffs_[index(k)];
      const CVec2& src = o.coeffs_[o.index(k)];
      dst[0] += src[0];
      dst[1] += src[1];
    }
  }
  refresh_active();
  return *this;
}

FourierVectorField& FourierVectorField::operator-=(const FourierVectorField& o) {
  FourierVectorField neg = o;
  neg *= -1.0;
  return *this += neg;
}

FourierVectorField& FourierVectorField::operator*=(double s) {
  for (CVec2& c : coeffs_) {
    c[0] *= s;
    c[1] *= s;
  }
  refresh_active();
  return *this;
}

bool FourierVectorField::operator==(const FourierVectorField& o) const {
  return truncation_ == o.truncation_ && coeffs_ == o.coeffs_;
}

// ---------------------------------------------------------------------------
// FourierScalarField

FourierScalarField::FourierScalarField(int truncation) : truncation_(truncation) {
  check_truncation(truncation);
  coeffs_.assign(side() * side(), Complex{});
}

Complex FourierScalarField::coeff(Wavevector k) const {
  if (!contains(k)) return {};
  return coeffs_[index(k)];
}

void FourierScalarField::set_coeff(Wavevector k, Complex c) {
  check_mode(k, truncation_);
  coeffs_[index(k)] = c;
  coeffs_[index(-k)] = std::conj(c);
  refresh_active();
}

void FourierScalarField::set_mean(double m) { coeffs_[center()] = Complex{m, 0.0}; }

void FourierScalarField::refresh_active() {
  active_.clear();
  for (int k1 = 0; k1 <= truncation_; ++k1) {
    for (int k2 = -truncation_; k2 <= truncation_; ++k2) {
      const Wavevector k{k1, k2};
      if (!k.in_half_space()) continue;
      if (coeffs_[index(k)] != Complex{}) active_.push_back(k);
    }
  }
}

double FourierScalarField::evaluate(Vec2 theta) const {
  double out = mean();
  for (const Wavevector& k : active_) {
    const Complex c = coeffs_[index(k)];
    const double phase = dot(k, theta);
    out += 2.0 * (c.real() * std::cos(phase) - c.imag() * std::sin(phase));
  }
  return out;
}

Vec2 FourierScalarField::gradient(Vec2 theta) const {
  Vec2 g;
  for (const Wavevector& k : active_) {
    const Complex c = coeffs_[index(k)];
    const double phase = dot(k, theta);
    const double d = -2.0 * (c.real() * std::sin(phase) + c.imag() * std::cos(phase));
    g.x += k.k1 * d;
    g.y += k.k2 * d;
  }
  return g;
}

Mat2 FourierScalarField::hessian(Vec2 theta) const {
  Mat2 h;
  for (const Wavevector& k : active_) {
    const Complex c = coeffs_[index(k)];
    const double phase = dot(k, theta);
    // ∂_i∂_j of 2 Re(c e^{iφ}) = −2 k_i k_j Re(c e^{iφ})
    const double d = -2.0 * (c.real() * std::cos(phase) - c.imag() * std::sin(phase));
    h(0, 0) += k.k1 * k.k1 * d;
    h(0, 1) += k.k1 * k.k2 * d;
    h(1, 1) += k.k2 * k.k2 * d;
  }
  h(1, 0) = h(0, 1);
  return h;
}

FourierScalarField FourierScalarField::with_truncation(int truncation) const {
  FourierScalarField out(truncation);
  out.set_mean(mean());
  for (const Wavevector& k : active_) {
    if (out.contains(k)) out.set_coeff(k, coeffs_[index(k)]);
  }
  return out;
}

FourierScalarField FourierScalarField::map_modes(const std::function<Complex(Wavevector, Complex)>& fn,
                                                 const std::function<double(double)>& mean_fn) const {
  FourierScalarField out(truncation_);
  out.set_mean(mean_fn ? mean_fn(mean()) : mean());
  for (int k1 = 0; k1 <= truncation_; ++k1) {
    for (int k2 = -truncation_; k2 <= truncation_; ++k2) {
      const Wavevector k{k1, k2};
      if (!k.in_half_space()) continue;
      const Complex c = fn(k, coeffs_[index(k)]);
      out.coeffs_[out.index(k)] = c;
      out.coeffs_[out.index(-k)] = std::conj(c);
    }
  }
  out.refresh_active();
  return out;
}

FourierScalarField& FourierScalarField::operator+=(const FourierScalarField& o) {
  if (o.truncation_ > truncation_) *this = with_truncation(o.truncation_);
  for (int k1 = -o.truncation_; k1 <= o.truncation_; ++k1) {
    for (int k2 = -o.truncation_; k2 <= o.truncation_; ++k2) {
      coeffs_[index({k1, k2})] += o.coeffs_[o.index({k1, k2})];
    }
  }
  refresh_active();
  return *this;
}

FourierScalarField& FourierScalarField::operator*=(double s) {
  for (Complex& c : coeffs_) c *= s;
  refresh_active();
  return *this;
}

bool FourierScalarField::operator==(const FourierScalarField& o) const {
  return truncation_ == o.truncation_ && coeffs_ == o.coeffs_;
}

// ---------------------------------------------------------------------------

double l2_inner(const FourierVectorField& f, const FourierVectorField& g) {
  double sum = dot(f.mean(), g.mean());
  for (const Wavevector& k : f.active_modes()) {
    const CVec2 a = f.coeff(k);
    const CVec2 b = g.coeff(k);
    // k and −k contribute complex-conjugate terms.
    sum += 2.0 * (a[0] * std::conj(b[0]) + a[1] * std::conj(b[1])).real();
  }
  return sum;
}

double l2_inner(const FourierScalarField& f, const FourierScalarField& g) {
  double sum = f.mean() * g.mean();
  for (const Wavevector& k : f.active_modes()) {
    sum += 2.0 * (f.coeff(k) * std::conj(g.coeff(k))).real();
  }
  return sum;
}

FourierVectorField gradient_field(const FourierScalarField& p) {
  FourierVectorField out(p.truncation());
  for (const Wavevector& k : p.active_modes()) {
    const Complex c = p.coeff(k);
    out.set_coeff(k, {kI * double(k.k1) * c, kI * double(k.k2) * c});
  }
  return out;
}

FourierScalarField divergence_field(const FourierVectorField& f) {
  FourierScalarField out(f.truncation());
  for (const Wavevector& k : f.active_modes()) {
    const CVec2 c = f.coeff(k);
    out.set_coeff(k, kI * (double(k.k1) * c[0] + double(k.k2) * c[1]));
  }
  return out;
}

}  // namespace svlab
