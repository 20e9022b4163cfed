#include "svlab/reference_flows.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "svlab/errors.hpp"
#include "svlab/field_io.hpp"
#include "svlab/torus_fields.hpp"

namespace svlab {

namespace {

constexpr Complex kI{0.0, 1.0};

FourierVectorField partial(const FourierVectorField& u, int j) {
  return u.map_modes(
      [j](Wavevector k, const CVec2& c) -> CVec2 {
        const Complex f = kI * double(k[j]);
        return {f * c[0], f * c[1]};
      },
      [](Vec2) { return Vec2{}; });
}

bool all_finite(const FourierVectorField& u) {
  for (const Wavevector& k : u.active_modes()) {
    const CVec2 c = u.coeff(k);
    if (!std::isfinite(c[0].real()) || !std::isfinite(c[0].imag()) || !std::isfinite(c[1].real()) ||
        !std::isfinite(c[1].imag())) {
      return false;
    }
  }
  return std::isfinite(u.mean().x) && std::isfinite(u.mean().y);
}

FourierVectorField advection_on(const SpectralGrid& grid, const FourierVectorField& u) {
  const auto uv = grid.synthesize(u);
  const auto d0 = grid.synthesize(partial(u, 0));
  const auto d1 = grid.synthesize(partial(u, 1));
  const std::size_t n = uv[0].size();
  std::vector<double> nx(n), ny(n);
  for (std::size_t i = 0; i < n; ++i) {
    nx[i] = uv[0][i] * d0[0][i] + uv[1][i] * d1[0][i];
    ny[i] = uv[0][i] * d0[1][i] + uv[1][i] * d1[1][i];
  }
  return grid.analyze(nx, ny, u.truncation());
}

FourierScalarField pressure_from_advection(const FourierVectorField& adv) {
  FourierScalarField p(adv.truncation());
  return p.map_modes(
      [&](Wavevector k, Complex) {
        const CVec2 c = adv.coeff(k);
        return kI * (double(k.k1) * c[0] + double(k.k2) * c[1]) / double(k.norm2());
      },
      [](double) { return 0.0; });
}

}  // namespace

// ---------------------------------------------------------------------------

TimeDependentVelocity::TimeDependentVelocity(double T, std::vector<FourierVectorField> frames,
                                             std::vector<FourierScalarField> pressures, double nu)
    : T_(T), nu_(nu), frames_(std::move(frames)), pressures_(std::move(pressures)) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (frames_.size() < 2) throw std::invalid_argument("need at least two velocity frames");
  if (pressures_.size() != frames_.size()) throw std::invalid_argument("pressure/frame count mismatch");
  for (const auto& f : frames_) {
    if (!f.is_divergence_free(1e-10)) throw std::invalid_argument("velocity frame is not divergence-free");
  }
  for (auto& p : pressures_) p.set_mean(0.0);
}

TimeDependentVelocity TimeDependentVelocity::steady(const FourierVectorField& u,
                                                    const FourierScalarField& p, double nu,
                                                    double T, int steps) {
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  return TimeDependentVelocity(T, std::vector<FourierVectorField>(std::size_t(steps) + 1, u),
                               std::vector<FourierScalarField>(std::size_t(steps) + 1, p), nu);
}

std::pair<int, double> TimeDependentVelocity::locate(double t) const {
  const int m = steps();
  const double s = t / dt();
  if (s <= 0.0) return {0, 0.0};
  if (s >= m) return {m, 0.0};
  const int j = std::min(int(std::floor(s)), m - 1);
  return {j, s - j};
}

Vec2 TimeDependentVelocity::value(double t, Vec2 x) const {
  const auto [j, lam] = locate(t);
  const Vec2 a = frames_[std::size_t(j)].evaluate(x);
  if (lam == 0.0) return a;
  return (1.0 - lam) * a + lam * frames_[std::size_t(j) + 1].evaluate(x);
}

Mat2 TimeDependentVelocity::jacobian(double t, Vec2 x) const {
  const auto [j, lam] = locate(t);
  Mat2 a = frames_[std::size_t(j)].gradient_tensor(x);
  if (lam == 0.0) return a;
  const Mat2 b = frames_[std::size_t(j) + 1].gradient_tensor(x);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) a(r, c) = (1.0 - lam) * a(r, c) + lam * b(r, c);
  }
  return a;
}

double TimeDependentVelocity::pressure_value(double t, Vec2 x) const {
  const auto [j, lam] = locate(t);
  const double a = pressures_[std::size_t(j)].evaluate(x);
  if (lam == 0.0) return a;
  return (1.0 - lam) * a + lam * pressures_[std::size_t(j) + 1].evaluate(x);
}

Vec2 TimeDependentVelocity::pressure_gradient(double t, Vec2 x) const {
  const auto [j, lam] = locate(t);
  const Vec2 a = pressures_[std::size_t(j)].gradient(x);
  if (lam == 0.0) return a;
  return (1.0 - lam) * a + lam * pressures_[std::size_t(j) + 1].gradient(x);
}

FourierVectorField TimeDependentVelocity::velocity_at(double t) const {
  const auto [j, lam] = locate(t);
  if (lam == 0.0) return frames_[std::size_t(j)];
  return (1.0 - lam) * frames_[std::size_t(j)] + lam * frames_[std::size_t(j) + 1];
}

FourierScalarField TimeDependentVelocity::pressure_at(double t) const {
  const auto [j, lam] = locate(t);
  if (lam == 0.0) return pressures_[std::size_t(j)];
  return (1.0 - lam) * pressures_[std::size_t(j)] + lam * pressures_[std::size_t(j) + 1];
}

// ---------------------------------------------------------------------------

FourierVectorField taylor_green_velocity(double nu, double t, int truncation) {
  if (truncation < 2) throw std::invalid_argument("Taylor-Green needs truncation K >= 2");
  const double a = 0.25 * std::exp(-2.0 * nu * t);
  FourierVectorField u(truncation);
  // cos x₁ sin x₂ = ½[sin(x₁+x₂) − sin(x₁−x₂)], sin x₁ cos x₂ = ½[sin(x₁+x₂) + sin(x₁−x₂)]
  u.set_coeff({1, 1}, {Complex{0.0, -a}, Complex{0.0, a}});
  u.set_coeff({1, -1}, {Complex{0.0, a}, Complex{0.0, a}});
  return u;
}

FourierScalarField taylor_green_pressure(double nu, double t, int truncation) {
  if (truncation < 2) throw std::invalid_argument("Taylor-Green needs truncation K >= 2");
  const double a = -0.125 * std::exp(-4.0 * nu * t);
  FourierScalarField p(truncation);
  p.set_coeff({2, 0}, a);
  p.set_coeff({0, 2}, a);
  return p;
}

TimeDependentVelocity taylor_green(double nu, double T, int steps, int truncation) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  std::vector<FourierVectorField> frames;
  std::vector<FourierScalarField> pressures;
  for (int j = 0; j <= steps; ++j) {
    const double t = T * j / steps;
    frames.push_back(taylor_green_velocity(nu, t, truncation));
    pressures.push_back(taylor_green_pressure(nu, t, truncation));
  }
  return TimeDependentVelocity(T, std::move(frames), std::move(pressures), nu);
}

FourierVectorField advection(const FourierVectorField& u) {
  const SpectralGrid grid(dealiased_grid_size(u.truncation()));
  return advection_on(grid, u);
}

FourierScalarField pressure_from_velocity(const FourierVectorField& u) {
  return pressure_from_advection(advection(u));
}

double ns_residual(const FourierVectorField& u, const FourierVectorField& dudt,
                   const FourierScalarField& p, double nu) {
  FourierVectorField r = dudt + advection(u) + nu * ebin_marsden_laplacian(u) + gradient_field(p);
  return std::sqrt(l2_inner(r, r));
}

// ---------------------------------------------------------------------------

NsStepper::NsStepper(int truncation, double nu)
    : truncation_(truncation), nu_(nu), grid_(dealiased_grid_size(truncation)) {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
}

FourierVectorField NsStepper::rhs(const FourierVectorField& u) const {
  const FourierVectorField adv = leray_project(advection_on(grid_, u));
  const double nu = nu_;
  return u.map_modes(
      [&](Wavevector k, const CVec2& c) -> CVec2 {
        const CVec2 a = adv.coeff(k);
        const double s = nu * k.norm2();
        return {-a[0] - s * c[0], -a[1] - s * c[1]};
      },
      [](Vec2) { return Vec2{}; });
}

FourierVectorField NsStepper::step(const FourierVectorField& u, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (u.truncation() != truncation_) throw std::invalid_argument("stepper/state truncation mismatch");
  const FourierVectorField k1 = rhs(u);
  const FourierVectorField k2 = rhs(u + (0.5 * dt) * k1);
  const FourierVectorField k3 = rhs(u + (0.5 * dt) * k2);
  const FourierVectorField k4 = rhs(u + dt * k3);
  FourierVectorField out = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!all_finite(out)) throw NonFiniteError("Navier-Stokes step produced non-finite coefficients");
  return out;
}

FourierVectorField ns_step(const FourierVectorField& state, double nu, double dt) {
  return NsStepper(state.truncation(), nu).step(state, dt);
}

TimeDependentVelocity ns_solve(const FourierVectorField& u0, double nu, double T, int frames,
                               int substeps) {
  if (frames < 1 || substeps < 1) throw std::invalid_argument("frames and substeps must be positive");
  if (!u0.is_divergence_free(1e-10)) throw std::invalid_argument("initial velocity must be divergence-free");
  const NsStepper stepper(u0.truncation(), nu);
  const SpectralGrid grid(dealiased_grid_size(u0.truncation()));
  const double h = T / (double(frames) * substeps);
  std::vector<FourierVectorField> us{u0};
  std::vector<FourierScalarField> ps{pressure_from_advection(advection_on(grid, u0))};
  FourierVectorField u = u0;
  for (int f = 0; f < frames; ++f) {
    for (int s = 0; s < substeps; ++s) u = stepper.step(u, h);
    us.push_back(u);
    ps.push_back(pressure_from_advection(advection_on(grid, u)));
  }
  return TimeDependentVelocity(T, std::move(us), std::move(ps), nu);
}

double hessian_bound(const FourierScalarField& p, int grid) {
  const SpectralGrid g(grid);
  auto component = [&](int i, int j) {
    return g.synthesize(p.map_modes(
        [i, j](Wavevector k, Complex c) { return -double(k[i]) * double(k[j]) * c; },
        [](double) { return 0.0; }));
  };
  const auto h00 = component(0, 0);
  const auto h01 = component(0, 1);
  const auto h11 = component(1, 1);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h00.size(); ++i) {
    Mat2 h;
    h(0, 0) = h00[i];
    h(0, 1) = h(1, 0) = h01[i];
    h(1, 1) = h11[i];
    best = std::max(best, h.max_symmetric_eigenvalue());
  }
  return best;
}

double hessian_bound(const TimeDependentVelocity& u, int grid) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : u.pressures()) best = std::max(best, hessian_bound(p, grid));
  return best;
}

double kinetic_energy(const FourierVectorField& u) { return 0.5 * l2_inner(u, u); }

void save_velocity(const std::filesystem::path& dir, const TimeDependentVelocity& u) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["nu"] = u.nu();
  manifest["T"] = u.horizon();
  manifest["steps"] = u.steps();
  manifest["frames"] = nlohmann::json::array();
  manifest["pressures"] = nlohmann::json::array();
  for (int j = 0; j <= u.steps(); ++j) {
    const std::string fu = "u_" + std::to_string(j) + ".json";
    const std::string fp = "p_" + std::to_string(j) + ".json";
    save_field(dir / fu, u.frame(j));
    save_field(dir / fp, u.pressure(j));
    manifest["frames"].push_back(fu);
    manifest["pressures"].push_back(fp);
  }
  write_text_file(dir / "manifest.json", manifest.dump(2));
}

TimeDependentVelocity load_velocity(const std::filesystem::path& manifest_path) {
  const auto manifest = nlohmann::json::parse(read_text_file(manifest_path));
  const auto dir = manifest_path.parent_path();
  std::vector<FourierVectorField> frames;
  std::vector<FourierScalarField> pressures;
  for (const auto& f : manifest.at("frames")) frames.push_back(load_vector_field(dir / f.get<std::string>()));
  for (const auto& f : manifest.at("pressures")) {
    pressures.push_back(load_scalar_field(dir / f.get<std::string>()));
  }
  return TimeDependentVelocity(manifest.at("T").get<double>(), std::move(frames), std::move(pressures),
                               manifest.at("nu").get<double>());
}

}  // namespace svlab
