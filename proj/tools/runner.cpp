#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "svlab/ensemble_io.hpp"
#include "svlab/errors.hpp"
#include "svlab/field_io.hpp"
#include "svlab/variation_lab.hpp"

namespace svlab::runner {

namespace {

using ordered_json = nlohmann::ordered_json;

struct DriftChoice {
  enum class Kind { taylor_green, zero, corrupted, file };
  Kind kind = Kind::taylor_green;
  double amplitude = 0.0;
  std::string path;
};

DriftChoice parse_drift(const std::string& text) {
  DriftChoice d;
  if (text == "taylor-green") return d;
  if (text == "zero") {
    d.kind = DriftChoice::Kind::zero;
    return d;
  }
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "corrupted" && !tail.empty()) {
    std::size_t used = 0;
    d.kind = DriftChoice::Kind::corrupted;
    d.amplitude = std::stod(tail, &used);
    if (used != tail.size() || !std::isfinite(d.amplitude)) throw std::invalid_argument("bad corrupted amplitude");
    return d;
  }
  if (head == "spectral-file" && !tail.empty()) {
    d.kind = DriftChoice::Kind::file;
    d.path = tail;
    return d;
  }
  throw std::invalid_argument("unknown drift '" + text + "'");
}

struct Context {
  const ExperimentConfig& cfg;
  DriftChoice choice;
  std::shared_ptr<const TimeDependentVelocity> tg;  // frames aligned with the SDE grid
  Report report;

  explicit Context(const ExperimentConfig& c) : cfg(c), choice(parse_drift(c.drift)) {
    report.experiment = c.experiment;
    report.seed = c.seed;
    report.nu = c.nu;
    report.T = c.T;
    report.N = c.N;
    report.M = c.M;
  }

  std::size_t paths() const { return std::size_t(cfg.N); }
  std::size_t steps() const { return std::size_t(cfg.M); }
  unsigned threads() const { return unsigned(cfg.threads); }

  const std::shared_ptr<const TimeDependentVelocity>& taylor_green_source() {
    if (!tg) tg = std::make_shared<const TimeDependentVelocity>(taylor_green(cfg.nu, cfg.T, int(cfg.M), 2));
    return tg;
  }

  Drift drift(TimeOrientation orientation) {
    switch (choice.kind) {
      case DriftChoice::Kind::zero:
        return Drift::zero();
      case DriftChoice::Kind::file:
        return Drift::steady(load_vector_field(choice.path));
      case DriftChoice::Kind::corrupted:
        return Drift::velocity(taylor_green_source(), orientation) +
               Drift::steady(unit_shear({1, 1}, BasisKind::sin), choice.amplitude);
      case DriftChoice::Kind::taylor_green:
        break;
    }
    return Drift::velocity(taylor_green_source(), orientation);
  }

  SdeParams params(Drift d, InitialLaw law = InitialLaw::uniform()) const {
    SdeParams p;
    p.nu = cfg.nu;
    p.T = cfg.T;
    p.drift = std::move(d);
    p.initial = std::move(law);
    return p;
  }

  void estimate(std::string name, const EstimateWithError& e) {
    report.estimates.push_back({std::move(name), e.value, e.std_error, e.n});
  }
  void estimate(std::string name, double value) { report.estimates.push_back({std::move(name), value, 0.0, 0}); }
  void verdict(std::string name, bool pass) { report.verdicts.push_back({std::move(name), pass}); }

  void save(const PathEnsemble& ens, const std::string& name) {
    if (!cfg.save_paths) return;
    save_ensemble(std::filesystem::path(cfg.output_dir) / "paths" / (name + ".bin"), ens, config_to_json(cfg));
  }
};

double relative_l2(const FourierVectorField& a, const FourierVectorField& b) {
  const FourierVectorField d = a - b;
  const double scale = l2_inner(b, b);
  return scale > 0.0 ? std::sqrt(l2_inner(d, d) / scale) : std::sqrt(l2_inner(d, d));
}

FourierScalarField random_scalar(int truncation, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierScalarField s(truncation);
  for (int k1 = 0; k1 <= truncation; ++k1) {
    for (int k2 = -truncation; k2 <= truncation; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      s.set_coeff({k1, k2}, Complex{normal(rng), normal(rng)});
    }
  }
  return s;
}

Table residual_table(const std::string& name, const std::vector<std::pair<std::string, EstimateWithError>>& rows,
                     const ExperimentConfig& cfg) {
  Table t{name, {"pair_name", "value", "std_error", "n", "nu", "seed"}, {}};
  for (const auto& [pair, e] : rows) {
    t.rows.push_back({pair, format_double(e.value), format_double(e.std_error), std::to_string(e.n),
                      format_double(cfg.nu), std::to_string(cfg.seed)});
  }
  return t;
}

void fields_check(Context& c) {
  const auto& cfg = c.cfg;
  std::mt19937_64 rng(cfg.seed);
  double hodge = 0.0, lap = 0.0, idem = 0.0, grad = 0.0;
  for (int i = 0; i < 20; ++i) {
    const FourierVectorField f = random_divergence_free(cfg.K, rng);
    const FourierVectorField box = ebin_marsden_laplacian(f);
    hodge = std::max(hodge, relative_l2(box, hodge_laplacian(f)));
    lap = std::max(lap, relative_l2(box, negative_laplacian(f)));
    const FourierVectorField mixed = f + gradient_field(random_scalar(cfg.K, rng));
    const FourierVectorField once = leray_project(mixed);
    idem = std::max(idem, relative_l2(leray_project(once), once));
    grad = std::max(grad, relative_l2(once, f));
  }
  const BasisIndexSet basis(cfg.beta, cfg.K, cfg.nu);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::normal_distribution<double> normal(0.0, 1.0);
  double frame = 0.0, corr = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec2 v{normal(rng), normal(rng)};
    const Vec2 th{angle(rng), angle(rng)};
    const double target = cfg.nu * norm2(v);
    frame = std::max(frame, std::abs(frame_sum(v, th, basis) - target) / target);
    corr = std::max(corr, norm(strat_correction(basis, th)));
  }
  const std::vector<std::tuple<std::string, double, double>> checks = {
      {"deformation Laplacian vs Hodge", hodge, 1e-12},
      {"deformation Laplacian vs -Laplacian", lap, 1e-12},
      {"Leray projection idempotent", idem, 0.0},
      {"Leray projection removes gradients", grad, 1e-12},
      {"frame identity", frame, 1e-12},
      {"Stratonovich correction", corr, 1e-12},
  };
  Table table{"operator_checks", {"check", "max_error", "tolerance"}, {}};
  for (const auto& [name, value, tol] : checks) {
    c.estimate(name, value);
    c.verdict(name, value <= tol);
    table.rows.push_back({name, format_double(value), format_double(tol)});
  }
  c.report.tables.push_back(std::move(table));
}

void ns_experiment(Context& c) {
  const auto& cfg = c.cfg;
  const bool exact = c.choice.kind == DriftChoice::Kind::taylor_green;
  FourierVectorField u0 = exact ? taylor_green_velocity(cfg.nu, 0.0, cfg.K)
                                : c.choice.kind == DriftChoice::Kind::file ? load_vector_field(c.choice.path)
                                                                           : FourierVectorField(cfg.K);
  if (c.choice.kind == DriftChoice::Kind::corrupted) {
    throw std::invalid_argument("ns-solve takes an initial velocity, not a corrupted drift");
  }
  const TimeDependentVelocity u = ns_solve(u0.with_truncation(cfg.K), cfg.nu, cfg.T, int(cfg.M));
  Series energy{"energy", "t", "kinetic_energy", {}};
  bool decreasing = true;
  double prev = kinetic_energy(u.frame(0));
  const int every = std::max(1, u.steps() / 200);
  for (int j = 0; j <= u.steps(); ++j) {
    const double e = kinetic_energy(u.frame(j));
    decreasing = decreasing && e <= prev * (1.0 + 1e-12);
    prev = e;
    if (j % every == 0 || j == u.steps()) energy.points.push_back({u.time(j), e});
  }
  double divergence = 0.0;
  for (const auto& f : u.frames()) {
    const FourierScalarField d = divergence_field(f);
    divergence = std::max(divergence, std::sqrt(l2_inner(d, d)));
  }
  c.estimate("final kinetic energy", prev);
  c.estimate("max divergence", divergence);
  c.verdict("energy non-increasing", decreasing);
  c.verdict("divergence-free frames", divergence <= 1e-12);
  if (exact) {
    const FourierVectorField d = u.frame(u.steps()) - taylor_green_velocity(cfg.nu, cfg.T, cfg.K);
    const double err = std::sqrt(l2_inner(d, d));
    c.estimate("L2 error vs Taylor-Green", err);
    c.verdict("matches Taylor-Green within 1e-6", err <= 1e-6);
  }
  c.report.series.push_back(std::move(energy));
  if (cfg.save_paths) save_velocity(std::filesystem::path(cfg.output_dir) / "velocity", u);
}

void simulate_experiment(Context& c) {
  const auto& cfg = c.cfg;
  const Drift drift = c.drift(TimeOrientation::forward);
  const auto ens = simulate_ito(c.params(drift), c.paths(), c.steps(), cfg.seed, {c.threads(), cfg.save_paths});
  c.estimate("action", action(ens, c.threads()));
  for (int axis = 0; axis < 2; ++axis) {
    auto d = displacements(ens, ens.steps(), axis);
    for (double& x : d) x *= x;
    const auto e = estimate_mean(d);
    c.estimate("mean squared displacement " + std::to_string(axis), e);
    if (drift.is_zero()) c.verdict("displacement variance " + std::to_string(axis) + " = 2 nu T", e.within(3.0, 2.0 * cfg.nu * cfg.T));
  }
  const double crit = ks_critical(ens.paths(), 0.05);
  Series ks{"uniformity_ks", "t", "ks_statistic", {}};
  const std::size_t m = ens.steps();
  for (std::size_t step : {m / 4, m / 2, m}) {
    if (step == 0) continue;
    const auto s = uniformity_ks(ens, step);
    const double worst = std::max(s[0], s[1]);
    ks.points.push_back({ens.time(step), worst});
    c.estimate("KS at t=" + format_double(ens.time(step)), worst);
    if (drift.divergence_free()) c.verdict("uniform marginal at t=" + format_double(ens.time(step)), worst <= crit);
  }
  c.report.series.push_back(std::move(ks));
  c.save(ens, "ito");
}

void action_experiment(Context& c) {
  const auto& cfg = c.cfg;
  const auto params = c.params(c.drift(TimeOrientation::reversed));
  const std::size_t n = c.paths();
  const std::size_t m = c.steps();
  const auto ens = simulate_ito(params, n, m, cfg.seed, {c.threads(), cfg.save_paths});
  const auto per_path = action_per_path(ens, kWholePath, c.threads());
  const auto s = estimate_mean(per_path);
  c.estimate("action", s);

  Series cumulative{"cumulative_action", "t", "action", {}};
  const std::size_t every = std::max<std::size_t>(1, m / 20);
  for (std::size_t j = 0; j <= m; j += every) {
    cumulative.points.push_back({ens.time(j), estimate_mean(action_per_path(ens, j, c.threads())).value});
  }
  c.report.series.push_back(std::move(cumulative));

  if (c.choice.kind == DriftChoice::Kind::zero) c.verdict("zero drift has zero action", s.value == 0.0 && s.std_error == 0.0);
  if (c.choice.kind == DriftChoice::Kind::taylor_green && m % 2 == 0) {
    std::vector<Vec2> starts(n);
    std::vector<double> coarse_dw(n * (m / 2) * 2);
    double a[2], b[2];
    for (std::size_t p = 0; p < n; ++p) {
      starts[p] = ens.position(p, 0);
      for (std::size_t j = 0; j < m / 2; ++j) {
        ens.increments_into(p, 2 * j, a);
        ens.increments_into(p, 2 * j + 1, b);
        coarse_dw[(p * (m / 2) + j) * 2] = a[0] + b[0];
        coarse_dw[(p * (m / 2) + j) * 2 + 1] = a[1] + b[1];
      }
    }
    const auto coarse = replay_ito(params, 2.0 * ens.dt(), starts, coarse_dw, m / 2, cfg.seed);
    const double bias = std::abs(paired_difference(per_path, action_per_path(coarse, kWholePath, c.threads())).value);
    const double exact = taylor_green_action(cfg.nu, cfg.T);
    c.estimate("closed form", exact);
    c.estimate("fitted time-step bias", bias);
    c.verdict("matches closed form within 3 SE + bias", std::abs(s.value - exact) <= 3.0 * s.std_error + bias);
  }
  c.save(ens, "ito");
}

void criticality_experiment(Context& c) {
  const auto& cfg = c.cfg;
  const auto bank = test_bank(BasisIndexSet(cfg.beta, cfg.K, cfg.nu), cfg.T);
  const auto ens = simulate_ito(c.params(c.drift(TimeOrientation::forward)), c.paths(), c.steps(), cfg.seed,
                                {c.threads(), cfg.save_paths});
  const auto mu = occupation_measure(ens, std::max<std::size_t>(1, c.steps() / 200));
  std::vector<std::pair<std::string, EstimateWithError>> direct_rows, dpm_rows, fd_rows;
  Series ratios{"residual_ratio", "pair_index", "residual_over_se", {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto& pair = bank[i];
    const auto direct = first_variation_direct(ens, pair, cfg.nu, c.threads());
    const auto dpm = dpm_residual(mu, pair, cfg.nu);
    c.estimate("direct " + pair.name, direct);
    c.estimate("dpm " + pair.name, dpm);
    direct_rows.push_back({pair.name, direct});
    dpm_rows.push_back({pair.name, dpm});
    ratios.points.push_back({double(i), direct.std_error > 0.0 ? direct.value / direct.std_error : 0.0});
    worst = std::max(worst, direct.z_score());
    c.verdict("direct " + pair.name + " within 3 SE", direct.within(3.0));
    c.verdict("dpm " + pair.name + " within 3 SE", dpm.within(3.0));
    if (cfg.finite_difference) {
      const std::size_t stride = c.steps() % 100 == 0 ? c.steps() / 100 : 1;
      FdOptions opt;
      opt.substeps = 1;
      opt.threads = c.threads();
      opt.strict = false;
      const auto fd = first_variation_fd(thin(ens, stride), PerturbationSpec::flow(PerturbationKind::psi, pair),
                                         cfg.nu, opt);
      c.estimate("fd " + pair.name, fd.estimate);
      fd_rows.push_back({pair.name, fd.estimate});
      const double gap = std::abs(fd.estimate.value - direct.value);
      c.verdict("fd " + pair.name + " agrees with direct",
                gap <= 3.0 * combined_se(fd.estimate.std_error, direct.std_error));
    }
  }
  if (cfg.negative_control) c.verdict("negative control: some pair beyond 5 SE", worst > 5.0);
  c.report.series.push_back(std::move(ratios));
  c.report.tables.push_back(residual_table("residuals_direct", direct_rows, cfg));
  c.report.tables.push_back(residual_table("residuals_dpm", dpm_rows, cfg));
  if (!fd_rows.empty()) c.report.tables.push_back(residual_table("residuals_fd", fd_rows, cfg));
  c.save(ens, "ito");
}

void minimality_experiment(Context& c) {
  const auto& cfg = c.cfg;
  const auto source = c.taylor_green_source();
  const double R = hessian_bound(*source);
  c.estimate("pressure Hessian bound R", R);
  c.estimate("R T^2", R * cfg.T * cfg.T);
  const auto base = simulate_ito(c.params(Drift::velocity(source, TimeOrientation::reversed)), c.paths(), c.steps(),
                                 cfg.seed, {c.threads(), cfg.save_paths});
  const auto drivers = alpha_fn_bank();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, drivers.size() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Table table{"members",
              {"member", "alpha", "a1", "a2", "b_base", "b_star", "gap_excess", "gap_excess_se", "poincare_ratio", "pass"},
              {}};
  Series ratios{"poincare_ratio", "member", "max_poincare_ratio", {}};
  for (int i = 0; i < cfg.members; ++i) {
    const auto& [name, fn] = drivers[pick(rng)];
    const Vec2 a{normal(rng), normal(rng)};
    const auto g = sample_class_g(base, PerturbationSpec::pinned_shift(name, fn, a), c.threads());
    const auto r = minimality_check(base, g, *source, c.threads(), R);
    const std::string label = "member " + std::to_string(i);
    c.estimate(label + " gap excess", r.gap_excess);
    c.estimate(label + " B(g*) - B(g)", r.b_star.value - r.b_base.value);
    c.verdict(label + " (" + name + ")", r.passed());
    for (const auto& w : r.warnings) {
      if (std::find(c.report.warnings.begin(), c.report.warnings.end(), w) == c.report.warnings.end()) {
        c.report.warnings.push_back(w);
      }
    }
    table.rows.push_back({std::to_string(i), name, format_double(a.x), format_double(a.y), format_double(r.b_base.value),
                          format_double(r.b_star.value), format_double(r.gap_excess.value),
                          format_double(r.gap_excess.std_error), format_double(r.max_poincare_ratio),
                          r.passed() ? "true" : "false"});
    ratios.points.push_back({double(i), r.max_poincare_ratio});
  }
  c.report.tables.push_back(std::move(table));
  c.report.series.push_back(std::move(ratios));
  c.save(base, "base");
}

void bridge_experiment(Context& c) {
  const auto& cfg = c.cfg;
  // Dyadic grid dt = 2^-11 on [0, 1 - 2^-8].
  const auto ens = brownian_bridge(0.0, 0.0, c.paths(), 2040, std::ldexp(1.0, -8), cfg.seed, {c.threads(), true});
  Series curve{"bridge_action", "log_cutoff", "action", {}};
  Table table{"bridge_action", {"cutoff", "action", "std_error", "closed_form"}, {}};
  std::vector<EstimateWithError> prefix;
  for (int j = 3; j <= 8; ++j) {
    const double eps = std::ldexp(1.0, -j);
    const auto e = estimate_mean(action_per_path(ens, 2048 - (std::size_t(1) << (11 - j)), c.threads()));
    prefix.push_back(e);
    c.estimate("action to 1-2^-" + std::to_string(j), e);
    curve.points.push_back({std::log(eps), e.value});
    table.rows.push_back({format_double(eps), format_double(e.value), format_double(e.std_error),
                          format_double(bridge_action(eps))});
  }
  for (std::size_t i = 0; i + 1 < prefix.size(); ++i) {
    const double eps = std::ldexp(1.0, -int(i + 3));
    const double inc = prefix[i + 1].value - prefix[i].value;
    const double se = combined_se(prefix[i].std_error, prefix[i + 1].std_error);
    const double oracle = bridge_action(eps / 2) - bridge_action(eps);
    c.report.estimates.push_back({"increment " + std::to_string(i), inc, se, ens.paths()});
    c.verdict("increment " + std::to_string(i) + " beyond 3 SE", inc > 3.0 * se);
    c.verdict("increment " + std::to_string(i) + " matches closed form", std::abs(inc - oracle) <= 3.0 * se);
  }
  for (std::size_t step : {ens.steps() / 4, ens.steps() / 2, ens.steps()}) {
    const double t = ens.time(step);
    std::vector<double> sq(ens.paths());
    for (std::size_t p = 0; p < ens.paths(); ++p) sq[p] = norm2(ens.position(p, step)) / double(ens.dim());
    const auto v = estimate_mean(sq);
    c.estimate("variance at t=" + format_double(t), v);
    c.verdict("variance at t=" + format_double(t) + " matches t(1-t)", v.within(3.0, t * (1.0 - t)));
  }
  c.report.series.push_back(std::move(curve));
  c.report.tables.push_back(std::move(table));
  c.save(ens, "bridge");
}

void measure_experiment(Context& c) {
  const auto& cfg = c.cfg;
  const Drift forward = c.drift(TimeOrientation::forward);
  const std::size_t m = std::min<std::size_t>(c.steps(), 100);
  const BasisIndexSet basis(cfg.beta, cfg.K, cfg.nu);
  double worst = 0.0;
  {
    const auto strat = simulate_stratonovich_basis(c.params(forward), basis, std::min<std::size_t>(c.paths(), 500), m,
                                                   cfg.seed, {c.threads(), false});
    for (std::size_t p = 0; p < strat.paths(); ++p) {
      for (double k : density_K(strat, p, &basis, forward)) worst = std::max(worst, std::abs(k - 1.0));
    }
  }
  c.estimate("max |K-1| with the configured drift", worst);
  if (forward.divergence_free()) c.verdict("density stays 1 for a divergence-free drift", worst <= 1e-12);

  FourierScalarField s(1);
  s.set_coeff({1, 0}, Complex{0.0, -0.5});
  const Drift compressible = forward + Drift::steady(gradient_field(s));
  const auto bad = simulate_ito(c.params(compressible), std::min<std::size_t>(c.paths(), 1000), m, cfg.seed,
                                {c.threads(), false});
  std::size_t moved = 0;
  for (std::size_t p = 0; p < bad.paths(); ++p) {
    double w = 0.0;
    for (double k : density_K(bad, p, nullptr, compressible)) w = std::max(w, std::abs(k - 1.0));
    moved += w > 0.01;
  }
  const double frac = double(moved) / double(bad.paths());
  c.estimate("fraction of paths with max |K-1| > 0.01 (gradient drift)", frac);
  c.verdict("gradient drift moves the density", frac >= 0.9);

  FourierScalarField f(1);
  f.set_coeff({1, 0}, 0.5);
  const auto positive = simulate_ito(c.params(c.drift(TimeOrientation::reversed)), c.paths(), m, cfg.seed,
                                     {c.threads(), false});
  const auto pos = drift_orthogonality(positive, f, m / 2);
  c.estimate("orthogonality (configured drift)", pos);
  if (forward.divergence_free()) c.verdict("drift orthogonal to gradients", pos.within(3.0));
  const auto negative = simulate_ito(c.params(Drift::steady(gradient_field(s)), InitialLaw::fixed({kPi / 4, 1.0})),
                                     c.paths(), m, cfg.seed, {c.threads(), false});
  const auto neg = drift_orthogonality(negative, f, m / 2);
  c.estimate("orthogonality (gradient drift, fixed start)", neg);
  c.verdict("negative control detected", neg.z_score() > 3.0);
  c.save(positive, "ito");
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig c) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    try {
      if (key == "experiment") c.experiment = v.get<std::string>();
      else if (key == "nu") c.nu = v.get<double>();
      else if (key == "T") c.T = v.get<double>();
      else if (key == "N") c.N = v.get<long long>();
      else if (key == "M") c.M = v.get<long long>();
      else if (key == "K") c.K = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "beta") c.beta = v.get<double>();
      else if (key == "drift") c.drift = v.get<std::string>();
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "save_paths") c.save_paths = v.get<bool>();
      else if (key == "negative_control") c.negative_control = v.get<bool>();
      else if (key == "members") c.members = v.get<int>();
      else if (key == "finite_difference") c.finite_difference = v.get<bool>();
      else throw std::invalid_argument("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument("config key '" + key + "' has the wrong type");
    }
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = c.experiment;
  j["nu"] = c.nu;
  j["T"] = c.T;
  j["N"] = c.N;
  j["M"] = c.M;
  j["K"] = c.K;
  j["seed"] = c.seed;
  j["beta"] = c.beta;
  j["drift"] = c.drift;
  j["members"] = c.members;
  j["negative_control"] = c.negative_control;
  j["finite_difference"] = c.finite_difference;
  return j.dump(2);
}

std::vector<Violation> validate(const ExperimentConfig& c) {
  std::vector<Violation> out;
  auto error = [&](std::string m) { out.push_back({Violation::Level::error, std::move(m)}); };
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    error("unknown experiment '" + c.experiment + "'");
  }
  if (!(c.nu > 0.0) || !std::isfinite(c.nu)) error("nu must be positive");
  if (!(c.T > 0.0) || !std::isfinite(c.T)) error("T must be positive");
  if (c.N < 1) error("N must be positive");
  if (c.M < 1) error("M must be positive");
  if (c.K < 1) error("K must be positive");
  if (!(c.beta > 1.0) || !std::isfinite(c.beta)) error("beta must exceed 1");
  if (c.threads < 1) error("threads must be positive");
  if (c.members < 1) error("members must be positive");
  DriftChoice d;
  try {
    d = parse_drift(c.drift);
  } catch (const std::exception& e) {
    error(e.what());
  }
  if (d.kind == DriftChoice::Kind::file && !std::filesystem::exists(d.path)) {
    error("drift file not found: " + d.path);
  }
  if (c.experiment == "minimality") {
    if (d.kind != DriftChoice::Kind::taylor_green) error("minimality needs drift=taylor-green");
    if (c.nu > 0.0 && c.T > 0.0) {
      const double R = hessian_bound(taylor_green_pressure(c.nu, 0.0, 2));
      if (R * c.T * c.T > kPi * kPi) {
        out.push_back({Violation::Level::warning, "RT² > π² (R=" + format_double(R) + ", T=" + format_double(c.T) +
                                                      "): the minimality hypothesis fails"});
      }
    }
  }
  if (c.experiment == "action" && c.M % 2 != 0 && d.kind == DriftChoice::Kind::taylor_green) {
    error("action with taylor-green needs an even M");
  }
  if (c.experiment == "bridge" && (c.nu != 0.1 || c.T != 1.0)) {
    out.push_back({Violation::Level::warning, "bridge runs on [0, 1) with unit variance; nu and T are ignored"});
  }
  return out;
}

bool Report::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const ReportVerdict& v) { return v.pass; });
}

Report run(const ExperimentConfig& config) {
  for (const auto& v : validate(config)) {
    if (v.level == Violation::Level::error) throw std::invalid_argument(v.message);
  }
  Context c(config);
  const std::string& e = config.experiment;
  if (e == "fields-check") fields_check(c);
  else if (e == "ns-solve") ns_experiment(c);
  else if (e == "simulate") simulate_experiment(c);
  else if (e == "action") action_experiment(c);
  else if (e == "criticality") criticality_experiment(c);
  else if (e == "minimality") minimality_experiment(c);
  else if (e == "bridge") bridge_experiment(c);
  else measure_experiment(c);
  for (const auto& est : c.report.estimates) {
    if (!std::isfinite(est.value) || !std::isfinite(est.se)) {
      throw NonFiniteError("non-finite estimate '" + est.name + "'");
    }
  }
  for (const auto& v : validate(config)) {
    if (v.level == Violation::Level::warning) c.report.warnings.push_back(v.message);
  }
  return c.report;
}

std::string report_json(const Report& r, const std::string& timestamp) {
  ordered_json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["nu"] = r.nu;
  j["T"] = r.T;
  j["N"] = r.N;
  j["M"] = r.M;
  j["estimates"] = ordered_json::array();
  for (const auto& e : r.estimates) {
    ordered_json x;
    x["name"] = e.name;
    x["value"] = e.value;
    x["se"] = e.se;
    j["estimates"].push_back(std::move(x));
  }
  j["verdicts"] = ordered_json::array();
  for (const auto& v : r.verdicts) {
    ordered_json x;
    x["name"] = v.name;
    x["pass"] = v.pass;
    j["verdicts"].push_back(std::move(x));
  }
  j["timestamp"] = timestamp;
  return j.dump(2) + "\n";
}

std::string table_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_cell(cells[i]);
    out += "\n";
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return out;
}

std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir,
                                                const std::string& timestamp) {
  std::vector<std::filesystem::path> written;
  write_text_file(dir / "report.json", report_json(report, timestamp));
  written.push_back(dir / "report.json");
  for (const auto& t : report.tables) {
    const auto path = dir / "tables" / (t.name + ".csv");
    write_text_file(path, table_csv(t));
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> emit_plots(const Report& report, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  for (const auto& s : report.series) {
    std::string text = "# " + s.x_label + " " + s.y_label + "\n";
    for (const auto& [x, y] : s.points) text += format_double(x) + " " + format_double(y) + "\n";
    const auto path = dir / "plots" / (s.name + ".dat");
    write_text_file(path, text);
    written.push_back(path);
  }
  return written;
}

int exit_status(const Report& report) { return report.passed() ? 0 : 2; }

}  // namespace svlab::runner
