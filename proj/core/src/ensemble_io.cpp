#include "svlab/ensemble_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "svlab/field_io.hpp"

namespace svlab {

static_assert(std::endian::native == std::endian::little, "ensemble files assume a little-endian host");

namespace {

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  void u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void block(const std::vector<double>& v) {
    out_.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
  }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("ensemble write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open " + path.string());
  }
  std::uint64_t u64() {
    std::uint64_t v;
    read(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    read(&v, sizeof v);
    return v;
  }
  void block(std::vector<double>& v) { read(v.data(), v.size() * sizeof(double)); }

 private:
  void read(void* dst, std::size_t bytes) {
    in_.read(static_cast<char*>(dst), std::streamsize(bytes));
    if (!in_) throw std::runtime_error("truncated ensemble file");
  }
  std::ifstream in_;
};

}  // namespace

void save_ensemble(const std::filesystem::path& path, const PathEnsemble& ens, const std::string& sidecar_json) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::size_t n = ens.paths();
  const std::size_t d = std::size_t(ens.dim());
  const std::size_t c = ens.channels();
  Writer w(path);
  w.u64(n);
  w.u64(ens.steps());
  w.f64(ens.dt());
  w.u64(ens.seed());
  w.u64(std::uint64_t(ens.kind()));
  w.u64(d);
  w.u64(c);
  std::vector<double> wrapped(n * d), unwrapped(n * d), drift(n * d), dw(n * c);
  for (std::size_t j = 0; j <= ens.steps(); ++j) {
    for (std::size_t p = 0; p < n; ++p) {
      const Vec2 x = ens.position(p, j);
      const Vec2 xw = ens.wrapped(p, j);
      const Vec2 b = ens.drift(p, j);
      for (std::size_t a = 0; a < d; ++a) {
        unwrapped[p * d + a] = x[int(a)];
        wrapped[p * d + a] = xw[int(a)];
        drift[p * d + a] = b[int(a)];
      }
      if (j < ens.steps()) {
        ens.increments_into(p, j, std::span<double>(dw).subspan(p * c, c));
      } else {
        std::fill(dw.begin() + std::ptrdiff_t(p * c), dw.begin() + std::ptrdiff_t((p + 1) * c), 0.0);
      }
    }
    w.block(wrapped);
    w.block(unwrapped);
    w.block(drift);
    w.block(dw);
  }
  w.finish();

  nlohmann::json side = nlohmann::json::parse(sidecar_json);
  side["paths"] = n;
  side["steps"] = ens.steps();
  side["dt"] = ens.dt();
  side["seed"] = ens.seed();
  side["kind"] = to_string(ens.kind());
  side["nu"] = ens.nu();
  side["description"] = ens.description();
  write_text_file(path.string() + ".json", side.dump(2));
}

PathEnsemble load_ensemble(const std::filesystem::path& path) {
  Reader r(path);
  const std::size_t n = r.u64();
  const std::size_t m = r.u64();
  const double dt = r.f64();
  const std::uint64_t seed = r.u64();
  const std::uint64_t kind = r.u64();
  const std::size_t d = r.u64();
  const std::size_t c = r.u64();
  if (kind > 2) throw std::runtime_error("unknown ensemble kind in file");
  PathEnsemble ens(EnsembleKind(kind), n, m, int(d), c, dt, seed, true);
  std::vector<double> wrapped(n * d), unwrapped(n * d), drift(n * d), dw(n * c);
  for (std::size_t j = 0; j <= m; ++j) {
    r.block(wrapped);
    r.block(unwrapped);
    r.block(drift);
    r.block(dw);
    for (std::size_t p = 0; p < n; ++p) {
      Vec2 x, b;
      for (std::size_t a = 0; a < d; ++a) {
        x[int(a)] = unwrapped[p * d + a];
        b[int(a)] = drift[p * d + a];
      }
      ens.set_position(p, j, x);
      ens.set_drift(p, j, b);
      if (j < m) {
        auto dst = ens.mutable_increments(p, j);
        std::copy(dw.begin() + std::ptrdiff_t(p * c), dw.begin() + std::ptrdiff_t((p + 1) * c), dst.begin());
      }
    }
  }
  const auto sidecar = std::filesystem::path(path.string() + ".json");
  if (std::filesystem::exists(sidecar)) {
    const auto side = nlohmann::json::parse(read_text_file(sidecar));
    if (side.contains("nu")) ens.set_nu(side.at("nu").get<double>());
    if (side.contains("description")) ens.set_description(side.at("description").get<std::string>());
  }
  return ens;
}

}  // namespace svlab
