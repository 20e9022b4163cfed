#include "svlab/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace svlab {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_json(const FourierVectorField& f) {
  std::string out = "{\"dim\":2,\"K\":" + std::to_string(f.truncation()) + ",\"modes\":[";
  bool first = true;
  for (const Wavevector& k : f.active_modes()) {
    const CVec2 c = f.coeff(k);
    if (!first) out += ',';
    first = false;
    out += "{\"k\":[" + std::to_string(k.k1) + ',' + std::to_string(k.k2) + "],\"re\":[" +
           format_double(c[0].real()) + ',' + format_double(c[1].real()) + "],\"im\":[" +
           format_double(c[0].imag()) + ',' + format_double(c[1].imag()) + "]}";
  }
  const Vec2 m = f.mean();
  out += "],\"mean\":[" + format_double(m.x) + ',' + format_double(m.y) + "]}";
  return out;
}

std::string to_json(const FourierScalarField& f) {
  std::string out = "{\"dim\":1,\"K\":" + std::to_string(f.truncation()) + ",\"modes\":[";
  bool first = true;
  for (const Wavevector& k : f.active_modes()) {
    const Complex c = f.coeff(k);
    if (!first) out += ',';
    first = false;
    out += "{\"k\":[" + std::to_string(k.k1) + ',' + std::to_string(k.k2) + "],\"re\":" +
           format_double(c.real()) + ",\"im\":" + format_double(c.imag()) + "}";
  }
  out += "],\"mean\":" + format_double(f.mean()) + "}";
  return out;
}

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("invalid field JSON: ") + e.what());
  }
}

Wavevector read_k(const json& m) {
  const auto& k = m.at("k");
  return {k.at(0).get<int>(), k.at(1).get<int>()};
}

}  // namespace

FourierVectorField vector_field_from_json(const std::string& text) {
  const json j = parse(text);
  if (j.at("dim").get<int>() != 2) throw std::runtime_error("vector field JSON must have dim 2");
  FourierVectorField f(j.at("K").get<int>());
  for (const auto& m : j.at("modes")) {
    const auto& re = m.at("re");
    const auto& im = m.at("im");
    f.set_coeff(read_k(m), {Complex{re.at(0).get<double>(), im.at(0).get<double>()},
                            Complex{re.at(1).get<double>(), im.at(1).get<double>()}});
  }
  const auto& mean = j.at("mean");
  f.set_mean({mean.at(0).get<double>(), mean.at(1).get<double>()});
  return f;
}

FourierScalarField scalar_field_from_json(const std::string& text) {
  const json j = parse(text);
  if (j.at("dim").get<int>() != 1) throw std::runtime_error("scalar field JSON must have dim 1");
  FourierScalarField f(j.at("K").get<int>());
  for (const auto& m : j.at("modes")) {
    f.set_coeff(read_k(m), Complex{m.at("re").get<double>(), m.at("im").get<double>()});
  }
  f.set_mean(j.at("mean").get<double>());
  return f;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void save_field(const std::filesystem::path& path, const FourierVectorField& f) {
  write_text_file(path, to_json(f));
}
void save_field(const std::filesystem::path& path, const FourierScalarField& f) {
  write_text_file(path, to_json(f));
}
FourierVectorField load_vector_field(const std::filesystem::path& path) {
  return vector_field_from_json(read_text_file(path));
}
FourierScalarField load_scalar_field(const std::filesystem::path& path) {
  return scalar_field_from_json(read_text_file(path));
}

}  // namespace svlab
