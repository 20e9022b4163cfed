#pragma once

// JSON form of Fourier fields:
//   {"dim":2,"K":K,"modes":[{"k":[k1,k2],"re":[..],"im":[..]}],"mean":[..]}
// Only half-space modes are listed; floats carry 17 significant digits so a
// write/read cycle is bit-exact.

#include <filesystem>
#include <string>

#include "svlab/fourier_field.hpp"

namespace svlab {

std::string to_json(const FourierVectorField& f);
std::string to_json(const FourierScalarField& f);

FourierVectorField vector_field_from_json(const std::string& text);
FourierScalarField scalar_field_from_json(const std::string& text);

void save_field(const std::filesystem::path& path, const FourierVectorField& f);
void save_field(const std::filesystem::path& path, const FourierScalarField& f);
FourierVectorField load_vector_field(const std::filesystem::path& path);
FourierScalarField load_scalar_field(const std::filesystem::path& path);

/// Shortest-round-trip decimal for a double ("%.17g").
std::string format_double(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace svlab
