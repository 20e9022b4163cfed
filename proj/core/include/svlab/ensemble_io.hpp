#pragma once

// Columnar binary form of a PathEnsemble, little-endian 64-bit words:
//
//   header: N, M, dt, seed, kind, dim, channels
//   M + 1 step blocks: wrapped[N·dim], unwrapped[N·dim], drift[N·dim], dW[N·channels]
//
// Integers are stored as uint64, dt as a double. The dW block of the final
// step is all zeros. A JSON sidecar (<file>.json) records the parameters.

#include <filesystem>
#include <string>

#include "svlab/sde_engine.hpp"

namespace svlab {

void save_ensemble(const std::filesystem::path& path, const PathEnsemble& ens,
                   const std::string& sidecar_json = "{}");
PathEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace svlab
