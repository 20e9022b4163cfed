#pragma once

#include <stdexcept>
#include <string>

namespace svlab {

/// A state or coefficient became NaN/Inf during integration.
class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace svlab
