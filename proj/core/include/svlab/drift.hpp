#pragma once

// Drift b(t, x) of a torus SDE, assembled as a sum of scaled terms.

#include <memory>
#include <string>
#include <vector>

#include "svlab/fourier_field.hpp"
#include "svlab/reference_flows.hpp"

namespace svlab {

/// forward: b(t, x) = u(t, x). reversed: b(t, x) = −u(T − t, x) with T the
/// velocity's horizon, the backward-in-time drift of the minimality SDE.
enum class TimeOrientation { forward, reversed };

class Drift {
 public:
  Drift() = default;

  static Drift zero() { return {}; }
  static Drift constant(Vec2 c);
  static Drift steady(FourierVectorField f, double scale = 1.0);
  static Drift velocity(std::shared_ptr<const TimeDependentVelocity> u, TimeOrientation orientation,
                        double scale = 1.0);

  Drift& operator+=(const Drift& other);
  friend Drift operator+(Drift a, const Drift& b) { return a += b; }

  Vec2 value(double t, Vec2 x) const;
  Mat2 jacobian(double t, Vec2 x) const;
  double divergence(double t, Vec2 x) const { return jacobian(t, x).trace(); }

  bool is_zero() const { return terms_.empty(); }
  bool divergence_free() const;
  /// The velocity term, if any (first one found).
  std::shared_ptr<const TimeDependentVelocity> velocity_source() const;
  TimeOrientation orientation() const;
  std::string describe() const;

 private:
  enum class Kind { constant, steady, velocity };
  struct Term {
    Kind kind = Kind::constant;
    double scale = 1.0;
    Vec2 c;
    FourierVectorField field;
    std::shared_ptr<const TimeDependentVelocity> u;
    TimeOrientation orientation = TimeOrientation::forward;
  };
  std::vector<Term> terms_;
};

}  // namespace svlab
