#include "svlab/drift.hpp"

#include <sstream>
#include <stdexcept>

namespace svlab {

Drift Drift::constant(Vec2 c) {
  Drift d;
  Term t;
  t.kind = Kind::constant;
  t.c = c;
  d.terms_.push_back(std::move(t));
  return d;
}

Drift Drift::steady(FourierVectorField f, double scale) {
  Drift d;
  Term t;
  t.kind = Kind::steady;
  t.scale = scale;
  t.field = std::move(f);
  d.terms_.push_back(std::move(t));
  return d;
}

Drift Drift::velocity(std::shared_ptr<const TimeDependentVelocity> u, TimeOrientation orientation,
                      double scale) {
  if (!u) throw std::invalid_argument("velocity drift needs a velocity source");
  Drift d;
  Term t;
  t.kind = Kind::velocity;
  t.scale = scale;
  t.u = std::move(u);
  t.orientation = orientation;
  d.terms_.push_back(std::move(t));
  return d;
}

Drift& Drift::operator+=(const Drift& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

Vec2 Drift::value(double t, Vec2 x) const {
  Vec2 out;
  for (const Term& term : terms_) {
    switch (term.kind) {
      case Kind::constant:
        out += term.c;
        break;
      case Kind::steady:
        out += term.scale * term.field.evaluate(x);
        break;
      case Kind::velocity:
        if (term.orientation == TimeOrientation::forward) {
          out += term.scale * term.u->value(t, x);
        } else {
          out -= term.scale * term.u->value(term.u->horizon() - t, x);
        }
        break;
    }
  }
  return out;
}

Mat2 Drift::jacobian(double t, Vec2 x) const {
  Mat2 out;
  auto add = [&out](const Mat2& m, double s) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out(i, j) += s * m(i, j);
    }
  };
  for (const Term& term : terms_) {
    switch (term.kind) {
      case Kind::constant:
        break;
      case Kind::steady:
        add(term.field.gradient_tensor(x), term.scale);
        break;
      case Kind::velocity:
        if (term.orientation == TimeOrientation::forward) {
          add(term.u->jacobian(t, x), term.scale);
        } else {
          add(term.u->jacobian(term.u->horizon() - t, x), -term.scale);
        }
        break;
    }
  }
  return out;
}

bool Drift::divergence_free() const {
  for (const Term& term : terms_) {
    if (term.kind == Kind::steady && !term.field.is_divergence_free(1e-10)) return false;
  }
  return true;
}

std::shared_ptr<const TimeDependentVelocity> Drift::velocity_source() const {
  for (const Term& term : terms_) {
    if (term.kind == Kind::velocity) return term.u;
  }
  return nullptr;
}

TimeOrientation Drift::orientation() const {
  for (const Term& term : terms_) {
    if (term.kind == Kind::velocity) return term.orientation;
  }
  return TimeOrientation::forward;
}

std::string Drift::describe() const {
  if (terms_.empty()) return "zero";
  std::ostringstream ss;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& term = terms_[i];
    if (i > 0) ss << " + ";
    switch (term.kind) {
      case Kind::constant:
        ss << "constant(" << term.c.x << "," << term.c.y << ")";
        break;
      case Kind::steady:
        ss << term.scale << "*steady(K=" << term.field.truncation() << ")";
        break;
      case Kind::velocity:
        ss << term.scale << "*velocity("
           << (term.orientation == TimeOrientation::forward ? "forward" : "reversed") << ")";
        break;
    }
  }
  return ss.str();
}

}  // namespace svlab
