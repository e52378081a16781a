#include "sqg/spectral/multiplier.hpp"

#include <cmath>

#include "sqg/error.hpp"

namespace sqg::spectral {

MultiplierSpec MultiplierSpec::power(double alpha) {
  if (!std::isfinite(alpha)) throw PreconditionError("multiplier exponent must be finite");
  MultiplierSpec m;
  m.factors_.push_back({Kind::power, alpha, 0});
  return m;
}

MultiplierSpec MultiplierSpec::derivative(int axis) {
  if (axis != 0 && axis != 1) throw PreconditionError("derivative axis must be 0 or 1");
  MultiplierSpec m;
  m.factors_.push_back({Kind::derivative, 0.0, axis});
  return m;
}

MultiplierSpec MultiplierSpec::perp_gradient() {
  MultiplierSpec m;
  m.factors_.push_back({Kind::perp_gradient, 0.0, 0});
  m.vector_valued_ = true;
  return m;
}

MultiplierSpec MultiplierSpec::operator*(const MultiplierSpec& other) const {
  if (vector_valued_ && other.vector_valued_) {
    throw PreconditionError("a multiplier may contain at most one perp-gradient factor");
  }
  MultiplierSpec m = *this;
  m.factors_.insert(m.factors_.end(), other.factors_.begin(), other.factors_.end());
  m.vector_valued_ = vector_valued_ || other.vector_valued_;
  return m;
}

std::array<complex, 2> MultiplierSpec::evaluate(double xi1, double xi2) const noexcept {
  if (xi1 == 0.0 && xi2 == 0.0) return {complex{}, complex{}};
  const double r = std::hypot(xi1, xi2);
  complex s{1.0, 0.0};
  const complex i{0.0, 1.0};
  for (const auto& f : factors_) {
    switch (f.kind) {
      case Kind::power:
        s *= std::pow(r, f.alpha);
        break;
      case Kind::derivative:
        s *= i * (f.axis == 0 ? xi1 : xi2);
        break;
      case Kind::perp_gradient:
        break;
    }
  }
  if (!vector_valued_) return {s, complex{}};
  return {s * i * (-xi2), s * i * xi1};
}

complex MultiplierSpec::evaluate_component(int c, double xi1, double xi2) const noexcept {
  return evaluate(xi1, xi2)[static_cast<std::size_t>(c)];
}

}  // namespace sqg::spectral
