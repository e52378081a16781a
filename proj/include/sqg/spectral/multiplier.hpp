#pragma once

#include <array>
#include <vector>

#include "sqg/field.hpp"

namespace sqg::spectral {

// A homogeneous Fourier multiplier built from |xi|^alpha, i xi_k and i xi^perp
// factors, with xi^perp = (-xi2, xi1). Every multiplier is defined to vanish at
// xi = 0. At most one perp-gradient factor may appear; it makes the multiplier
// vector valued.
class MultiplierSpec {
 public:
  enum class Kind { power, derivative, perp_gradient };

  struct Factor {
    Kind kind;
    double alpha = 0.0;  // power
    int axis = 0;        // derivative
  };

  static MultiplierSpec power(double alpha);
  static MultiplierSpec derivative(int axis);
  static MultiplierSpec perp_gradient();
  static MultiplierSpec identity() { return MultiplierSpec{}; }

  // Composite product.
  MultiplierSpec operator*(const MultiplierSpec& other) const;

  bool vector_valued() const noexcept { return vector_valued_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }

  // Value at xi (second entry used only when vector valued).
  std::array<complex, 2> evaluate(double xi1, double xi2) const noexcept;
  complex evaluate_component(int c, double xi1, double xi2) const noexcept;

 private:
  std::vector<Factor> factors_;
  bool vector_valued_ = false;
};

}  // namespace sqg::spectral
