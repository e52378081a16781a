#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sqg {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Two fields (or a field and an operator) live on different lattices.
class LatticeMismatch : public Error {
 public:
  using Error::Error;
};

// A multiplier produced inf/nan, typically |xi|^alpha with alpha too negative.
class NonFiniteAmplitude : public Error {
 public:
  using Error::Error;
};

// A constructed or relocated spectrum does not fit below the Nyquist frequency.
class SpectrumOverflow : public Error {
 public:
  using Error::Error;
};

// A frequency-space support (probe, bump) contains no lattice point.
class EmptySupport : public Error {
 public:
  using Error::Error;
};

// Translated blocks of a forcing collide or cannot be placed in the box.
class TranslationCollision : public Error {
 public:
  using Error::Error;
};

// A computation would exceed the configured memory budget.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

using WarningSink = std::function<void(std::string_view)>;

// Installs the sink that receives non-fatal diagnostics (default: stderr).
// Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace sqg
