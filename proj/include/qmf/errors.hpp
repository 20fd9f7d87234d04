#ifndef QMF_ERRORS_HPP_
#define QMF_ERRORS_HPP_

#include <cstdio>
#include <stdexcept>
#include <string>

namespace qmf {

namespace detail {

// Diagnostic formatting for magnitudes in error messages.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible shapes (e.g. matrix dimension mismatch).
class InvalidOperand : public Error {
 public:
  using Error::Error;
};

/// Input outside an operation's documented domain.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A function that must not vanish on the torus came too close to zero.
class SingularOnTorus : public Error {
 public:
  SingularOnTorus(const std::string& what, double min_modulus)
      : Error(what), min_modulus_(min_modulus) {}
  double min_modulus() const noexcept { return min_modulus_; }

 private:
  double min_modulus_;
};

/// Numerical routine did not produce a usable answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmf

#endif  // QMF_ERRORS_HPP_
