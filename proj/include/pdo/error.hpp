#pragma once

#include <stdexcept>
#include <string>

namespace pdo {

/// Root of every error raised by the library.
///
/// Errors fall in two families. Validation errors signal bad input
/// (malformed symbols, violated preconditions); numerical errors signal that
/// an algorithm could not reach its tolerance. The CLI maps the first family
/// to exit code 1 and the second to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  virtual bool numerical() const noexcept { return false; }

 private:
  std::string name_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  bool numerical() const noexcept override { return true; }
};

#define PDO_DEFINE_ERROR(Name, Base)                                   \
  class Name : public Base {                                           \
   public:                                                             \
    explicit Name(const std::string& what) : Base(#Name, what) {}      \
  };

PDO_DEFINE_ERROR(DomainError, Error)
PDO_DEFINE_ERROR(DimensionMismatch, Error)
PDO_DEFINE_ERROR(NotElliptic, Error)
PDO_DEFINE_ERROR(NotPositive, Error)
PDO_DEFINE_ERROR(ZeroCovector, Error)
PDO_DEFINE_ERROR(NotReal, Error)
PDO_DEFINE_ERROR(NotCharacteristic, Error)
PDO_DEFINE_ERROR(GridMismatch, Error)
PDO_DEFINE_ERROR(SymbolVanishes, Error)
PDO_DEFINE_ERROR(TopDegree, Error)
PDO_DEFINE_ERROR(BottomDegree, Error)
PDO_DEFINE_ERROR(SyntaxError, Error)
PDO_DEFINE_ERROR(HomogeneityError, Error)
PDO_DEFINE_ERROR(DegreeOrderError, Error)
PDO_DEFINE_ERROR(StepFailure, NumericalError)
PDO_DEFINE_ERROR(NonConvergent, NumericalError)
PDO_DEFINE_ERROR(Unstable, NumericalError)

#undef PDO_DEFINE_ERROR

}  // namespace pdo
