#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace pencil {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag (used by the CLI error object).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

class IndexError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "IndexError"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "DomainError"; }
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NonFiniteInput"; }
};

/// |n ± 2λ| fell below the resonance guard; use the limit solution instead.
class ResonanceError : public Error {
 public:
  explicit ResonanceError(int n)
      : Error("resonance at mode n = " + std::to_string(n)), mode_(n) {}
  int mode() const noexcept { return mode_; }
  const char* kind() const noexcept override { return "Resonance"; }

 private:
  int mode_;
};

class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }
  const char* kind() const noexcept override { return "IllConditioned"; }

 private:
  double condition_;
};

class SingularOperator : public Error {
 public:
  SingularOperator(const std::string& what, double sigma_min)
      : Error(what), sigma_min_(sigma_min) {}
  double sigma_min() const noexcept { return sigma_min_; }
  const char* kind() const noexcept override { return "SingularOperator"; }

 private:
  double sigma_min_;
};

class BranchAmbiguity : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "BranchAmbiguity"; }
};

class ZeroPsi : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "ZeroPsi"; }
};

class ZeroOnContour : public Error {
 public:
  ZeroOnContour(const std::string& what, std::complex<double> z)
      : Error(what), z_(z) {}
  std::complex<double> location() const noexcept { return z_; }
  const char* kind() const noexcept override { return "ZeroOnContour"; }

 private:
  std::complex<double> z_;
};

/// Input document does not match the expected schema; `pointer()` is a JSON
/// pointer to the offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::string pointer)
      : Error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }
  const char* kind() const noexcept override { return "SchemaError"; }

 private:
  std::string pointer_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "IoError"; }
};

}  // namespace pencil
