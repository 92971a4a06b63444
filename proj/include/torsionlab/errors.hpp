#pragma once

#include <stdexcept>
#include <string>

namespace torsionlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadSpec : public Error {
 public:
  using Error::Error;
};

class EmptyRaster : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class SourceOutside : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class DegenerateSequence : public Error {
 public:
  using Error::Error;
};

class OracleMismatch : public Error {
 public:
  using Error::Error;
};

class ConsistencyFailure : public Error {
 public:
  using Error::Error;
};

class BadBoundaryPoint : public Error {
 public:
  using Error::Error;
};

class RasterInfeasible : public Error {
 public:
  using Error::Error;
};

class FitDegenerate : public Error {
 public:
  using Error::Error;
};

class OracleViolation : public Error {
 public:
  using Error::Error;
};

/// Raised when a check's hypotheses (e.g. simple connectivity) do not hold.
class NotApplicable : public Error {
 public:
  NotApplicable(std::string check_id, const std::string& why)
      : Error(check_id + " not applicable: " + why), check_id_(std::move(check_id)) {}
  const std::string& check_id() const noexcept { return check_id_; }

 private:
  std::string check_id_;
};

/// The iterative solver hit its iteration cap before reaching the tolerance.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, long iterations, double residual)
      : Error(what + " (iterations=" + std::to_string(iterations) +
              ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  long iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  long iterations_;
  double residual_;
};

}  // namespace torsionlab
