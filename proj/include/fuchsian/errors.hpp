#pragma once

#include <stdexcept>
#include <string>

namespace fuchsian {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input / validation failures (CLI exit code 1).
class ValidationError : public Error {
public:
  using Error::Error;
};

// Geometric precondition failures (CLI exit code 2).
class GeometryError : public Error {
public:
  using Error::Error;
};

// Solver non-convergence (CLI exit code 3).
class SolverError : public Error {
public:
  using Error::Error;
};

#define FUCHSIAN_DEFINE_ERROR(Name, Base)                                      \
  class Name : public Base {                                                   \
  public:                                                                      \
    explicit Name(const std::string& what) : Base(#Name ": " + what) {}        \
  };

// hyperbolic kernel
FUCHSIAN_DEFINE_ERROR(InvalidPoint, ValidationError)
FUCHSIAN_DEFINE_ERROR(OutsideBall, ValidationError)
FUCHSIAN_DEFINE_ERROR(DegenerateTriangle, GeometryError)
FUCHSIAN_DEFINE_ERROR(NotAnIsometry, ValidationError)

// groups
FUCHSIAN_DEFINE_ERROR(ChartViolation, ValidationError)
FUCHSIAN_DEFINE_ERROR(PairingFailure, GeometryError)

// polyhedra
FUCHSIAN_DEFINE_ERROR(TruncationUnstable, GeometryError)
FUCHSIAN_DEFINE_ERROR(AngleOverflow, GeometryError)
FUCHSIAN_DEFINE_ERROR(CombinatoricsChange, GeometryError)

// cone metrics
FUCHSIAN_DEFINE_ERROR(TriangleInequality, ValidationError)
FUCHSIAN_DEFINE_ERROR(GluingMismatch, ValidationError)
FUCHSIAN_DEFINE_ERROR(EulerMismatch, ValidationError)
FUCHSIAN_DEFINE_ERROR(AngleOutOfRange, ValidationError)
FUCHSIAN_DEFINE_ERROR(LabelMismatch, ValidationError)

// realizer
FUCHSIAN_DEFINE_ERROR(HomotopyBlocked, SolverError)
FUCHSIAN_DEFINE_ERROR(DivergedStep, SolverError)

// deformation lab
FUCHSIAN_DEFINE_ERROR(NotACap, ValidationError)
FUCHSIAN_DEFINE_ERROR(CenterSingularity, ValidationError)
FUCHSIAN_DEFINE_ERROR(NotInfinitesimalIsometry, ValidationError)

// file formats
FUCHSIAN_DEFINE_ERROR(SchemaError, ValidationError)

#undef FUCHSIAN_DEFINE_ERROR

/// Raised when a seed vertex is not a strict vertex of the orbit hull.
/// Carries the violating vertex and the hull triangle found above or
/// through it.
class NotConvex : public GeometryError {
public:
  NotConvex(const std::string& what, int vertex, std::string witness)
      : GeometryError("NotConvex: " + what), vertex_(vertex),
        witness_(std::move(witness)) {}

  int vertex() const { return vertex_; }
  const std::string& witness() const { return witness_; }

private:
  int vertex_;
  std::string witness_;
};

} // namespace fuchsian
