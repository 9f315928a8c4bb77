#pragma once

#include <stdexcept>
#include <string>

#include "lfc3d/types.hpp"

namespace lfc3d {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A user callback returned a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Vec3 point, double time)
      : Error(what), point_(point), time_(time) {}

  const Vec3& point() const noexcept { return point_; }
  double time() const noexcept { return time_; }

 private:
  Vec3 point_;
  double time_;
};

/// Spline evaluated outside its parameter square.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Rank-deficient tangent plane.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested spline order.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Quadrature node counts below the exactness bound.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Pathline touches the surface with zero relative normal velocity.
class TangencyError : public Error {
 public:
  TangencyError(const std::string& what, double tau) : Error(what), tau_(tau) {}
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

/// A sign change of the surface distance could not be resolved into a crossing.
class UnresolvedCrossingError : public Error {
 public:
  using Error::Error;
};

/// Ray votes for a point's degree have no majority.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// The Eulerian reference failed its self-convergence gate.
class ReferenceQualityError : public Error {
 public:
  using Error::Error;
};

}  // namespace lfc3d
