#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace adsde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;

/// Base class for failures raised while a trajectory is being advanced.
///
/// The step index is attached by the driver that owns the loop, so model code
/// can throw without knowing where in the run it is.
class SimulationError : public std::exception {
 public:
  explicit SimulationError(std::string message) : message_(std::move(message)) {
    rebuild();
  }

  const char* what() const noexcept override { return what_.c_str(); }
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> step_index() const noexcept { return step_; }

  void set_step_index(std::size_t n) {
    step_ = n;
    rebuild();
  }

 private:
  void rebuild() {
    what_ = step_ ? message_ + " (step " + std::to_string(*step_) + ")" : message_;
  }

  std::string message_;
  std::string what_;
  std::optional<std::size_t> step_;
};

/// A state coordinate became non-finite or the state left the guard ball.
class NonFiniteState : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// A model could not be evaluated at the requested state (e.g. a singular
/// mass matrix, or V(x) < 1).
class ModelEvaluationError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// The implicit step's fixed-point iteration failed to reach tolerance.
class FixedPointDivergence : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class AllPathsExploded : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// exp(lambda V^a) exceeded the representable range.
class MomentOverflow : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class EmptyMeasure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MissingDerivatives : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Norm beyond which a state counts as exploded even if still finite.
inline constexpr double kExplosionNorm = 1e12;

}  // namespace adsde
