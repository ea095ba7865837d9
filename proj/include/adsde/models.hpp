#pragma once

#include <memory>
#include <optional>
#include <string>

#include "adsde/types.hpp"

namespace adsde {

/// Constants of the drift condition <grad V, b> <= -alpha V + beta.
struct DriftConstants {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Lyapunov data attached to a model.
///
/// `V` must take values in [1, inf); `value()` enforces it on every call.
/// The Hessian is optional: models either provide a local evaluator, a global
/// bound on its spectral norm, or both. Constants that the theory needs but the
/// model does not know stay empty and are fitted by the diagnostics.
struct LyapunovData {
  ScalarField V;
  VectorField gradient;
  MatrixField hessian;
  std::optional<double> hessian_norm_sup;
  std::optional<DriftConstants> drift_constants;
  double exponent_a = 1.0;
  /// C_sigma in Tr(sigma sigma^*) <= C_sigma V^{1-a}.
  std::optional<double> trace_constant;
  /// C_V in |grad V|^2 <= C_V V.
  std::optional<double> gradient_constant;

  double value(const Vector& x) const;
  /// Spectral norm of D^2V(x) from the local evaluator, else the global bound.
  double hessian_norm(const Vector& x) const;
  bool has_hessian() const noexcept { return static_cast<bool>(hessian) || hessian_norm_sup.has_value(); }
};

/// A C^2 function with optional derivatives (test functions, potentials).
struct SmoothFunction {
  ScalarField value;
  VectorField gradient;
  MatrixField hessian;

  bool has_derivatives() const noexcept {
    return static_cast<bool>(gradient) && static_cast<bool>(hessian);
  }
};

struct HamiltonianModel;

/// dX = b(X) dt + sigma(X) dB with X in R^d and B in R^m.
struct SdeModel {
  std::string label;
  std::size_t state_dim = 0;
  std::size_t noise_dim = 0;
  VectorField drift;
  MatrixField diffusion;
  LyapunovData lyapunov;
  /// Set when the model was induced from a Hamiltonian system.
  std::shared_ptr<const HamiltonianModel> hamiltonian;
};

/// dq = dpH dt, dp = (-dqH - F dpH) dt + c dW on R^{2d}.
struct HamiltonianModel {
  std::string label;
  std::size_t dof = 0;
  std::size_t noise_dim = 0;
  ScalarField hamiltonian;
  VectorField dp_h;
  VectorField dq_h;
  MatrixField damping;
  MatrixField noise;
  /// V together with its momentum gradient and sup ||d^2_pp V||.
  LyapunovData lyapunov;
  VectorField dp_v;
  std::optional<double> pp_hessian_norm_sup;

  Vector b1(const Vector& x) const;
  Vector b2(const Vector& x) const;
  /// b1 and b2 stacked; evaluates dpH once.
  Vector drift(const Vector& x) const;
  /// [0; c(x)], shape 2d x m.
  Matrix diffusion(const Vector& x) const;
};

/// The SdeModel with b = (b1, b2) and sigma = [0; c]. Shares ownership of
/// the Hamiltonian so Hamiltonian-aware code can recover it.
SdeModel induced_sde(std::shared_ptr<const HamiltonianModel> model);

/// Lorenz system with additive noise on the first two equations and
/// V(u) = |u|^2 + 1.
SdeModel lorenz_model();

/// Same dynamics with the shifted Lyapunov candidate x^2 + y^2 + (z - 38)^2 + 1.
SdeModel lorenz_model_shifted_lyapunov();

/// Potential g with derivatives, for the Langevin family.
struct Potential {
  std::size_t dim = 1;
  SmoothFunction g;
  /// Set when D^2 g is the constant s * Id.
  std::optional<double> constant_hessian_scale;
};

Potential quadratic_potential(std::size_t dim);

/// Langevin equation: H = |p|^2/2 + g(q), F = gamma Id, c constant and
/// invertible, V = H + (gamma/2)<p,q> + (gamma^2/4)|q|^2 + 1.
HamiltonianModel langevin_model(const Potential& g, double damping, const Matrix& c);

struct Dof3Options {
  /// Freeze the mass matrix at M(0); the linear oscillator underneath.
  bool frozen_mass = false;
};

/// 3-DOF oscillator with configuration-dependent mass matrix, damping and
/// noise on DOF 1 only. V = H + 1.
HamiltonianModel dof3_model(Dof3Options options = {});

/// Mass matrix M(q) of the 3-DOF system and its partials dM/dq2, dM/dq3.
Eigen::Matrix3d dof3_mass(const Eigen::Vector3d& q);
Eigen::Matrix3d dof3_mass_partial(const Eigen::Vector3d& q, int index);

/// b(x) = -theta x, sigma = sigma_const Id, V = |x|^2 + 1.
SdeModel ou_oracle_model(double theta, double sigma, std::size_t dim);

/// Af(x) = <grad f, b> + (1/2) Tr(sigma^* D^2 f sigma).
double generator_apply(const SdeModel& model, const SmoothFunction& f, const Vector& x);
double generator_apply(const SdeModel& model, const Vector& grad_f, const Matrix& hess_f,
                       const Vector& x);

}  // namespace adsde
