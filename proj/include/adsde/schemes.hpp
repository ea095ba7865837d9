#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "adsde/models.hpp"
#include "adsde/noise.hpp"
#include "adsde/stepping.hpp"

namespace adsde {

struct TrajectoryState {
  std::size_t n = 0;
  Vector x;
  double gamma_tilde_last = 0.0;
  bool binding_last = false;
};

TrajectoryState initial_state(const Vector& x0);

/// Parameters of the damped fixed-point iteration
/// Y <- (1 - w) Y + w (X + h b(Y) + sqrt(h) sigma(X) U).
struct FixedPointSolver {
  double tol = 1e-10;
  std::size_t max_iters = 100;
  double damping = 1.0;
};

struct AdaptiveEuler {
  StepSequence steps;
  ChiPolicy chi;
};

/// Split update on (Q, P); requires a model induced from a HamiltonianModel.
struct AdaptiveHamiltonianEuler {
  StepSequence steps;
  ChiPolicy chi;
};

struct ConstantEuler {
  double h = 0.0;
};

struct ImplicitEuler {
  double h = 0.0;
  FixedPointSolver solver{};
};

using SchemeKind = std::variant<AdaptiveEuler, AdaptiveHamiltonianEuler, ConstantEuler, ImplicitEuler>;

std::string scheme_name(const SchemeKind& scheme);

/// X_{n+1} = X_n + g b(X_n) + sqrt(g) sigma(X_n) U_{n+1} with
/// g = min(gamma_{n+1}, chi(X_n)). Consumes exactly one noise draw.
TrajectoryState adaptive_step(const SdeModel& model, const StepSequence& seq,
                              const ChiPolicy& policy, const TrajectoryState& state,
                              NoiseStream& noise);

/// Q_{n+1} = Q_n + g b1(X_n), P_{n+1} = P_n + g b2(X_n) + sqrt(g) c(X_n) U_{n+1}.
/// `induced` must be induced_sde(model) (chi policies evaluate on it).
TrajectoryState adaptive_hamiltonian_step(const HamiltonianModel& model, const SdeModel& induced,
                                          const StepSequence& seq, const ChiPolicy& policy,
                                          const TrajectoryState& state, NoiseStream& noise);

TrajectoryState constant_euler_step(const SdeModel& model, double h, const TrajectoryState& state,
                                    NoiseStream& noise);

struct ImplicitStepStats {
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Solves Y = X + h b(Y) + sqrt(h) sigma(X) U by damped fixed-point iteration
/// from the explicit predictor. Throws FixedPointDivergence after max_iters.
TrajectoryState implicit_euler_step(const SdeModel& model, double h, const FixedPointSolver& solver,
                                    const TrajectoryState& state, NoiseStream& noise,
                                    ImplicitStepStats* stats = nullptr);

/// What observers see after X_n has been computed.
struct StepEvent {
  std::size_t n;
  double gamma_n;
  double gamma_tilde;
  bool binding;
  const Vector& x_prev;
  const Vector& x;
};

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_step(const StepEvent& event) = 0;
};

struct RunSummary {
  Vector initial;
  Vector final_state;
  std::size_t steps = 0;
  std::uint64_t noise_draws = 0;
  std::size_t binding_count = 0;
  double wall_seconds = 0.0;
};

/// Runs `n_steps` steps of `scheme` from x0, notifying every observer after
/// each step. Step errors propagate with their step index attached.
RunSummary run_trajectory(const SdeModel& model, const SchemeKind& scheme, const Vector& x0,
                          std::size_t n_steps, NoiseStream& noise,
                          std::span<StepObserver* const> observers = {});

struct MonteCarloOptions {
  double horizon = 5.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  NoiseKind noise = NoiseKind::StandardGaussian;
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;
  /// Keep E[f(X_{kh})] for every k (for running-mean plots).
  bool record_series = true;
};

struct MonteCarloResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  std::size_t completed = 0;
  /// Non-finite coordinates or |X| > 1e12.
  std::size_t exploded = 0;
  std::size_t model_failures = 0;
  std::size_t solver_failures = 0;
  std::size_t steps = 0;
  double h = 0.0;
  /// series[k] = mean over completed paths of f(X_{kh}), k = 0..steps.
  std::vector<double> series;

  std::size_t failed() const noexcept { return exploded + model_failures + solver_failures; }
  double explosion_rate() const noexcept {
    return paths == 0 ? 0.0 : static_cast<double>(failed()) / static_cast<double>(paths);
  }
};

/// Estimates E[f(X^T_h)] with a constant-step scheme over independent paths.
/// Path i uses noise stream i, and per-path results are reduced in path order,
/// so the result does not depend on the thread count. Failed paths are counted
/// by cause and excluded. Throws AllPathsExploded when no path completes.
MonteCarloResult monte_carlo_expectation(const SdeModel& model, const SchemeKind& scheme,
                                         const Vector& x0, const ScalarField& f,
                                         const MonteCarloOptions& options);

/// Same as monte_carlo_expectation but returns completed == 0 (mean 0, no
/// series) instead of throwing when every path fails.
MonteCarloResult monte_carlo_run(const SdeModel& model, const SchemeKind& scheme, const Vector& x0,
                                 const ScalarField& f, const MonteCarloOptions& options);

/// Throws NonFiniteState if x has a non-finite coordinate or |x| > 1e12.
void check_state(const Vector& x);

}  // namespace adsde
