#include "adsde/schemes.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace adsde {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// sigma * u with a fixed summation order, shared by every scheme so that
// algebraically identical updates are also bitwise identical.
void apply_diffusion(const Matrix& sigma, const Vector& u, Vector& out) {
  out.resize(sigma.rows());
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) acc += sigma(i, j) * u[j];
    out[i] = acc;
  }
}

inline double euler_update(double x, double step, double drift, double root_step, double kick) {
  return x + step * drift + root_step * kick;
}

void check_shapes(const SdeModel& model, const Vector& x, const Matrix& sigma) {
  if (static_cast<std::size_t>(x.size()) != model.state_dim) {
    throw std::invalid_argument("state dimension does not match model");
  }
  if (static_cast<std::size_t>(sigma.rows()) != model.state_dim ||
      static_cast<std::size_t>(sigma.cols()) != model.noise_dim) {
    throw ModelEvaluationError("diffusion matrix has wrong shape");
  }
}

Vector draw_noise(const SdeModel& model, NoiseStream& noise) {
  if (noise.spec().dimension != model.noise_dim) {
    throw std::invalid_argument("noise dimension does not match model");
  }
  return noise.draw();
}

}  // namespace

void check_state(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw NonFiniteState("state has a non-finite coordinate");
  }
  if (x.norm() > kExplosionNorm) throw NonFiniteState("state norm exceeds 1e12");
}

TrajectoryState initial_state(const Vector& x0) {
  check_state(x0);
  return TrajectoryState{0, x0, 0.0, false};
}

std::string scheme_name(const SchemeKind& scheme) {
  return std::visit(Overloaded{
                        [](const AdaptiveEuler&) { return std::string("adaptive"); },
                        [](const AdaptiveHamiltonianEuler&) { return std::string("hamiltonian"); },
                        [](const ConstantEuler&) { return std::string("euler"); },
                        [](const ImplicitEuler&) { return std::string("implicit"); },
                    },
                    scheme);
}

TrajectoryState adaptive_step(const SdeModel& model, const StepSequence& seq,
                              const ChiPolicy& policy, const TrajectoryState& state,
                              NoiseStream& noise) {
  const Vector& x = state.x;
  const Vector b = model.drift(x);
  const Matrix sigma = model.diffusion(x);
  check_shapes(model, x, sigma);
  const StepSize step = gamma_tilde(seq, policy, model, state.n + 1, x, b);
  const Vector u = draw_noise(model, noise);
  Vector kick;
  apply_diffusion(sigma, u, kick);
  const double root = std::sqrt(step.value);

  TrajectoryState next{state.n + 1, Vector(x.size()), step.value, step.bound};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    next.x[i] = euler_update(x[i], step.value, b[i], root, kick[i]);
  }
  check_state(next.x);
  return next;
}

TrajectoryState adaptive_hamiltonian_step(const HamiltonianModel& model, const SdeModel& induced,
                                          const StepSequence& seq, const ChiPolicy& policy,
                                          const TrajectoryState& state, NoiseStream& noise) {
  const auto d = static_cast<Eigen::Index>(model.dof);
  if (state.x.size() != 2 * d) throw std::invalid_argument("Hamiltonian state must have size 2d");
  const Vector& x = state.x;
  const Vector b = model.drift(x);
  const Matrix c = model.noise(x);
  const StepSize step = gamma_tilde(seq, policy, induced, state.n + 1, x, b);
  if (noise.spec().dimension != model.noise_dim) {
    throw std::invalid_argument("noise dimension does not match model");
  }
  const Vector u = noise.draw();
  Vector kick;
  apply_diffusion(c, u, kick);
  const double root = std::sqrt(step.value);

  TrajectoryState next{state.n + 1, Vector(2 * d), step.value, step.bound};
  for (Eigen::Index i = 0; i < d; ++i) {
    // The position block carries no noise: sqrt(g) * 0.
    next.x[i] = euler_update(x[i], step.value, b[i], root, 0.0);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    next.x[d + i] = euler_update(x[d + i], step.value, b[d + i], root, kick[i]);
  }
  check_state(next.x);
  return next;
}

TrajectoryState constant_euler_step(const SdeModel& model, double h, const TrajectoryState& state,
                                    NoiseStream& noise) {
  if (!(h > 0.0)) throw std::invalid_argument("constant step h must be positive");
  const Vector& x = state.x;
  const Vector b = model.drift(x);
  const Matrix sigma = model.diffusion(x);
  check_shapes(model, x, sigma);
  const Vector u = draw_noise(model, noise);
  Vector kick;
  apply_diffusion(sigma, u, kick);
  const double root = std::sqrt(h);

  TrajectoryState next{state.n + 1, Vector(x.size()), h, false};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    next.x[i] = euler_update(x[i], h, b[i], root, kick[i]);
  }
  check_state(next.x);
  return next;
}

TrajectoryState implicit_euler_step(const SdeModel& model, double h, const FixedPointSolver& solver,
                                    const TrajectoryState& state, NoiseStream& noise,
                                    ImplicitStepStats* stats) {
  if (!(h > 0.0)) throw std::invalid_argument("constant step h must be positive");
  if (!(solver.damping > 0.0 && solver.damping <= 1.0)) {
    throw std::invalid_argument("fixed-point damping must lie in (0, 1]");
  }
  const Vector& x = state.x;
  const Matrix sigma = model.diffusion(x);
  check_shapes(model, x, sigma);
  const Vector u = draw_noise(model, noise);
  Vector kick;
  apply_diffusion(sigma, u, kick);
  // The noise term is frozen at the old state.
  const Vector anchor = x + std::sqrt(h) * kick;

  Vector y = anchor + h * model.drift(x);
  check_state(y);
  for (std::size_t iter = 1; iter <= solver.max_iters; ++iter) {
    const Vector image = anchor + h * model.drift(y);
    const double residual = (y - image).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(residual)) break;
    if (residual <= solver.tol) {
      if (stats) *stats = {iter, residual};
      return TrajectoryState{state.n + 1, y, h, false};
    }
    y = (1.0 - solver.damping) * y + solver.damping * image;
    check_state(y);
  }
  throw FixedPointDivergence("implicit Euler fixed point did not reach tolerance in " +
                             std::to_string(solver.max_iters) + " iterations");
}

RunSummary run_trajectory(const SdeModel& model, const SchemeKind& scheme, const Vector& x0,
                          std::size_t n_steps, NoiseStream& noise,
                          std::span<StepObserver* const> observers) {
  if (n_steps == 0) throw std::invalid_argument("n_steps must be at least 1");
  if (std::holds_alternative<AdaptiveHamiltonianEuler>(scheme) && !model.hamiltonian) {
    throw std::invalid_argument("hamiltonian scheme needs a model induced from a Hamiltonian");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t draws_before = noise.counter();

  RunSummary summary;
  summary.initial = x0;
  TrajectoryState state = initial_state(x0);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    TrajectoryState next;
    double gamma_n = 0.0;
    try {
      next = std::visit(
          Overloaded{
              [&](const AdaptiveEuler& s) {
                gamma_n = s.steps.at(n);
                return adaptive_step(model, s.steps, s.chi, state, noise);
              },
              [&](const AdaptiveHamiltonianEuler& s) {
                gamma_n = s.steps.at(n);
                return adaptive_hamiltonian_step(*model.hamiltonian, model, s.steps, s.chi, state,
                                                 noise);
              },
              [&](const ConstantEuler& s) {
                gamma_n = s.h;
                return constant_euler_step(model, s.h, state, noise);
              },
              [&](const ImplicitEuler& s) {
                gamma_n = s.h;
                return implicit_euler_step(model, s.h, s.solver, state, noise);
              },
          },
          scheme);
    } catch (SimulationError& e) {
      e.set_step_index(n);
      throw;
    }
    if (next.binding_last) ++summary.binding_count;
    const StepEvent event{n, gamma_n, next.gamma_tilde_last, next.binding_last, state.x, next.x};
    for (StepObserver* obs : observers) obs->on_step(event);
    state = std::move(next);
  }
  summary.final_state = state.x;
  summary.steps = n_steps;
  summary.noise_draws = noise.counter() - draws_before;
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

namespace {

constexpr std::size_t kPathsPerChunk = 64;

struct ChunkResult {
  std::vector<double> series_sum;
  std::size_t exploded = 0;
  std::size_t model_failures = 0;
  std::size_t solver_failures = 0;
};

}  // namespace

MonteCarloResult monte_carlo_run(const SdeModel& model, const SchemeKind& scheme, const Vector& x0,
                                 const ScalarField& f, const MonteCarloOptions& options) {
  double h = 0.0;
  if (const auto* s = std::get_if<ConstantEuler>(&scheme)) {
    h = s->h;
  } else if (const auto* s = std::get_if<ImplicitEuler>(&scheme)) {
    h = s->h;
  } else {
    throw std::invalid_argument("Monte Carlo expectation needs a constant-step scheme");
  }
  if (!(h > 0.0)) throw std::invalid_argument("constant step h must be positive");
  if (options.paths == 0) throw std::invalid_argument("need at least one path");
  if (!(options.horizon > 0.0)) throw std::invalid_argument("horizon T must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(options.horizon / h));
  if (steps == 0) throw std::invalid_argument("horizon shorter than one step");

  const NoiseSpec spec{options.noise, model.noise_dim, options.seed};
  const std::size_t chunks = (options.paths + kPathsPerChunk - 1) / kPathsPerChunk;
  std::vector<ChunkResult> results(chunks);
  // NaN marks a failed path.
  std::vector<double> finals(options.paths, std::numeric_limits<double>::quiet_NaN());

  auto run_chunk = [&](std::size_t chunk) {
    ChunkResult& out = results[chunk];
    if (options.record_series) out.series_sum.assign(steps + 1, 0.0);
    std::vector<double> path_series(options.record_series ? steps + 1 : 0);
    const std::size_t first = chunk * kPathsPerChunk;
    const std::size_t last = std::min(options.paths, first + kPathsPerChunk);
    for (std::size_t path = first; path < last; ++path) {
      NoiseStream noise(spec, static_cast<std::uint32_t>(path));
      try {
        TrajectoryState state = initial_state(x0);
        if (options.record_series) path_series[0] = f(state.x);
        for (std::size_t k = 1; k <= steps; ++k) {
          if (const auto* s = std::get_if<ConstantEuler>(&scheme)) {
            state = constant_euler_step(model, s->h, state, noise);
          } else {
            const auto& imp = std::get<ImplicitEuler>(scheme);
            state = implicit_euler_step(model, imp.h, imp.solver, state, noise);
          }
          if (options.record_series) path_series[k] = f(state.x);
        }
        const double value = f(state.x);
        if (!std::isfinite(value)) throw NonFiniteState("test function is non-finite");
        finals[path] = value;
        if (options.record_series) {
          for (std::size_t k = 0; k <= steps; ++k) out.series_sum[k] += path_series[k];
        }
      } catch (const NonFiniteState&) {
        ++out.exploded;
      } catch (const FixedPointDivergence&) {
        ++out.solver_failures;
      } catch (const ModelEvaluationError&) {
        ++out.model_failures;
      }
    }
  };

  std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max<std::size_t>(1, std::min(threads, chunks));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
  }

  MonteCarloResult result;
  result.paths = options.paths;
  result.steps = steps;
  result.h = h;
  for (const ChunkResult& r : results) {
    result.exploded += r.exploded;
    result.model_failures += r.model_failures;
    result.solver_failures += r.solver_failures;
  }
  double sum = 0.0;
  for (double v : finals) {
    if (std::isnan(v)) continue;
    ++result.completed;
    sum += v;
  }
  if (result.completed == 0) return result;
  const auto count = static_cast<double>(result.completed);
  result.mean = sum / count;
  double sq = 0.0;
  for (double v : finals) {
    if (!std::isnan(v)) sq += (v - result.mean) * (v - result.mean);
  }
  result.std_error = result.completed > 1 ? std::sqrt(sq / (count - 1.0) / count) : 0.0;
  if (options.record_series) {
    result.series.assign(steps + 1, 0.0);
    for (const ChunkResult& r : results) {
      for (std::size_t k = 0; k <= steps; ++k) result.series[k] += r.series_sum[k];
    }
    for (double& v : result.series) v /= count;
  }
  return result;
}

MonteCarloResult monte_carlo_expectation(const SdeModel& model, const SchemeKind& scheme,
                                         const Vector& x0, const ScalarField& f,
                                         const MonteCarloOptions& options) {
  MonteCarloResult result = monte_carlo_run(model, scheme, x0, f, options);
  if (result.completed == 0) {
    throw AllPathsExploded("all " + std::to_string(options.paths) + " paths failed (h = " +
                           std::to_string(result.h) + ")");
  }
  return result;
}

}  // namespace adsde
