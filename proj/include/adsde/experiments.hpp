#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adsde/config.hpp"
#include "adsde/record.hpp"
#include "adsde/schemes.hpp"

namespace adsde {

struct BuiltModel {
  SdeModel sde;
  Vector x0;
  std::vector<std::string> default_functions;
};

/// Registry: lorenz, dof3, langevin, ou. Throws ConfigError on unknown names.
BuiltModel build_model(const ModelConfig& config);
ChiPolicy build_chi(const ChiConfig& config);
SchemeKind build_scheme(const RunConfig& config);
/// Labels: one, sqnorm, q<k>sq (1-based coordinate), W (exp(lambda V^a)), bump.
std::vector<TestFunction> build_test_functions(const RunConfig& config, const BuiltModel& model);
Vector initial_state_for(const RunConfig& config, const BuiltModel& model);

/// Hypothesis checks: exponent admissibility, drift fit, chi bounds, lambda0
/// and step summability. Runs are never blocked by these.
std::vector<CheckLine> validate(const RunConfig& config);
bool any_fail(const std::vector<CheckLine>& lines);

/// One trajectory. Simulation errors are caught and stored in the record.
RunRecord simulate(const RunConfig& config, std::string name = "simulate",
                   std::string command = "simulate");

/// E[f(X_T)] over config.mc_paths paths for the constant-step scheme in the
/// config; f is the first test function.
MonteCarloSummary monte_carlo(const RunConfig& config);
RunRecord monte_carlo_record(const RunConfig& config, std::string name = "montecarlo");

/// Named experiment presets: lorenz, dof3, ou, langevin.
RunConfig preset(std::string_view name);

struct ReproduceOptions {
  /// Empty: the preset's full list.
  std::vector<double> gamma0s;
  /// 0: the preset's default.
  std::size_t steps = 0;
  std::uint64_t seed = 1;
  /// Seeds seed, seed+1, ..., seed+seeds-1 for every gamma0.
  std::size_t seeds = 1;
  /// Empty: do not write files.
  std::string output_dir;
};

/// Adaptive Euler with chi = 2V/(|b|^2 v 1) for each gamma0 in
/// {2^-1, ..., 2^-5}, default 10^7 steps.
std::vector<RunRecord> reproduce_lorenz(const ReproduceOptions& options);

/// Adaptive Hamiltonian Euler with the natural chi for each gamma0 in
/// {2^-1, ..., 2^-4}, default 10^6 steps, f = q1^2.
std::vector<RunRecord> reproduce_dof3(const ReproduceOptions& options);

struct BaselineOptions {
  /// lorenz, dof3 or all.
  std::string model = "all";
  double horizon = 5.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::string output_dir;
};

/// Constant-step Monte Carlo table: Lorenz explicit Euler at h = 2^-6..2^-10,
/// dof3 explicit Euler at h = 2^-1..2^-6 and dof3 implicit Euler at 2^-3..2^-6.
RunRecord reproduce_baselines(const BaselineOptions& options);

/// `model,scheme,h,mean,std_error,completed,exploded,model_failures,solver_failures`.
std::string baseline_table_csv(const RunRecord& record);

}  // namespace adsde
