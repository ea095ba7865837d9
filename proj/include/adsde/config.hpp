#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adsde {

/// Raised for malformed or inconsistent configuration (CLI exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  /// lorenz, dof3, langevin or ou.
  std::string name = "lorenz";
  /// Lorenz Lyapunov candidate: "standard" (|u|^2 + 1) or "shifted".
  std::string lyapunov = "standard";
  double theta = 1.0;
  double sigma = 1.4142135623730951;
  std::size_t dim = 1;
  /// Langevin friction gamma and noise scale (c = noise * Id).
  double damping = 1.0;
  double noise = 1.0;
  bool frozen_mass = false;
  /// Empty: the model's default initial state.
  std::vector<double> x0;

  bool operator==(const ModelConfig&) const = default;
};

struct SchemeConfig {
  /// adaptive, hamiltonian, euler or implicit.
  std::string kind = "adaptive";
  double h = 0.01;
  double tol = 1e-10;
  std::size_t max_iters = 100;
  double damping = 1.0;

  bool operator==(const SchemeConfig&) const = default;
};

struct ChiConfig {
  /// unbounded, constant, natural, lorenz, monotone or hamiltonian.
  std::string kind = "natural";
  double delta = 0.5;
  double zeta = 1e-3;
  double p = 1.0;
  double value = 1.0;
  std::size_t samples = 8;
  std::optional<double> hessian_sup;

  bool operator==(const ChiConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  SchemeConfig scheme;
  double gamma0 = 0.5;
  double step_exponent = 1.0 / 3.0;
  /// Unset: eta = gamma (same exponent as the steps).
  std::optional<double> weights_exponent;
  ChiConfig chi;
  std::string noise_kind = "gaussian";
  std::uint64_t seed = 1;
  std::size_t steps = 1000000;
  double mc_horizon = 5.0;
  std::size_t mc_paths = 10000;
  std::size_t mc_threads = 0;
  /// Empty: the model's default test functions.
  std::vector<std::string> functions;
  double lambda = 0.05;
  double lyapunov_a = 1.0;
  double bump_radius = 1.0;
  std::size_t cadence = 2000;
  /// Empty: $ADSDE_OUTPUT_DIR, else "out".
  std::string output_dir;
  double validate_s = 2.0;
  double validate_tau = 0.25;
  double validate_box = 20.0;
  std::size_t validate_samples = 4000;

  double effective_weights_exponent() const { return weights_exponent.value_or(step_exponent); }

  bool operator==(const RunConfig&) const = default;
};

/// Every recognised dotted key, in emission order.
const std::vector<std::string>& config_keys();

/// Sets one dotted key. Throws ConfigError on an unknown key or bad value.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Current value of a key as text; empty for an unset optional.
std::string get_config_value(const RunConfig& config, std::string_view key);

/// "key = value" lines; '#' starts a comment. Later lines override earlier ones.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Every key with a value, one per line. parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

/// Directory from the config, the environment, or "out".
std::string resolve_output_dir(const RunConfig& config);

}  // namespace adsde
