#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adsde/config.hpp"
#include "adsde/diagnostics.hpp"
#include "adsde/measures.hpp"

namespace adsde {

inline constexpr const char* kVersion = "1.0.0";

struct ErrorInfo {
  std::string type;
  std::string message;
  std::optional<std::size_t> step;
};

struct CheckLine {
  /// PASS, WARN or FAIL.
  std::string level;
  std::string check;
  std::string detail;
};

struct MonteCarloSummary {
  std::string model;
  std::string scheme;
  double h = 0.0;
  double horizon = 0.0;
  std::size_t steps = 0;
  std::size_t paths = 0;
  std::size_t completed = 0;
  std::size_t exploded = 0;
  std::size_t model_failures = 0;
  std::size_t solver_failures = 0;
  std::optional<double> mean;
  std::optional<double> std_error;
  /// Running mean of f over t = k h.
  std::vector<double> series;
};

/// Everything needed to regenerate the outputs of one run.
struct RunRecord {
  std::string name;
  std::string command;
  RunConfig config;
  std::string model;
  std::string scheme;
  std::string chi;
  std::vector<std::string> labels;
  std::vector<Snapshot> snapshots;
  std::map<std::string, double> final_values;
  std::map<std::string, double> generator_residuals;
  std::map<std::string, std::size_t> overflow_counts;
  std::optional<BindingSummary> binding;
  std::optional<std::string> tightness_verdict;
  std::optional<double> tightness_sup;
  std::vector<double> initial_state;
  std::vector<double> final_state;
  std::size_t steps_completed = 0;
  std::uint64_t noise_draws = 0;
  double wall_seconds = 0.0;
  std::optional<ErrorInfo> error;
  std::vector<CheckLine> checks;
  std::vector<MonteCarloSummary> monte_carlo;

  bool failed() const noexcept { return error.has_value(); }
};

nlohmann::json to_json(const RunRecord& record);

/// Header `n,H_n,nu_<label>...,gamma_tilde,binding_cum` and one row per
/// snapshot, at round-trip precision.
std::string snapshot_csv(const RunRecord& record);

/// `t,mean` rows of the running Monte Carlo mean, one block per h.
std::string monte_carlo_csv(const MonteCarloSummary& summary);

/// gnuplot recipe plotting every nu_<label> column of `csv_file` against n.
std::string gnuplot_recipe(const RunRecord& record, const std::string& csv_file);

/// Writes <dir>/<name>.json plus the CSV and .gp files that apply. Returns the
/// paths written.
std::vector<std::string> write_record(const RunRecord& record, const std::string& dir);

std::string format_number(double v);

}  // namespace adsde
