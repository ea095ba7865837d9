#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adsde/measures.hpp"
#include "adsde/models.hpp"
#include "adsde/schemes.hpp"

namespace adsde {

/// Counts steps where chi(X_{n-1}) < gamma_n.
class BindingTelemetry : public StepObserver {
 public:
  explicit BindingTelemetry(std::size_t early_window = 20000) : early_window_(early_window) {}

  void on_step(const StepEvent& event) override;

  std::size_t total_steps() const noexcept { return total_; }
  std::size_t binding_count() const noexcept { return count_; }
  /// 0 when no step was ever bound.
  std::size_t last_binding_index() const noexcept { return last_; }
  std::size_t early_window() const noexcept { return early_window_; }
  std::size_t early_binding_count() const noexcept { return early_count_; }
  /// Decade k covers indices [10^k, 10^{k+1}).
  const std::map<int, std::size_t>& decade_counts() const noexcept { return decades_; }

 private:
  std::size_t early_window_;
  std::size_t total_ = 0;
  std::size_t count_ = 0;
  std::size_t last_ = 0;
  std::size_t early_count_ = 0;
  std::map<int, std::size_t> decades_;
};

struct BindingSummary {
  std::size_t total_steps = 0;
  std::size_t binding_count = 0;
  double fraction = 0.0;
  std::size_t early_window = 0;
  std::size_t early_binding_count = 0;
  double early_fraction = 0.0;
  std::size_t last_binding_index = 0;
  /// Retrospective estimate of n1 (last binding index + 1) for a finished run.
  std::size_t n1_estimate = 1;
  std::map<int, std::size_t> decade_counts;
};

BindingSummary binding_report(const BindingTelemetry& telemetry);

struct Box {
  Vector lower;
  Vector upper;

  static Box cube(std::size_t dim, double half_width);
};

struct DriftFit {
  Box region;
  std::size_t samples = 0;
  /// (alpha, beta) minimizing beta / alpha with beta(alpha) = max(alpha, max(r + alpha V));
  /// ties go to the larger alpha.
  double alpha = 0.0;
  double beta = 0.0;
  /// Mean slack beta - alpha V - r over the sample (0 would be tight everywhere).
  double mean_slack = 0.0;
  /// max |grad V|^2 / V over the sample.
  double gradient_constant = 0.0;
  /// max Tr(sigma sigma^*) / V^{1-a} over the sample.
  double trace_constant = 0.0;
  bool declared = false;
  /// Sampled points violating the declared constants, or, without declared
  /// constants, points in the outer half of the sample (by V) with r > 0.
  std::vector<Vector> counterexamples;
  std::size_t counterexample_count = 0;
  /// Points where V or the coefficients could not be evaluated; excluded from the fit.
  std::size_t invalid_samples = 0;
  std::vector<Vector> invalid_points;
};

/// Samples r(x) = <grad V(x), b(x)> on a Halton sequence over `region` and fits
/// the drift constants. The fit searches a log-spaced alpha grid on
/// [1e-3, 1e3] and refines around the best grid point.
DriftFit check_drift(const SdeModel& model, const Box& region, std::size_t n_samples,
                     std::size_t max_reported = 16);

/// Tracks sup_n nu_n(W) at the recorder's snapshot cadence.
class TightnessMonitor : public StepObserver {
 public:
  /// `relative_tolerance`: growth of the sup over the second half of the run
  /// below this fraction still counts as stable.
  TightnessMonitor(const EmpiricalMeasure& measure, std::string label, std::size_t divisor = 2000,
                   double relative_tolerance = 0.02);

  void on_step(const StepEvent& event) override;

  double running_sup() const noexcept { return sup_; }
  /// "stable" or "growing".
  std::string verdict() const;
  std::size_t steps() const noexcept { return last_n_; }
  const std::vector<std::pair<std::size_t, double>>& history() const noexcept { return history_; }

 private:
  const EmpiricalMeasure& measure_;
  std::size_t index_;
  std::size_t divisor_;
  double tolerance_;
  std::size_t next_ = 1;
  std::size_t last_n_ = 0;
  double sup_ = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, double>> history_;
};

struct MonotoneConstants {
  double alpha = 0.0;
  double delta = 0.0;
  double a = 1.0;
  double gradient_constant = 0.0;  // C_V
  double trace_constant = 0.0;     // C_sigma
  double hessian_sup = 0.0;        // ||D^2 V||_inf
  double kappa = 1.0;
  double tau = 0.0;
};

/// lambda0 = 2 tau / (a C_sigma ||D^2V||) ^ 2 (alpha - delta) / (kappa a C_V C_sigma).
double lambda0_for_monotone(const MonotoneConstants& c);

struct HamiltonianConstants {
  double alpha = 0.0;
  double delta = 0.0;
  double a = 1.0;
  double gradient_constant = 0.0;
  double trace_constant = 0.0;
  double pp_hessian_sup = 0.0;  // sup ||d^2_pp V||
  double kappa = 1.0;
  double tau = 0.0;
};

/// lambda0 = tau / (a C_sigma rho) ^ 2 (alpha - 4 delta) / (kappa a C_V C_sigma).
double lambda0_for_hamiltonian(const HamiltonianConstants& c);

/// Max relative error between an analytic gradient and central differences
/// at `points` Halton points of `region`.
double gradient_consistency(const ScalarField& f, const VectorField& grad, const Box& region,
                            std::size_t points, double step = 1e-5);

/// Point `index` (1-based) of the Halton sequence in `dim` dimensions.
Vector halton_point(std::size_t index, std::size_t dim);

}  // namespace adsde
