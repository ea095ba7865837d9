#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "adsde/models.hpp"
#include "adsde/schemes.hpp"
#include "adsde/stepping.hpp"

namespace adsde {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double term) noexcept {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

enum class TestFunctionKind { Constant, SquaredNorm, CoordinateSquared, ExpLyapunov, CompactBump, Custom };

struct TestFunction {
  std::string label;
  TestFunctionKind kind = TestFunctionKind::Custom;
  SmoothFunction fn;
};

TestFunction constant_one();
/// |x|^2, label "sqnorm".
TestFunction squared_norm();
/// x_i^2, label "q<i+1>sq" by default.
TestFunction coordinate_squared(std::size_t index, std::string label = {});
/// W = exp(lambda V^a). Evaluation throws MomentOverflow past the double range.
TestFunction exp_lyapunov(double lambda, double a, const LyapunovData& lyap,
                          std::string label = "W");
/// (1 - |x - c|^2 / r^2)^3 inside the ball, 0 outside; C^2 with compact support.
TestFunction compact_bump(const Vector& center, double radius, std::string label = "bump");

/// nu_n = (1/H_n) sum_{k<=n} eta_k delta_{X_{k-1}}, streamed.
///
/// When constructed with a model, every test function that carries
/// derivatives also streams nu_n(Af).
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<TestFunction> functions,
                            const SdeModel* generator_model = nullptr);

  void observe(double eta, const Vector& x_prev);

  std::size_t count() const noexcept { return count_; }
  double weight_sum() const noexcept { return weight_.value(); }
  const std::vector<TestFunction>& functions() const noexcept { return functions_; }

  /// Throws EmptyMeasure before the first observation and
  /// std::out_of_range for an unknown label.
  double value(std::string_view label) const;
  double value(std::size_t index) const;
  /// nu_n(Af); throws MissingDerivatives if f was not streamed.
  double generator_residual(std::string_view label) const;
  std::size_t overflow_count(std::string_view label) const;

  /// Combine with a measure over the same functions observed on another
  /// stretch of data.
  void merge(const EmpiricalMeasure& other);

  std::size_t index_of(std::string_view label) const;

 private:
  std::vector<TestFunction> functions_;
  const SdeModel* model_;
  std::vector<bool> streams_generator_;
  CompensatedSum weight_;
  std::vector<CompensatedSum> sums_;
  std::vector<CompensatedSum> generator_sums_;
  std::vector<std::size_t> overflows_;
  std::size_t count_ = 0;
};

struct Snapshot {
  std::size_t n = 0;
  double weight_sum = 0.0;
  std::vector<double> values;
  double gamma_tilde = 0.0;
  std::size_t binding_cum = 0;
};

/// Feeds a trajectory into an EmpiricalMeasure with weights eta_n and keeps
/// snapshots on a geometric cadence: after a snapshot at n the next one is
/// taken at n + max(1, n / divisor).
class MeasureRecorder : public StepObserver {
 public:
  MeasureRecorder(EmpiricalMeasure& measure, WeightSequence weights, std::size_t divisor = 2000);

  void on_step(const StepEvent& event) override;
  /// Records the current state if the last step was not snapshotted.
  void finish();

  const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }
  const EmpiricalMeasure& measure() const noexcept { return measure_; }
  const Vector& last_state() const noexcept { return last_state_; }
  std::size_t binding_count() const noexcept { return binding_cum_; }

 private:
  void take(std::size_t n);

  EmpiricalMeasure& measure_;
  WeightSequence weights_;
  std::size_t divisor_;
  std::size_t next_snapshot_ = 1;
  std::size_t last_n_ = 0;
  double last_gamma_tilde_ = 0.0;
  std::size_t binding_cum_ = 0;
  Vector last_state_;
  std::vector<Snapshot> snapshots_;
};

}  // namespace adsde
