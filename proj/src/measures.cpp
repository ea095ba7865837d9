#include "adsde/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adsde {

TestFunction constant_one() {
  TestFunction t;
  t.label = "one";
  t.kind = TestFunctionKind::Constant;
  t.fn.value = [](const Vector&) { return 1.0; };
  t.fn.gradient = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
  t.fn.hessian = [](const Vector& x) -> Matrix { return Matrix::Zero(x.size(), x.size()); };
  return t;
}

TestFunction squared_norm() {
  TestFunction t;
  t.label = "sqnorm";
  t.kind = TestFunctionKind::SquaredNorm;
  t.fn.value = [](const Vector& x) { return x.squaredNorm(); };
  t.fn.gradient = [](const Vector& x) -> Vector { return 2.0 * x; };
  t.fn.hessian = [](const Vector& x) -> Matrix {
    return 2.0 * Matrix::Identity(x.size(), x.size());
  };
  return t;
}

TestFunction coordinate_squared(std::size_t index, std::string label) {
  TestFunction t;
  t.label = label.empty() ? "q" + std::to_string(index + 1) + "sq" : std::move(label);
  t.kind = TestFunctionKind::CoordinateSquared;
  const auto i = static_cast<Eigen::Index>(index);
  t.fn.value = [i](const Vector& x) { return x[i] * x[i]; };
  t.fn.gradient = [i](const Vector& x) -> Vector {
    Vector g = Vector::Zero(x.size());
    g[i] = 2.0 * x[i];
    return g;
  };
  t.fn.hessian = [i](const Vector& x) -> Matrix {
    Matrix h = Matrix::Zero(x.size(), x.size());
    h(i, i) = 2.0;
    return h;
  };
  return t;
}

TestFunction exp_lyapunov(double lambda, double a, const LyapunovData& lyap, std::string label) {
  if (!(lambda > 0.0)) throw std::invalid_argument("exp-Lyapunov lambda must be positive");
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("exp-Lyapunov exponent must lie in (0, 1]");
  TestFunction t;
  t.label = std::move(label);
  t.kind = TestFunctionKind::ExpLyapunov;
  const double log_max = std::log(std::numeric_limits<double>::max());
  t.fn.value = [lyap, lambda, a, log_max](const Vector& x) {
    const double exponent = lambda * std::pow(lyap.value(x), a);
    if (!(exponent < log_max)) throw MomentOverflow("exp(lambda V^a) overflows");
    return std::exp(exponent);
  };
  return t;
}

TestFunction compact_bump(const Vector& center, double radius, std::string label) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  TestFunction t;
  t.label = std::move(label);
  t.kind = TestFunctionKind::CompactBump;
  const double r2 = radius * radius;
  t.fn.value = [center, r2](const Vector& x) {
    const double s = (x - center).squaredNorm() / r2;
    if (s >= 1.0) return 0.0;
    const double w = 1.0 - s;
    return w * w * w;
  };
  t.fn.gradient = [center, r2](const Vector& x) -> Vector {
    const Vector dx = x - center;
    const double s = dx.squaredNorm() / r2;
    if (s >= 1.0) return Vector::Zero(x.size());
    const double w = 1.0 - s;
    return (-6.0 * w * w / r2) * dx;
  };
  t.fn.hessian = [center, r2](const Vector& x) -> Matrix {
    const Vector dx = x - center;
    const double s = dx.squaredNorm() / r2;
    if (s >= 1.0) return Matrix::Zero(x.size(), x.size());
    const double w = 1.0 - s;
    return (24.0 * w / (r2 * r2)) * (dx * dx.transpose()) -
           (6.0 * w * w / r2) * Matrix::Identity(x.size(), x.size());
  };
  return t;
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<TestFunction> functions,
                                   const SdeModel* generator_model)
    : functions_(std::move(functions)),
      model_(generator_model),
      sums_(functions_.size()),
      generator_sums_(functions_.size()),
      overflows_(functions_.size(), 0) {
  for (const auto& f : functions_) {
    streams_generator_.push_back(model_ != nullptr && f.fn.has_derivatives());
  }
}

void EmpiricalMeasure::observe(double eta, const Vector& x_prev) {
  if (!(eta > 0.0)) throw std::invalid_argument("weights must be positive");
  weight_.add(eta);
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    try {
      sums_[i].add(eta * functions_[i].fn.value(x_prev));
    } catch (const MomentOverflow&) {
      ++overflows_[i];
    }
    if (streams_generator_[i]) {
      generator_sums_[i].add(eta * generator_apply(*model_, functions_[i].fn, x_prev));
    }
  }
  ++count_;
}

std::size_t EmpiricalMeasure::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i].label == label) return i;
  }
  throw std::out_of_range("no test function labelled '" + std::string(label) + "'");
}

double EmpiricalMeasure::value(std::size_t index) const {
  if (count_ == 0) throw EmptyMeasure("empirical measure has no observations");
  return sums_.at(index).value() / weight_.value();
}

double EmpiricalMeasure::value(std::string_view label) const { return value(index_of(label)); }

double EmpiricalMeasure::generator_residual(std::string_view label) const {
  const std::size_t i = index_of(label);
  if (!streams_generator_[i]) {
    throw MissingDerivatives("generator residual not streamed for '" + std::string(label) + "'");
  }
  if (count_ == 0) throw EmptyMeasure("empirical measure has no observations");
  return generator_sums_[i].value() / weight_.value();
}

std::size_t EmpiricalMeasure::overflow_count(std::string_view label) const {
  return overflows_[index_of(label)];
}

void EmpiricalMeasure::merge(const EmpiricalMeasure& other) {
  if (other.functions_.size() != functions_.size()) {
    throw std::invalid_argument("cannot merge measures over different test functions");
  }
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i].label != other.functions_[i].label) {
      throw std::invalid_argument("cannot merge measures over different test functions");
    }
  }
  weight_.merge(other.weight_);
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    sums_[i].merge(other.sums_[i]);
    generator_sums_[i].merge(other.generator_sums_[i]);
    overflows_[i] += other.overflows_[i];
  }
  count_ += other.count_;
}

MeasureRecorder::MeasureRecorder(EmpiricalMeasure& measure, WeightSequence weights,
                                 std::size_t divisor)
    : measure_(measure), weights_(weights), divisor_(divisor == 0 ? 1 : divisor) {}

void MeasureRecorder::on_step(const StepEvent& event) {
  measure_.observe(weights_.at(event.n), event.x_prev);
  if (event.binding) ++binding_cum_;
  last_gamma_tilde_ = event.gamma_tilde;
  last_state_ = event.x;
  last_n_ = event.n;
  if (event.n >= next_snapshot_) {
    take(event.n);
    next_snapshot_ = event.n + std::max<std::size_t>(1, event.n / divisor_);
  }
}

void MeasureRecorder::finish() {
  if (last_n_ == 0) return;
  if (!snapshots_.empty() && snapshots_.back().n == last_n_) return;
  take(last_n_);
}

void MeasureRecorder::take(std::size_t n) {
  Snapshot snap;
  snap.n = n;
  snap.weight_sum = measure_.weight_sum();
  snap.values.reserve(measure_.functions().size());
  for (std::size_t i = 0; i < measure_.functions().size(); ++i) {
    snap.values.push_back(measure_.value(i));
  }
  snap.gamma_tilde = last_gamma_tilde_;
  snap.binding_cum = binding_cum_;
  snapshots_.push_back(std::move(snap));
}

}  // namespace adsde
