#include "adsde/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace adsde {

void BindingTelemetry::on_step(const StepEvent& event) {
  ++total_;
  if (!event.binding) return;
  ++count_;
  last_ = std::max(last_, event.n);
  if (event.n <= early_window_) ++early_count_;
  if (event.n >= 1) {
    ++decades_[static_cast<int>(std::floor(std::log10(static_cast<double>(event.n))))];
  }
}

BindingSummary binding_report(const BindingTelemetry& telemetry) {
  BindingSummary s;
  s.total_steps = telemetry.total_steps();
  s.binding_count = telemetry.binding_count();
  s.fraction = s.total_steps == 0
                   ? 0.0
                   : static_cast<double>(s.binding_count) / static_cast<double>(s.total_steps);
  s.early_window = std::min(telemetry.early_window(), s.total_steps);
  s.early_binding_count = telemetry.early_binding_count();
  s.early_fraction = s.early_window == 0 ? 0.0
                                         : static_cast<double>(s.early_binding_count) /
                                               static_cast<double>(s.early_window);
  s.last_binding_index = telemetry.last_binding_index();
  s.n1_estimate = s.last_binding_index + 1;
  s.decade_counts = telemetry.decade_counts();
  return s;
}

Box Box::cube(std::size_t dim, double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("box half-width must be positive");
  const auto d = static_cast<Eigen::Index>(dim);
  return Box{Vector::Constant(d, -half_width), Vector::Constant(d, half_width)};
}

namespace {

constexpr std::array<unsigned, 16> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                              23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base;
  double factor = inv;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv;
  }
  return result;
}

Vector box_point(const Box& box, std::size_t index) {
  const Vector u = halton_point(index, static_cast<std::size_t>(box.lower.size()));
  return box.lower.array() + u.array() * (box.upper - box.lower).array();
}

struct DriftSample {
  double r;
  double v;
};

// beta(alpha) / alpha. At a minimizer x* of V the gradient vanishes, so any
// valid pair has beta >= alpha V(x*) >= alpha; the floor keeps a sample that
// misses x* from reporting beta / alpha < 1.
double drift_ratio(const std::vector<DriftSample>& samples, double alpha, double* beta_out) {
  double beta = alpha;
  for (const auto& s : samples) beta = std::max(beta, s.r + alpha * s.v);
  if (beta_out != nullptr) *beta_out = beta;
  return beta / alpha;
}

// Scan [lo, hi] log-uniformly; ties go to the larger alpha.
double scan_alpha(const std::vector<DriftSample>& samples, double lo, double hi, int points) {
  double best_alpha = lo;
  double best = std::numeric_limits<double>::infinity();
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int k = 0; k < points; ++k) {
    const double alpha = std::exp(llo + (lhi - llo) * k / (points - 1));
    const double ratio = drift_ratio(samples, alpha, nullptr);
    // alpha increases along the scan, so "not worse" already breaks ties upward.
    if (ratio <= best + 1e-12 * std::abs(best)) {
      best = std::min(best, ratio);
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

}  // namespace

Vector halton_point(std::size_t index, std::size_t dim) {
  if (dim > kPrimes.size()) throw std::invalid_argument("Halton sampling supports up to 16 dimensions");
  Vector u(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) u[static_cast<Eigen::Index>(j)] = radical_inverse(index, kPrimes[j]);
  return u;
}

DriftFit check_drift(const SdeModel& model, const Box& region, std::size_t n_samples,
                     std::size_t max_reported) {
  if (n_samples == 0) throw std::invalid_argument("check_drift needs at least one sample");
  if (region.lower.size() != static_cast<Eigen::Index>(model.state_dim) ||
      region.upper.size() != region.lower.size()) {
    throw std::invalid_argument("sampling box dimension does not match the model");
  }
  const LyapunovData& lyap = model.lyapunov;
  DriftFit fit;
  fit.region = region;
  fit.samples = n_samples;

  std::vector<Vector> points;
  std::vector<DriftSample> samples;
  points.reserve(n_samples);
  samples.reserve(n_samples);
  const double a = lyap.exponent_a;
  for (std::size_t i = 1; i <= n_samples; ++i) {
    Vector x = box_point(region, i);
    double v = 0.0, r = 0.0;
    Vector g;
    Matrix sigma;
    try {
      v = lyap.value(x);
      g = lyap.gradient(x);
      sigma = model.diffusion(x);
      r = g.dot(model.drift(x));
    } catch (const ModelEvaluationError&) {
      // Outside the model's domain (V < 1, singular mass matrix): not a drift sample.
      ++fit.invalid_samples;
      if (fit.invalid_points.size() < max_reported) fit.invalid_points.push_back(x);
      continue;
    }
    samples.push_back({r, v});
    fit.gradient_constant = std::max(fit.gradient_constant, g.squaredNorm() / v);
    fit.trace_constant =
        std::max(fit.trace_constant, (sigma * sigma.transpose()).trace() / std::pow(v, 1.0 - a));
    points.push_back(std::move(x));
  }

  if (samples.empty()) return fit;

  // Coarse grid, then two zooms into the neighbouring grid cells.
  constexpr int kGrid = 50;
  const double ratio = std::pow(1e6, 1.0 / (kGrid - 1));
  double alpha = scan_alpha(samples, 1e-3, 1e3, kGrid);
  for (int level = 0; level < 2; ++level) {
    const double width = level == 0 ? ratio : std::pow(ratio, 2.0 / 199.0);
    alpha = scan_alpha(samples, alpha / width, alpha * width, 200);
  }
  fit.alpha = alpha;
  drift_ratio(samples, alpha, &fit.beta);

  double slack = 0.0;
  for (const auto& s : samples) slack += fit.beta - alpha * s.v - s.r;
  fit.mean_slack = slack / static_cast<double>(samples.size());

  auto report = [&](std::size_t i) {
    ++fit.counterexample_count;
    if (fit.counterexamples.size() < max_reported) fit.counterexamples.push_back(points[i]);
  };
  if (lyap.drift_constants) {
    fit.declared = true;
    const double al = lyap.drift_constants->alpha;
    const double be = lyap.drift_constants->beta;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double bound = -al * samples[i].v + be;
      const double tol = 1e-9 * (1.0 + std::abs(samples[i].r) + std::abs(bound));
      if (samples[i].r > bound + tol) report(i);
    }
  } else {
    std::vector<double> vs;
    vs.reserve(samples.size());
    for (const auto& s : samples) vs.push_back(s.v);
    auto mid = vs.begin() + static_cast<std::ptrdiff_t>(vs.size() / 2);
    std::nth_element(vs.begin(), mid, vs.end());
    const double median = *mid;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].r > 0.0 && samples[i].v >= median) report(i);
    }
  }
  return fit;
}

TightnessMonitor::TightnessMonitor(const EmpiricalMeasure& measure, std::string label,
                                   std::size_t divisor, double relative_tolerance)
    : measure_(measure),
      index_(measure.index_of(label)),
      divisor_(divisor == 0 ? 1 : divisor),
      tolerance_(relative_tolerance) {}

void TightnessMonitor::on_step(const StepEvent& event) {
  last_n_ = event.n;
  if (event.n < next_ || measure_.count() == 0) return;
  sup_ = std::max(sup_, measure_.value(index_));
  history_.emplace_back(event.n, sup_);
  next_ = event.n + std::max<std::size_t>(1, event.n / divisor_);
}

std::string TightnessMonitor::verdict() const {
  if (history_.size() < 2) return "stable";
  const std::size_t half = last_n_ / 2;
  double mid = history_.front().second;
  for (const auto& [n, s] : history_) {
    if (n > half) break;
    mid = s;
  }
  if (!std::isfinite(sup_)) return "growing";
  return sup_ <= mid + tolerance_ * std::abs(mid) ? "stable" : "growing";
}

double lambda0_for_monotone(const MonotoneConstants& c) {
  if (!(c.alpha > 0.0 && c.delta > 0.0 && c.a > 0.0 && c.gradient_constant > 0.0 &&
        c.trace_constant > 0.0 && c.hessian_sup > 0.0 && c.kappa > 0.0 && c.tau > 0.0)) {
    throw std::invalid_argument("lambda0 constants must all be positive");
  }
  if (c.delta >= c.alpha) throw std::invalid_argument("lambda0 requires delta < alpha");
  const double noise_term = 2.0 * c.tau / (c.a * c.trace_constant * c.hessian_sup);
  const double drift_term =
      2.0 * (c.alpha - c.delta) / (c.kappa * c.a * c.gradient_constant * c.trace_constant);
  return std::min(noise_term, drift_term);
}

double lambda0_for_hamiltonian(const HamiltonianConstants& c) {
  if (!(c.alpha > 0.0 && c.delta > 0.0 && c.a > 0.0 && c.gradient_constant > 0.0 &&
        c.trace_constant > 0.0 && c.pp_hessian_sup > 0.0 && c.kappa > 0.0 && c.tau > 0.0)) {
    throw std::invalid_argument("lambda0 constants must all be positive");
  }
  if (c.delta >= c.alpha / 4.0) throw std::invalid_argument("lambda0 requires delta < alpha / 4");
  const double noise_term = c.tau / (c.a * c.trace_constant * c.pp_hessian_sup);
  const double drift_term =
      2.0 * (c.alpha - 4.0 * c.delta) / (c.kappa * c.a * c.gradient_constant * c.trace_constant);
  return std::min(noise_term, drift_term);
}

double gradient_consistency(const ScalarField& f, const VectorField& grad, const Box& region,
                            std::size_t points, double step) {
  double worst = 0.0;
  for (std::size_t i = 1; i <= points; ++i) {
    const Vector x = box_point(region, i);
    const Vector g = grad(x);
    Vector fd(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      Vector xp = x;
      Vector xm = x;
      xp[j] += step;
      xm[j] -= step;
      fd[j] = (f(xp) - f(xm)) / (2.0 * step);
    }
    worst = std::max(worst, (g - fd).lpNorm<Eigen::Infinity>() /
                                std::max(1.0, g.lpNorm<Eigen::Infinity>()));
  }
  return worst;
}

}  // namespace adsde
