#include "adsde/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adsde {

namespace {

constexpr double kBoundaryTol = 1e-12;

// Exponent epsilon used by the log-type sufficient condition when p <= a.
constexpr double kLogEpsilon = 0.1;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double drift_floor(const Vector& b) { return std::max(b.squaredNorm(), 1.0); }

}  // namespace

StepSequence::StepSequence(double gamma0, double exponent) : gamma0_(gamma0), exponent_(exponent) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("step.gamma0 must be positive");
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw std::invalid_argument("step.exponent must lie in (0, 1]");
  }
}

double StepSequence::at(std::size_t n) const {
  if (n == 0) return gamma0_;
  return gamma0_ * std::pow(static_cast<double>(n), -exponent_);
}

WeightSequence::WeightSequence(double exponent) : exponent_(exponent) {
  if (!(exponent <= 1.0)) throw std::invalid_argument("weights.exponent must be <= 1");
}

double WeightSequence::at(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("weights are indexed from 1");
  return std::pow(static_cast<double>(n), -exponent_);
}

std::string chi_name(const ChiPolicy& policy) {
  return std::visit(Overloaded{
                        [](const UnboundedChi&) { return std::string("unbounded"); },
                        [](const ConstantChi&) { return std::string("constant"); },
                        [](const NaturalChi&) { return std::string("natural"); },
                        [](const LorenzChi&) { return std::string("lorenz"); },
                        [](const MonotoneChi&) { return std::string("monotone"); },
                        [](const HamiltonianChi&) { return std::string("hamiltonian"); },
                    },
                    policy);
}

double chi_value(const ChiPolicy& policy, const ChiContext& ctx) {
  return std::visit(
      Overloaded{
          [](const UnboundedChi&) { return std::numeric_limits<double>::infinity(); },
          [](const ConstantChi& c) { return c.value; },
          [&](const NaturalChi&) { return 1.0 / drift_floor(ctx.drift_prev); },
          [&](const LorenzChi&) {
            return 2.0 * ctx.model.lyapunov.value(ctx.x_prev) / drift_floor(ctx.drift_prev);
          },
          [&](const MonotoneChi& c) {
            const double v = ctx.model.lyapunov.value(ctx.x_prev);
            const double hess = c.hessian_sup ? *c.hessian_sup
                                              : ctx.model.lyapunov.hessian_norm_sup.value_or(
                                                    std::numeric_limits<double>::quiet_NaN());
            if (!(hess > 0.0)) {
              throw MissingDerivatives("monotone chi needs a global Hessian bound");
            }
            const double upper = (2.0 * c.delta / hess) * v / drift_floor(ctx.drift_prev);
            return std::max(c.zeta * std::pow(v, -c.p), upper);
          },
          [&](const HamiltonianChi& c) {
            if (!ctx.model.hamiltonian) {
              throw std::invalid_argument("hamiltonian chi requires a Hamiltonian model");
            }
            const auto dof = ctx.model.hamiltonian->dof;
            const double v = ctx.model.lyapunov.value(ctx.x_prev);
            const Vector b1 = ctx.drift_prev.head(static_cast<Eigen::Index>(dof));
            const double psi =
                psi_n(ctx.model.lyapunov, dof, ctx.x_prev, b1, ctx.gamma_n, c.samples);
            const double upper = 2.0 * c.delta * v / (psi * drift_floor(ctx.drift_prev));
            return std::max(c.zeta * std::pow(v, -c.p), upper);
          },
      },
      policy);
}

StepSize gamma_tilde(double gamma_n, double chi) {
  if (chi < gamma_n) return {chi, true};
  return {gamma_n, false};
}

StepSize gamma_tilde(const StepSequence& seq, const ChiPolicy& policy, const SdeModel& model,
                     std::size_t n, const Vector& x_prev, const Vector& drift_prev) {
  if (n == 0) throw std::invalid_argument("gamma_tilde is defined for n >= 1");
  const double gamma_n = seq.at(n);
  return gamma_tilde(gamma_n, chi_value(policy, ChiContext{model, x_prev, drift_prev, gamma_n}));
}

StepSize gamma_tilde(const StepSequence& seq, const ChiPolicy& policy, const SdeModel& model,
                     std::size_t n, const Vector& x_prev) {
  return gamma_tilde(seq, policy, model, n, x_prev, model.drift(x_prev));
}

double psi_n(const LyapunovData& lyap, std::size_t dof, const Vector& x, const Vector& b1,
             double gamma_n, std::size_t samples) {
  if (lyap.hessian_norm_sup) return std::max(*lyap.hessian_norm_sup, 1.0);
  if (!lyap.hessian) throw MissingDerivatives("psi_n needs a Hessian evaluator or bound");
  if (samples < 2) throw std::invalid_argument("psi_n needs at least two samples");
  const auto d = static_cast<Eigen::Index>(dof);
  double sup = 1.0;
  Vector point = x;
  if (b1.isZero(0.0)) return std::max(lyap.hessian_norm(x), 1.0);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(samples - 1);
    point.head(d) = x.head(d) + t * gamma_n * b1;
    sup = std::max(sup, lyap.hessian_norm(point));
  }
  return sup;
}

double psi_n(const HamiltonianModel& model, const Vector& x, double gamma_n, std::size_t samples) {
  return psi_n(model.lyapunov, model.dof, x, model.b1(x), gamma_n, samples);
}

ChiBounds monotone_chi_bounds(const MonotoneChi& policy, const SdeModel& model, const Vector& x) {
  const Vector b = model.drift(x);
  const double v = model.lyapunov.value(x);
  const double hess = policy.hessian_sup ? *policy.hessian_sup
                                         : model.lyapunov.hessian_norm_sup.value_or(0.0);
  ChiBounds bounds;
  bounds.lower = policy.zeta * std::pow(v, -policy.p);
  bounds.upper = (2.0 * policy.delta / hess) * v / drift_floor(b);
  bounds.value = chi_value(policy, ChiContext{model, x, b, 0.0});
  return bounds;
}

Admissibility validate_exponents(double p_step, double q_weight, double s) {
  if (!(s > 1.0 && s <= 2.0)) return {false, "s must lie in (1, 2]"};
  if (!(p_step > 0.0 && p_step <= 1.0)) return {false, "step exponent p must lie in (0, 1]"};
  const double edge = 2.0 * (s - 1.0) / s;
  if (std::abs(p_step - edge) <= kBoundaryTol) {
    if (std::abs(q_weight - 1.0) <= kBoundaryTol) return {true, "boundary point (2(s-1)/s, 1)"};
    return {false, "p equals 2(s-1)/s but q != 1"};
  }
  if (p_step > edge) return {false, "p exceeds 2(s-1)/s"};
  if (q_weight > 1.0) return {false, "q exceeds 1"};
  return {true, "p < 2(s-1)/s and q <= 1"};
}

SummabilityReport validate_gamma_summability(const StepSequence& seq, double zeta, double p_chi,
                                             double a, double lambda, std::size_t terms) {
  if (!(zeta > 0.0 && p_chi > 0.0 && a > 0.0 && lambda > 0.0)) {
    throw std::invalid_argument("summability constants must be positive");
  }
  if (terms < 2) throw std::invalid_argument("need at least two terms");
  const double ratio = a / p_chi;
  const double scale = lambda * std::pow(zeta, ratio);
  const double bound_coeff = std::pow(lambda, p_chi / a) * zeta;
  const double log_power = p_chi > a ? p_chi / a : 1.0 + kLogEpsilon;

  SummabilityReport report;
  report.terms = terms;
  double sum = 0.0;
  double comp = 0.0;
  std::size_t last_failure = 0;
  const std::size_t tail_start = terms - terms / 10;
  for (std::size_t n = 1; n <= terms; ++n) {
    const double g = seq.at(n);
    const double term = g * std::exp(-scale * std::pow(g, -ratio));
    // Neumaier summation; the tail terms are tiny next to the head.
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    if (n >= tail_start) report.tail_term_max = std::max(report.tail_term_max, term);
    report.last_term = term;
    if (n >= 2) {
      const double bound = bound_coeff * std::pow(std::log(static_cast<double>(n)), -log_power);
      if (g > bound) last_failure = n;
    }
  }
  report.partial_sum = sum + comp;
  report.sufficient_from = last_failure < terms ? std::max<std::size_t>(last_failure + 1, 2) : 0;

  // gamma_n ln^k(n) = gamma0 n^{-p} ln^k(n) decreases for n > exp(k/p), so a
  // bound that holds at the end of that monotone region keeps holding.
  const double monotone_from = std::exp(log_power / seq.exponent());
  report.sufficient_eventually =
      report.sufficient_from != 0 && static_cast<double>(terms) > monotone_from;
  report.verdict = report.sufficient_eventually ? "sufficient condition holds eventually"
                                                : "inconclusive";
  return report;
}

}  // namespace adsde
