#pragma once

#include <string>
#include <variant>
#include <vector>

#include "adsde/models.hpp"

namespace adsde {

/// gamma_n = gamma0 * n^{-exponent} for n >= 1, gamma_0 = gamma0.
class StepSequence {
 public:
  /// Requires gamma0 > 0 and exponent in (0, 1]; a constant sequence does not
  /// vanish and is rejected.
  StepSequence(double gamma0, double exponent);

  double gamma0() const noexcept { return gamma0_; }
  double exponent() const noexcept { return exponent_; }
  double at(std::size_t n) const;

 private:
  double gamma0_;
  double exponent_;
};

inline double gamma_at(const StepSequence& seq, std::size_t n) { return seq.at(n); }

/// eta_n = n^{-exponent}, n >= 1, exponent <= 1.
class WeightSequence {
 public:
  explicit WeightSequence(double exponent);

  double exponent() const noexcept { return exponent_; }
  double at(std::size_t n) const;

 private:
  double exponent_;
};

/// chi = +inf: the step is always the deterministic one.
struct UnboundedChi {};

/// chi = value everywhere (test fixture and degenerate runs).
struct ConstantChi {
  double value = 1.0;
};

/// chi(x) = 1 / (|b(x)|^2 v 1).
struct NaturalChi {};

/// chi(x) = 2 V(x) / (|b(x)|^2 v 1).
struct LorenzChi {};

/// chi(x) = max(zeta V^{-p}, (2 delta / ||D^2V||_inf) V / (|b|^2 v 1)).
/// When `hessian_sup` is unset the model's global bound is used.
struct MonotoneChi {
  double delta = 0.5;
  double zeta = 1e-3;
  double p = 1.0;
  std::optional<double> hessian_sup;
};

/// chi_n(x) = max(zeta V^{-p}, 2 delta V / (psi_n(x) (|b|^2 v 1))).
struct HamiltonianChi {
  double delta = 0.1;
  double zeta = 1e-3;
  double p = 1.0;
  std::size_t samples = 8;
};

using ChiPolicy =
    std::variant<UnboundedChi, ConstantChi, NaturalChi, LorenzChi, MonotoneChi, HamiltonianChi>;

std::string chi_name(const ChiPolicy& policy);

/// Everything chi may read when sizing step n: X_{n-1} and b(X_{n-1}). The
/// next noise increment is deliberately absent.
struct ChiContext {
  const SdeModel& model;
  const Vector& x_prev;
  const Vector& drift_prev;
  double gamma_n;
};

double chi_value(const ChiPolicy& policy, const ChiContext& ctx);

struct StepSize {
  double value = 0.0;
  /// chi(X_{n-1}) < gamma_n.
  bool bound = false;
};

/// min(gamma_n, chi) with the binding flag.
StepSize gamma_tilde(double gamma_n, double chi);
StepSize gamma_tilde(const StepSequence& seq, const ChiPolicy& policy, const SdeModel& model,
                     std::size_t n, const Vector& x_prev, const Vector& drift_prev);
StepSize gamma_tilde(const StepSequence& seq, const ChiPolicy& policy, const SdeModel& model,
                     std::size_t n, const Vector& x_prev);

/// sup over the segment [q, q + gamma_n b1(x)] of ||D^2 V(qbar, p)||, floored at
/// 1. Uses the global Hessian bound when the Lyapunov data has one; otherwise
/// takes the max of `samples` equispaced evaluations, which can undershoot.
double psi_n(const LyapunovData& lyap, std::size_t dof, const Vector& x, const Vector& b1,
             double gamma_n, std::size_t samples);
double psi_n(const HamiltonianModel& model, const Vector& x, double gamma_n,
             std::size_t samples = 8);

struct ChiBounds {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  bool holds() const noexcept { return lower <= value && value <= upper; }
};

/// Both sides of zeta V^{-p} <= chi <= (2 delta/||D^2V||) V/(|b|^2 v 1).
ChiBounds monotone_chi_bounds(const MonotoneChi& policy, const SdeModel& model, const Vector& x);

struct Admissibility {
  bool admissible = false;
  std::string reason;
};

/// Power-law step/weight admissibility: gamma_n = n^{-p}, eta_n = n^{-q}, with
/// s in (1, 2]. Admissible iff p in (0, 2(s-1)/s) and q <= 1, or
/// (p, q) = (2(s-1)/s, 1).
Admissibility validate_exponents(double p_step, double q_weight, double s);

struct SummabilityReport {
  std::size_t terms = 0;
  double partial_sum = 0.0;
  /// Last term of the series; a proxy for how much the tail still moves.
  double last_term = 0.0;
  /// Largest term over the final tenth of the range.
  double tail_term_max = 0.0;
  /// First n after which the sufficient bound on gamma_n held for every
  /// remaining n <= terms (0 if it fails at the last term).
  std::size_t sufficient_from = 0;
  bool sufficient_eventually = false;
  std::string verdict;
};

/// Checks sum_n gamma_n exp(-lambda zeta^{a/p} gamma_n^{-a/p}) < inf on the
/// first `terms` indices, with the log-type sufficient condition evaluated
/// termwise. A finite sum never certifies convergence by itself; the verdict
/// is positive only when the sufficient condition holds on the whole tail.
SummabilityReport validate_gamma_summability(const StepSequence& seq, double zeta, double p_chi,
                                             double a, double lambda, std::size_t terms);

}  // namespace adsde
