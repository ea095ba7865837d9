#include "adsde/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

namespace adsde {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BindingTelemetry run_binding(const ChiPolicy& chi, std::size_t steps) {
  const SdeModel lorenz = lorenz_model();
  NoiseStream noise({NoiseKind::StandardGaussian, 3, 4});
  BindingTelemetry telemetry(100);
  std::vector<StepObserver*> obs{&telemetry};
  run_trajectory(lorenz, AdaptiveEuler{StepSequence(0.5, 1.0 / 3.0), chi}, Vector::Ones(3), steps,
                 noise, obs);
  return telemetry;
}

TEST(BindingReportTest, UnboundedNeverBinds) {
  const SdeModel ou = ou_oracle_model(1.0, 1.0, 1);
  NoiseStream noise({NoiseKind::StandardGaussian, 1, 4});
  BindingTelemetry telemetry;
  std::vector<StepObserver*> obs{&telemetry};
  run_trajectory(ou, AdaptiveEuler{StepSequence(0.5, 1.0 / 3.0), UnboundedChi{}}, Vector::Ones(1),
                 500, noise, obs);
  const BindingSummary s = binding_report(telemetry);
  EXPECT_EQ(s.fraction, 0.0);
  EXPECT_EQ(s.last_binding_index, 0u);
  EXPECT_EQ(s.n1_estimate, 1u);
  EXPECT_TRUE(s.decade_counts.empty());
}

TEST(BindingReportTest, TinyCapAlwaysBinds) {
  const BindingSummary s = binding_report(run_binding(ConstantChi{1e-4}, 2000));
  EXPECT_EQ(s.fraction, 1.0);
  EXPECT_EQ(s.early_fraction, 1.0);
  EXPECT_EQ(s.last_binding_index, 2000u);
  EXPECT_EQ(s.n1_estimate, 2001u);
  EXPECT_EQ(s.decade_counts.at(0), 9u);
  EXPECT_EQ(s.decade_counts.at(1), 90u);
  EXPECT_EQ(s.decade_counts.at(2), 900u);
  EXPECT_EQ(s.decade_counts.at(3), 1001u);
}

TEST(BindingReportTest, LastIndexMonotoneUnderExtension) {
  const BindingSummary shorter = binding_report(run_binding(LorenzChi{}, 5000));
  const BindingSummary longer = binding_report(run_binding(LorenzChi{}, 20000));
  EXPECT_GE(longer.last_binding_index, shorter.last_binding_index);
  EXPECT_LE(longer.binding_count, longer.total_steps);
  EXPECT_GE(longer.fraction, 0.0);
  EXPECT_LE(longer.fraction, 1.0);
}

TEST(HaltonTest, LowDiscrepancyBasics) {
  EXPECT_DOUBLE_EQ(halton_point(1, 2)[0], 0.5);
  EXPECT_DOUBLE_EQ(halton_point(1, 2)[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(halton_point(6, 1)[0], 0.375);
  EXPECT_THROW(halton_point(1, 17), std::invalid_argument);
}

TEST(CheckDriftTest, OuRecoversConstants) {
  const SdeModel ou = ou_oracle_model(1.0, 1.0, 2);
  const DriftFit fit = check_drift(ou, Box::cube(2, 5.0), 2000);
  EXPECT_NEAR(fit.alpha, 2.0, 0.02);
  EXPECT_NEAR(fit.beta, 2.0, 0.02);
  EXPECT_TRUE(fit.declared);
  EXPECT_EQ(fit.counterexample_count, 0u);
  EXPECT_NEAR(fit.gradient_constant, 4.0, 0.1);
}

TEST(CheckDriftTest, LorenzHasCounterexamplesAlongDiagonal) {
  const SdeModel lorenz = lorenz_model();
  const DriftFit fit = check_drift(lorenz, Box::cube(3, 20.0), 4000);
  EXPECT_FALSE(fit.declared);
  EXPECT_GT(fit.counterexample_count, 0u);
  EXPECT_LE(fit.counterexamples.size(), 16u);
  for (const Vector& x : fit.counterexamples) {
    EXPECT_GT(lorenz.lyapunov.gradient(x).dot(lorenz.drift(x)), 0.0);
  }
  // r(t, t, 0) = 54 t^2.
  Vector diag(3);
  diag << 2.0, 2.0, 0.0;
  EXPECT_NEAR(lorenz.lyapunov.gradient(diag).dot(lorenz.drift(diag)), 54.0 * 4.0, 1e-12);
}

TEST(CheckDriftTest, GradientSystemFits) {
  SdeModel m;
  m.state_dim = 2;
  m.noise_dim = 2;
  m.drift = [](const Vector& x) -> Vector { return -2.0 * x; };
  m.diffusion = [](const Vector&) -> Matrix { return Matrix::Identity(2, 2); };
  m.lyapunov.V = [](const Vector& x) { return x.squaredNorm() + 1.0; };
  m.lyapunov.gradient = [](const Vector& x) -> Vector { return 2.0 * x; };
  const DriftFit fit = check_drift(m, Box::cube(2, 3.0), 500);
  EXPECT_GT(fit.alpha, 0.0);
  EXPECT_EQ(fit.counterexample_count, 0u);
  EXPECT_THROW(check_drift(m, Box::cube(3, 1.0), 10), std::invalid_argument);
  EXPECT_THROW(check_drift(m, Box::cube(2, 1.0), 0), std::invalid_argument);
}

TEST(CheckDriftTest, WrongDeclaredConstantsAreCaught) {
  SdeModel ou = ou_oracle_model(1.0, 1.0, 1);
  ou.lyapunov.drift_constants = DriftConstants{3.0, 2.0};
  const DriftFit fit = check_drift(ou, Box::cube(1, 5.0), 200);
  EXPECT_GT(fit.counterexample_count, 0u);
}

TEST(TightnessTest, ConstantTrajectoryIsStable) {
  const SdeModel frozen = [] {
    SdeModel m = ou_oracle_model(1.0, 1.0, 1);
    m.drift = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
    m.diffusion = [](const Vector&) -> Matrix { return Matrix::Zero(1, 1); };
    return m;
  }();
  EmpiricalMeasure measure({exp_lyapunov(0.1, 1.0, frozen.lyapunov)});
  MeasureRecorder rec(measure, WeightSequence(1.0 / 3.0));
  TightnessMonitor mon(measure, "W");
  std::vector<StepObserver*> obs{&rec, &mon};
  NoiseStream noise({NoiseKind::StandardGaussian, 1, 1});
  Vector x0(1);
  x0 << 2.0;
  run_trajectory(frozen, AdaptiveEuler{StepSequence(0.5, 1.0 / 3.0), UnboundedChi{}}, x0, 5000,
                 noise, obs);
  EXPECT_DOUBLE_EQ(mon.running_sup(), std::exp(0.1 * 5.0));
  EXPECT_EQ(mon.verdict(), "stable");
}

TEST(TightnessTest, GrowingMeanIsFlagged) {
  SdeModel drift_up = ou_oracle_model(1.0, 1.0, 1);
  drift_up.drift = [](const Vector&) -> Vector { return Vector::Ones(1); };
  drift_up.diffusion = [](const Vector&) -> Matrix { return Matrix::Zero(1, 1); };
  EmpiricalMeasure measure({squared_norm()});
  MeasureRecorder rec(measure, WeightSequence(0.0));
  TightnessMonitor mon(measure, "sqnorm");
  std::vector<StepObserver*> obs{&rec, &mon};
  NoiseStream noise({NoiseKind::StandardGaussian, 1, 1});
  run_trajectory(drift_up, ConstantEuler{0.1}, Vector::Zero(1), 5000, noise, obs);
  EXPECT_EQ(mon.verdict(), "growing");
  EXPECT_THROW(TightnessMonitor(measure, "missing"), std::out_of_range);
}

TEST(Lambda0Test, MonotoneFormula) {
  MonotoneConstants c{2.0, 1.0, 1.0, 4.0, 2.0, 2.0, 1.0, 0.4};
  // 2 tau/(a C_sigma H) = 0.2, 2(alpha - delta)/(kappa a C_V C_sigma) = 0.25.
  EXPECT_DOUBLE_EQ(lambda0_for_monotone(c), 0.2);
  c.tau = 0.01;
  EXPECT_DOUBLE_EQ(lambda0_for_monotone(c), 2.0 * 0.01 / (1.0 * 2.0 * 2.0));
  c.tau = kInf;
  EXPECT_DOUBLE_EQ(lambda0_for_monotone(c), 0.25);
  c.delta = c.alpha;
  EXPECT_THROW(lambda0_for_monotone(c), std::invalid_argument);
  c.delta = 1.0;
  c.trace_constant = 0.0;
  EXPECT_THROW(lambda0_for_monotone(c), std::invalid_argument);
}

TEST(Lambda0Test, HamiltonianFormula) {
  HamiltonianConstants c{2.0, 0.4, 1.0, 4.0, 2.0, 2.0, 1.0, 0.4};
  EXPECT_NEAR(lambda0_for_hamiltonian(c), 0.1, 1e-15);
  c.delta = 0.5;
  EXPECT_THROW(lambda0_for_hamiltonian(c), std::invalid_argument);
  c.delta = 0.1;
  c.tau = 10.0;
  EXPECT_DOUBLE_EQ(lambda0_for_hamiltonian(c), 2.0 * (2.0 - 0.4) / 8.0);
}

TEST(Lambda0Test, PureFunctions) {
  const MonotoneConstants c{1.5, 0.2, 0.8, 3.0, 1.2, 2.5, 1.0, 0.3};
  EXPECT_EQ(lambda0_for_monotone(c), lambda0_for_monotone(c));
}

TEST(DriftCheck, PointsOutsideTheModelDomainAreCountedNotThrown) {
  // The dof3 mass matrix is indefinite away from q2 = 0, so V = H + 1 drops below 1.
  const SdeModel dof3 = induced_sde(std::make_shared<const HamiltonianModel>(dof3_model()));
  DriftFit fit;
  ASSERT_NO_THROW(fit = check_drift(dof3, Box::cube(6, 20.0), 500));
  EXPECT_GT(fit.invalid_samples, 0u);
  EXPECT_LT(fit.invalid_samples, 500u);
  EXPECT_FALSE(fit.invalid_points.empty());
}

}  // namespace
}  // namespace adsde
