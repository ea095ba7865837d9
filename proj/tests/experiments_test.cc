#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adsde/experiments.hpp"

namespace adsde {
namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Registry, KnownModelsBuild) {
  for (const char* name : {"lorenz", "dof3", "langevin", "ou"}) {
    ModelConfig m;
    m.name = name;
    const BuiltModel b = build_model(m);
    EXPECT_EQ(static_cast<std::size_t>(b.x0.size()), b.sde.state_dim) << name;
    EXPECT_FALSE(b.default_functions.empty()) << name;
  }
  ModelConfig bad;
  bad.name = "duffing";
  EXPECT_THROW(build_model(bad), ConfigError);
}

TEST(Registry, LangevinDimensionAndNoise) {
  ModelConfig m;
  m.name = "langevin";
  m.dim = 3;
  m.noise = 0.7;
  const BuiltModel b = build_model(m);
  EXPECT_EQ(b.sde.state_dim, 6u);
  const Matrix s = b.sde.diffusion(Vector::Zero(6));
  EXPECT_DOUBLE_EQ(s(3, 0), 0.7);
  EXPECT_DOUBLE_EQ(s(0, 0), 0.0);
}

TEST(Registry, TestFunctionLabels) {
  RunConfig c = preset("dof3");
  const BuiltModel b = build_model(c.model);
  c.functions = {"one", "sqnorm", "q6sq", "W", "bump"};
  const auto fs = build_test_functions(c, b);
  ASSERT_EQ(fs.size(), 5u);
  EXPECT_EQ(fs[2].label, "q6sq");
  Vector x = Vector::Zero(6);
  x[5] = 3.0;
  EXPECT_DOUBLE_EQ(fs[2].fn.value(x), 9.0);
  c.functions = {"q7sq"};
  EXPECT_THROW(build_test_functions(c, b), ConfigError);
  c.functions = {"cubic"};
  EXPECT_THROW(build_test_functions(c, b), ConfigError);
}

TEST(Registry, SchemeAndChiErrors) {
  RunConfig c;
  c.scheme.kind = "milstein";
  EXPECT_THROW(build_scheme(c), ConfigError);
  c.scheme.kind = "adaptive";
  c.step_exponent = 0.0;
  EXPECT_THROW(build_scheme(c), ConfigError);
  c = RunConfig{};
  c.chi.kind = "triangle";
  EXPECT_THROW(build_scheme(c), ConfigError);
  c = RunConfig{};
  c.scheme.kind = "implicit";
  c.scheme.damping = 1.5;
  EXPECT_THROW(build_scheme(c), ConfigError);
}

TEST(Registry, InitialStateOverride) {
  RunConfig c = preset("lorenz");
  const BuiltModel b = build_model(c.model);
  EXPECT_EQ(initial_state_for(c, b), Vector::Ones(3));
  c.model.x0 = {1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(initial_state_for(c, b)[2], 3.0);
  c.model.x0 = {1.0};
  EXPECT_THROW(initial_state_for(c, b), ConfigError);
}

TEST(Validate, ExponentOutsideTheSetIsFail) {
  RunConfig c = preset("ou");
  c.step_exponent = 1.0;
  c.weights_exponent = 0.9;  // p on the edge 2(s-1)/s = 1 needs q = 1
  const auto lines = validate(c);
  EXPECT_TRUE(any_fail(lines));
  EXPECT_EQ(lines.front().check, "exponents");
  EXPECT_EQ(lines.front().level, "FAIL");
}

TEST(Validate, MonotoneChiOnOuPassesBoundsAndReportsLambda0) {
  RunConfig c = preset("ou");
  c.chi.kind = "monotone";
  c.chi.hessian_sup = 2.0;
  const auto lines = validate(c);
  EXPECT_FALSE(any_fail(lines));
  bool saw = false;
  for (const auto& l : lines) {
    if (l.check != "lambda0") continue;
    saw = true;
    // min(2 tau/(a C_sigma |D2V|), ...) = 2 * 0.25 / (1 * 2 * 2).
    const auto at = l.detail.find("lambda0 = ");
    ASSERT_NE(at, std::string::npos) << l.detail;
    EXPECT_NEAR(std::stod(l.detail.substr(at + 10)), 0.125, 1e-12) << l.detail;
  }
  EXPECT_TRUE(saw);
}

TEST(Validate, GaussianTauAtTheSupremumFails) {
  RunConfig c = preset("ou");
  c.chi.kind = "monotone";
  c.chi.hessian_sup = 2.0;
  c.validate_tau = 0.5;
  EXPECT_TRUE(any_fail(validate(c)));
  c.noise_kind = "rademacher";
  EXPECT_FALSE(any_fail(validate(c)));
}

TEST(Validate, LorenzDriftIsWarnedNotFailed) {
  const auto lines = validate(preset("lorenz"));
  EXPECT_FALSE(any_fail(lines));
  bool warned = false;
  for (const auto& l : lines) warned = warned || (l.check == "drift" && l.level == "WARN");
  EXPECT_TRUE(warned);
}

TEST(Simulate, RecordHasSnapshotsBindingAndNoError) {
  RunConfig c = preset("lorenz");
  c.steps = 20000;
  const RunRecord r = simulate(c, "t");
  EXPECT_FALSE(r.failed());
  EXPECT_EQ(r.steps_completed, 20000u);
  ASSERT_TRUE(r.binding.has_value());
  EXPECT_EQ(r.binding->total_steps, 20000u);
  ASSERT_FALSE(r.snapshots.empty());
  EXPECT_EQ(r.snapshots.back().n, 20000u);
  EXPECT_EQ(r.labels, (std::vector<std::string>{"sqnorm"}));
  EXPECT_EQ(r.noise_draws, 20000u);
}

TEST(Simulate, SnapshotCsvColumnsForLorenz) {
  RunConfig c = preset("lorenz");
  c.steps = 100;
  EXPECT_EQ(first_line(snapshot_csv(simulate(c))), "n,H_n,nu_sqnorm,gamma_tilde,binding_cum");
}

TEST(Simulate, RerunWithSameSeedIsIdentical) {
  RunConfig c = preset("dof3");
  c.steps = 5000;
  const RunRecord a = simulate(c);
  const RunRecord b = simulate(c);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(snapshot_csv(a), snapshot_csv(b));
  c.seed = 2;
  EXPECT_NE(simulate(c).final_state, a.final_state);
}

TEST(Simulate, ExplosionIsCaughtWithStepIndex) {
  RunConfig c = preset("lorenz");
  c.scheme.kind = "euler";
  c.scheme.h = 0.125;
  c.steps = 1000;
  const RunRecord r = simulate(c, "boom");
  ASSERT_TRUE(r.failed());
  EXPECT_EQ(r.error->type, "NonFiniteState");
  ASSERT_TRUE(r.error->step.has_value());
  EXPECT_EQ(r.steps_completed + 1, *r.error->step);
  EXPECT_FALSE(r.binding.has_value());
}

TEST(Simulate, TightnessMonitorRunsWhenWRequested) {
  RunConfig c = preset("ou");
  c.steps = 200000;
  c.functions = {"W"};
  const RunRecord r = simulate(c);
  ASSERT_TRUE(r.tightness_verdict.has_value());
  EXPECT_EQ(*r.tightness_verdict, "stable");
}

TEST(Records, WriteRecordEmitsJsonCsvAndRecipe) {
  RunConfig c = preset("ou");
  c.steps = 1000;
  const RunRecord r = simulate(c, "ou_small");
  const auto dir = std::filesystem::path(::testing::TempDir()) / "adsde_records";
  std::filesystem::remove_all(dir);
  const auto written = write_record(r, dir.string());
  EXPECT_EQ(written.size(), 3u);
  const auto json = nlohmann::json::parse(read_file(dir / "ou_small.json"));
  EXPECT_EQ(json["model"], "ou");
  EXPECT_EQ(json["steps_completed"], 1000);
  EXPECT_TRUE(json["error"].is_null());
  EXPECT_EQ(json["config"]["model.name"], "ou");
  EXPECT_EQ(json["snapshots"].size(), r.snapshots.size());
  EXPECT_EQ(first_line(read_file(dir / "ou_small.csv")), "n,H_n,nu_sqnorm,nu_bump,gamma_tilde,binding_cum");
  EXPECT_NE(read_file(dir / "ou_small.gp").find("ou_small.csv"), std::string::npos);

  // The echoed config is enough to rerun.
  RunConfig again;
  for (const auto& [k, v] : json["config"].items()) set_config_value(again, k, v.get<std::string>());
  EXPECT_EQ(again, c);
}

TEST(MonteCarlo, LorenzExplicitEulerAtLargeStepReportsExplosions) {
  RunConfig c = preset("lorenz");
  c.scheme.kind = "euler";
  c.scheme.h = 0.125;
  c.mc_paths = 200;
  const MonteCarloSummary s = monte_carlo(c);
  EXPECT_GT(s.exploded, 0u);
  const RunRecord r = monte_carlo_record(c);
  if (s.completed == 0) {
    ASSERT_TRUE(r.failed());
    EXPECT_EQ(r.error->type, "AllPathsExploded");
  }
}

TEST(MonteCarlo, OuMatchesTransientVariance) {
  RunConfig c = preset("ou");
  c.scheme.kind = "euler";
  c.scheme.h = 1.0 / 64.0;
  c.mc_horizon = 1.0;
  c.mc_paths = 20000;
  c.functions = {"sqnorm"};
  const MonteCarloSummary s = monte_carlo(c);
  ASSERT_TRUE(s.mean.has_value());
  // Euler variance recursion v <- (1 - h)^2 v + 2h from v = 0.
  double v = 0.0;
  for (std::size_t k = 0; k < s.steps; ++k) v = (1 - c.scheme.h) * (1 - c.scheme.h) * v + 2 * c.scheme.h;
  EXPECT_NEAR(*s.mean, v, 4.0 * *s.std_error);
  EXPECT_EQ(s.series.size(), s.steps + 1);
}

TEST(MonteCarlo, AdaptiveSchemeIsRejected) {
  EXPECT_THROW(monte_carlo(preset("ou")), ConfigError);
}

TEST(MonteCarlo, DeterministicModelHasZeroStdError) {
  // f = 1 has no path dependence, so the estimator has no spread.
  RunConfig c = preset("ou");
  c.scheme.kind = "euler";
  c.scheme.h = 0.25;
  c.mc_paths = 50;
  c.mc_horizon = 1.0;
  c.functions = {"one"};
  const MonteCarloSummary s = monte_carlo(c);
  ASSERT_TRUE(s.std_error.has_value());
  EXPECT_EQ(*s.std_error, 0.0);
  EXPECT_EQ(*s.mean, 1.0);
}

TEST(Baselines, TableHasOneRowPerH) {
  RunRecord r;
  MonteCarloSummary a;
  a.model = "dof3";
  a.scheme = "euler";
  a.h = 0.5;
  a.paths = 10;
  r.monte_carlo = {a};
  const std::string csv = baseline_table_csv(r);
  EXPECT_EQ(first_line(csv),
            "model,scheme,h,mean,std_error,completed,exploded,model_failures,solver_failures");
  EXPECT_NE(csv.find("dof3,euler,0.5,nan,nan,0,0,0,0"), std::string::npos);
}

TEST(Reproduce, DofThreeWritesOneRecordPerSeed) {
  ReproduceOptions opt;
  opt.gamma0s = {0.5};
  opt.steps = 2000;
  opt.seeds = 2;
  opt.output_dir = (std::filesystem::path(::testing::TempDir()) / "adsde_reproduce").string();
  const auto runs = reproduce_dof3(opt);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].name, "dof3_g2m1_s1");
  EXPECT_EQ(runs[1].name, "dof3_g2m1_s2");
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(opt.output_dir) / "dof3_g2m1_s2.csv"));
  EXPECT_EQ(runs[0].scheme, "hamiltonian");
}

}  // namespace
}  // namespace adsde
