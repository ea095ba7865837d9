#include "adsde/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "adsde/diagnostics.hpp"
#include "adsde/measures.hpp"

namespace adsde {

namespace {

std::string fmt(double v) { return format_number(v); }

NoiseKind noise_kind(const RunConfig& config) {
  try {
    return noise_kind_from_string(config.noise_kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

bool is_adaptive(const RunConfig& config) {
  return config.scheme.kind == "adaptive" || config.scheme.kind == "hamiltonian";
}

struct ModelConstants {
  double alpha = 0.0;
  double gradient_constant = 0.0;
  double trace_constant = 0.0;
  DriftFit fit;
};

// Declared constants where the model has them, fitted ones otherwise.
ModelConstants model_constants(const RunConfig& config, const SdeModel& model) {
  ModelConstants c;
  c.fit = check_drift(model, Box::cube(model.state_dim, config.validate_box), config.validate_samples);
  const LyapunovData& lyap = model.lyapunov;
  c.alpha = lyap.drift_constants ? lyap.drift_constants->alpha : c.fit.alpha;
  c.gradient_constant = lyap.gradient_constant.value_or(c.fit.gradient_constant);
  c.trace_constant = lyap.trace_constant.value_or(c.fit.trace_constant);
  return c;
}

bool wants_function(const RunConfig& config, const BuiltModel& model, const std::string& label) {
  const auto& names = config.functions.empty() ? model.default_functions : config.functions;
  return std::find(names.begin(), names.end(), label) != names.end();
}

ErrorInfo error_info(const SimulationError& e, std::string type) {
  return ErrorInfo{std::move(type), e.message(), e.step_index()};
}

std::string error_type(const SimulationError& e) {
  if (dynamic_cast<const NonFiniteState*>(&e)) return "NonFiniteState";
  if (dynamic_cast<const ModelEvaluationError*>(&e)) return "ModelEvaluationError";
  if (dynamic_cast<const FixedPointDivergence*>(&e)) return "FixedPointDivergence";
  if (dynamic_cast<const AllPathsExploded*>(&e)) return "AllPathsExploded";
  if (dynamic_cast<const MomentOverflow*>(&e)) return "MomentOverflow";
  return "SimulationError";
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

BuiltModel build_model(const ModelConfig& config) {
  BuiltModel out;
  if (config.name == "lorenz") {
    if (config.lyapunov == "standard") {
      out.sde = lorenz_model();
    } else if (config.lyapunov == "shifted") {
      out.sde = lorenz_model_shifted_lyapunov();
    } else {
      throw ConfigError("model.lyapunov must be 'standard' or 'shifted'");
    }
    out.x0 = Vector::Ones(3);
    out.default_functions = {"sqnorm"};
  } else if (config.name == "dof3") {
    out.sde = induced_sde(std::make_shared<const HamiltonianModel>(
        dof3_model(Dof3Options{.frozen_mass = config.frozen_mass})));
    out.x0 = Vector::Zero(6);
    out.default_functions = {"q1sq"};
  } else if (config.name == "langevin") {
    if (config.dim == 0) throw ConfigError("model.dim must be positive");
    if (!(config.damping > 0.0)) throw ConfigError("model.damping must be positive");
    if (!(config.noise > 0.0)) throw ConfigError("model.noise must be positive");
    const auto d = static_cast<Eigen::Index>(config.dim);
    out.sde = induced_sde(std::make_shared<const HamiltonianModel>(langevin_model(
        quadratic_potential(config.dim), config.damping, config.noise * Matrix::Identity(d, d))));
    out.sde.label = "langevin";
    out.x0 = Vector::Zero(2 * d);
    out.default_functions = {"q1sq"};
  } else if (config.name == "ou") {
    if (config.dim == 0) throw ConfigError("model.dim must be positive");
    if (!(config.theta > 0.0) || !(config.sigma > 0.0)) {
      throw ConfigError("model.theta and model.sigma must be positive");
    }
    out.sde = ou_oracle_model(config.theta, config.sigma, config.dim);
    out.x0 = Vector::Zero(static_cast<Eigen::Index>(config.dim));
    out.default_functions = {"sqnorm", "bump"};
  } else {
    throw ConfigError("unknown model '" + config.name + "' (lorenz, dof3, langevin, ou)");
  }
  return out;
}

ChiPolicy build_chi(const ChiConfig& c) {
  if (c.kind == "unbounded") return UnboundedChi{};
  if (c.kind == "constant") {
    if (!(c.value > 0.0)) throw ConfigError("chi.value must be positive");
    return ConstantChi{c.value};
  }
  if (c.kind == "natural") return NaturalChi{};
  if (c.kind == "lorenz") return LorenzChi{};
  if (c.kind == "monotone" || c.kind == "hamiltonian") {
    if (!(c.delta > 0.0)) throw ConfigError("chi.delta must be positive");
    if (!(c.zeta > 0.0)) throw ConfigError("chi.zeta must be positive");
    if (!(c.p >= 0.0)) throw ConfigError("chi.p must be non-negative");
    if (c.kind == "monotone") return MonotoneChi{c.delta, c.zeta, c.p, c.hessian_sup};
    if (c.samples < 2) throw ConfigError("chi.samples must be at least 2");
    return HamiltonianChi{c.delta, c.zeta, c.p, c.samples};
  }
  throw ConfigError("unknown chi.kind '" + c.kind + "'");
}

SchemeKind build_scheme(const RunConfig& config) {
  const std::string& kind = config.scheme.kind;
  if (kind == "adaptive" || kind == "hamiltonian") {
    StepSequence seq = [&] {
      try {
        return StepSequence(config.gamma0, config.step_exponent);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    if (kind == "adaptive") return AdaptiveEuler{seq, build_chi(config.chi)};
    return AdaptiveHamiltonianEuler{seq, build_chi(config.chi)};
  }
  if (!(config.scheme.h > 0.0)) throw ConfigError("scheme.h must be positive");
  if (kind == "euler") return ConstantEuler{config.scheme.h};
  if (kind == "implicit") {
    if (!(config.scheme.damping > 0.0 && config.scheme.damping <= 1.0)) {
      throw ConfigError("scheme.damping must lie in (0, 1]");
    }
    return ImplicitEuler{config.scheme.h,
                         FixedPointSolver{config.scheme.tol, config.scheme.max_iters,
                                          config.scheme.damping}};
  }
  throw ConfigError("unknown scheme.kind '" + kind + "' (adaptive, hamiltonian, euler, implicit)");
}

std::vector<TestFunction> build_test_functions(const RunConfig& config, const BuiltModel& model) {
  const auto& names = config.functions.empty() ? model.default_functions : config.functions;
  std::vector<TestFunction> out;
  for (const auto& name : names) {
    if (name == "one") {
      out.push_back(constant_one());
    } else if (name == "sqnorm") {
      out.push_back(squared_norm());
    } else if (name == "W") {
      try {
        out.push_back(exp_lyapunov(config.lambda, config.lyapunov_a, model.sde.lyapunov));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (name == "bump") {
      if (!(config.bump_radius > 0.0)) throw ConfigError("measure.bump_radius must be positive");
      out.push_back(
          compact_bump(Vector::Zero(static_cast<Eigen::Index>(model.sde.state_dim)), config.bump_radius));
    } else if (name.size() > 3 && name.front() == 'q' && name.ends_with("sq")) {
      std::size_t k = 0;
      try {
        k = std::stoul(name.substr(1, name.size() - 3));
      } catch (const std::exception&) {
        throw ConfigError("bad test function '" + name + "'");
      }
      if (k == 0 || k > model.sde.state_dim) {
        throw ConfigError("test function '" + name + "' is out of range for this model");
      }
      out.push_back(coordinate_squared(k - 1));
    } else {
      throw ConfigError("unknown test function '" + name + "' (one, sqnorm, q<k>sq, W, bump)");
    }
  }
  return out;
}

Vector initial_state_for(const RunConfig& config, const BuiltModel& model) {
  if (config.model.x0.empty()) return model.x0;
  if (config.model.x0.size() != model.sde.state_dim) {
    throw ConfigError("model.x0 has " + std::to_string(config.model.x0.size()) +
                      " entries, the model state has " + std::to_string(model.sde.state_dim));
  }
  return Eigen::Map<const Vector>(config.model.x0.data(),
                                  static_cast<Eigen::Index>(config.model.x0.size()));
}

bool any_fail(const std::vector<CheckLine>& lines) {
  return std::any_of(lines.begin(), lines.end(), [](const auto& l) { return l.level == "FAIL"; });
}

std::vector<CheckLine> validate(const RunConfig& config) {
  const BuiltModel built = build_model(config.model);
  const SdeModel& model = built.sde;
  const NoiseSpec noise{noise_kind(config), model.noise_dim, config.seed};
  std::vector<CheckLine> lines;

  if (is_adaptive(config)) {
    const Admissibility adm =
        validate_exponents(config.step_exponent, config.effective_weights_exponent(), config.validate_s);
    lines.push_back({adm.admissible ? "PASS" : "FAIL", "exponents",
                     "p = " + fmt(config.step_exponent) + ", q = " +
                         fmt(config.effective_weights_exponent()) + ", s = " +
                         fmt(config.validate_s) + ": " + adm.reason});
  }

  const ModelConstants constants = model_constants(config, model);
  const DriftFit& fit = constants.fit;
  {
    std::ostringstream detail;
    detail << "fitted alpha = " << fmt(fit.alpha) << ", beta = " << fmt(fit.beta)
           << ", C_V <= " << fmt(fit.gradient_constant) << ", C_sigma <= " << fmt(fit.trace_constant)
           << " on [-" << fmt(config.validate_box) << ", " << fmt(config.validate_box) << "]^"
           << model.state_dim << " (" << fit.samples << " points)";
    if (fit.declared) {
      detail << "; declared (" << fmt(model.lyapunov.drift_constants->alpha) << ", "
             << fmt(model.lyapunov.drift_constants->beta) << ") violated at "
             << fit.counterexample_count << " points";
    } else {
      detail << "; no declared constants, <grad V, b> > 0 at " << fit.counterexample_count
             << " outer-shell points";
    }
    if (!fit.counterexamples.empty()) {
      const Vector& x = fit.counterexamples.front();
      detail << ", e.g. x = (";
      for (Eigen::Index i = 0; i < x.size(); ++i) detail << (i ? ", " : "") << fmt(x[i]);
      detail << ")";
    }
    if (fit.invalid_samples > 0) {
      detail << "; V or the coefficients undefined at " << fit.invalid_samples << " points";
    }
    const bool clean = fit.counterexample_count == 0 && fit.invalid_samples == 0;
    lines.push_back({clean ? "PASS" : "WARN", "drift", detail.str()});
  }

  const std::string& chi = config.chi.kind;
  if (!is_adaptive(config)) return lines;
  ChiPolicy policy = build_chi(config.chi);
  if (chi == "monotone") {
    const auto& mono = std::get<MonotoneChi>(policy);
    const double hess = mono.hessian_sup.value_or(model.lyapunov.hessian_norm_sup.value_or(0.0));
    if (!(hess > 0.0)) {
      lines.push_back({"FAIL", "chi-bounds", "monotone chi needs a global Hessian bound"});
      return lines;
    }
    std::size_t violations = 0;
    const Box box = Box::cube(model.state_dim, config.validate_box);
    for (std::size_t i = 1; i <= config.validate_samples; ++i) {
      const Vector x = box.lower.array() +
                       halton_point(i, model.state_dim).array() * (box.upper - box.lower).array();
      if (!monotone_chi_bounds(mono, model, x).holds()) ++violations;
    }
    lines.push_back({violations == 0 ? "PASS" : "FAIL", "chi-bounds",
                     "zeta V^-p <= chi <= (2 delta/|D2V|) V/(|b|^2 v 1) violated at " +
                         std::to_string(violations) + " of " +
                         std::to_string(config.validate_samples) + " points"});
    try {
      MonotoneConstants c;
      c.alpha = constants.alpha;
      c.delta = mono.delta;
      c.a = model.lyapunov.exponent_a;
      c.gradient_constant = constants.gradient_constant;
      c.trace_constant = constants.trace_constant;
      c.hessian_sup = hess;
      c.kappa = kappa_of(noise);
      c.tau = config.validate_tau;
      if (!(c.tau < tau_supremum(noise))) {
        throw std::invalid_argument("validate.tau must be below " + fmt(tau_supremum(noise)));
      }
      const double l0 = lambda0_for_monotone(c);
      const bool ok = config.lambda < l0 / config.validate_s;
      lines.push_back({ok ? "PASS" : "WARN", "lambda0",
                       "lambda0 = " + fmt(l0) + "; measure.lambda = " + fmt(config.lambda) +
                           (ok ? " < " : " >= ") + "lambda0 / s = " + fmt(l0 / config.validate_s)});
    } catch (const std::invalid_argument& e) {
      lines.push_back({"FAIL", "lambda0", e.what()});
    }
  } else if (chi == "hamiltonian") {
    if (!model.hamiltonian) {
      lines.push_back({"FAIL", "chi-bounds", "hamiltonian chi needs a Hamiltonian model"});
      return lines;
    }
    const auto& ham = std::get<HamiltonianChi>(policy);
    const auto rho = model.hamiltonian->pp_hessian_norm_sup;
    if (!rho) {
      lines.push_back({"WARN", "lambda0", "no bound on sup |d2_pp V|; lambda0 not computed"});
    } else {
      try {
        HamiltonianConstants c;
        c.alpha = constants.alpha;
        c.delta = ham.delta;
        c.a = model.lyapunov.exponent_a;
        c.gradient_constant = constants.gradient_constant;
        c.trace_constant = constants.trace_constant;
        c.pp_hessian_sup = *rho;
        c.kappa = kappa_of(noise);
        c.tau = config.validate_tau;
        if (!(c.tau < tau_supremum(noise))) {
          throw std::invalid_argument("validate.tau must be below " + fmt(tau_supremum(noise)));
        }
        const double l0 = lambda0_for_hamiltonian(c);
        const bool ok = config.lambda < l0 / config.validate_s;
        lines.push_back({ok ? "PASS" : "WARN", "lambda0",
                         "lambda0 = " + fmt(l0) + "; measure.lambda = " + fmt(config.lambda) +
                             (ok ? " < " : " >= ") + "lambda0 / s = " + fmt(l0 / config.validate_s)});
      } catch (const std::invalid_argument& e) {
        lines.push_back({"FAIL", "lambda0", e.what()});
      }
    }
  } else {
    lines.push_back({"WARN", "chi-bounds",
                     "chi = " + chi + " has neither the monotone nor the Hamiltonian form; its hypotheses are not checked"});
  }

  if (chi == "monotone" || chi == "hamiltonian") {
    const double zeta = config.chi.zeta;
    const double p = config.chi.p;
    if (p > 0.0) {
      const SummabilityReport rep = validate_gamma_summability(
          StepSequence(config.gamma0, config.step_exponent), zeta, p, model.lyapunov.exponent_a,
          config.lambda, std::clamp<std::size_t>(config.steps, 2, 1000000));
      lines.push_back({rep.sufficient_eventually ? "PASS" : "WARN", "summability",
                       rep.verdict + " (partial sum " + fmt(rep.partial_sum) + " over " +
                           std::to_string(rep.terms) + " terms)"});
    }
  }
  return lines;
}

RunRecord simulate(const RunConfig& config, std::string name, std::string command) {
  RunRecord record;
  record.name = std::move(name);
  record.command = std::move(command);
  record.config = config;

  const BuiltModel built = build_model(config.model);
  const SdeModel& model = built.sde;
  const SchemeKind scheme = build_scheme(config);
  const Vector x0 = initial_state_for(config, built);
  if (config.steps == 0) throw ConfigError("run.steps must be at least 1");
  WeightSequence weights = [&] {
    try {
      return WeightSequence(config.effective_weights_exponent());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  record.model = model.label;
  record.scheme = scheme_name(scheme);
  if (const auto* a = std::get_if<AdaptiveEuler>(&scheme)) record.chi = chi_name(a->chi);
  if (const auto* a = std::get_if<AdaptiveHamiltonianEuler>(&scheme)) record.chi = chi_name(a->chi);
  record.initial_state = to_std(x0);

  for (const auto& line : validate(config)) {
    if (line.level != "PASS") record.checks.push_back(line);
  }

  EmpiricalMeasure measure(build_test_functions(config, built), &model);
  for (const auto& f : measure.functions()) record.labels.push_back(f.label);
  MeasureRecorder recorder(measure, weights, config.cadence);
  BindingTelemetry telemetry;
  std::vector<StepObserver*> observers{&recorder, &telemetry};
  std::unique_ptr<TightnessMonitor> tightness;
  if (wants_function(config, built, "W")) {
    tightness = std::make_unique<TightnessMonitor>(measure, "W", config.cadence);
    observers.push_back(tightness.get());
  }

  NoiseStream noise(NoiseSpec{noise_kind(config), model.noise_dim, config.seed});
  try {
    const RunSummary summary = run_trajectory(model, scheme, x0, config.steps, noise, observers);
    record.final_state = to_std(summary.final_state);
    record.steps_completed = summary.steps;
    record.wall_seconds = summary.wall_seconds;
  } catch (const SimulationError& e) {
    record.error = error_info(e, error_type(e));
    record.steps_completed = telemetry.total_steps();
    record.final_state = telemetry.total_steps() ? to_std(recorder.last_state()) : to_std(x0);
  }
  record.noise_draws = noise.counter();
  recorder.finish();
  record.snapshots = recorder.snapshots();
  if (measure.count() > 0) {
    for (const auto& f : measure.functions()) {
      record.final_values[f.label] = measure.value(f.label);
      record.overflow_counts[f.label] = measure.overflow_count(f.label);
      if (f.fn.has_derivatives()) record.generator_residuals[f.label] = measure.generator_residual(f.label);
    }
  }
  if (is_adaptive(config)) record.binding = binding_report(telemetry);
  if (tightness) {
    record.tightness_verdict = tightness->verdict();
    record.tightness_sup = tightness->running_sup();
  }
  return record;
}

MonteCarloSummary monte_carlo(const RunConfig& config) {
  const BuiltModel built = build_model(config.model);
  const SchemeKind scheme = build_scheme(config);
  if (is_adaptive(config)) throw ConfigError("montecarlo needs scheme.kind euler or implicit");
  const auto functions = build_test_functions(config, built);
  if (functions.empty()) throw ConfigError("montecarlo needs a test function");
  MonteCarloOptions opt;
  opt.horizon = config.mc_horizon;
  opt.paths = config.mc_paths;
  opt.seed = config.seed;
  opt.noise = noise_kind(config);
  opt.threads = config.mc_threads;
  MonteCarloResult r;
  try {
    r = monte_carlo_run(built.sde, scheme, initial_state_for(config, built), functions.front().fn.value,
                        opt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  MonteCarloSummary s;
  s.model = built.sde.label;
  s.scheme = scheme_name(scheme);
  s.h = r.h;
  s.horizon = config.mc_horizon;
  s.steps = r.steps;
  s.paths = r.paths;
  s.completed = r.completed;
  s.exploded = r.exploded;
  s.model_failures = r.model_failures;
  s.solver_failures = r.solver_failures;
  if (r.completed > 0) {
    s.mean = r.mean;
    s.std_error = r.std_error;
    s.series = std::move(r.series);
  }
  return s;
}

RunRecord monte_carlo_record(const RunConfig& config, std::string name) {
  RunRecord record;
  record.name = std::move(name);
  record.command = "montecarlo";
  record.config = config;
  const auto start = std::chrono::steady_clock::now();
  MonteCarloSummary s = monte_carlo(config);
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record.model = s.model;
  record.scheme = s.scheme;
  if (s.completed == 0) {
    record.error = ErrorInfo{"AllPathsExploded",
                             "all " + std::to_string(s.paths) + " paths failed (h = " + fmt(s.h) + ")",
                             std::nullopt};
  }
  record.monte_carlo.push_back(std::move(s));
  return record;
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  if (name == "lorenz") {
    c.model.name = "lorenz";
    c.scheme.kind = "adaptive";
    c.chi.kind = "lorenz";
    c.gamma0 = 0.5;
    c.step_exponent = 1.0 / 3.0;
    c.steps = 10000000;
    c.functions = {"sqnorm"};
  } else if (name == "dof3") {
    c.model.name = "dof3";
    c.scheme.kind = "hamiltonian";
    c.chi.kind = "natural";
    c.gamma0 = 0.5;
    c.step_exponent = 1.0 / 3.0;
    c.steps = 1000000;
    c.functions = {"q1sq"};
  } else if (name == "ou") {
    c.model.name = "ou";
    c.model.theta = 1.0;
    c.model.sigma = std::sqrt(2.0);
    c.model.dim = 1;
    c.scheme.kind = "adaptive";
    c.chi.kind = "natural";
    c.gamma0 = 0.25;
    c.step_exponent = 1.0 / 3.0;
    c.steps = 1000000;
    c.functions = {"sqnorm", "bump"};
  } else if (name == "langevin") {
    c.model.name = "langevin";
    c.model.dim = 1;
    c.model.damping = 1.0;
    c.model.noise = 1.0;
    c.scheme.kind = "hamiltonian";
    c.chi.kind = "natural";
    c.gamma0 = 0.25;
    c.step_exponent = 1.0 / 3.0;
    c.steps = 1000000;
    c.functions = {"q1sq"};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (lorenz, dof3, ou, langevin)");
  }
  return c;
}

namespace {

std::string gamma_tag(double gamma0) {
  // 2^-k presets get "g2m<k>", anything else its decimal digits.
  const double k = -std::log2(gamma0);
  if (k > 0 && std::abs(k - std::round(k)) < 1e-12) return "g2m" + std::to_string(std::lround(k));
  std::string s = fmt(gamma0);
  std::replace(s.begin(), s.end(), '.', 'p');
  return "g" + s;
}

std::vector<RunRecord> reproduce(const std::string& name, std::vector<double> defaults,
                                 const ReproduceOptions& options) {
  const std::vector<double> gammas = options.gamma0s.empty() ? defaults : options.gamma0s;
  std::vector<RunRecord> out;
  for (double g : gammas) {
    for (std::size_t s = 0; s < std::max<std::size_t>(1, options.seeds); ++s) {
      RunConfig c = preset(name);
      c.gamma0 = g;
      if (options.steps) c.steps = options.steps;
      c.seed = options.seed + s;
      if (!options.output_dir.empty()) c.output_dir = options.output_dir;
      RunRecord r = simulate(c, name + "_" + gamma_tag(g) + "_s" + std::to_string(c.seed),
                             "reproduce " + name);
      if (!options.output_dir.empty()) write_record(r, options.output_dir);
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

std::vector<RunRecord> reproduce_lorenz(const ReproduceOptions& options) {
  return reproduce("lorenz", {0.5, 0.25, 0.125, 0.0625, 0.03125}, options);
}

std::vector<RunRecord> reproduce_dof3(const ReproduceOptions& options) {
  return reproduce("dof3", {0.5, 0.25, 0.125, 0.0625}, options);
}

RunRecord reproduce_baselines(const BaselineOptions& options) {
  RunRecord record;
  record.name = "baselines";
  record.command = "reproduce baselines";
  struct Job {
    std::string model;
    std::string scheme;
    std::vector<int> exponents;
  };
  std::vector<Job> jobs;
  if (options.model == "lorenz" || options.model == "all") jobs.push_back({"lorenz", "euler", {6, 7, 8, 9, 10}});
  if (options.model == "dof3" || options.model == "all") {
    jobs.push_back({"dof3", "euler", {1, 2, 3, 4, 5, 6}});
    jobs.push_back({"dof3", "implicit", {3, 4, 5, 6}});
  }
  if (jobs.empty()) throw ConfigError("baselines model must be lorenz, dof3 or all");
  const auto start = std::chrono::steady_clock::now();
  for (const Job& job : jobs) {
    for (int k : job.exponents) {
      RunConfig c = preset(job.model);
      c.scheme.kind = job.scheme;
      c.scheme.h = std::ldexp(1.0, -k);
      c.mc_horizon = options.horizon;
      c.mc_paths = options.paths;
      c.mc_threads = options.threads;
      c.seed = options.seed;
      record.config = c;
      MonteCarloSummary s = monte_carlo(c);
      const std::string where = job.model + " " + job.scheme + " h = 2^-" + std::to_string(k);
      const std::size_t failed = s.exploded + s.model_failures + s.solver_failures;
      if (s.completed == 0) {
        record.checks.push_back({"WARN", "baseline", where + ": all " + std::to_string(s.paths) +
                                                         " paths failed (AllPathsExploded)"});
      } else if (failed > 0) {
        record.checks.push_back({"WARN", "baseline", where + ": " + std::to_string(failed) +
                                                         " of " + std::to_string(s.paths) +
                                                         " paths failed"});
      }
      record.monte_carlo.push_back(std::move(s));
    }
  }
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record.model = options.model;
  record.scheme = "baselines";
  if (!options.output_dir.empty()) {
    write_record(record, options.output_dir);
    std::ofstream(std::filesystem::path(options.output_dir) / "baselines_table.csv")
        << baseline_table_csv(record);
  }
  return record;
}

std::string baseline_table_csv(const RunRecord& record) {
  std::string out = "model,scheme,h,mean,std_error,completed,exploded,model_failures,solver_failures\n";
  for (const auto& s : record.monte_carlo) {
    out += s.model + "," + s.scheme + "," + fmt(s.h) + "," + (s.mean ? fmt(*s.mean) : "nan") + "," +
           (s.std_error ? fmt(*s.std_error) : "nan") + "," + std::to_string(s.completed) + "," +
           std::to_string(s.exploded) + "," + std::to_string(s.model_failures) + "," +
           std::to_string(s.solver_failures) + "\n";
  }
  return out;
}

}  // namespace adsde
