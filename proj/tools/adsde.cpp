#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adsde/experiments.hpp"

namespace {

using namespace adsde;

constexpr int kOk = 0;
constexpr int kSimulationError = 1;
constexpr int kValidationFail = 2;
constexpr int kBadConfig = 3;

// Short flags from the documented command lines, mapped to config keys.
const std::vector<std::pair<std::string, std::string>> kAliases = {
    {"model", "model.name"},   {"scheme", "scheme.kind"}, {"h", "scheme.h"},
    {"gamma0", "step.gamma0"}, {"steps", "run.steps"},    {"seed", "noise.seed"},
    {"noise", "noise.kind"},   {"chi", "chi.kind"},       {"T", "mc.T"},
    {"paths", "mc.paths"},     {"threads", "mc.threads"}, {"functions", "measure.functions"},
    {"output", "output.dir"},
};

struct ConfigFlags {
  std::string preset;
  std::string file;
  std::string name;
  std::vector<std::string> sets;
  std::map<std::string, std::string> keys;
  std::map<std::string, std::string> aliases;
};

void add_config_flags(CLI::App* app, ConfigFlags& flags) {
  // --h is the step size, so help is long-form only here.
  app->set_help_flag("--help", "Print this help message and exit");
  app->add_option("--preset", flags.preset, "Start from a named preset (lorenz, dof3, ou, langevin)");
  app->add_option("--config", flags.file, "key = value configuration file");
  app->add_option("--name", flags.name, "Record name (file stem)");
  app->add_option("--set", flags.sets, "Override as key=value (repeatable)");
  for (const auto& key : config_keys()) {
    app->add_option("--" + key, flags.keys[key])->group("Config keys");
  }
  for (const auto& [alias, key] : kAliases) {
    app->add_option("--" + alias, flags.aliases[alias], "Same as --" + key)->group("Shortcuts");
  }
}

// Preset, then file, then dotted flags, then shortcuts, then --set.
RunConfig resolve_config(const CLI::App* app, const ConfigFlags& flags) {
  RunConfig config = flags.preset.empty() ? RunConfig{} : preset(flags.preset);
  if (!flags.file.empty()) config = load_config(flags.file, config);
  for (const auto& key : config_keys()) {
    if (app->count("--" + key)) set_config_value(config, key, flags.keys.at(key));
  }
  for (const auto& [alias, key] : kAliases) {
    if (app->count("--" + alias)) set_config_value(config, key, flags.aliases.at(alias));
  }
  for (const auto& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

void print_checks(const std::vector<CheckLine>& lines) {
  for (const auto& l : lines) std::cout << l.level << " " << l.check << ": " << l.detail << "\n";
}

void print_run(const RunRecord& r) {
  std::cout << r.name << ": " << r.model << " / " << r.scheme;
  if (!r.chi.empty()) std::cout << " / chi " << r.chi;
  std::cout << ", " << r.steps_completed << " steps in " << format_number(r.wall_seconds) << " s\n";
  for (const auto& [label, v] : r.final_values) {
    std::cout << "  nu(" << label << ") = " << format_number(v);
    if (auto it = r.generator_residuals.find(label); it != r.generator_residuals.end()) {
      std::cout << ", nu(A " << label << ") = " << format_number(it->second);
    }
    if (auto it = r.overflow_counts.find(label); it != r.overflow_counts.end() && it->second > 0) {
      std::cout << ", " << it->second << " overflowed samples skipped";
    }
    std::cout << "\n";
  }
  if (r.binding) {
    const auto& b = *r.binding;
    std::cout << "  binding: " << b.binding_count << " of " << b.total_steps << " ("
              << format_number(100.0 * b.fraction) << "%), first " << b.early_window << ": "
              << b.early_binding_count << ", last at n = " << b.last_binding_index << "\n";
  }
  if (r.tightness_verdict) {
    std::cout << "  tightness of nu(W): " << *r.tightness_verdict << " (sup "
              << format_number(r.tightness_sup.value_or(0.0)) << ")\n";
  }
  if (r.error) {
    std::cout << "  error: " << r.error->type << ": " << r.error->message;
    if (r.error->step) std::cout << " at step " << *r.error->step;
    std::cout << "\n";
  }
}

void print_monte_carlo(const MonteCarloSummary& s) {
  std::cout << s.model << " " << s.scheme << " h = " << format_number(s.h) << ": ";
  if (s.mean) {
    std::cout << "E[f] = " << format_number(*s.mean) << " +- " << format_number(*s.std_error);
  } else {
    std::cout << "AllPathsExploded";
  }
  std::cout << " (" << s.completed << "/" << s.paths << " completed, " << s.exploded << " exploded, "
            << s.model_failures << " model failures, " << s.solver_failures << " solver failures)\n";
}

// A record for runs that never started, so every invocation leaves one behind.
void write_config_error(const std::string& name, const std::string& command, const std::string& what,
                        const RunConfig& config) {
  RunRecord r;
  r.name = name;
  r.command = command;
  r.config = config;
  r.error = ErrorInfo{"ConfigError", what, std::nullopt};
  try {
    write_record(r, resolve_output_dir(config));
  } catch (const std::exception& e) {
    std::cerr << "could not write record: " << e.what() << "\n";
  }
}

std::string record_name(const ConfigFlags& flags, const std::string& fallback) {
  return flags.name.empty() ? fallback : flags.name;
}

int run_simulate(const CLI::App* app, const ConfigFlags& flags) {
  RunConfig config;
  const std::string name = record_name(flags, "simulate");
  RunRecord record;
  try {
    config = resolve_config(app, flags);
    record = simulate(config, name, "simulate");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_config_error(name, "simulate", e.what(), config);
    return kBadConfig;
  }
  print_checks(record.checks);
  print_run(record);
  for (const auto& path : write_record(record, resolve_output_dir(config))) std::cout << "wrote " << path << "\n";
  return record.failed() ? kSimulationError : kOk;
}

int run_montecarlo(const CLI::App* app, const ConfigFlags& flags) {
  RunConfig config;
  const std::string name = record_name(flags, "montecarlo");
  RunRecord record;
  try {
    config = resolve_config(app, flags);
    record = monte_carlo_record(config, name);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_config_error(name, "montecarlo", e.what(), config);
    return kBadConfig;
  }
  for (const auto& s : record.monte_carlo) print_monte_carlo(s);
  for (const auto& path : write_record(record, resolve_output_dir(config))) std::cout << "wrote " << path << "\n";
  return record.failed() ? kSimulationError : kOk;
}

int run_validate(const CLI::App* app, const ConfigFlags& flags) {
  RunConfig config;
  const std::string name = record_name(flags, "validate");
  RunRecord record;
  try {
    config = resolve_config(app, flags);
    record.name = name;
    record.command = "validate";
    record.config = config;
    record.checks = validate(config);
    record.model = build_model(config.model).sde.label;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_config_error(name, "validate", e.what(), config);
    return kBadConfig;
  }
  print_checks(record.checks);
  write_record(record, resolve_output_dir(config));
  return any_fail(record.checks) ? kValidationFail : kOk;
}

struct ReproduceFlags {
  std::string target;
  std::vector<double> gamma0s;
  std::size_t steps = 0;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  std::string model = "all";
  double horizon = 5.0;
  std::size_t paths = 10000;
  std::size_t threads = 0;
  std::string output;
};

int run_reproduce(const ReproduceFlags& flags) {
  RunConfig where;
  where.output_dir = flags.output;
  const std::string dir = resolve_output_dir(where);
  try {
    if (flags.target == "baselines") {
      const RunRecord record = reproduce_baselines(BaselineOptions{
          flags.model, flags.horizon, flags.paths, flags.seed, flags.threads, dir});
      for (const auto& s : record.monte_carlo) print_monte_carlo(s);
      std::cout << "wrote " << dir << "/baselines.json and baselines_table.csv\n";
      return kOk;
    }
    const ReproduceOptions options{flags.gamma0s, flags.steps, flags.seed, flags.seeds, dir};
    const auto records = flags.target == "lorenz" ? reproduce_lorenz(options) : reproduce_dof3(options);
    bool failed = false;
    for (const auto& r : records) {
      print_run(r);
      failed = failed || r.failed();
    }
    std::cout << "wrote " << records.size() << " records to " << dir << "\n";
    return failed ? kSimulationError : kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_config_error("reproduce_" + flags.target, "reproduce " + flags.target, e.what(), where);
    return kBadConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Euler schemes for invariant measures of dissipative SDEs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", adsde::kVersion);

  ConfigFlags sim_flags, mc_flags, val_flags;
  auto* sim = app.add_subcommand("simulate", "One trajectory with running empirical measures");
  add_config_flags(sim, sim_flags);
  auto* mc = app.add_subcommand("montecarlo", "E[f(X_T)] with a constant-step scheme");
  add_config_flags(mc, mc_flags);
  auto* val = app.add_subcommand("validate", "Check the hypotheses for a configuration");
  add_config_flags(val, val_flags);

  ReproduceFlags rep_flags;
  auto* rep = app.add_subcommand("reproduce", "Run a named experiment");
  rep->add_option("target", rep_flags.target, "lorenz, dof3 or baselines")
      ->required()
      ->check(CLI::IsMember({"lorenz", "dof3", "baselines"}));
  rep->add_option("--gamma0", rep_flags.gamma0s, "gamma0 values (default: the preset list)");
  rep->add_option("--steps", rep_flags.steps, "Steps per run (default: the preset's)");
  rep->add_option("--seed", rep_flags.seed, "First seed");
  rep->add_option("--seeds", rep_flags.seeds, "Number of consecutive seeds per gamma0");
  rep->add_option("--model", rep_flags.model, "Baselines: lorenz, dof3 or all");
  rep->add_option("--T", rep_flags.horizon, "Baselines: horizon");
  rep->add_option("--paths", rep_flags.paths, "Baselines: paths per h");
  rep->add_option("--threads", rep_flags.threads, "Baselines: worker threads (0 = all cores)");
  rep->add_option("--output", rep_flags.output, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  try {
    if (*sim) return run_simulate(sim, sim_flags);
    if (*mc) return run_montecarlo(mc, mc_flags);
    if (*val) return run_validate(val, val_flags);
    return run_reproduce(rep_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSimulationError;
  }
}
