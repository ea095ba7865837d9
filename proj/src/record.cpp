#include "adsde/record.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace adsde {

namespace {

using nlohmann::json;

json binding_json(const BindingSummary& b) {
  json decades = json::object();
  for (const auto& [k, count] : b.decade_counts) decades[std::to_string(k)] = count;
  return {{"total_steps", b.total_steps},
          {"binding_count", b.binding_count},
          {"fraction", b.fraction},
          {"early_window", b.early_window},
          {"early_binding_count", b.early_binding_count},
          {"early_fraction", b.early_fraction},
          {"last_binding_index", b.last_binding_index},
          {"n1_estimate", b.n1_estimate},
          {"decade_counts", decades}};
}

json monte_carlo_json(const MonteCarloSummary& m) {
  json out = {{"model", m.model},
              {"scheme", m.scheme},
              {"h", m.h},
              {"T", m.horizon},
              {"steps", m.steps},
              {"paths", m.paths},
              {"completed", m.completed},
              {"exploded", m.exploded},
              {"model_failures", m.model_failures},
              {"solver_failures", m.solver_failures},
              {"mean", m.mean ? json(*m.mean) : json(nullptr)},
              {"std_error", m.std_error ? json(*m.std_error) : json(nullptr)}};
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::string mc_file_name(const RunRecord& record, std::size_t i) {
  return record.name + "_mc" + std::to_string(i) + ".csv";
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const RunRecord& r) {
  json config = json::object();
  for (const auto& [key, value] : config_entries(r.config)) config[key] = value;

  json snaps = json::array();
  for (const auto& s : r.snapshots) {
    snaps.push_back({{"n", s.n},
                     {"H_n", s.weight_sum},
                     {"values", s.values},
                     {"gamma_tilde", s.gamma_tilde},
                     {"binding_cum", s.binding_cum}});
  }
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"level", c.level}, {"check", c.check}, {"detail", c.detail}});
  }
  json mc = json::array();
  for (const auto& m : r.monte_carlo) mc.push_back(monte_carlo_json(m));

  json out = {{"name", r.name},
              {"command", r.command},
              {"version", kVersion},
              {"seed", r.config.seed},
              {"noise", r.config.noise_kind},
              {"model", r.model},
              {"scheme", r.scheme},
              {"chi", r.chi},
              {"config", config},
              {"labels", r.labels},
              {"final_values", r.final_values},
              {"generator_residuals", r.generator_residuals},
              {"overflow_counts", r.overflow_counts},
              {"initial_state", r.initial_state},
              {"final_state", r.final_state},
              {"steps_completed", r.steps_completed},
              {"noise_draws", r.noise_draws},
              {"wall_seconds", r.wall_seconds},
              {"checks", checks},
              {"snapshots", snaps},
              {"monte_carlo", mc}};
  out["binding"] = r.binding ? binding_json(*r.binding) : json(nullptr);
  if (r.tightness_verdict) {
    out["tightness"] = {{"verdict", *r.tightness_verdict}, {"sup", r.tightness_sup.value_or(0.0)}};
  }
  if (r.error) {
    out["error"] = {{"type", r.error->type},
                    {"message", r.error->message},
                    {"step", r.error->step ? json(*r.error->step) : json(nullptr)}};
  } else {
    out["error"] = nullptr;
  }
  return out;
}

std::string snapshot_csv(const RunRecord& r) {
  std::string out = "n,H_n";
  for (const auto& label : r.labels) out += ",nu_" + label;
  out += ",gamma_tilde,binding_cum\n";
  for (const auto& s : r.snapshots) {
    out += std::to_string(s.n) + "," + format_number(s.weight_sum);
    for (double v : s.values) out += "," + format_number(v);
    out += "," + format_number(s.gamma_tilde) + "," + std::to_string(s.binding_cum) + "\n";
  }
  return out;
}

std::string monte_carlo_csv(const MonteCarloSummary& m) {
  std::string out = "t,mean\n";
  for (std::size_t k = 0; k < m.series.size(); ++k) {
    out += format_number(static_cast<double>(k) * m.h) + "," + format_number(m.series[k]) + "\n";
  }
  return out;
}

std::string gnuplot_recipe(const RunRecord& r, const std::string& csv_file) {
  std::string out;
  out += "# gnuplot " + r.name + ".gp\n";
  out += "set datafile separator ','\n";
  out += "set key autotitle columnhead\n";
  out += "set xlabel 'n'\n";
  out += "set logscale x\n";
  out += "set terminal pngcairo size 900,600\n";
  out += "set output '" + r.name + ".png'\n";
  out += "plot";
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    out += (i ? ", \\\n    " : " ") + std::string("'") + csv_file + "' using 1:" +
           std::to_string(i + 3) + " with lines";
  }
  out += "\n";
  return out;
}

std::vector<std::string> write_record(const RunRecord& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  const fs::path base = fs::path(dir) / r.name;
  write_file(base.string() + ".json", to_json(r).dump(2) + "\n");
  written.push_back(base.string() + ".json");
  if (!r.labels.empty()) {
    const std::string csv = r.name + ".csv";
    write_file(fs::path(dir) / csv, snapshot_csv(r));
    write_file(base.string() + ".gp", gnuplot_recipe(r, csv));
    written.push_back((fs::path(dir) / csv).string());
    written.push_back(base.string() + ".gp");
  }
  for (std::size_t i = 0; i < r.monte_carlo.size(); ++i) {
    if (r.monte_carlo[i].series.empty()) continue;
    const fs::path p = fs::path(dir) / mc_file_name(r, i);
    write_file(p, monte_carlo_csv(r.monte_carlo[i]));
    written.push_back(p.string());
  }
  return written;
}

}  // namespace adsde
