#include "adsde/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace adsde {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    // from_chars rejects "inf"; allow it explicitly.
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    // "1e6" style step counts are common on the command line.
    const double d = parse_double(key, s);
    if (d >= 0.0 && d < 1.8e19 && d == static_cast<double>(static_cast<std::uint64_t>(d))) {
      return static_cast<std::uint64_t>(d);
    }
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false, got '" + s + "'");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Get>
Field real(std::string key, Get member) {
  return {key,
          [member, key](RunConfig& c, std::string_view v) { member(c) = parse_double(key, v); },
          [member](const RunConfig& c) { return format_double(member(const_cast<RunConfig&>(c))); }};
}

template <class Get>
Field count(std::string key, Get member) {
  return {key,
          [member, key](RunConfig& c, std::string_view v) {
            member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(parse_unsigned(key, v));
          },
          [member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); }};
}

template <class Get>
Field text(std::string key, Get member) {
  return {key, [member](RunConfig& c, std::string_view v) { member(c) = trim(v); },
          [member](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); }};
}

template <class Get>
Field optional_real(std::string key, Get member) {
  return {key,
          [member, key](RunConfig& c, std::string_view v) {
            const std::string s = trim(v);
            if (s.empty()) {
              member(c).reset();
            } else {
              member(c) = parse_double(key, s);
            }
          },
          [member](const RunConfig& c) -> std::string {
            const auto& o = member(const_cast<RunConfig&>(c));
            return o ? format_double(*o) : std::string();
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(text("model.name", [](RunConfig& c) -> auto& { return c.model.name; }));
    f.push_back(text("model.lyapunov", [](RunConfig& c) -> auto& { return c.model.lyapunov; }));
    f.push_back(real("model.theta", [](RunConfig& c) -> auto& { return c.model.theta; }));
    f.push_back(real("model.sigma", [](RunConfig& c) -> auto& { return c.model.sigma; }));
    f.push_back(count("model.dim", [](RunConfig& c) -> auto& { return c.model.dim; }));
    f.push_back(real("model.damping", [](RunConfig& c) -> auto& { return c.model.damping; }));
    f.push_back(real("model.noise", [](RunConfig& c) -> auto& { return c.model.noise; }));
    f.push_back({"model.frozen_mass",
                 [](RunConfig& c, std::string_view v) {
                   c.model.frozen_mass = parse_bool("model.frozen_mass", v);
                 },
                 [](const RunConfig& c) { return std::string(c.model.frozen_mass ? "true" : "false"); }});
    f.push_back({"model.x0",
                 [](RunConfig& c, std::string_view v) {
                   c.model.x0.clear();
                   for (const auto& item : split_list(v)) {
                     c.model.x0.push_back(parse_double("model.x0", item));
                   }
                 },
                 [](const RunConfig& c) {
                   std::vector<std::string> items;
                   for (double x : c.model.x0) items.push_back(format_double(x));
                   return join(items);
                 }});
    f.push_back(text("scheme.kind", [](RunConfig& c) -> auto& { return c.scheme.kind; }));
    f.push_back(real("scheme.h", [](RunConfig& c) -> auto& { return c.scheme.h; }));
    f.push_back(real("scheme.tol", [](RunConfig& c) -> auto& { return c.scheme.tol; }));
    f.push_back(count("scheme.max_iters", [](RunConfig& c) -> auto& { return c.scheme.max_iters; }));
    f.push_back(real("scheme.damping", [](RunConfig& c) -> auto& { return c.scheme.damping; }));
    f.push_back(real("step.gamma0", [](RunConfig& c) -> auto& { return c.gamma0; }));
    f.push_back(real("step.exponent", [](RunConfig& c) -> auto& { return c.step_exponent; }));
    f.push_back(optional_real("weights.exponent", [](RunConfig& c) -> auto& { return c.weights_exponent; }));
    f.push_back(text("chi.kind", [](RunConfig& c) -> auto& { return c.chi.kind; }));
    f.push_back(real("chi.delta", [](RunConfig& c) -> auto& { return c.chi.delta; }));
    f.push_back(real("chi.zeta", [](RunConfig& c) -> auto& { return c.chi.zeta; }));
    f.push_back(real("chi.p", [](RunConfig& c) -> auto& { return c.chi.p; }));
    f.push_back(real("chi.value", [](RunConfig& c) -> auto& { return c.chi.value; }));
    f.push_back(count("chi.samples", [](RunConfig& c) -> auto& { return c.chi.samples; }));
    f.push_back(optional_real("chi.hessian_sup", [](RunConfig& c) -> auto& { return c.chi.hessian_sup; }));
    f.push_back(text("noise.kind", [](RunConfig& c) -> auto& { return c.noise_kind; }));
    f.push_back(count("noise.seed", [](RunConfig& c) -> auto& { return c.seed; }));
    f.push_back(count("run.steps", [](RunConfig& c) -> auto& { return c.steps; }));
    f.push_back(real("mc.T", [](RunConfig& c) -> auto& { return c.mc_horizon; }));
    f.push_back(count("mc.paths", [](RunConfig& c) -> auto& { return c.mc_paths; }));
    f.push_back(count("mc.threads", [](RunConfig& c) -> auto& { return c.mc_threads; }));
    f.push_back({"measure.functions",
                 [](RunConfig& c, std::string_view v) { c.functions = split_list(v); },
                 [](const RunConfig& c) { return join(c.functions); }});
    f.push_back(real("measure.lambda", [](RunConfig& c) -> auto& { return c.lambda; }));
    f.push_back(real("measure.a", [](RunConfig& c) -> auto& { return c.lyapunov_a; }));
    f.push_back(real("measure.bump_radius", [](RunConfig& c) -> auto& { return c.bump_radius; }));
    f.push_back(count("measure.cadence", [](RunConfig& c) -> auto& { return c.cadence; }));
    f.push_back(text("output.dir", [](RunConfig& c) -> auto& { return c.output_dir; }));
    f.push_back(real("validate.s", [](RunConfig& c) -> auto& { return c.validate_s; }));
    f.push_back(real("validate.tau", [](RunConfig& c) -> auto& { return c.validate_tau; }));
    f.push_back(real("validate.box", [](RunConfig& c) -> auto& { return c.validate_box; }));
    f.push_back(count("validate.samples", [](RunConfig& c) -> auto& { return c.validate_samples; }));
    return f;
  }();
  return table;
}

const Field& field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  field(trim(key)).set(config, value);
}

std::string get_config_value(const RunConfig& config, std::string_view key) {
  return field(key).get(config);
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(config));
  return out;
}

std::string emit_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_entries(config)) {
    // Unset optionals and empty lists are the defaults; leave them out.
    if (value.empty()) continue;
    out += key + " = " + value + "\n";
  }
  return out;
}

std::string resolve_output_dir(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("ADSDE_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "out";
}

}  // namespace adsde
