#include "floqflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "floqflow/errors.hpp"

#ifndef FLOQFLOW_GIT_HASH
#define FLOQFLOW_GIT_HASH "unknown"
#endif

namespace floqflow {

std::string_view version() { return "0.1.0"; }
std::string_view git_hash() { return FLOQFLOW_GIT_HASH; }

namespace {

Json model_section(int L, double omega) {
  return {{"L", L},       {"J", 1.0},        {"J2", 0.2},
          {"Bx", 0.0},    {"Omega", omega},  {"boundary", "periodic"}};
}

Json defaults_for(std::string_view command) {
  if (command == "oscillator") {
    return {{"oscillator", {{"omega0", 0.0}, {"omega1", 1.0}, {"Omega", 1.0}, {"step_omega", 0.01}}},
            {"scan",
             {{"ratios", {{"start", 0.05}, {"stop", 10.0}, {"step", 0.05}}},
              {"trajectory_ratios", {2.404826, 5.520078, 8.653728}},
              {"trajectory_stride", 10}}},
            {"threads", 1},
            {"seed", 0}};
  }
  if (command == "scan-freezing") {
    return {{"model", model_section(8, 10.0)},
            {"flow", {{"step", 0.005}, {"lambda_c", 1.0}}},
            {"scan",
             {{"ratios", {{"start", 0.2}, {"stop", 2.4}, {"step", 0.05}}},
              {"Bx_values", Json::array()},
              {"refine", true},
              {"refine_tolerance", 1e-3},
              {"save_trajectories", true}}},
            {"threads", 1},
            {"seed", 0}};
  }
  if (command == "frequency-scaling") {
    return {{"model", model_section(8, 10.0)},
            {"flow", {{"step_omega", 0.05}, {"lambda_c", 1.0}}},
            {"scan",
             {{"omegas", {10.0, 14.142135623730951, 20.0, 28.284271247461902, 40.0}},
              {"ratio_lo", 0.55},
              {"ratio_hi", 0.65},
              {"refine_tolerance", 1e-4}}},
            {"threads", 1},
            {"seed", 0}};
  }
  if (command == "thermalize") {
    return {{"model", model_section(10, 2.0)},
            {"flow", {{"step", 0.01}, {"lambda_max", 20.0}, {"record_stride", 1}}},
            {"thermalize",
             {{"J2_values", {0.0, 0.2, 0.4}},
              {"ratios", {0.601, 0.3}},
              {"stop_after_minimum", true},
              {"post_minimum_lambda", 1.0},
              {"minimum_prominence", 1e3},
              {"fit_instantons", false}}},
            {"threads", 1},
            {"seed", 0}};
  }
  if (command == "dynamics") {
    return {{"model", model_section(10, 10.0)},
            {"flow", {{"step", 1e-3}, {"lambda_c", 1.0}}},
            {"dynamics",
             {{"ratios", {0.601, 0.3}},
              {"n_periods", 100},
              {"substeps", 0},
              {"scheme", "split4"},
              {"histogram", true},
              {"series", true}}},
            {"threads", 1},
            {"seed", 0}};
  }
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

std::vector<std::string> split_key(std::string_view key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty()) throw ConfigError("malformed key '" + std::string(key) + "'");
  return parts;
}

// Rejects keys of `patch` that do not exist in `reference`.
void check_keys(const Json& reference, const Json& patch, const std::string& prefix) {
  if (!patch.is_object()) return;
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!reference.is_object() || !reference.contains(it.key()))
      throw ConfigError("unknown config key '" + path + "'");
    const Json& ref = reference.at(it.key());
    // Grid specs may switch between list and range objects.
    if (ref.is_object() && it.value().is_object() && !ref.contains("start"))
      check_keys(ref, it.value(), path);
  }
}

}  // namespace

std::vector<std::string> known_commands() {
  return {"oscillator", "scan-freezing", "frequency-scaling", "thermalize", "dynamics"};
}

ExperimentConfig ExperimentConfig::defaults(std::string_view command) {
  ExperimentConfig c;
  c.command_ = std::string(command);
  c.doc_ = defaults_for(command);
  return c;
}

void ExperimentConfig::merge(const Json& patch) {
  if (!patch.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(doc_, patch, "");
  doc_.merge_patch(patch);
}

void ExperimentConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  Json patch;
  try {
    patch = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  merge(patch);
}

void ExperimentConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override must have the form KEY=VALUE (got '" + std::string(assignment) + "')");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  const auto parts = split_key(key);
  Json patch = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
  check_keys(doc_, patch, "");
  // Assign instead of merge_patch so that null and objects replace wholesale.
  Json* node = &doc_;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  (*node)[parts.back()] = value;
}

const Json& ExperimentConfig::at(std::string_view key) const {
  const Json* node = &doc_;
  for (const auto& part : split_key(key)) {
    if (!node->is_object() || !node->contains(part))
      throw ConfigError("missing config key '" + std::string(key) + "'");
    node = &node->at(part);
  }
  return *node;
}

bool ExperimentConfig::has(std::string_view key) const {
  try {
    at(key);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

double ExperimentConfig::number(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_number()) throw ConfigError("config key '" + std::string(key) + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("config key '" + std::string(key) + "' must be finite");
  return d;
}

int ExperimentConfig::integer(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_number_integer())
    throw ConfigError("config key '" + std::string(key) + "' must be an integer");
  return v.get<int>();
}

bool ExperimentConfig::boolean(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_boolean()) throw ConfigError("config key '" + std::string(key) + "' must be a boolean");
  return v.get<bool>();
}

std::string ExperimentConfig::string(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_string()) throw ConfigError("config key '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> ExperimentConfig::numbers(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_array()) throw ConfigError("config key '" + std::string(key) + "' must be a list");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number())
      throw ConfigError("config key '" + std::string(key) + "' must hold numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> ExperimentConfig::grid(std::string_view key) const {
  const Json& v = at(key);
  const std::string name(key);
  std::vector<double> out;
  if (v.is_array()) {
    out = numbers(key);
  } else if (v.is_object() && v.contains("start") && v.contains("stop")) {
    const double start = v.at("start").get<double>();
    const double stop = v.at("stop").get<double>();
    if (v.contains("step")) {
      const double step = v.at("step").get<double>();
      if (!(step > 0.0)) throw ConfigError("grid '" + name + "': step must be positive");
      const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
      for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    } else if (v.contains("count")) {
      const int count = v.at("count").get<int>();
      const bool log = v.value("log", false);
      if (count < 1) throw ConfigError("grid '" + name + "': count must be >= 1");
      if (log && !(start > 0.0 && stop > 0.0))
        throw ConfigError("grid '" + name + "': log grid needs positive bounds");
      for (int i = 0; i < count; ++i) {
        const double w = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(log ? std::exp(std::log(start) + w * (std::log(stop) - std::log(start)))
                          : start + w * (stop - start));
      }
    } else {
      throw ConfigError("grid '" + name + "' needs 'step' or 'count'");
    }
  } else {
    throw ConfigError("config key '" + name + "' must be a list or a range object");
  }
  if (out.empty()) throw ConfigError("grid '" + name + "' is empty");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1]))
      throw ConfigError("grid '" + name + "' must be strictly increasing");
  return out;
}

SpinChainParams ExperimentConfig::chain() const {
  SpinChainParams p;
  p.L = integer("model.L");
  p.J = number("model.J");
  p.J2 = number("model.J2");
  p.Bx = number("model.Bx");
  p.Omega = number("model.Omega");
  const std::string b = string("model.boundary");
  const auto boundary = parse_boundary(b);
  if (!boundary) throw ConfigError("model.boundary must be 'periodic' or 'open' (got '" + b + "')");
  p.boundary = *boundary;
  try {
    p.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  return p;
}

OscillatorParams ExperimentConfig::oscillator() const {
  OscillatorParams p;
  p.omega0 = number("oscillator.omega0");
  p.omega1 = number("oscillator.omega1");
  p.Omega = number("oscillator.Omega");
  p.A = 0.0;
  try {
    p.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("oscillator: ") + e.what());
  }
  return p;
}

}  // namespace floqflow
