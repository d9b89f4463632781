#pragma once

// Experiment configuration: a JSON document with nested sections. Every
// subcommand starts from its own defaults; a config file is merged on top and
// --override KEY=VALUE edits single dotted keys. Keys absent from the defaults
// are rejected.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "floqflow/hilbert.hpp"
#include "floqflow/oscillator.hpp"

namespace floqflow {

using Json = nlohmann::json;

std::string_view version();
std::string_view git_hash();

class ExperimentConfig {
 public:
  // Throws ConfigError for an unknown command.
  static ExperimentConfig defaults(std::string_view command);

  void merge_file(const std::filesystem::path& path);
  void merge(const Json& patch);
  // "flow.step=0.01"; the value is parsed as JSON, falling back to a string.
  void apply_override(std::string_view assignment);

  const std::string& command() const { return command_; }
  const Json& json() const { return doc_; }

  double number(std::string_view key) const;
  int integer(std::string_view key) const;
  bool boolean(std::string_view key) const;
  std::string string(std::string_view key) const;
  bool has(std::string_view key) const;

  // A list of numbers, or {"start", "stop", "step"} / {"start", "stop", "count", "log"}.
  // Throws ConfigError unless the result is non-empty and strictly increasing.
  std::vector<double> grid(std::string_view key) const;
  std::vector<double> numbers(std::string_view key) const;

  SpinChainParams chain() const;         // "model" section, A left at 0
  OscillatorParams oscillator() const;   // "oscillator" section, A left at 0

 private:
  const Json& at(std::string_view key) const;

  std::string command_;
  Json doc_;
};

std::vector<std::string> known_commands();

}  // namespace floqflow
