#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hoplab/geometry.hpp"
#include "hoplab/pathloss.hpp"

namespace hoplab {

struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(const std::string& what, std::string key_)
      : std::runtime_error(what + ": " + key_), key(std::move(key_)) {}
};

/// Flat key = value experiment configuration. Unknown keys are rejected at
/// parse time; required keys are checked per experiment before running.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  /// Canonical serialization; parse(serialize()) round-trips exactly.
  std::string serialize() const;

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& raw(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  std::string text_or(const std::string& key,
                      const std::string& fallback) const;
  std::vector<double> number_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  /// The geometry/path-loss block shared by all experiments.
  NetworkGeometry geometry() const;
  PathLossModel pathloss() const;

  /// Experiment name; validates the per-experiment required keys.
  std::string experiment() const;
  void validate_for(const std::string& experiment) const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace hoplab
