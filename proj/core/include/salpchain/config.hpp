#pragma once

#include "salpchain/scenario.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace salpchain {

inline constexpr int kConfigSchemaVersion = 1;

/// Malformed or invalid scenario configuration. `field` is a dotted JSON path
/// (e.g. "chain.masses[1]"); `line` is set for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

Scenario scenarioFromJson(const std::string& text);
std::string scenarioToJson(const Scenario& scenario);
Scenario loadScenario(const std::filesystem::path& path);

}  // namespace salpchain
