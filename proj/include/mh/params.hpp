#pragma once

#include <stdexcept>
#include <string>

#include "mh/plant.hpp"

namespace mh {

/// Malformed or missing configuration; `field` is a JSON-pointer-like path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field(field) {}
  std::string field;
};

/// Reads a parameter file. Every leaf is an object {"value": ..., "source": "..."}.
PlantParams load_params(const std::string& path);
PlantParams parse_params(const std::string& json_text, const std::string& origin = "<string>");

/// Directory holding the shipped parameter and scenario files.
std::string data_dir();
std::string default_params_path();

}  // namespace mh
