#pragma once

#include <map>
#include <string>

#include "fracflow/flow.hpp"

namespace fracflow {

/// Configuration problem; the message names the offending section/field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string name = "scenario";
  int n = 1, m = 1;
  std::vector<AxisGrid> axes;

  std::string metric_preset = "flat";  // flat | sphere-h | custom
  double sphere_radius = 1.0;
  std::vector<double> custom_h, custom_v;  // constant blocks, row-major

  std::string n_preset = "zero";  // zero | constant | polynomial
  std::vector<double> n_constant;  // n*m entries
  std::vector<double> n_linear;    // n*m*(n+m) entries for the polynomial preset

  double tau0 = 1.0;
  FlowConfig flow;

  std::string output_path = "flow-out.csv";
  std::string format = "csv";  // csv | json-lines
};

/// Parse the sectioned key-value config text; throws ConfigError with the
/// line or field in the message.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

/// Build the initial flow state from the presets. `for_flow` additionally
/// enforces the minimum axis resolution for flow runs.
FlowState build_initial_state(const ScenarioConfig& config, bool for_flow = true);

}  // namespace fracflow
