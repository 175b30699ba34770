#pragma once

#include <optional>
#include <string>
#include <vector>

#include "manisync/dynamics.hpp"
#include "manisync/scenario.hpp"

namespace manisync {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitAbort = 2 };

struct RunOptions {
  std::optional<std::string> output_dir;
  bool write_files = true;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string output_dir;
  /// summary.json contents.
  std::string summary_json;
  Trajectory trajectory;
};

/// Integrates the scenario and writes metrics.csv, final_state.json and
/// summary.json. Throws Error (validation) before any integration happens.
RunOutcome run_scenario(const Scenario& s, const RunOptions& opts = {});

std::string metrics_csv(const Trajectory& t);
std::string final_state_json(const Scenario& s, const SwarmState& state, double time);

struct Preset {
  std::string name;
  std::string text;
};

const std::vector<Preset>& presets();
/// Throws Error(InvalidArgument) for an unknown name.
Scenario load_preset(const std::string& name);

}  // namespace manisync
