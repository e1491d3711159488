#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sisgoal/dataset.hpp"
#include "sisgoal/selection.hpp"

namespace sisgoal {

enum class Command { screen, fit, ate, simulate, bootstrap };

std::string to_string(Command command);
Command parse_command(const std::string& name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitNoConvergence = 2;

struct RunConfig {
  Command command = Command::ate;
  std::string input;
  ColumnRoles roles;
  std::optional<Method> method;  // simulate runs both when unset; others default to GOAL
  std::optional<Index> q;
  std::optional<double> cutoff;
  Index B = 1000;
  std::uint64_t seed = 1;
  std::string out = ".";
  bool intercept = true;
  double clip = kDefaultClip;
  double trim_lower = 0.0;
  double trim_upper = 100.0;
  int threads = 0;  // 0: SISGOAL_THREADS or the OpenMP default

  // simulate
  int scenario = 1;
  Index n = 300;
  Index p = 100;
  double rho = 0.0;
  double beta_A = 0.0;
  Index reps = 200;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::ordered_json& j);

/// Executes one command, writing its files and manifest.json under
/// config.out. Diagnostics go to `err`. Returns 0, 1 (data error) or 2
/// (no candidate converged).
int run(const RunConfig& config, std::ostream& err);

/// Argument parsing plus run(). `replay MANIFEST` reruns a manifest's config.
int cli_main(int argc, const char* const* argv);

}  // namespace sisgoal
