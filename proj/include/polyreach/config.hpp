#pragma once

// System/config ingestion (JSON) and result emission (JSON/CSV).

#include <string>
#include <vector>

#include "polyreach/dynamics.hpp"
#include "polyreach/flowpipe.hpp"
#include "polyreach/sim.hpp"

namespace polyreach {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the system description; throws SchemaError with a JSON-path
// diagnostic on violations. Recognized keys: state_vars, dynamics,
// control_step, steps, init, goal, control_dim (optional, default 1), plus
// optional analysis defaults (degree, delta_bar, tm_order, substeps, mode,
// width_cap).
SystemSpec load_system(const std::string& json_text);
SystemSpec load_system_file(const std::string& path);

struct RunConfig {
  std::string model_path;
  std::string system_path;
  std::vector<int> degree;     // empty = per-dimension default of 2
  double delta_bar = 0.01;
  int tm_order = 6;
  int substeps = 10;
  std::string mode = "bernstein";
  double width_cap = 100.0;
  std::string out_flowpipes;
  std::string out_traj;
  std::string out_svg;
  int traj_count = 100;
  unsigned seed = 1;
  bool goal_every_step = false;

  void validate() const;  // throws on non-positive numeric parameters
};

// Fills unset analysis fields of `cfg` from optional keys in the system
// JSON (CLI flags take precedence, JSON over defaults).
void apply_system_defaults(RunConfig& cfg, const std::string& json_text);

std::string verdict_to_json(const Verdict& v);
std::string flowpipes_to_json(const std::vector<FlowpipeSegment>& fps);
std::string trajectories_to_csv(const std::vector<Trajectory>& trs,
                                const std::vector<std::string>& state_vars);

}  // namespace polyreach
