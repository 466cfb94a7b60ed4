#pragma once

// Self-contained SVG plot of a verification run: flowpipe boxes as outlined
// rectangles, simulated trajectories as polylines, the goal box highlighted.
// Output is deterministic for identical input.

#include <string>
#include <utility>
#include <vector>

#include "polyreach/flowpipe.hpp"
#include "polyreach/sim.hpp"

namespace polyreach {

std::string emit_svg(const std::vector<FlowpipeSegment>& flowpipes,
                     const std::vector<Trajectory>& trajectories, const Box& goal,
                     std::pair<std::size_t, std::size_t> dims,
                     const std::string& x_label = "x1", const std::string& y_label = "x2");

}  // namespace polyreach
