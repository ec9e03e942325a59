#pragma once

#include <string>
#include <vector>

#include "unigo/dynamics.hpp"
#include "unigo/train.hpp"

namespace unigo {

// Self-contained SVG line chart of every node's opinion over time.
void save_trajectory_svg(const Trajectory& traj, const std::string& path,
                         const std::string& title = "opinion trajectories");

// Training curves: train loss per step plus validation MSE where recorded.
void save_history_svg(const std::vector<HistoryRow>& history, const std::string& path,
                      const std::string& title = "training history");

}  // namespace unigo
