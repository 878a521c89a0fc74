#pragma once

#include <string>
#include <vector>

#include "pushsim/rollout.hpp"

namespace pushsim {

/// Writes batch results under `out_dir`.  Formats: "csv" (trajectories.csv,
/// final_poses.csv, rollouts.csv), "json" (histogram.json with its binning,
/// summary.json), "svg" (trajectories.svg).  An empty format list writes
/// nothing.  Output is byte-stable for identical inputs: floats are printed
/// with shortest round-trip formatting and record order is the batch order.
/// Throws IoError.
void emit_outputs(const BatchResult& batch, const std::vector<std::string>& formats,
                  const std::string& out_dir);

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<int> counts;
};

/// 50 uniform bins over [min, max] of the data; a degenerate range collapses
/// to one middle bin.
Histogram make_histogram(const std::vector<double>& data, int bins = 50);

}  // namespace pushsim
