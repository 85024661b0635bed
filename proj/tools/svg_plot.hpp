#pragma once

#include <string>
#include <vector>

#include "gfmlab/trace.hpp"

namespace gfm::cli {

struct PlotOptions {
    int width = 800;
    int height = 450;
    std::string title;
    /// Dashed horizontal reference lines, e.g. a SoC limit.
    std::vector<double> hlines;
};

/// Standalone SVG line chart of the named trace columns against time. The
/// y-axis always includes zero. Byte-identical output for identical input.
/// Throws std::out_of_range for an unknown column.
std::string render_svg(const Trace& trace, const std::vector<std::string>& columns, const PlotOptions& options = {});

/// Evenly spaced "nice" tick values (1, 2, 5 x 10^k) covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target_count = 6);

}  // namespace gfm::cli
