#pragma once

// Static SVG figures of trace columns: stacked panels sharing the time axis.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "frtsim/trace.hpp"

namespace frtsim {

struct PlotPanel {
    std::string title;
    std::vector<std::string> columns;
};

struct PlotOptions {
    std::string title;
    double width = 960.0;
    double panel_height = 220.0;
    double t_begin = -1.0;  // negative: trace start
    double t_end = -1.0;    // negative: trace end
    std::vector<EventMarker> markers;  // drawn as dashed verticals
};

/// Voltage magnitudes, active powers, reactive powers and island frequency.
std::vector<PlotPanel> default_panels(const Trace& trace);

/// Throws ArgumentError for unknown columns or an empty panel list.
void write_svg(std::ostream& os, const Trace& trace, std::span<const PlotPanel> panels, const PlotOptions& options);

}  // namespace frtsim
