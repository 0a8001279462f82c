#pragma once

#include <span>
#include <string>

#include "movavg/frame.hpp"

namespace movavg {

struct ChartOptions {
  int width = 960;
  int height = 540;
  std::string title;
};

/// Renders price marks per `config.plot_type`, one polyline group per
/// indicator and a legend. Output depends only on the arguments.
///
/// An explicit viewport restricts the rows to [x_min, x_max] and fixes the
/// value axis; marks outside it are clipped.
std::string render_svg(const TimeSeriesFrame& frame,
                       std::span<const IndicatorSeries> indicators,
                       const PlotConfig& config, const ChartOptions& options = {});

}  // namespace movavg
