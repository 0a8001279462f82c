#include "movavg/chart.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include <fmt/format.h>

namespace movavg {

namespace {

constexpr std::array<std::string_view, 6> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
constexpr std::string_view kUp = "#26a69a";
constexpr std::string_view kDown = "#ef5350";
constexpr std::string_view kPrice = "#333333";

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Geometry {
  double left, top, width, height;
  std::size_t count;
  double y_min, y_max;

  double x(std::size_t i) const {
    return left + (static_cast<double>(i) + 0.5) * (width / static_cast<double>(count));
  }
  double y(double v) const {
    return top + height - (v - y_min) / (y_max - y_min) * height;
  }
  double slot() const { return width / static_cast<double>(count); }
};

// Emits one polyline per run of defined values.
void polylines(std::string& svg, const Geometry& g, std::span<const double> values,
               std::size_t first, std::size_t last, std::string_view attrs) {
  std::string points;
  const auto flush = [&] {
    if (!points.empty()) {
      svg += fmt::format("<polyline points=\"{}\" {}/>\n", points, attrs);
      points.clear();
    }
  };
  for (std::size_t r = first; r < last; ++r) {
    if (!is_defined(values[r])) {
      flush();
      continue;
    }
    if (!points.empty()) points.push_back(' ');
    points += fmt::format("{:.2f},{:.2f}", g.x(r - first), g.y(values[r]));
  }
  flush();
}

}  // namespace

std::string render_svg(const TimeSeriesFrame& frame,
                       std::span<const IndicatorSeries> indicators,
                       const PlotConfig& config, const ChartOptions& options) {
  config.validate();
  const auto dates = frame.dates();

  std::size_t first = 0;
  std::size_t last = dates.size();
  if (config.viewport) {
    first = static_cast<std::size_t>(
        std::lower_bound(dates.begin(), dates.end(), config.viewport->x_min) -
        dates.begin());
    last = static_cast<std::size_t>(
        std::upper_bound(dates.begin(), dates.end(), config.viewport->x_max) -
        dates.begin());
    last = std::max(first, last);
  }
  const std::size_t count = last - first;

  const bool bars = config.plot_type != PlotType::line;
  const auto close = frame.has_column(kClose) ? frame.column(kClose)
                                              : std::span<const double>{};
  const auto open = frame.has_column(kOpen) ? frame.column(kOpen) : close;
  const auto high = frame.has_column(kHigh) ? frame.column(kHigh) : close;
  const auto low = frame.has_column(kLow) ? frame.column(kLow) : close;

  double y_min = 0.0;
  double y_max = 1.0;
  if (config.viewport) {
    y_min = config.viewport->y_min;
    y_max = config.viewport->y_max;
  } else {
    std::optional<double> lo, hi;
    const auto see = [&](double v) {
      if (!is_defined(v)) return;
      lo = lo ? std::min(*lo, v) : v;
      hi = hi ? std::max(*hi, v) : v;
    };
    for (std::size_t r = first; r < last && !close.empty(); ++r) {
      see(bars ? low[r] : close[r]);
      see(bars ? high[r] : close[r]);
    }
    for (const auto& series : indicators) {
      for (std::size_t r = first; r < last && r < series.values.size(); ++r) {
        see(series.values[r]);
      }
    }
    if (lo && hi) {
      const double pad = *hi > *lo ? (*hi - *lo) * 0.05 : 1.0;
      y_min = *lo - pad;
      y_max = *hi + pad;
    }
  }

  const double w = options.width;
  const double h = options.height;
  const Geometry g{kLeft, kTop, w - kLeft - kRight, h - kTop - kBottom,
                   std::max<std::size_t>(count, 1), y_min, y_max};

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      options.width, options.height);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
                     options.width, options.height);
  svg += fmt::format(
      "<defs><clipPath id=\"plot-area\"><rect x=\"{:.2f}\" y=\"{:.2f}\" "
      "width=\"{:.2f}\" height=\"{:.2f}\"/></clipPath></defs>\n",
      g.left, g.top, g.width, g.height);
  if (!options.title.empty()) {
    svg += fmt::format("<text class=\"title\" x=\"{:.2f}\" y=\"24\" "
                       "font-size=\"16\">{}</text>\n",
                       g.left, escape(options.title));
  }

  // Axes with five value ticks and up to six date labels.
  svg += "<g class=\"axes\" stroke=\"#888888\" fill=\"#444444\">\n";
  svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" "
                     "y2=\"{2:.2f}\"/>\n",
                     g.left, g.top, g.top + g.height);
  svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" "
                     "y2=\"{1:.2f}\"/>\n",
                     g.left, g.top + g.height, g.left + g.width);
  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + (y_max - y_min) * t / 4.0;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" "
                       "stroke=\"none\">{:.2f}</text>\n",
                       g.left - 6.0, g.y(v) + 4.0, v);
  }
  if (count > 0) {
    const std::size_t labels = std::min<std::size_t>(count, 6);
    for (std::size_t k = 0; k < labels; ++k) {
      const std::size_t i = labels == 1 ? 0 : k * (count - 1) / (labels - 1);
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" "
                         "stroke=\"none\">{}</text>\n",
                         g.x(i), g.top + g.height + 18.0,
                         format_iso(dates[first + i]));
    }
  }
  svg += "</g>\n";

  svg += fmt::format("<g class=\"price\" data-type=\"{}\" clip-path=\"url(#plot-area)\">\n",
                     to_string(config.plot_type));
  if (count > 0 && !close.empty()) {
    if (config.plot_type == PlotType::line) {
      polylines(svg, g, close, first, last,
                fmt::format("fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"", kPrice));
    } else {
      const double body = std::max(1.0, g.slot() * 0.6);
      for (std::size_t r = first; r < last; ++r) {
        if (!is_defined(open[r]) || !is_defined(high[r]) || !is_defined(low[r]) ||
            !is_defined(close[r])) {
          continue;
        }
        const double x = g.x(r - first);
        const auto color = close[r] >= open[r] ? kUp : kDown;
        if (config.plot_type == PlotType::candle) {
          const double top = g.y(std::max(open[r], close[r]));
          const double bottom = g.y(std::min(open[r], close[r]));
          svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" "
                             "y2=\"{2:.2f}\" stroke=\"{3}\"/>\n",
                             x, g.y(high[r]), g.y(low[r]), color);
          svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" "
                             "height=\"{:.2f}\" fill=\"{}\"/>\n",
                             x - body / 2.0, top, body, std::max(1.0, bottom - top),
                             color);
        } else {
          svg += fmt::format("<path d=\"M{0:.2f},{1:.2f}V{2:.2f}M{3:.2f},{4:.2f}"
                             "H{0:.2f}M{0:.2f},{5:.2f}H{6:.2f}\" stroke=\"{7}\" "
                             "fill=\"none\"/>\n",
                             x, g.y(high[r]), g.y(low[r]), x - body / 2.0,
                             g.y(open[r]), g.y(close[r]), x + body / 2.0, color);
        }
      }
    }
  }
  svg += "</g>\n";

  for (std::size_t k = 0; k < indicators.size(); ++k) {
    const auto& series = indicators[k];
    const auto color = kPalette[k % kPalette.size()];
    svg += fmt::format("<g class=\"indicator\" data-label=\"{}\" "
                       "clip-path=\"url(#plot-area)\">\n",
                       escape(series.spec.label()));
    if (series.values.size() == dates.size()) {
      polylines(svg, g, series.values, first, last,
                fmt::format("fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"", color));
    }
    svg += "</g>\n";
  }

  svg += "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < indicators.size(); ++k) {
    const double y = g.top + 10.0 + 18.0 * static_cast<double>(k);
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"3\" "
                       "fill=\"{}\"/>\n",
                       g.left + 10.0, y - 4.0, kPalette[k % kPalette.size()]);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", g.left + 28.0,
                       y, escape(indicators[k].spec.label()));
  }
  svg += "</g>\n";

  if (count == 0) {
    svg += fmt::format("<text class=\"empty\" x=\"{:.2f}\" y=\"{:.2f}\" "
                       "text-anchor=\"middle\" fill=\"#888888\">No data</text>\n",
                       g.left + g.width / 2.0, g.top + g.height / 2.0);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace movavg
