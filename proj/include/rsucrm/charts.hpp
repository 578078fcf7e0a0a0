#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "rsucrm/harness.hpp"

namespace rsucrm {

namespace detail {

inline const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                      "#ff7f0e", "#9467bd", "#8c564b"};

inline std::string svg_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// One line chart: x = step, y = the metric's mean over seeds, one polyline
// per method.
inline std::string render_chart(
    const std::string& title,
    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  const double width = 640, height = 400;
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  std::size_t steps = 0;
  double ymax = 0;
  for (const auto& [name, ys] : series) {
    steps = std::max(steps, ys.size());
    for (double y : ys) ymax = std::max(ymax, y);
  }
  if (ymax <= 0) ymax = 1;
  ymax *= 1.05;

  auto sx = [&](double step) {
    return left + (steps > 1 ? step / static_cast<double>(steps - 1) : 0.5) * plot_w;
  };
  auto sy = [&](double v) { return top + plot_h - v / ymax * plot_h; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_number(width) +
       "\" height=\"" + svg_number(height) + "\" viewBox=\"0 0 " +
       svg_number(width) + " " + svg_number(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + svg_number(width / 2) +
       "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"15\">" + title + "</text>\n";

  // Axes and ticks.
  s += "<line x1=\"" + svg_number(left) + "\" y1=\"" + svg_number(top) +
       "\" x2=\"" + svg_number(left) + "\" y2=\"" + svg_number(top + plot_h) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + svg_number(left) + "\" y1=\"" + svg_number(top + plot_h) +
       "\" x2=\"" + svg_number(left + plot_w) + "\" y2=\"" +
       svg_number(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = ymax * i / 5;
    const double y = sy(v);
    s += "<line x1=\"" + svg_number(left - 4) + "\" y1=\"" + svg_number(y) +
         "\" x2=\"" + svg_number(left) + "\" y2=\"" + svg_number(y) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + svg_number(left - 8) + "\" y=\"" + svg_number(y + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         svg_number(v) + "</text>\n";
  }
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = sx(static_cast<double>(i));
    s += "<line x1=\"" + svg_number(x) + "\" y1=\"" + svg_number(top + plot_h) +
         "\" x2=\"" + svg_number(x) + "\" y2=\"" + svg_number(top + plot_h + 4) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + svg_number(x) + "\" y=\"" + svg_number(top + plot_h + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         std::to_string(i) + "</text>\n";
  }
  s += "<text x=\"" + svg_number(left + plot_w / 2) + "\" y=\"" +
       svg_number(height - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       "step</text>\n";

  // Series and legend.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& [name, ys] = series[si];
    const char* color = kSeriesColors[si % 6];
    std::string pts;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (!pts.empty()) pts += ' ';
      pts += svg_number(sx(static_cast<double>(i))) + "," + svg_number(sy(ys[i]));
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    const double ly = top + 8 + static_cast<double>(si) * 16;
    s += "<line x1=\"" + svg_number(left + plot_w - 110) + "\" y1=\"" +
         svg_number(ly) + "\" x2=\"" + svg_number(left + plot_w - 90) +
         "\" y2=\"" + svg_number(ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + svg_number(left + plot_w - 84) + "\" y=\"" +
         svg_number(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + name + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace detail

// Writes one SVG per plotted metric into `dir` and returns the file paths.
// Each chart shows the metric's per-step mean over seeds, one series per
// method; infeasible rows are left out of the means.
inline std::vector<std::filesystem::path> emit_charts(
    const std::vector<MetricsRow>& rows, const std::filesystem::path& dir) {
  struct Metric {
    const char* name;
    double (*get)(const MetricsRow&);
  };
  static const Metric kMetrics[] = {
      {"vm_migrations_added",
       [](const MetricsRow& r) { return static_cast<double>(r.vm_migrations_added); }},
      {"control_plane_ops",
       [](const MetricsRow& r) { return static_cast<double>(r.control_plane_ops); }},
      {"host_count",
       [](const MetricsRow& r) { return static_cast<double>(r.host_count); }},
      {"total_infrastructure_delay_s",
       [](const MetricsRow& r) { return r.total_infrastructure_delay_s; }},
  };

  std::filesystem::create_directories(dir);
  std::vector<std::string> methods;
  int max_step = 0;
  for (const MetricsRow& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    max_step = std::max(max_step, r.step);
  }

  std::vector<std::filesystem::path> files;
  for (const Metric& metric : kMetrics) {
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (const std::string& method : methods) {
      std::vector<double> sums(static_cast<std::size_t>(max_step + 1), 0);
      std::vector<int> counts(static_cast<std::size_t>(max_step + 1), 0);
      for (const MetricsRow& r : rows) {
        if (r.method != method || r.infeasible) continue;
        sums[static_cast<std::size_t>(r.step)] += metric.get(r);
        ++counts[static_cast<std::size_t>(r.step)];
      }
      std::vector<double> ys(sums.size(), 0);
      for (std::size_t i = 0; i < sums.size(); ++i) {
        ys[i] = counts[i] > 0 ? sums[i] / counts[i] : 0;
      }
      series.push_back({method, std::move(ys)});
    }
    const std::filesystem::path file =
        dir / ("metric_" + std::string(metric.name) + ".svg");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << detail::render_chart(metric.name, series);
    files.push_back(file);
  }
  return files;
}

}  // namespace rsucrm
