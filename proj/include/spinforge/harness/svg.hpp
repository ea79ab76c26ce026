#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spinforge {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  bool markers = false;
};

/// Minimal line plot. Non-finite points break the line; log axes drop non-positive values.
struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;

  std::string render(int width = 640, int height = 420) const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace spinforge
