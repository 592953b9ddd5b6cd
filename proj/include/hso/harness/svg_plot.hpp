#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hso::harness {

struct Series {
  std::string label;
  std::vector<double> values;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "t [s]";
  bool log_y = false;
  int width = 720;
  int height = 420;
};

/// Static line chart. Non-finite samples (and non-positive ones on a log
/// axis) break the polyline.
std::string line_chart_svg(const std::vector<double>& x,
                           const std::vector<Series>& series,
                           const ChartOptions& options);

void write_line_chart(const std::filesystem::path& path,
                      const std::vector<double>& x,
                      const std::vector<Series>& series,
                      const ChartOptions& options);

}  // namespace hso::harness
