#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace fibermatch::app {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string config_hash;
};

void write_line_plot(const std::filesystem::path& path, const PlotLabels& labels, const std::vector<Series>& series);

// Heat map of values[row * columns + col]; rows run along y.
void write_heatmap(const std::filesystem::path& path, const PlotLabels& labels, const std::vector<double>& x,
                   const std::vector<double>& y, const std::vector<double>& values);

}  // namespace fibermatch::app
