#include "fibermatch/app/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include "fibermatch/error.hpp"

namespace fibermatch::app {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#111111"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(hi >= lo)) lo = 0.0, hi = 1.0;
    if (hi == lo) hi = lo + 1.0;
  }
};

std::string frame(const PlotLabels& labels, const Extent& x, const Extent& y) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<!-- config_hash={2} -->\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight, labels.config_hash);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
                   pw, ph);
  s += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
                   kLeft + pw / 2, escape(labels.title));
  s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                   kLeft + pw / 2, kHeight - 12, escape(labels.x_label));
  s += fmt::format(
      "<text x=\"16\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
      kTop + ph / 2, escape(labels.y_label));
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    const double xv = x.lo + t * (x.hi - x.lo);
    const double yv = y.lo + t * (y.hi - y.lo);
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{:.4g}</text>\n",
                     kLeft + t * pw, kTop + ph + 14, xv);
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.4g}</text>\n",
                     kLeft - 4, kTop + ph - t * ph + 3, yv);
  }
  return s;
}

void save(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Data, "cannot write " + path.string());
  out << text;
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const PlotLabels& labels, const std::vector<Series>& series) {
  Extent x, y;
  for (const auto& s : series) {
    for (double v : s.x) x.add(v);
    for (double v : s.y) y.add(v);
  }
  x.settle();
  y.settle();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  std::string svg = frame(labels, x, y);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string points;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", kLeft + (s.x[i] - x.lo) / (x.hi - x.lo) * pw,
                            kTop + ph - (s.y[i] - y.lo) / (y.hi - y.lo) * ph);
    }
    const char* colour = kPalette[k % kPalette.size()];
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", colour, points);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
                       kLeft + pw - 150, kTop + 16 + 14 * static_cast<double>(k), colour, escape(s.name));
  }
  svg += "</svg>\n";
  save(path, svg);
}

void write_heatmap(const std::filesystem::path& path, const PlotLabels& labels, const std::vector<double>& x,
                   const std::vector<double>& y, const std::vector<double>& values) {
  if (values.size() != x.size() * y.size()) throw InvalidArgument("write_heatmap: size mismatch");
  Extent xe, ye, ve;
  for (double v : x) xe.add(v);
  for (double v : y) ye.add(v);
  for (double v : values) ve.add(v);
  xe.settle();
  ye.settle();
  ve.settle();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double cw = pw / static_cast<double>(std::max<std::size_t>(x.size(), 1));
  const double ch = ph / static_cast<double>(std::max<std::size_t>(y.size(), 1));
  std::string svg = frame(labels, xe, ye);
  for (std::size_t row = 0; row < y.size(); ++row) {
    for (std::size_t col = 0; col < x.size(); ++col) {
      const double t = (values[row * x.size() + col] - ve.lo) / (ve.hi - ve.lo);
      const int red = static_cast<int>(255.0 * std::clamp(t, 0.0, 1.0));
      const int blue = 255 - red;
      svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"rgb({},{},{})\"/>\n",
                         kLeft + static_cast<double>(col) * cw, kTop + ph - static_cast<double>(row + 1) * ch, cw + 0.05,
                         ch + 0.05, red, red / 3, blue);
    }
  }
  svg += "</svg>\n";
  save(path, svg);
}

}  // namespace fibermatch::app
